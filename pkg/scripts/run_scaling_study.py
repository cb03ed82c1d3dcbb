#!/usr/bin/env python3
"""Regenerate the path-count scaling study and print slope diagnostics.

Writes the CSV produced by the scaling table (one row per dof/step pair plus
the reference rows) and reports the fitted growth slopes so a change in the
counting code shows up as a number, not just a diff.
"""

import argparse
import json
import math
import sys

import numpy as np

from dtraj.lattice import scaling_table, write_scaling_csv
from dtraj.model import robot_from_dict


def parse_range(text):
    out = []
    for chunk in text.split(","):
        if "-" in chunk[1:]:
            lo, hi = chunk.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(chunk))
    return out


def fitted_slope(column, nodes):
    # the approx columns carry a -n*log10(2m+1) correction; fit it out
    A = np.array([[m, math.log10(2 * m + 1), 1.0] for m in nodes])
    y = np.array([column[m] for m in nodes])
    return float(np.linalg.solve(A, y)[0])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/pendulum.json")
    ap.add_argument("--dof", default="1-6")
    ap.add_argument("--max-steps", type=int, default=100)
    ap.add_argument("--separation-deg", type=float, default=20.0)
    ap.add_argument("--out", default="scaling.csv")
    args = ap.parse_args()

    with open(args.config) as fh:
        robot = robot_from_dict(json.load(fh))
    joint = robot.joints[0]

    dofs = parse_range(args.dof)
    rows = scaling_table(
        joint, dofs, args.max_steps, math.radians(args.separation_deg)
    )
    with open(args.out, "w") as fh:
        write_scaling_csv(rows, fh)
    print(f"wrote {len(rows)} rows to {args.out}")

    columns = {}
    for r in rows:
        if r.log10_count is not None and r.m != "*":
            columns.setdefault(r.n, {})[int(r.m)] = r.log10_count

    hi = args.max_steps
    nodes = (hi // 2, (hi // 2 + hi) // 2, hi)
    if len(set(nodes)) < 3:
        print("step range too short for slope fits", file=sys.stderr)
        return
    print(f"fitted log10-count slopes at steps {nodes}:")
    for tag in [str(n) for n in dofs] + ["go"]:
        col = columns.get(tag)
        if not col or any(m not in col for m in nodes):
            continue
        slope = fitted_slope(col, nodes)
        print(f"  n={tag:>2}: {slope:.6f}")
    n_max = max(dofs)
    print(f"reference: {n_max}*log10(3) = {n_max * math.log10(3):.6f}, "
          f"log10(361) = {math.log10(361):.6f}")


if __name__ == "__main__":
    main()
