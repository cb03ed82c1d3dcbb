#!/usr/bin/env python3
"""Build the transition table for a robot config and summarize its shape."""

import argparse
import json
from collections import Counter

from dtraj.model import QuantizedState, robot_from_dict, state_space_size
from dtraj.trajectories import count_trajectories
from dtraj.transitions import export_dot, find_transitions, state_label, write_jsonl


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/pendulum.json")
    ap.add_argument("--nal", type=int, default=25)
    ap.add_argument("--jsonl", default=None, help="write the table here")
    ap.add_argument("--dot", default=None, help="write a DOT rendering here")
    ap.add_argument("--hops", type=int, default=3,
                    help="walk-count horizon for the reachability summary")
    args = ap.parse_args()

    with open(args.config) as fh:
        robot = robot_from_dict(json.load(fh))
    table = find_transitions(robot, nal=args.nal)

    total_grid = state_space_size(robot)
    statics = [t for t in table.transitions if t.is_static()]
    lens = Counter(len(t.actions) for t in table.transitions)
    outdeg = Counter(t.from_state.key() for t in table.transitions)

    print(f"robot hash        {table.robot_hash}")
    print(f"grid states       {total_grid}")
    print(f"reached states    {len(table.states)} "
          f"({100 * len(table.states) / total_grid:.1f}%)")
    print(f"transitions       {len(table.transitions)}")
    print(f"static self-loops {len(statics)} at "
          f"{[state_label(t.from_state) for t in statics]}")
    degs = sorted(outdeg.values())
    print(f"out-degree        min {degs[0]}  median {degs[len(degs) // 2]}  "
          f"max {degs[-1]}")
    print("sequence lengths  " + ", ".join(
        f"{n}t x{c}" for n, c in sorted(lens.items())))

    zero = QuantizedState((0,) * robot.n_joints, (0,) * robot.n_joints)
    if zero.key() in {s.key() for s in table.states}:
        print(f"walks from rest:")
        for n in range(args.hops + 1):
            c = count_trajectories(table, n)[zero]
            print(f"  {n} hops: {c}")

    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            write_jsonl(table, fh)
        print(f"wrote {args.jsonl}")
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(export_dot(table))
        print(f"wrote {args.dot}")


if __name__ == "__main__":
    main()
