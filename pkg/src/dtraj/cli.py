"""Single executable exposing every operation as a subcommand.

Design rules: degrees at the boundary, radians inside; all data on stdout or
--out, all diagnostics on stderr; byte-identical stdout for identical inputs.
Every dispatched run emits a one-line JSON manifest to stderr recording the
tool version, config hash, subcommand, flags, and wall-clock duration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from typing import IO, Callable

from . import __version__
from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    DtrajError,
    NumericalOverflow,
    ResourceLimit,
)
from .lattice import (
    CorridorSpec,
    corridor_count_1d,
    corridor_count_dp,
    corridor_count_nd,
    full_move_set,
    scaling_table,
    write_scaling_csv,
)
from .model import (
    QuantizedState,
    action_space_size,
    format_count,
    load_robot,
    state_space_size,
    trajectory_upper_bound,
)
from .trajectories import (
    count_trajectories,
    enumerate_trajectories,
    load_desired_csv,
    plan_action_sequence,
    write_plan_json,
)
from .transitions import (
    export_dot,
    find_transitions,
    read_jsonl,
    state_label,
    write_jsonl,
    DEFAULT_MAX_SEQUENCES,
    DEFAULT_MAX_STATES,
    DEFAULT_NAL,
)


def _write_output(path: str | None, emit: Callable[[IO[str]], None]) -> None:
    """Write via a temp file and rename; a failed write leaves nothing behind."""
    if path is None:
        emit(sys.stdout)
        return
    target = os.path.abspath(path)
    directory = os.path.dirname(target)
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dtraj-", suffix=".tmp")
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e}") from None
    try:
        with os.fdopen(fd, "w") as fh:
            emit(fh)
        os.replace(tmp, target)
    except OSError as e:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise ConfigError(f"cannot write {path}: {e}") from None
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _parse_state(text: str, n_joints: int) -> QuantizedState:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"state must look like 'pos,vel' (got {text!r})")
    try:
        pos = tuple(int(x) for x in parts[0].split())
        vel = tuple(int(x) for x in parts[1].split())
    except ValueError:
        raise ConfigError(f"state indices must be integers (got {text!r})") from None
    if len(pos) != n_joints or len(vel) != n_joints:
        raise ConfigError(
            f"state has {len(pos)} position / {len(vel)} velocity entries, "
            f"robot has {n_joints} joints"
        )
    return QuantizedState(pos, vel)


def _parse_int_list(text: str, flag: str) -> list[int]:
    out: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if "-" in chunk[1:]:
            lo_s, hi_s = chunk.split("-", 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise ConfigError(f"{flag}: bad range {chunk!r}") from None
            if hi < lo:
                raise ConfigError(f"{flag}: empty range {chunk!r}")
            out.extend(range(lo, hi + 1))
        else:
            try:
                out.append(int(chunk))
            except ValueError:
                raise ConfigError(f"{flag}: bad integer {chunk!r}") from None
    if not out:
        raise ConfigError(f"{flag}: empty list")
    return out


def _parse_csv_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"{flag}: expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_transitions(args, ctx) -> None:
    robot = load_robot(args.config)
    ctx["config_hash"] = robot.content_hash()
    start = _parse_state(args.start, robot.n_joints) if args.start else None
    table = find_transitions(
        robot,
        start=start,
        nal=args.nal,
        dedup=args.dedup,
        max_states=args.max_states,
        max_sequences=args.max_sequences,
    )
    _write_output(args.out, lambda fh: write_jsonl(table, fh))
    if args.dot:
        _write_output(args.dot, lambda fh: fh.write(export_dot(table)))


def _load_table(path: str):
    try:
        fh = open(path)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    with fh:
        return read_jsonl(fh)


def _cmd_enumerate(args, ctx) -> None:
    table = _load_table(args.transitions)
    if args.start:
        starts = [_parse_state(args.start, len(table.states[0].pos_idx))]
        for s in starts:
            table.state_index(s)
    else:
        starts = list(table.states)
    if args.count_only:
        counts = count_trajectories(table, args.steps)

        def emit(fh: IO[str]) -> None:
            for s in starts:
                fh.write(f"{state_label(s)}\t{format_count(counts[s])}\n")

        _write_output(args.out, emit)
    else:
        def emit(fh: IO[str]) -> None:
            for traj in enumerate_trajectories(table, starts, args.steps, budget=args.budget):
                fh.write("\t".join(state_label(s) for s in traj.states()) + "\n")

        _write_output(args.out, emit)


def _cmd_plan(args, ctx) -> None:
    robot = load_robot(args.config)
    ctx["config_hash"] = robot.content_hash()
    table = _load_table(args.transitions)
    if table.robot_hash and table.robot_hash != robot.content_hash():
        print(
            "warning: transition table was built from a different robot config",
            file=sys.stderr,
        )
    try:
        fh = open(args.desired)
    except OSError as e:
        raise ConfigError(f"cannot read {args.desired}: {e}") from None
    with fh:
        desired = load_desired_csv(fh)
    result = plan_action_sequence(table, desired, robot)
    _write_output(args.out, lambda fh: write_plan_json(result, fh))


def _cmd_count_corridor(args, ctx) -> None:
    if args.move_set != "full1":
        raise ConfigError(f"unsupported move set {args.move_set!r}")
    if args.exact:
        spec = CorridorSpec(d=(args.d,), move_set=full_move_set(1))
        pc = corridor_count_dp(spec, (args.from_,), (args.to,), args.steps)
    else:
        pc = corridor_count_1d(args.d, args.from_, args.to, args.steps)
    _write_output(args.out, lambda fh: fh.write(pc.display() + "\n"))


def _cmd_count_ndim(args, ctx) -> None:
    d = _parse_csv_ints(args.d, "--d")
    a = _parse_csv_ints(args.from_, "--from")
    b = _parse_csv_ints(args.to, "--to")
    spec = CorridorSpec(d=d, move_set=full_move_set(len(d)))
    method = "direct" if args.direct else "factorized"
    pc = corridor_count_nd(spec, a, b, args.steps, method=method)
    _write_output(args.out, lambda fh: fh.write(pc.display() + "\n"))


def _cmd_count_bounds(args, ctx) -> None:
    robot = load_robot(args.config)
    ctx["config_hash"] = robot.content_hash()
    lines = [
        f"states {state_space_size(robot)}",
        f"actions {action_space_size(robot)}",
        f"upper_bound {format_count(trajectory_upper_bound(robot, args.steps))}",
    ]
    _write_output(args.out, lambda fh: fh.write("\n".join(lines) + "\n"))


def _cmd_count_scaling(args, ctx) -> None:
    robot = load_robot(args.config)
    ctx["config_hash"] = robot.content_hash()
    dofs = _parse_int_list(args.dof, "--dof")
    steps = _parse_int_list(args.steps, "--steps")
    if steps[0] != 1 or steps != list(range(1, len(steps) + 1)):
        raise ConfigError("--steps must be a contiguous range starting at 1, e.g. 1-100")
    separation = math.radians(args.separation_deg)
    rows = scaling_table(robot.joints[0], dofs, len(steps), separation)
    _write_output(args.out, lambda fh: write_scaling_csv(rows, fh))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dtraj",
        description="Quantized robot states, atomic transitions, and trajectory counting.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    workers_help = "accepted for interface stability; execution is single-process"

    t = sub.add_parser("transitions", help="discover atomic transitions by search")
    t.add_argument("--config", required=True, help="robot config JSON")
    t.add_argument("--start", default=None, help='start state "pos,vel" (default all-zero)')
    t.add_argument("--nal", type=int, default=DEFAULT_NAL,
                   help="ticks after which a quiescent sequence is static")
    t.add_argument("--dedup", choices=["all", "shortest"], default="all")
    t.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    t.add_argument("--max-sequences", type=int, default=DEFAULT_MAX_SEQUENCES)
    t.add_argument("--out", default=None, help="output JSONL path (default stdout)")
    t.add_argument("--dot", default=None, help="also write a DOT graph here")
    t.add_argument("--workers", type=int, default=None, help=workers_help)
    t.set_defaults(func=_cmd_transitions)

    e = sub.add_parser("enumerate", help="enumerate or count fixed-length trajectories")
    e.add_argument("--transitions", required=True, help="transitions JSONL path")
    e.add_argument("--steps", type=int, required=True)
    e.add_argument("--start", default=None, help='restrict to one start state "pos,vel"')
    e.add_argument("--count-only", action="store_true")
    e.add_argument("--budget", type=int, default=10_000_000)
    e.add_argument("--out", default=None)
    e.add_argument("--workers", type=int, default=None, help=workers_help)
    e.set_defaults(func=_cmd_enumerate)

    pl = sub.add_parser("plan", help="greedy action-sequence planning")
    pl.add_argument("--transitions", required=True)
    pl.add_argument("--config", required=True)
    pl.add_argument("--desired", required=True, help="CSV with header t_s,q1_deg[,...]")
    pl.add_argument("--out", default=None)
    pl.set_defaults(func=_cmd_plan)

    c = sub.add_parser("count", help="corridor walk counting and bounds")
    csub = c.add_subparsers(dest="count_command", required=True)

    cc = csub.add_parser("corridor", help="1-D corridor count")
    cc.add_argument("--d", type=int, required=True)
    cc.add_argument("--from", dest="from_", type=int, required=True)
    cc.add_argument("--to", type=int, required=True)
    cc.add_argument("--steps", type=int, required=True)
    cc.add_argument("--exact", action="store_true", help="use the exact DP oracle")
    cc.add_argument("--move-set", default="full1", help="only full1 is defined")
    cc.add_argument("--out", default=None)
    cc.add_argument("--workers", type=int, default=None, help=workers_help)
    cc.set_defaults(func=_cmd_count_corridor)

    cn = csub.add_parser("ndim", help="n-D corridor count (closed form)")
    cn.add_argument("--d", required=True, help="per-axis walls, e.g. 136,136,136")
    cn.add_argument("--from", dest="from_", required=True)
    cn.add_argument("--to", required=True)
    cn.add_argument("--steps", type=int, required=True)
    cn.add_argument("--direct", action="store_true",
                    help="full frequency-grid sum instead of the factorized fast path")
    cn.add_argument("--out", default=None)
    cn.add_argument("--workers", type=int, default=None, help=workers_help)
    cn.set_defaults(func=_cmd_count_ndim)

    cb = csub.add_parser("bounds", help="state/action counts and the |S|*|A|^m bound")
    cb.add_argument("--config", required=True)
    cb.add_argument("--steps", type=int, required=True)
    cb.add_argument("--out", default=None)
    cb.set_defaults(func=_cmd_count_bounds)

    cs = csub.add_parser("scaling", help="path-count scaling table (CSV)")
    cs.add_argument("--config", required=True)
    cs.add_argument("--dof", required=True, help="dof counts, e.g. 1-6 or 1,2,3,6")
    cs.add_argument("--steps", required=True, help="step range starting at 1, e.g. 1-100")
    cs.add_argument("--separation-deg", type=float, required=True)
    cs.add_argument("--out", default=None)
    cs.add_argument("--workers", type=int, default=None, help=workers_help)
    cs.set_defaults(func=_cmd_count_scaling)

    return p


def _emit_manifest(args, ctx, t0: float) -> None:
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "tool_version": __version__,
        "config_hash": ctx.get("config_hash"),
        "subcommand": ctx["subcommand"],
        "flags": flags,
        "duration_s": time.monotonic() - t0,
    }
    print(json.dumps(manifest, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0

    subcommand = args.command
    if getattr(args, "count_command", None):
        subcommand = f"{args.command} {args.count_command}"
    ctx = {"config_hash": None, "subcommand": subcommand}
    t0 = time.monotonic()
    try:
        args.func(args, ctx)
        rc = 0
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        rc = 2
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        rc = 3
    except (BudgetExceeded, ResourceLimit) as e:
        print(f"error: {e}", file=sys.stderr)
        rc = 4
    except NumericalOverflow as e:
        print(f"error: {e}", file=sys.stderr)
        rc = 5
    except DtrajError as e:
        print(f"error: {e}", file=sys.stderr)
        rc = 3
    finally:
        _emit_manifest(args, ctx, t0)
    return rc


if __name__ == "__main__":
    sys.exit(main())
