"""Discrete robot description and quantization semantics.

A robot is a list of independently actuated joints sharing one clock. Positions
live on a grid of spacing delta_q anchored at angle 0, velocities on a grid of
spacing delta_v = delta_q / delta_t anchored at 0; both grids are clipped to the
joint limits. Two kinematic states are distinguishable exactly when they differ
in some integer grid coordinate.

Angles are radians and seconds/SI everywhere inside the package. Configuration
files speak degrees; the conversion happens exactly once, at ingestion.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, DomainError, OutOfRange

# An action is one torque index per joint, applied for exactly delta_t.
# A sequence of actions is the package's unit of actuation.
Action = tuple[int, ...]
ActionSequence = tuple[Action, ...]

_GRID_FIT_TOL = 1e-9


@dataclass(frozen=True)
class JointSpec:
    """One actuated joint: limits, resolutions, dynamics constants, torque menu."""

    name: str
    q_min: float
    q_max: float
    delta_q: float
    v_min: float
    v_max: float
    mass: float
    length: float
    torques: tuple[float, ...]

    def validate(self) -> None:
        if not (self.q_min < self.q_max):
            raise DomainError(f"joint {self.name}: q_min must be < q_max")
        if not (self.v_min < self.v_max):
            raise DomainError(f"joint {self.name}: v_min must be < v_max")
        if not (self.delta_q > 0):
            raise DomainError(f"joint {self.name}: delta_q must be positive")
        if not (self.mass > 0 and self.length > 0):
            raise DomainError(f"joint {self.name}: mass and length must be positive")
        if not self.torques:
            raise DomainError(f"joint {self.name}: torque list is empty")
        if any(b <= a for a, b in zip(self.torques, self.torques[1:])):
            raise DomainError(f"joint {self.name}: torques must be strictly increasing")
        if 0.0 not in self.torques:
            raise DomainError(f"joint {self.name}: torque list must contain 0")
        # the limit span must be an integer number of cells, else the grid
        # cannot represent the limits
        span = (self.q_max - self.q_min) / self.delta_q
        if abs(span - round(span)) > _GRID_FIT_TOL:
            raise DomainError(
                f"joint {self.name}: (q_max - q_min)/delta_q = {span} is not an integer"
            )

    def null_torque_idx(self) -> int:
        return self.torques.index(0.0)


@dataclass(frozen=True)
class RobotSpec:
    """A robot: ordered joints plus the shared clock resolution."""

    joints: tuple[JointSpec, ...]
    delta_t: float
    gravity: float = 9.81

    def validate(self) -> None:
        if not self.joints:
            raise DomainError("robot needs at least one joint")
        if not (self.delta_t > 0):
            raise DomainError("delta_t must be positive")
        for j in self.joints:
            j.validate()

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    def delta_v(self, i: int) -> float:
        """Velocity resolution of joint i, the grid-step position change per tick."""
        return self.joints[i].delta_q / self.delta_t

    def null_action(self) -> Action:
        return tuple(j.null_torque_idx() for j in self.joints)

    def canonical_dict(self) -> dict:
        """Stable plain-data form of the internal state, used for hashing."""
        return {
            "delta_t": repr(self.delta_t),
            "gravity": repr(self.gravity),
            "joints": [
                {
                    "name": j.name,
                    "q_min": repr(j.q_min),
                    "q_max": repr(j.q_max),
                    "delta_q": repr(j.delta_q),
                    "v_min": repr(j.v_min),
                    "v_max": repr(j.v_max),
                    "mass": repr(j.mass),
                    "length": repr(j.length),
                    "torques": [repr(t) for t in j.torques],
                }
                for j in self.joints
            ],
        }

    def content_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ContinuousState:
    """Internal representative between quantization events; never serialized."""

    q: tuple[float, ...]
    v: tuple[float, ...]


@dataclass(frozen=True)
class QuantizedState:
    """Integer grid coordinates; equality here IS distinguishability."""

    pos_idx: tuple[int, ...]
    vel_idx: tuple[int, ...]

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.pos_idx, self.vel_idx)


def _round_half_away(x: float) -> int:
    # symmetric around 0, deterministic
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def quantize(state: ContinuousState, robot: RobotSpec) -> QuantizedState:
    """Snap a continuous state to the grid; reject grid points beyond the limits."""
    pos = []
    vel = []
    for i, j in enumerate(robot.joints):
        pi = _round_half_away(state.q[i] / j.delta_q)
        vi = _round_half_away(state.v[i] / robot.delta_v(i))
        if not (j.q_min - _GRID_FIT_TOL <= pi * j.delta_q <= j.q_max + _GRID_FIT_TOL):
            raise OutOfRange(
                f"joint {j.name}: position grid point {pi} outside limits"
            )
        dv = robot.delta_v(i)
        if not (j.v_min - _GRID_FIT_TOL <= vi * dv <= j.v_max + _GRID_FIT_TOL):
            raise OutOfRange(
                f"joint {j.name}: velocity grid point {vi} outside limits"
            )
        pos.append(pi)
        vel.append(vi)
    return QuantizedState(tuple(pos), tuple(vel))


def representative(state: QuantizedState, robot: RobotSpec) -> ContinuousState:
    """Grid cell center as the simulation start point; inverse of quantize on the grid."""
    q = tuple(state.pos_idx[i] * robot.joints[i].delta_q for i in range(robot.n_joints))
    v = tuple(state.vel_idx[i] * robot.delta_v(i) for i in range(robot.n_joints))
    return ContinuousState(q, v)


def _grid_count(lo: float, hi: float, step: float) -> int:
    # number of multiples of step inside [lo, hi], tolerant at the boundaries
    hi_idx = math.floor(hi / step + _GRID_FIT_TOL)
    lo_idx = math.ceil(lo / step - _GRID_FIT_TOL)
    return hi_idx - lo_idx + 1


def position_grid_range(joint: JointSpec) -> tuple[int, int]:
    """Inclusive (lowest, highest) position index representable within the limits."""
    lo = math.ceil(joint.q_min / joint.delta_q - _GRID_FIT_TOL)
    hi = math.floor(joint.q_max / joint.delta_q + _GRID_FIT_TOL)
    return lo, hi


def velocity_grid_range(joint: JointSpec, delta_v: float) -> tuple[int, int]:
    lo = math.ceil(joint.v_min / delta_v - _GRID_FIT_TOL)
    hi = math.floor(joint.v_max / delta_v + _GRID_FIT_TOL)
    return lo, hi


def state_space_size(robot: RobotSpec) -> int:
    """Number of representable kinematic states: product of per-joint grid sizes."""
    robot.validate()
    total = 1
    for i, j in enumerate(robot.joints):
        n_pos = _grid_count(j.q_min, j.q_max, j.delta_q)
        n_vel = _grid_count(j.v_min, j.v_max, robot.delta_v(i))
        total *= n_pos * n_vel
    return total


def action_space_size(robot: RobotSpec) -> int:
    """Number of distinct one-tick torque vectors."""
    robot.validate()
    total = 1
    for j in robot.joints:
        total *= len(j.torques)
    return total


def trajectory_upper_bound(robot: RobotSpec, m: int) -> int:
    """Bound on m-tick trajectories: every state times every torque string of length m."""
    if m < 0:
        raise DomainError("m must be >= 0")
    return state_space_size(robot) * action_space_size(robot) ** m


# ---------------------------------------------------------------------------
# configuration ingestion

_ROBOT_KEYS = {"delta_t_ms", "gravity", "joints"}
_JOINT_KEYS = {
    "name",
    "q_min_deg",
    "q_max_deg",
    "delta_q_deg",
    "v_min_deg_s",
    "v_max_deg_s",
    "mass_kg",
    "length_m",
    "torques_nm",
}

_DEG = math.pi / 180.0


def _require_finite_number(obj: Mapping, key: str, where: str) -> float:
    val = obj.get(key)
    if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
        raise ConfigError(f"{where}: {key!r} must be a finite number")
    return float(val)


def robot_from_dict(cfg: Mapping) -> RobotSpec:
    """Build a RobotSpec from parsed configuration data. Unknown keys are rejected."""
    if not isinstance(cfg, Mapping):
        raise ConfigError("robot config must be a JSON object")
    unknown = set(cfg) - _ROBOT_KEYS
    if unknown:
        raise ConfigError(f"unknown robot config keys: {sorted(unknown)}")
    delta_t_ms = _require_finite_number(cfg, "delta_t_ms", "robot")
    if delta_t_ms <= 0:
        raise ConfigError("robot: delta_t_ms must be positive")
    gravity = 9.81
    if "gravity" in cfg:
        gravity = _require_finite_number(cfg, "gravity", "robot")
    joints_cfg = cfg.get("joints")
    if not isinstance(joints_cfg, Sequence) or isinstance(joints_cfg, (str, bytes)) or not joints_cfg:
        raise ConfigError("robot: 'joints' must be a non-empty list")

    joints = []
    for k, jc in enumerate(joints_cfg):
        where = f"joint[{k}]"
        if not isinstance(jc, Mapping):
            raise ConfigError(f"{where}: must be a JSON object")
        unknown = set(jc) - _JOINT_KEYS
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        missing = _JOINT_KEYS - set(jc)
        if missing:
            raise ConfigError(f"{where}: missing keys {sorted(missing)}")
        name = jc["name"]
        if not isinstance(name, str) or not name:
            raise ConfigError(f"{where}: 'name' must be a non-empty string")
        torques = jc["torques_nm"]
        if (
            not isinstance(torques, Sequence)
            or isinstance(torques, (str, bytes))
            or not torques
            or any(
                not isinstance(t, (int, float)) or isinstance(t, bool) or not math.isfinite(t)
                for t in torques
            )
        ):
            raise ConfigError(f"{where}: 'torques_nm' must be a list of finite numbers")
        joints.append(
            JointSpec(
                name=name,
                q_min=_require_finite_number(jc, "q_min_deg", where) * _DEG,
                q_max=_require_finite_number(jc, "q_max_deg", where) * _DEG,
                delta_q=_require_finite_number(jc, "delta_q_deg", where) * _DEG,
                v_min=_require_finite_number(jc, "v_min_deg_s", where) * _DEG,
                v_max=_require_finite_number(jc, "v_max_deg_s", where) * _DEG,
                mass=_require_finite_number(jc, "mass_kg", where),
                length=_require_finite_number(jc, "length_m", where),
                torques=tuple(float(t) for t in torques),
            )
        )

    robot = RobotSpec(joints=tuple(joints), delta_t=delta_t_ms / 1000.0, gravity=gravity)
    robot.validate()
    return robot


def load_robot(path: str) -> RobotSpec:
    """Load and validate a robot configuration file (UTF-8 JSON, degree units)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read robot config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"robot config {path!r} is not valid JSON: {exc}") from exc
    return robot_from_dict(cfg)


# ---------------------------------------------------------------------------
# count display

_INT_PRINT_LIMIT = 10**18


def format_count(value) -> str:
    """Counts print as exact integers up to 1e18, then as 6-significant-digit scientific.

    Accepts a nonnegative int, or a (sign, log10 magnitude) pair for values only
    known logarithmically.
    """
    if isinstance(value, int):
        if value < 0:
            raise DomainError("counts are nonnegative")
        if value <= _INT_PRINT_LIMIT:
            return str(value)
        return f"{Decimal(value):.5e}"
    sign, log10_mag = value
    if sign == 0:
        return "0"
    if sign < 0:
        raise DomainError("counts are nonnegative")
    exp = math.floor(log10_mag)
    mant = 10.0 ** (log10_mag - exp)
    mant = round(mant, 5)
    if mant >= 10.0:
        mant /= 10.0
        exp += 1
    return f"{mant:.5f}e+{exp:02d}"
