"""Discrete robot trajectories: quantized states, atomic transitions, walk counting."""

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    ConfigError,
    DomainError,
    DtrajError,
    NoFeasibleTransition,
    NumericalOverflow,
    OutOfRange,
    ResourceLimit,
    UnknownState,
)
from .model import (
    ContinuousState,
    JointSpec,
    QuantizedState,
    RobotSpec,
    action_space_size,
    format_count,
    load_robot,
    quantize,
    representative,
    robot_from_dict,
    state_space_size,
    trajectory_upper_bound,
)
from .dynamics import act, act_sequence, integrate_step, validation_check
from .transitions import (
    Transition,
    TransitionTable,
    atomic_action_count,
    export_dot,
    find_transitions,
    read_jsonl,
    write_jsonl,
)
from .trajectories import (
    DesiredTrajectory,
    PlanResult,
    Trajectory,
    count_trajectories,
    enumerate_trajectories,
    load_desired_csv,
    plan_action_sequence,
    write_plan_json,
)
from .lattice import (
    CorridorSpec,
    MoveSet,
    PathCount,
    approx_count_log10,
    corridor_count_1d,
    corridor_count_dp,
    corridor_count_nd,
    full_move_set,
    joint_to_corridor,
    move_kernel,
    nonnegative_subset,
    scaling_table,
)

__all__ = [
    "__version__",
    "BudgetExceeded", "ConfigError", "DomainError", "DtrajError",
    "NoFeasibleTransition", "NumericalOverflow", "OutOfRange",
    "ResourceLimit", "UnknownState",
    "ContinuousState", "JointSpec", "QuantizedState", "RobotSpec",
    "action_space_size", "format_count", "load_robot", "quantize",
    "representative", "robot_from_dict", "state_space_size",
    "trajectory_upper_bound",
    "act", "act_sequence", "integrate_step", "validation_check",
    "Transition", "TransitionTable", "atomic_action_count", "export_dot",
    "find_transitions", "read_jsonl", "write_jsonl",
    "DesiredTrajectory", "PlanResult", "Trajectory", "count_trajectories",
    "enumerate_trajectories", "load_desired_csv", "plan_action_sequence",
    "write_plan_json",
    "CorridorSpec", "MoveSet", "PathCount", "approx_count_log10",
    "corridor_count_1d", "corridor_count_dp", "corridor_count_nd",
    "full_move_set", "joint_to_corridor", "move_kernel",
    "nonnegative_subset", "scaling_table",
]
