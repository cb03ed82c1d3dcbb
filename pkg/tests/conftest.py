import math
import os

import pytest

from dtraj.model import JointSpec, RobotSpec

DEG = math.pi / 180.0
CONFIG_PATH = os.path.join(os.path.dirname(__file__), "..", "configs", "pendulum.json")


def demo_joint() -> JointSpec:
    return JointSpec(
        name="joint1",
        q_min=-135 * DEG,
        q_max=135 * DEG,
        delta_q=2 * DEG,
        v_min=-180 * DEG,
        v_max=180 * DEG,
        mass=1.0,
        length=1.0,
        torques=(-50.0, -25.0, 0.0, 25.0, 50.0),
    )


@pytest.fixture(scope="session")
def pendulum() -> RobotSpec:
    return RobotSpec(delta_t=0.04, gravity=9.81, joints=(demo_joint(),))


@pytest.fixture(scope="session")
def pendulum_table(pendulum):
    # built once; several suites replay against it
    from dtraj.transitions import find_transitions

    return find_transitions(pendulum)


@pytest.fixture(scope="session")
def config_path() -> str:
    return os.path.abspath(CONFIG_PATH)
