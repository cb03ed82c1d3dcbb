import json
import math

import pytest
from hypothesis import given, strategies as st

from dtraj.errors import ConfigError, DomainError, OutOfRange
from dtraj.model import (
    ContinuousState,
    JointSpec,
    QuantizedState,
    RobotSpec,
    action_space_size,
    format_count,
    position_grid_range,
    quantize,
    representative,
    robot_from_dict,
    state_space_size,
    trajectory_upper_bound,
    velocity_grid_range,
)
from conftest import DEG, demo_joint


def make_robot(**joint_overrides) -> RobotSpec:
    base = dict(
        name="j",
        q_min=-135 * DEG,
        q_max=135 * DEG,
        delta_q=2 * DEG,
        v_min=-180 * DEG,
        v_max=180 * DEG,
        mass=1.0,
        length=1.0,
        torques=(-50.0, -25.0, 0.0, 25.0, 50.0),
    )
    base.update(joint_overrides)
    return RobotSpec(delta_t=0.04, gravity=9.81, joints=(JointSpec(**base),))


class TestQuantize:
    def test_reference_point(self, pendulum):
        # 2.29 deg is 1.145 cells, 114.6 deg/s is 2.292 velocity cells
        s = ContinuousState((2.29 * DEG,), (114.6 * DEG,))
        q = quantize(s, pendulum)
        assert q == QuantizedState((1,), (2,))

    def test_rounds_half_away_from_zero(self, pendulum):
        assert quantize(ContinuousState((1.0 * DEG,), (0.0,)), pendulum).pos_idx == (1,)
        assert quantize(ContinuousState((-1.0 * DEG,), (0.0,)), pendulum).pos_idx == (-1,)
        assert quantize(ContinuousState((0.0,), (25.0 * DEG,)), pendulum).vel_idx == (1,)
        assert quantize(ContinuousState((0.0,), (-25.0 * DEG,)), pendulum).vel_idx == (-1,)

    def test_rejects_beyond_limits(self, pendulum):
        with pytest.raises(OutOfRange):
            quantize(ContinuousState((135.0 * DEG,), (0.0,)), pendulum)
        with pytest.raises(OutOfRange):
            quantize(ContinuousState((0.0,), (176.0 * DEG,)), pendulum)

    @given(pos=st.integers(-67, 67), vel=st.integers(-3, 3))
    def test_round_trip_on_grid(self, pos, vel):
        robot = make_robot()
        s = QuantizedState((pos,), (vel,))
        assert quantize(representative(s, robot), robot) == s

    @given(
        q=st.floats(-134 * DEG, 134 * DEG),
        v=st.floats(-174 * DEG, 174 * DEG),
    )
    def test_quantize_error_within_half_cell(self, q, v):
        robot = make_robot()
        s = quantize(ContinuousState((q,), (v,)), robot)
        rep = representative(s, robot)
        assert abs(rep.q[0] - q) <= robot.joints[0].delta_q / 2 + 1e-12
        assert abs(rep.v[0] - v) <= robot.delta_v(0) / 2 + 1e-12


class TestSizes:
    def test_demo_grid(self, pendulum):
        j = pendulum.joints[0]
        lo, hi = position_grid_range(j)
        assert (lo, hi) == (-67, 67)
        vlo, vhi = velocity_grid_range(j, pendulum.delta_v(0))
        assert (vlo, vhi) == (-3, 3)
        assert state_space_size(pendulum) == 945
        assert action_space_size(pendulum) == 5

    def test_derived_velocity_resolution(self, pendulum):
        # delta_v = delta_q / delta_t = 50 deg/s
        assert pendulum.delta_v(0) == pytest.approx(50 * DEG)

    def test_upper_bound(self, pendulum):
        assert trajectory_upper_bound(pendulum, 0) == 945
        assert trajectory_upper_bound(pendulum, 3) == 945 * 125
        assert trajectory_upper_bound(pendulum, 50) == 945 * 5**50


class TestJointValidation:
    def test_demo_joint_is_valid(self):
        demo_joint().validate()

    def test_bad_ranges(self):
        with pytest.raises(DomainError):
            make_robot(q_min=10 * DEG, q_max=-10 * DEG).validate()
        with pytest.raises(DomainError):
            make_robot(delta_q=0.0).validate()
        with pytest.raises(DomainError):
            make_robot(v_min=200 * DEG, v_max=100 * DEG).validate()

    def test_torques_must_contain_zero_and_increase(self):
        with pytest.raises(DomainError):
            make_robot(torques=(-50.0, 25.0, 50.0)).validate()
        with pytest.raises(DomainError):
            make_robot(torques=(0.0, 25.0, 25.0)).validate()
        with pytest.raises(DomainError):
            make_robot(torques=(0.0, 50.0, 25.0)).validate()

    def test_limits_must_sit_on_grid(self):
        with pytest.raises(DomainError):
            make_robot(q_max=134.3 * DEG).validate()


class TestConfigIngestion:
    def good(self) -> dict:
        return json.loads(json.dumps({
            "delta_t_ms": 40,
            "gravity": 9.81,
            "joints": [{
                "name": "joint1",
                "q_min_deg": -135.0, "q_max_deg": 135.0, "delta_q_deg": 2.0,
                "v_min_deg_s": -180.0, "v_max_deg_s": 180.0,
                "mass_kg": 1.0, "length_m": 1.0,
                "torques_nm": [-50.0, -25.0, 0.0, 25.0, 50.0],
            }],
        }))

    def test_round_trip(self):
        robot = robot_from_dict(self.good())
        assert robot.delta_t == pytest.approx(0.04)
        assert robot.n_joints == 1
        assert state_space_size(robot) == 945

    def test_unknown_key_rejected(self):
        cfg = self.good()
        cfg["frobnicate"] = 1
        with pytest.raises(ConfigError):
            robot_from_dict(cfg)
        cfg = self.good()
        cfg["joints"][0]["surprise"] = 2
        with pytest.raises(ConfigError):
            robot_from_dict(cfg)

    def test_missing_key_rejected(self):
        cfg = self.good()
        del cfg["joints"][0]["mass_kg"]
        with pytest.raises(ConfigError):
            robot_from_dict(cfg)

    def test_bad_values_rejected(self):
        cfg = self.good()
        cfg["delta_t_ms"] = 0
        with pytest.raises(ConfigError):
            robot_from_dict(cfg)
        cfg = self.good()
        cfg["joints"][0]["mass_kg"] = True
        with pytest.raises(ConfigError):
            robot_from_dict(cfg)
        cfg = self.good()
        cfg["joints"][0]["torques_nm"] = [-50.0, 25.0]
        with pytest.raises((ConfigError, DomainError)):
            robot_from_dict(cfg)

    def test_gravity_defaults(self):
        cfg = self.good()
        del cfg["gravity"]
        assert robot_from_dict(cfg).gravity == pytest.approx(9.81)

    def test_content_hash_stability(self):
        a = robot_from_dict(self.good()).content_hash()
        b = robot_from_dict(self.good()).content_hash()
        assert a == b
        assert a.startswith("sha256:")
        cfg = self.good()
        cfg["joints"][0]["torques_nm"] = [-50.0, 0.0, 50.0]
        assert robot_from_dict(cfg).content_hash() != a


class TestFormatCount:
    def test_small_integers_print_plain(self):
        assert format_count(0) == "0"
        assert format_count(16) == "16"
        assert format_count(10**18) == str(10**18)

    def test_large_integers_scientific(self):
        assert format_count(10**18 + 1) == "1.00000e+18"
        assert format_count(6402011265027403632392176) == "6.40201e+24"

    def test_log_pair(self):
        assert format_count((1, math.log10(6.402e52))) == "6.40200e+52"
        assert format_count((0, -math.inf)) == "0"

    def test_mantissa_carry(self):
        # a mantissa that rounds up to 10.00000 must carry into the exponent
        assert format_count((1, 52.9999999)) == "1.00000e+53"

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            format_count(-3)
