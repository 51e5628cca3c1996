"""Tests for points, controls and limit trajectories."""

import json
import math
import os
import tempfile

import numpy as np
import pytest

from src.junction_lab.config.config import IntegratorConfig
from src.junction_lab.models.control import ControlSchedule
from src.junction_lab.models.points import Branch, NetworkPoint, PlanePoint
from src.junction_lab.models.trajectory import LimitSegment, LimitTrajectory, TrajectoryRecord


class TestPoints:
    """Test plane and network points."""

    def test_plane_point_parse(self):
        """Test parsing 'x1,x2'."""
        p = PlanePoint.parse(' 1.5, -2 ')

        assert (p.x1, p.x2) == (1.5, -2.0)
        assert p.norm() == pytest.approx(math.hypot(1.5, 2.0))

    def test_plane_point_rejects_bad_input(self):
        """Test malformed and non-finite points are rejected."""
        with pytest.raises(ValueError):
            PlanePoint.parse('1,2,3')
        with pytest.raises(ValueError):
            PlanePoint(x1=float('nan'), x2=0.0)

    def test_junction_has_radius_zero(self):
        """Test O has radius 0 and open branches positive radius."""
        with pytest.raises(ValueError):
            NetworkPoint(branch=Branch.O, radius=1.0)
        with pytest.raises(ValueError):
            NetworkPoint(branch=Branch.E, radius=0.0)
        assert NetworkPoint.on(Branch.N, 0.0).is_junction()

    def test_network_parse(self):
        """Test parsing 'O' and 'B,r'."""
        assert NetworkPoint.parse('O').is_junction()
        point = NetworkPoint.parse('w,2.5')
        assert point.branch is Branch.W
        assert point.to_plane() == PlanePoint(x1=-2.5, x2=0.0)

    def test_geodesic_distance(self):
        """Test distance along Γ goes through O between branches."""
        a = NetworkPoint.on(Branch.E, 1.0)
        b = NetworkPoint.on(Branch.N, 2.0)
        c = NetworkPoint.on(Branch.E, 3.0)

        assert a.distance(b) == 3.0
        assert a.distance(c) == 2.0
        assert a.distance(NetworkPoint.junction()) == 1.0

    def test_rotation(self):
        """Test quarter turns cycle E → N → W → S."""
        assert Branch.E.rotate(1) is Branch.N
        assert Branch.S.rotate(1) is Branch.E
        assert Branch.N.rotate(-1) is Branch.E
        assert Branch.O.rotate(3) is Branch.O
        assert NetworkPoint.on(Branch.W, 1.0).rotate(2) == NetworkPoint.on(Branch.E, 1.0)


class TestControlSchedule:
    """Test piecewise-constant controls."""

    def test_value_at_breakpoints(self):
        """Test pieces are right-continuous and the last piece persists."""
        alpha = ControlSchedule(
            breakpoints=[0.0, 1.0], values=[(1.0, 0.0), (0.0, -1.0)]
        )

        assert alpha.value_at(0.0).tolist() == [1.0, 0.0]
        assert alpha.value_at(1.0).tolist() == [0.0, -1.0]
        assert alpha.value_at(5.0).tolist() == [0.0, -1.0]

    def test_integral(self):
        """Test ∫α across breakpoints."""
        alpha = ControlSchedule(
            breakpoints=[0.0, 1.0], values=[(1.0, 0.0), (0.0, -1.0)]
        )

        assert alpha.integral(2.5).tolist() == [1.0, -1.5]

    def test_breakpoints_validated(self):
        """Test breakpoints start at 0 and increase."""
        with pytest.raises(ValueError):
            ControlSchedule(breakpoints=[0.5], values=[(0.0, 0.0)])
        with pytest.raises(ValueError):
            ControlSchedule(breakpoints=[0.0, 0.0], values=[(0.0, 0.0), (1.0, 0.0)])

    def test_bound_enforced(self):
        """Test values outside the f_inf ball are rejected."""
        with pytest.raises(ValueError):
            ControlSchedule.constant((1.0, 1.0), f_inf=1.0)

    def test_heading_within_bound(self):
        """Test e_θ built from cos/sin passes the bound check."""
        alpha = ControlSchedule.heading(1.25 * math.pi)

        assert alpha.f_inf == 1.0
        assert np.linalg.norm(alpha.value_at(0.0)) == pytest.approx(1.0)

    def test_from_pieces_merges_equal_neighbours(self):
        """Test equal consecutive values collapse into one piece."""
        alpha = ControlSchedule.from_pieces(
            [(0.0, (1.0, 0.0)), (0.5, (1.0, 0.0)), (1.0, (0.0, 1.0))]
        )

        assert alpha.breakpoints == [0.0, 1.0]

    def test_parse_forms(self):
        """Test every textual control form."""
        assert ControlSchedule.parse('zero').value_at(3.0).tolist() == [0.0, 0.0]
        heading = ControlSchedule.parse('theta=0')
        assert heading.value_at(0.0).tolist() == [1.0, 0.0]
        fast = ControlSchedule.parse('3,4')
        assert fast.f_inf == 5.0
        pieces = ControlSchedule.parse('0:1,0;0.5:0,1')
        assert pieces.breakpoints == [0.0, 0.5]
        assert pieces.value_at(0.75).tolist() == [0.0, 1.0]

    def test_shifted(self):
        """Test a delayed schedule holds the prefix first."""
        alpha = ControlSchedule.constant((0.0, 1.0)).shifted(0.5)

        assert alpha.value_at(0.25).tolist() == [0.0, 0.0]
        assert alpha.value_at(0.75).tolist() == [0.0, 1.0]


class TestLimitTrajectory:
    """Test limit trajectory segments."""

    def test_segments_must_be_contiguous(self):
        """Test gaps between segments are rejected."""
        with pytest.raises(ValueError):
            LimitTrajectory(
                segments=[
                    LimitSegment(t0=0.0, t1=1.0, location=Branch.O),
                    LimitSegment(t0=1.5, t1=2.0, location=Branch.O),
                ]
            )

    def test_affine_state(self):
        """Test affine segments move at their speed and stop at O."""
        traj = LimitTrajectory(
            segments=[
                LimitSegment(t0=0.0, t1=1.0, location=Branch.N, r0=1.0, speed=-1.0),
                LimitSegment(t0=1.0, t1=2.0, location=Branch.W, r0=0.0, speed=0.5),
            ]
        )

        assert traj.state_at(0.5) == NetworkPoint.on(Branch.N, 0.5)
        assert traj.state_at(1.0).is_junction()
        assert traj.state_at(2.0) == NetworkPoint.on(Branch.W, 0.5)
        assert traj.branches_visited() == [Branch.N, Branch.W]
        assert traj.speed_ok()

    def test_k_jump(self):
        """Test k(0⁺) = x − x̄."""
        traj = LimitTrajectory(
            segments=[LimitSegment(t0=0.0, t1=1.0, location=Branch.N, r0=1.0)],
            jump_from=PlanePoint(x1=1.0, x2=math.sqrt(2.0)),
            jump_to=NetworkPoint.on(Branch.N, 1.0),
        )

        assert traj.k_jump.tolist() == pytest.approx([1.0, math.sqrt(2.0) - 1.0])
        assert traj.to_dict()['jump']['xbar']['branch'] == 'N'

    def test_from_samples(self):
        """Test segment extraction from sampled states."""
        times = np.array([0.0, 0.5, 1.0, 1.5])
        states = np.array([[0.0, 0.0], [0.0, 0.0], [0.4, 1e-6], [0.9, 0.0]])

        traj = LimitTrajectory.from_samples(times, states, tol=1e-3)

        assert traj.branches_visited() == [Branch.O, Branch.E]
        assert traj.horizon == 1.5
        assert traj.state_at(1.5).radius == pytest.approx(0.9)


class TestTrajectoryRecord:
    """Test trajectory records and their manifests."""

    def setup_method(self):
        """Set up test fixtures."""
        self.cfg = IntegratorConfig(rel_tol=1e-9, min_samples=3)
        self.control = ControlSchedule.from_pieces([(0.0, (1.0, 0.0)), (0.5, (0.0, -1.0))])
        times = np.array([0.0, 0.5, 1.0])
        states = np.array([[0.5, 0.0], [1.0, 0.0], [1.0, 0.0]])
        self.record = TrajectoryRecord(
            eps=0.01,
            x=PlanePoint(x1=0.5, x2=0.0),
            control=self.control,
            horizon=1.0,
            times=times,
            states=states,
            k_states=np.array([[0.0, 0.0], [0.0, 0.0], [0.0, -0.5]]),
            drift_integral=np.array([[0.0, 0.0], [0.5, 0.0], [0.5, -0.5]]),
            integrator_config=self.cfg,
            metadata={'method': 'RK45', 'layer_entry_time': None},
        )

    def test_manifest_reloads(self):
        """Test ε, the control and the integrator config come back from the JSON."""
        with tempfile.TemporaryDirectory() as temp_dir:
            path = self.record.to_json(os.path.join(temp_dir, 'traj.json'))
            with open(path) as f:
                manifest = json.load(f)

        assert manifest['eps'] == 0.01
        assert manifest['x'] == [0.5, 0.0]
        assert manifest['horizon'] == 1.0
        assert manifest['samples'] == 3
        assert manifest['metadata']['layer_entry_time'] is None
        assert ControlSchedule(**manifest['control']) == self.control
        assert IntegratorConfig(**manifest['config']) == self.cfg

    def test_manifest_without_config(self):
        """Test records built without integrator settings write a null config."""
        record = self.record.model_copy(update={'integrator_config': None})

        assert record.to_manifest()['config'] is None

    def test_skorokhod_identity(self):
        """Test X + k = x + ∫f holds on the stored samples."""
        assert self.record.skorokhod_residual() == 0.0
