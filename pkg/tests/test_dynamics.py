"""Tests for the penalized integrator and the a priori estimates."""

import math

import numpy as np
import pytest

from src.junction_lab.config.config import IntegratorConfig
from src.junction_lab.dynamics.estimates import (
    check_apriori_estimates,
    check_invariance,
    crossing_abscissa,
    equilibrium_point,
    field_residual,
    level_entry_constant,
    reach_time_bound,
    reach_time_validity,
    scaling_discrepancy,
)
from src.junction_lab.dynamics.integrator import (
    PerturbedIntegrator,
    entry_time,
    integrate_perturbed,
)
from src.junction_lab.exceptions import (
    DomainError,
    EstimateViolationError,
    StepBudgetError,
)
from src.junction_lab.geometry.penalty import invariance_threshold
from src.junction_lab.models.control import ControlSchedule
from src.junction_lab.models.points import PlanePoint


class TestIntegrator:
    """Test integration of the penalized ODE."""

    def setup_method(self):
        """Set up test fixtures."""
        self.cfg = IntegratorConfig(min_samples=51)

    def test_tangential_motion_on_network(self):
        """Test a start on Γ with a tangential control stays on the axis with k = 0."""
        traj = integrate_perturbed(
            PlanePoint(x1=0.5, x2=0.0),
            ControlSchedule.constant((1.0, 0.0)),
            1e-3,
            self.cfg,
        )

        assert np.all(traj.states[:, 1] == 0.0)
        assert traj.end_state[0] == pytest.approx(1.5, abs=1e-9)
        assert np.max(np.abs(traj.k_states)) <= 1e-12

    def test_samples_and_metadata(self):
        """Test the record covers [0, T] with the requested uniform samples."""
        traj = integrate_perturbed(
            PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 1e-2, self.cfg
        )

        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.0)
        assert np.all(np.diff(traj.times) > 0)
        assert len(traj.times) >= 51
        assert traj.metadata['method'] == 'RK45'
        assert traj.metadata['layer_level'] == pytest.approx(
            invariance_threshold(1.0, 1e-2)
        )
        assert traj.metadata['layer_entry_time'] is not None

    def test_skorokhod_identity(self):
        """Test X + k = x + ∫f at every sample."""
        traj = integrate_perturbed(
            PlanePoint(x1=0.8, x2=-0.6),
            ControlSchedule.heading(2.0),
            1e-2,
            self.cfg,
        )

        assert traj.skorokhod_residual() <= 1e-12
        assert traj.bound_violation() <= 1e-6

    def test_control_breakpoints_respected(self):
        """Test piecewise controls integrate across their breakpoints."""
        alpha = ControlSchedule.from_pieces([(0.0, (0.0, 1.0)), (0.5, (0.0, -1.0))])

        traj = integrate_perturbed(PlanePoint(x1=0.0, x2=0.0), alpha, 1e-2, self.cfg)

        assert traj.state_at(0.5)[1] == pytest.approx(0.5, abs=1e-7)
        assert traj.end_state[1] == pytest.approx(0.0, abs=1e-7)

    def test_diagnostic_k_agrees(self):
        """Test the direct quadrature of (1/ε)∫∇d matches k."""
        cfg = self.cfg.model_copy(update={'diagnose_k': True})

        traj = integrate_perturbed(
            PlanePoint(x1=1.0, x2=0.5), ControlSchedule.heading(1.0), 1e-2, cfg
        )

        assert traj.metadata['k_quadrature_gap'] <= 1e-5

    def test_invalid_eps(self):
        """Test nonpositive ε is a domain error."""
        with pytest.raises(DomainError):
            integrate_perturbed(PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 0.0)

    def test_invalid_horizon(self):
        """Test nonpositive horizons are a domain error."""
        integrator = PerturbedIntegrator(self.cfg)

        with pytest.raises(DomainError):
            integrator.run(
                PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 1e-2, horizon=0.0
            )

    def test_step_budget(self):
        """Test an exhausted step budget raises StepBudgetError."""
        cfg = self.cfg.model_copy(update={'max_steps': 5})

        with pytest.raises(StepBudgetError) as exc_info:
            integrate_perturbed(PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 1e-2, cfg)

        assert exc_info.value.details['steps'] > 5

    def test_entry_time(self):
        """Test the layer entry time respects its bound."""
        x = PlanePoint(x1=1.0, x2=1.0)
        eps, gamma = 1e-3, 0.5
        traj = integrate_perturbed(x, ControlSchedule.heading(0.3), eps, self.cfg)

        t = entry_time(traj, eps ** (4 * gamma / 3))

        assert t is not None
        assert 0 < t <= reach_time_bound(x, eps, gamma)

    def test_entry_time_not_reached(self):
        """Test an unreachable level reports None."""
        traj = integrate_perturbed(
            PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 1.0, self.cfg,
            horizon=0.01,
        )

        assert entry_time(traj, 1e-9) is None


class TestAprioriEstimates:
    """Test the a priori estimates as runtime checks."""

    def setup_method(self):
        """Set up test fixtures."""
        self.cfg = IntegratorConfig(min_samples=101)

    @pytest.mark.parametrize('eps', [1e-1, 1e-2, 1e-3])
    def test_estimates_hold(self, eps):
        """Test all estimates hold on an off-network start."""
        traj = integrate_perturbed(
            PlanePoint(x1=1.2, x2=-0.9), ControlSchedule.heading(0.7), eps, self.cfg
        )

        report = check_apriori_estimates(traj)

        assert report.passed, report.violations()
        assert {c.name for c in report.checks} == {
            'penalty_growth', 'penalty_integral', 'energy', 'position_bound', 'k_bound',
        }
        report.raise_for_violation()

    def test_violation_raises(self):
        """Test a negative slack forces a reported violation."""
        traj = integrate_perturbed(
            PlanePoint(x1=1.0, x2=1.0), ControlSchedule.zero(), 1e-2, self.cfg
        )

        report = check_apriori_estimates(traj, slack=-1e3)

        assert not report.passed
        with pytest.raises(EstimateViolationError):
            report.raise_for_violation()

    def test_invariance(self):
        """Test {d ≤ κε^(4/3)} is forward invariant once entered."""
        eps = 1e-2
        traj = integrate_perturbed(
            PlanePoint(x1=1.0, x2=0.7), ControlSchedule.heading(0.25 * math.pi), eps,
            self.cfg,
        )

        check = check_invariance(traj, invariance_threshold(1.0, eps))

        assert check.entered_at is not None
        assert check.passed

    def test_reach_time_helpers(self):
        """Test the closed-form entry bounds."""
        x = PlanePoint(x1=1.0, x2=2.0)

        assert reach_time_bound(x, 1e-4, 0.5) == pytest.approx(4 * math.sqrt(2) * 1e-2)
        assert reach_time_validity(1.0, 0.5) == pytest.approx((4 / 7) ** -2)
        assert reach_time_validity(0.0, 0.5) == math.inf
        assert level_entry_constant(x, 1.0, 1.0) == pytest.approx(math.sqrt(5) + 1 + 0.5)


class TestJunctionLocalStructure:
    """Test the equilibrium, crossing and scaling properties near O."""

    @pytest.mark.parametrize('theta', [1.1 * math.pi, 1.25 * math.pi, 1.4 * math.pi])
    def test_equilibrium_residual(self, theta):
        """Test the closed-form rest point zeroes the field."""
        eps = 1e-3
        p = equilibrium_point(theta, eps)

        assert p.x1 < 0 and p.x2 < 0
        assert field_residual(p, theta, eps) <= 1e-9

    def test_equilibrium_needs_third_quadrant(self):
        """Test the formula is rejected outside the open third quadrant."""
        with pytest.raises(DomainError):
            equilibrium_point(0.25 * math.pi, 1e-3)
        with pytest.raises(DomainError):
            equilibrium_point(0.75 * math.pi, 1e-3)

    def test_crossing_abscissa(self):
        """Test the first crossing from e_N lands in the negative window."""
        theta = 1.25 * math.pi

        c = crossing_abscissa(theta, 1e-3, IntegratorConfig(min_samples=201))

        assert c.t_eps <= c.t_bound * (1 + 1e-9)
        assert c.lower_bound <= c.eta < 0
        assert c.ratio < 0

    def test_crossing_domain(self):
        """Test angles outside (π, 3π/2] are rejected."""
        with pytest.raises(DomainError):
            crossing_abscissa(0.5 * math.pi, 1e-3)

    def test_scaling_law(self):
        """Test X^{x,ε}(t) = (1/ρ)X^{ρx,ρ³ε}(ρt)."""
        cfg = IntegratorConfig(min_samples=51)
        x = PlanePoint(x1=0.6, x2=-0.4)

        gap = scaling_discrepancy(x, 2.5, 2.0, 1e-2, 0.5, cfg)

        assert gap <= 1e-5
