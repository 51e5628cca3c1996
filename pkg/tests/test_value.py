"""Tests for costs, the value solvers and the value convergence study."""

import math
from unittest.mock import patch

import numpy as np
import pytest

from src.junction_lab.config.config import EdgeGridConfig, GridConfig, SolverConfig
from src.junction_lab.exceptions import ConvergenceError, DomainError
from src.junction_lab.limits.junction import constant_control_limit
from src.junction_lab.limits.surgery import restricted_control
from src.junction_lab.models.points import Branch, EDGE_BRANCHES, NetworkPoint, PlanePoint
from src.junction_lab.models.value import CostField, ValueProblem
from src.junction_lab.value.convergence import convergence_study
from src.junction_lab.value.cost import cost_functional, discounted_constant, tail_bound
from src.junction_lab.value.counterexample import (
    counterexample_costs,
    counterexample_sweep,
    network_lower_bound,
    upper_path_cost,
)
from src.junction_lab.value.grid_solver import control_set, grid_axes, solve_value_eps
from src.junction_lab.value.limit_value import (
    limit_values_on,
    solve_value_bar,
    steer_and_stay_cost,
)
from src.junction_lab.value.network_solver import (
    network_self_convergence,
    solve_value_network,
)


class TestCosts:
    """Test cost fields and value problems."""

    def test_cost_presets(self):
        """Test each preset evaluates as documented."""
        xy = np.array([[3.0, 4.0], [0.3, 0.4]])

        assert CostField.constant(2.0).evaluate(xy).tolist() == [2.0, 2.0]
        assert CostField.distance().evaluate(xy).tolist() == pytest.approx([5.0, 0.5])
        assert CostField.capped_distance(2.0).evaluate(xy).tolist() == pytest.approx(
            [2.0, 0.5]
        )
        assert CostField.counterexample().at((0.0, -1.0), (-0.5, 0.5)) == 3.0

    def test_counterexample_cost_needs_control(self):
        """Test the control-dependent cost refuses a missing control."""
        with pytest.raises(ValueError):
            CostField.counterexample().at((0.0, 1.0))

    def test_unknown_cost(self):
        """Test unknown cost names are rejected."""
        with pytest.raises(ValueError):
            CostField.from_name('quadratic')

    def test_mode_must_match_cost(self):
        """Test the problem mode agrees with the control dependence of ℓ."""
        with pytest.raises(ValueError):
            ValueProblem(lam=1.0, cost=CostField.counterexample(), mode='eikonal')
        with pytest.raises(ValueError):
            ValueProblem(lam=1.0, cost=CostField.constant(), mode='counterexample')

    def test_nonpositive_lambda(self):
        """Test λ must be positive."""
        with pytest.raises(ValueError):
            ValueProblem(lam=0.0, cost=CostField.constant())

    def test_value_bound(self):
        """Test M/λ."""
        prob = ValueProblem(lam=2.0, cost=CostField.capped_distance(3.0))

        assert prob.value_bound == 1.5


class TestCostFunctional:
    """Test discounted costs along trajectories."""

    def test_constant_cost_on_stationary_path(self):
        """Test a constant cost integrates in closed form with its tail bound."""
        prob = ValueProblem(lam=0.5, cost=CostField.constant(2.0))
        path = constant_control_limit(NetworkPoint.junction(), 0.25 * math.pi, 10.0)

        evaluation = cost_functional(path, prob)

        assert evaluation.value == pytest.approx(discounted_constant(2.0, 0.5, 10.0))
        assert evaluation.tail == pytest.approx(tail_bound(2.0, 0.5, 10.0))
        lo, hi = evaluation.interval
        assert lo - 1e-9 <= discounted_constant(2.0, 0.5) <= hi + 1e-9

    def test_control_dependent_cost_needs_control(self):
        """Test the counterexample cost requires the control schedule."""
        prob = ValueProblem(lam=1.0, cost=CostField.counterexample(), mode='counterexample')
        path = constant_control_limit(NetworkPoint.on(Branch.N, 1.0), 1.25 * math.pi, 1.0)

        with pytest.raises(DomainError):
            cost_functional(path, prob)


class TestCounterexample:
    """Test V̄ < V_Γ for the control-dependent cost."""

    def test_reference_values(self):
        """Test both closed forms at λ = 1."""
        assert upper_path_cost(1.0) == pytest.approx(1.0505898, abs=5e-8)
        assert network_lower_bound(1.0) == pytest.approx(1.3678794, abs=5e-8)

    def test_quadrature_agrees(self):
        """Test the quadrature of the sliding path matches its closed form."""
        result = counterexample_costs(1.0)

        assert result.strict
        assert result.numeric_gap <= 1e-6
        assert result.tail <= 1e-15

    def test_sweep_is_strict(self):
        """Test the gap is strict on a log-spaced λ sweep."""
        results = counterexample_sweep(5)

        assert [r.lam for r in results] == pytest.approx([0.1, 10 ** -0.5, 1.0, 10**0.5, 10.0])
        assert all(r.strict for r in results)

    def test_invalid_lambda(self):
        """Test λ must be positive."""
        with pytest.raises(DomainError):
            counterexample_costs(0.0)


class TestGridSolver:
    """Test the semi-Lagrangian solver for V^ε."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = GridConfig(region=(-1.0, 1.0, -1.0, 1.0), h=0.1, margin=0.2)

    def test_axes_include_zero(self):
        """Test the padded axes are aligned on 0."""
        xs, ys = grid_axes(self.grid)

        assert xs[0] == pytest.approx(-1.2)
        assert xs[-1] == pytest.approx(1.2)
        assert np.min(np.abs(ys)) == 0.0

    def test_control_set(self):
        """Test unit directions plus the zero control."""
        controls = control_set(8)

        assert controls.shape == (9, 2)
        assert np.linalg.norm(controls[:-1], axis=1) == pytest.approx(np.ones(8))
        assert controls[-1].tolist() == [0.0, 0.0]

    def test_constant_cost(self):
        """Test V^ε ≡ c/λ for a constant cost."""
        prob = ValueProblem(lam=2.0, cost=CostField.constant(1.0))

        vf = solve_value_eps(prob, 0.2, self.grid)

        assert np.max(np.abs(vf.values - 0.5)) <= 1e-12
        assert vf.within_bound()

    def test_capped_distance_bounded(self):
        """Test V^ε stays within M/λ and vanishes near O."""
        prob = ValueProblem(lam=1.0, cost=CostField.capped_distance(2.0))

        vf = solve_value_eps(prob, 0.2, self.grid, SolverConfig(n_directions=8))

        assert vf.within_bound()
        assert vf.iterations > 1
        assert float(vf.evaluate(np.array([[0.0, 0.0]]))[0]) <= 0.1

    def test_convergence_error(self):
        """Test the iteration cap raises ConvergenceError."""
        prob = ValueProblem(lam=1.0, cost=CostField.capped_distance(2.0))

        with pytest.raises(ConvergenceError):
            solve_value_eps(
                prob, 0.2, self.grid, SolverConfig(n_directions=8, max_iterations=2)
            )

    def test_rejects_control_dependent_cost(self):
        """Test the grid solver handles the Eikonal mode only."""
        prob = ValueProblem(lam=1.0, cost=CostField.counterexample(), mode='counterexample')

        with pytest.raises(DomainError):
            solve_value_eps(prob, 0.2, self.grid)


class TestNetworkSolver:
    """Test the value function on Γ."""

    def setup_method(self):
        """Set up test fixtures."""
        self.edge = EdgeGridConfig(radius=3.0, h=0.05)
        self.prob = ValueProblem(lam=1.0, cost=CostField.capped_distance(2.0))

    def test_constant_cost(self):
        """Test V_Γ ≡ c/λ for a constant cost."""
        prob = ValueProblem(lam=4.0, cost=CostField.constant(1.0))

        network = solve_value_network(prob, self.edge)

        assert network.junction_value == pytest.approx(0.25)
        for branch in EDGE_BRANCHES:
            assert np.max(np.abs(network.branch_values[branch] - 0.25)) <= 1e-12

    def test_capped_distance(self):
        """Test V_Γ(O) = 0, symmetry across branches and monotone profiles."""
        network = solve_value_network(self.prob, self.edge)

        assert network.junction_value == 0.0
        east = network.branch_values[Branch.E]
        for branch in EDGE_BRANCHES:
            assert network.branch_values[branch] == pytest.approx(east)
        assert np.all(np.diff(east) > 0)
        assert network.junction_gap() <= 0.05

    def test_matches_steer_and_stay(self):
        """Test V_Γ(E, 1) against the direct run into O."""
        network = solve_value_network(self.prob, self.edge)

        direct = steer_and_stay_cost(
            self.prob, NetworkPoint.on(Branch.E, 1.0), NetworkPoint.junction()
        )

        assert direct == pytest.approx(math.exp(-1.0), abs=1e-8)
        assert network.evaluate(NetworkPoint.on(Branch.E, 1.0)) == pytest.approx(
            direct, abs=0.05
        )

    def test_self_convergence(self):
        """Test halving the edge spacing barely moves V_Γ."""
        probes = [NetworkPoint.junction(), NetworkPoint.on(Branch.W, 1.0)]

        constant = network_self_convergence(
            ValueProblem(lam=1.0, cost=CostField.constant(1.0)), self.edge, probes
        )
        capped = network_self_convergence(self.prob, self.edge, probes)

        assert constant['change'] <= 1e-9
        assert capped['h'] == 0.05
        assert capped['change'] <= 0.05

    def test_truncation_slack(self):
        """Test the tail bound from the outer boundary decays towards O."""
        network = solve_value_network(self.prob, self.edge)

        assert network.boundary_slack.shape == network.radii.shape
        assert network.boundary_slack[-1] == pytest.approx(2.0)
        assert np.all(np.diff(network.boundary_slack) > 0)
        assert network.slack_at(NetworkPoint.junction()) == pytest.approx(2.0 * math.exp(-3.0))
        assert network.slack_at(NetworkPoint.on(Branch.N, 1.0)) == pytest.approx(
            2.0 * math.exp(-2.0)
        )
        assert network.slack_at(NetworkPoint.on(Branch.W, 5.0)) == pytest.approx(2.0)

    def test_spacing_must_be_small(self):
        """Test λ·h < 1 is required."""
        with pytest.raises(DomainError):
            solve_value_network(self.prob, EdgeGridConfig(radius=3.0, h=1.0))


class TestLimitValue:
    """Test V̄ = V_Γ ∘ φ_d."""

    def setup_method(self):
        """Set up test fixtures."""
        self.prob = ValueProblem(lam=1.0, cost=CostField.capped_distance(2.0))
        self.network = solve_value_network(self.prob, EdgeGridConfig(radius=3.0, h=0.05))

    def test_value_through_projection(self):
        """Test V̄(x) reads V_Γ at φ_d(x)."""
        result = solve_value_bar(self.prob, PlanePoint(x1=1.0, x2=2.0), self.network)

        assert result.xbar == NetworkPoint.on(Branch.N, math.sqrt(3.0))
        assert result.value == pytest.approx(self.network.evaluate(result.xbar))
        assert result.agrees is None

    def test_cross_check(self):
        """Test the optimized on-network plan and its restricted replay agree with V_Γ."""
        with patch(
            'src.junction_lab.value.limit_value.restricted_control',
            wraps=restricted_control,
        ) as replay:
            result = solve_value_bar(
                self.prob, PlanePoint(x1=0.5, x2=-1.0), self.network, cross_check=True
            )

        r0 = math.sqrt(0.75)
        assert replay.call_count == 1
        assert result.tolerance == pytest.approx(5 * 0.05)
        assert result.cross_check == pytest.approx(r0 - 1 + math.exp(-r0), abs=1e-3)
        assert result.optimum.target.radius <= 1e-3
        assert result.optimum.speed == pytest.approx(1.0, abs=1e-3)
        assert result.restricted is not None
        assert result.agrees

    def test_cross_check_flags_shifted_values(self):
        """Test network values moved by a constant are reported as disagreeing."""
        shifted = self.network.model_copy(
            update={
                'junction_value': self.network.junction_value + 1.0,
                'branch_values': {
                    b: v + 1.0 for b, v in self.network.branch_values.items()
                },
            }
        )

        result = solve_value_bar(
            self.prob, PlanePoint(x1=1.0, x2=2.0), shifted, cross_check=True
        )

        assert result.cross_check == pytest.approx(
            math.sqrt(3.0) - 1 + math.exp(-math.sqrt(3.0)), abs=1e-3
        )
        assert result.agrees is False

    def test_steer_and_stay_speed(self):
        """Test halving the speed from (E, 1) into O costs more."""
        start = NetworkPoint.on(Branch.E, 1.0)

        fast = steer_and_stay_cost(self.prob, start, NetworkPoint.junction())
        slow = steer_and_stay_cost(self.prob, start, NetworkPoint.junction(), speed=0.5)

        # ∫₀² e^(−t)(1 − t/2) dt = (1 + e^(−2)) / 2
        assert slow == pytest.approx((1 + math.exp(-2.0)) / 2, abs=1e-8)
        assert slow > fast

    def test_vectorized(self):
        """Test limit_values_on agrees with solve_value_bar."""
        points = np.array([[1.0, 2.0], [-0.5, 0.2], [0.3, 0.3]])

        values = limit_values_on(self.network, points)

        for point, value in zip(points, values):
            expected = solve_value_bar(self.prob, PlanePoint.from_array(point), self.network)
            assert value == pytest.approx(expected.value)


class TestConvergenceStudy:
    """Test the convergence of V^ε towards V̄∘φ_d."""

    @pytest.mark.slow
    def test_small_study(self):
        """Test a coarse ladder reports errors, margins and Lipschitz fits."""
        prob = ValueProblem(lam=1.0, cost=CostField.capped_distance(2.0))

        report = convergence_study(
            prob,
            [0.1, 0.2],
            grid=GridConfig(region=(-1.0, 1.0, -1.0, 1.0), h=0.1, margin=0.5),
            edge=EdgeGridConfig(radius=3.0, h=0.05),
            solver=SolverConfig(n_directions=8),
            n_probes=20,
        )

        assert report.eps == [0.2, 0.1]
        assert len(report.sup_errors) == 2
        assert len(report.chain_margins) == 2
        assert report.slack == pytest.approx(10 * 0.1 * 2.0)
        assert report.chains_ok
        assert set(report.to_dict()) >= {'eps', 'sup_error', 'chain_margins', 'monotone'}
