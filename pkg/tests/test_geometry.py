"""Tests for the penalty, its identities and the projection onto Γ."""

import math

import numpy as np
import pytest

from src.junction_lab.geometry import (
    BRANCH_CODES,
    check_identities,
    classify_branch,
    dominant_branch,
    holder_ratio,
    invariance_threshold,
    kappa,
    penalty,
    penalty_array,
    penalty_gradient,
    project_array,
    project_to_network,
    projected_plane,
)
from src.junction_lab.limits.gradient_flow import (
    gradient_flow,
    length_bound,
    limit_gap,
    reach_level_bound,
)
from src.junction_lab.models.points import Branch, NetworkPoint, PlanePoint


class TestPenalty:
    """Test d(x) = x₁²x₂² and its gradient."""

    def test_zero_exactly_on_network(self):
        """Test d vanishes on the axes and nowhere else."""
        assert penalty(PlanePoint(x1=3.0, x2=0.0)) == 0.0
        assert penalty(PlanePoint(x1=0.0, x2=-2.0)) == 0.0
        assert penalty(PlanePoint(x1=1.0, x2=2.0)) == 4.0

    def test_gradient(self):
        """Test ∇d = (2x₁x₂², 2x₁²x₂)."""
        grad = penalty_gradient(PlanePoint(x1=1.0, x2=2.0))

        assert (grad.x1, grad.x2) == (8.0, 4.0)

    def test_identities_on_random_points(self):
        """Test the Euler, norm and Łojasiewicz identities hold."""
        points = np.random.default_rng(0).uniform(-5.0, 5.0, size=(1000, 2))

        report = check_identities(points)

        assert report.n_points == 1000
        assert report.passed()

    def test_identities_include_network_points(self):
        """Test the identities hold where d and ∇d vanish."""
        points = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, -3.0]])

        assert check_identities(points).passed()

    def test_vectorized_matches_scalar(self):
        """Test penalty_array agrees with penalty."""
        xy = np.array([[1.0, 2.0], [-0.5, 3.0]])

        assert penalty_array(xy).tolist() == [4.0, 2.25]

    def test_invariance_threshold(self):
        """Test κ·ε^(4/3) with κ = 2^(−4/3)|f|∞^(4/3)."""
        assert kappa(1.0) == pytest.approx(2 ** (-4 / 3))
        assert invariance_threshold(1.0, 1e-3) == pytest.approx(2 ** (-4 / 3) * 1e-4)
        with pytest.raises(ValueError):
            invariance_threshold(1.0, 0.0)


class TestProjection:
    """Test the closed-form projection φ_d."""

    def test_vertical_side(self):
        """Test |x₂| > |x₁| projects onto N/S at √(x₂²−x₁²)."""
        point = project_to_network(PlanePoint(x1=1.0, x2=2.0))

        assert point.branch is Branch.N
        assert point.radius == pytest.approx(math.sqrt(3.0))

    def test_horizontal_side(self):
        """Test |x₁| > |x₂| projects onto E/W."""
        point = project_to_network(PlanePoint(x1=-3.0, x2=2.0))

        assert point.branch is Branch.W
        assert point.radius == pytest.approx(math.sqrt(5.0))

    def test_diagonal_maps_to_junction(self):
        """Test the diagonals collapse to O."""
        for x1, x2 in [(1.0, 1.0), (-2.0, 2.0), (0.5, -0.5), (0.0, 0.0)]:
            assert project_to_network(PlanePoint(x1=x1, x2=x2)).is_junction()

    def test_fixes_network_points(self):
        """Test φ_d is the identity on Γ."""
        assert project_to_network(PlanePoint(x1=0.0, x2=-2.0)) == NetworkPoint.on(
            Branch.S, 2.0
        )
        assert project_to_network(PlanePoint(x1=4.0, x2=0.0)) == NetworkPoint.on(
            Branch.E, 4.0
        )

    def test_vectorized_matches_scalar(self):
        """Test project_array agrees with project_to_network point by point."""
        xy = np.random.default_rng(3).uniform(-2.0, 2.0, size=(200, 2))
        xy[0] = (1.0, -1.0)

        codes, radii = project_array(xy)

        for row, code, radius in zip(xy, codes, radii):
            expected = project_to_network(PlanePoint.from_array(row))
            assert BRANCH_CODES[code] is expected.branch
            assert radius == pytest.approx(expected.radius)

    def test_projected_plane(self):
        """Test φ_d as plane points."""
        out = projected_plane(np.array([[1.0, 2.0], [2.0, 2.0]]))

        assert out[0].tolist() == pytest.approx([0.0, math.sqrt(3.0)])
        assert out[1].tolist() == [0.0, 0.0]

    def test_holder_ratio_bounded(self):
        """Test φ_d is ½-Hölder with a moderate constant near the diagonal."""
        rng = np.random.default_rng(4)
        first = rng.uniform(-1.0, 1.0, size=(500, 2))
        second = first + rng.normal(scale=1e-3, size=(500, 2))

        assert holder_ratio(first, second) <= 2.0
        assert holder_ratio(first, first) == 0.0

    def test_classify_branch(self):
        """Test tolerance-based branch membership."""
        assert classify_branch(PlanePoint(x1=0.0, x2=0.0)) is Branch.O
        assert classify_branch(PlanePoint(x1=1e-12, x2=-1.0)) is Branch.S
        assert classify_branch(PlanePoint(x1=1.0, x2=1.0)) is None

    def test_dominant_branch(self):
        """Test the dominant coordinate picks the branch outside the junction box."""
        assert dominant_branch((0.3, -0.1)) is Branch.E
        assert dominant_branch((0.01, 0.02), junction_tol=0.05) is Branch.O
        assert dominant_branch((-0.1, 0.5), junction_tol=0.05) is Branch.N


class TestGradientFlow:
    """Test the gradient flow of d against the closed-form projection."""

    @pytest.mark.parametrize(
        'x1, x2', [(1.0, 2.0), (-3.0, 0.5), (0.2, -1.5), (-0.7, -0.4)]
    )
    def test_limit_matches_projection(self, x1, x2):
        """Test the flow converges to φ_d(x) and conserves x₂² − x₁²."""
        x = PlanePoint(x1=x1, x2=x2)

        flow = gradient_flow(x)

        assert limit_gap(flow, project_to_network(x)) <= 1e-5
        assert flow.hyperbola_drift <= 1e-8
        assert flow.monotone

    def test_path_length_bound(self):
        """Test the arc length respects the Łojasiewicz length bound."""
        x = PlanePoint(x1=1.0, x2=2.0)

        flow = gradient_flow(x)

        assert flow.path_length <= length_bound(x) * (1 + 1e-6)

    def test_start_on_network(self):
        """Test points of Γ are fixed without integrating."""
        flow = gradient_flow(PlanePoint(x1=0.0, x2=2.0))

        assert flow.stop_time == 0.0
        assert flow.limit == NetworkPoint.on(Branch.N, 2.0)

    def test_reach_level_bound(self):
        """Test the level entry bound covers the observed stop time."""
        x = PlanePoint(x1=1.0, x2=2.0)

        flow = gradient_flow(x, stop_tol=1e-6)

        assert flow.stop_time <= reach_level_bound(x, 1e-6)
        assert reach_level_bound(PlanePoint(x1=0.0, x2=1.0), 1e-6) == 0.0
