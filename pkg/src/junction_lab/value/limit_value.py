"""The limit value V̄ = V_Γ ∘ φ_d and its on-network cross-check."""

import math
from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field
from scipy.integrate import quad
from scipy.optimize import minimize

from ..config.config import EdgeGridConfig, IntegratorConfig, SolverConfig
from ..dynamics.integrator import integrate_perturbed
from ..exceptions import JunctionLabError
from ..geometry.projection import project_array, project_to_network
from ..limits.surgery import SteeringPlan, restricted_control, steer_on_network
from ..models.control import ControlSchedule
from ..models.points import EDGE_BRANCHES, NetworkPoint, PlanePoint
from ..models.value import EdgeValueFunction, ValueProblem
from .network_solver import solve_value_network

# Slowest leg speed tried by the on-network search.
MIN_SPEED = 0.05
# Time the penalized run continues after the plan has arrived.
SETTLE_TIME = 1.0


class OnNetworkOptimum(BaseModel):
    """Best steer-then-stay plan found from x̄."""

    cost: float
    target: NetworkPoint
    speed: float
    plan: SteeringPlan


class LimitValue(BaseModel):
    """V̄(x) with the optional on-network cross-check."""

    x: PlanePoint
    xbar: NetworkPoint
    value: float
    cross_check: Optional[float] = Field(
        default=None, description='Optimized on-network cost from x̄'
    )
    restricted: Optional[float] = Field(
        default=None, description='Cost of the restricted control of the penalized run'
    )
    optimum: Optional[OnNetworkOptimum] = None
    tolerance: Optional[float] = None
    slack: float = Field(default=0.0, description='Truncation slack of V_Γ at x̄')

    @property
    def agrees(self) -> Optional[bool]:
        if self.cross_check is None:
            return None
        checks = [self.cross_check]
        if self.restricted is not None:
            checks.append(self.restricted)
        return all(abs(c - self.value) <= self.tolerance for c in checks)


def schedule_cost(
    prob: ValueProblem,
    xbar: NetworkPoint,
    control: ControlSchedule,
    horizon: float,
    quad_tol: float = 1e-10,
) -> float:
    """Discounted cost of x̄ + ∫ᾱ on [0, horizon], then staying at the endpoint."""
    lam = prob.lam
    position = xbar.as_array().astype(float)
    total = 0.0
    for t0, t1, value in control.pieces(horizon):
        if t1 <= t0:
            continue

        def integrand(t, start=position, t0=t0, value=value):
            return math.exp(-lam * t) * prob.cost.at(start + (t - t0) * value)

        total += quad(integrand, t0, t1, epsabs=quad_tol, epsrel=quad_tol)[0]
        position = position + (t1 - t0) * value
    return total + math.exp(-lam * horizon) * prob.cost.at(position) / lam


def steer_and_stay_cost(
    prob: ValueProblem,
    xbar: NetworkPoint,
    target: NetworkPoint,
    speed: float = 1.0,
    quad_tol: float = 1e-10,
) -> float:
    """Cost of the geodesic run from x̄ to target at the given speed, then staying."""
    plan = steer_on_network(xbar, target, speed)
    return schedule_cost(prob, xbar, plan.control, plan.arrival_time, quad_tol)


def optimize_on_network(
    prob: ValueProblem, xbar: NetworkPoint, radius: float, stride_h: float
) -> OnNetworkOptimum:
    """Minimize steer-then-stay costs over target radius and leg speed per branch.

    Each branch is scanned at spacing stride_h with unit speed; the best scan
    point seeds a bounded Powell search over (radius, speed).

    Args:
        prob: Eikonal value problem
        xbar: Start on Γ
        radius: Largest target radius on each branch
        stride_h: Spacing of the seeding scan

    Returns:
        OnNetworkOptimum with the cheapest plan found
    """

    def cost(target: NetworkPoint, speed: float) -> float:
        return steer_and_stay_cost(prob, xbar, target, speed, quad_tol=1e-8)

    best = (cost(xbar, 1.0), xbar, 1.0)
    junction = NetworkPoint.junction()
    best = min(best, (cost(junction, 1.0), junction, 1.0), key=lambda c: c[0])

    scan = np.arange(stride_h, radius + 0.5 * stride_h, stride_h)
    if scan.size == 0:
        scan = np.array([radius])
    for branch in EDGE_BRANCHES:
        seeds = [(cost(NetworkPoint.on(branch, float(r)), 1.0), float(r)) for r in scan]
        _, r0 = min(seeds)

        def objective(p, branch=branch):
            r = float(np.clip(p[0], 0.0, radius))
            s = float(np.clip(p[1], MIN_SPEED, 1.0))
            return cost(NetworkPoint.on(branch, r), s)

        res = minimize(
            objective,
            np.array([r0, 1.0]),
            method='Powell',
            bounds=[(0.0, radius), (MIN_SPEED, 1.0)],
            options={'xtol': 1e-4, 'ftol': 1e-10},
        )
        r = float(np.clip(res.x[0], 0.0, radius))
        s = float(np.clip(res.x[1], MIN_SPEED, 1.0))
        candidate = (float(res.fun), NetworkPoint.on(branch, r), s)
        best = min(best, candidate, key=lambda c: c[0])

    value, target, speed = best
    return OnNetworkOptimum(
        cost=value, target=target, speed=speed, plan=steer_on_network(xbar, target, speed)
    )


def restricted_plan_cost(
    prob: ValueProblem,
    x: PlanePoint,
    plan: SteeringPlan,
    eps: float,
    cfg: Optional[IntegratorConfig] = None,
) -> float:
    """Cost on Γ of the restricted control of the penalized run of the plan from x.

    Pieces outside the unit ball are clipped rather than rejected.
    """
    horizon = plan.arrival_time + SETTLE_TIME
    traj = integrate_perturbed(x, plan.control, eps, cfg, horizon=horizon)
    surgery = restricted_control(traj, plan.control, clip_tol=math.inf)
    return schedule_cost(prob, surgery.start, surgery.control, traj.horizon)


def solve_value_bar(
    prob: ValueProblem,
    x: PlanePoint,
    network: Optional[EdgeValueFunction] = None,
    edge: Optional[EdgeGridConfig] = None,
    solver: Optional[SolverConfig] = None,
    cross_check: bool = False,
    integrator: Optional[IntegratorConfig] = None,
) -> LimitValue:
    """V̄(x) = V_Γ(φ_d(x)).

    Args:
        prob: Eikonal value problem
        x: Plane point
        network: Precomputed V_Γ; solved on edge when omitted
        edge: Edge grid for the network solve
        solver: Solver settings, including the cross-check tolerance factor and ε
        cross_check: Also optimize on-network plans directly and replay the best
            one through restricted_control
        integrator: Integrator settings for the replay

    Returns:
        LimitValue; a disagreement is logged, not raised
    """
    solver = solver or SolverConfig()
    if network is None:
        network = solve_value_network(prob, edge, solver)
    xbar = project_to_network(x)
    value = network.evaluate(xbar)
    result = LimitValue(x=x, xbar=xbar, value=value, slack=network.slack_at(xbar))
    if not cross_check:
        return result

    log = logger.bind(component='solve_value_bar')
    optimum = optimize_on_network(prob, xbar, network.radius, 5 * network.h)
    try:
        restricted = restricted_plan_cost(
            prob, x, optimum.plan, solver.cross_check_eps, integrator
        )
    except JunctionLabError as e:
        log.warning(f'Restricted replay failed at {xbar.label()}: {e}')
        restricted = None
    result = result.model_copy(
        update={
            'cross_check': optimum.cost,
            'restricted': restricted,
            'optimum': optimum,
            'tolerance': solver.cross_check_factor * network.h,
        }
    )
    if not result.agrees:
        log.warning(
            f'Cross-check disagrees at {xbar.label()}: network {value:.6g}, '
            f'direct {optimum.cost:.6g}, restricted {restricted}'
        )
    return result


def limit_values_on(network: EdgeValueFunction, points: np.ndarray) -> np.ndarray:
    """V̄ at many plane points, shape (n, 2) -> (n,)."""
    codes, radii = project_array(points)
    return network.evaluate_codes(codes, radii)
