"""The seven scenario strategies and their registry."""

import math
from typing import Dict, Type

import numpy as np

from ..config.config import IntegratorConfig, theta_from_units
from ..dynamics.estimates import (
    check_apriori_estimates,
    check_invariance,
    crossing_abscissa,
    equilibrium_point,
    field_residual,
    reach_time_bound,
    reach_time_validity,
    scaling_discrepancy,
)
from ..dynamics.integrator import entry_time, integrate_perturbed
from ..exceptions import ScenarioError
from ..geometry.penalty import invariance_threshold, penalty
from ..geometry.projection import dominant_branch
from ..limits.junction import (
    constant_control_limit,
    instability_witness,
    semigroup_witness,
)
from ..limits.layer import is_decreasing, jump_errors
from ..limits.surgery import accelerated_descent, drive_on_network, restricted_control
from ..limits.tracking import tracking_trajectory
from ..limits.zeno import branch_visits, zeno_control, zeno_eps_independence
from ..models.control import ControlSchedule
from ..models.points import Branch, NetworkPoint, PlanePoint
from ..models.value import CostField, ValueProblem
from ..value.convergence import convergence_study
from ..value.counterexample import counterexample_costs, counterexample_sweep
from ..value.grid_solver import solve_value_eps
from ..value.network_solver import solve_value_network
from .orchestrator import Job
from .strategy import ScenarioStrategy

ROOT2 = math.sqrt(2.0)
# Random starting points are drawn from this box.
SAMPLE_HALF_WIDTH = 2.0
# Closed-form costs at λ = 1, to the printed digits.
COUNTEREXAMPLE_REFERENCE = (1.0505898, 1.3678794)
REFERENCE_TOL = 5e-8
# On-network runs must reproduce their limit to this many integrator tolerances.
EXACT_FACTOR = 100.0


def random_point(
    rng: np.random.Generator, half_width: float = SAMPLE_HALF_WIDTH
) -> PlanePoint:
    x1, x2 = rng.uniform(-half_width, half_width, size=2)
    return PlanePoint(x1=float(x1), x2=float(x2))


def random_control(
    rng: np.random.Generator, horizon: float, n_pieces: int = 3
) -> ControlSchedule:
    """Piecewise-constant unit headings on n_pieces equal intervals."""
    angles = rng.uniform(0.0, 2 * math.pi, size=n_pieces)
    pieces = [
        (horizon * j / n_pieces, (math.cos(a), math.sin(a)))
        for j, a in enumerate(angles)
    ]
    return ControlSchedule.from_pieces(pieces)


def _behavior_case(
    start: NetworkPoint,
    theta: float,
    eps: float,
    horizon: float,
    box: float,
    cfg: IntegratorConfig,
    angle_tol: float,
) -> Dict:
    limit = constant_control_limit(start, theta, horizon, angle_tol)
    traj = integrate_perturbed(
        start.to_plane(), ControlSchedule.heading(theta), eps, cfg, horizon=horizon
    )
    end = limit.state_at(horizon)
    if end.is_junction():
        branch_ok = float(np.max(np.abs(traj.end_state))) <= box
    else:
        branch_ok = dominant_branch(traj.end_state) is end.branch
    return {
        'limit': limit,
        'end': end,
        'eps_end': traj.end_state,
        'error': float(np.linalg.norm(traj.end_state - limit.plane_at(horizon))),
        'branch_ok': bool(branch_ok),
    }


class JunctionBehaviorStrategy(ScenarioStrategy):
    """Closed-form limits of constant controls from O and from e_N."""

    name = 'junction-behavior'
    anchors = [
        'limit-of-constant-control-from-junction',
        'limit-of-constant-control-from-north',
        'first-crossing-abscissa-scaling',
        'third-quadrant-equilibrium',
        'semigroup-failure-witness',
        'instability-witness',
    ]

    async def execute(self) -> None:
        await self._behavior_table()
        await self._crossings()
        self._equilibria()
        self._witnesses()

    async def _behavior_table(self) -> None:
        p = self.params
        box = p.state_factor * p.eps ** (1 / 3)
        angle_tol = self.cfg.geometry.angle_tol
        starts = [(NetworkPoint.junction(), t) for t in p.thetas_from_o] + [
            (NetworkPoint.on(Branch.N, 1.0), t) for t in p.thetas_from_n
        ]
        jobs = [
            Job(
                key=(start.branch.value, float(units)),
                func=_behavior_case,
                args=(
                    start,
                    theta_from_units(units),
                    p.eps,
                    p.horizon,
                    box,
                    self.cfg.integrator,
                    angle_tol,
                ),
            )
            for start, units in starts
        ]
        rows, limits = [], {}
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            origin, units = r.key
            case = r.value
            end = case['end']
            label = f'{origin}:{units}'
            rows.append(
                (
                    origin,
                    units,
                    end.branch.value,
                    end.radius,
                    float(case['eps_end'][0]),
                    float(case['eps_end'][1]),
                    case['error'],
                    box,
                    int(case['branch_ok']),
                )
            )
            limits[label] = case['limit'].to_dict()
            self.check(
                f'branch:{label}',
                'ε-trajectory endpoint lies on the limit branch',
                case['branch_ok'],
            )
            self.check(
                f'state:{label}',
                '|X^ε(T) − X(T)| ≤ state_factor·ε^(1/3)',
                case['error'] <= box,
                value=case['error'],
                bound=box,
            )
        self.writer.csv(
            'behavior.csv',
            ('start', 'theta_units', 'limit_branch', 'limit_radius', 'eps_x1',
             'eps_x2', 'error', 'bound', 'branch_ok'),
            rows,
        )
        self.writer.json('limits.json', limits)

    async def _crossings(self) -> None:
        p = self.params
        jobs = [
            Job(
                key=(float(units), float(eps)),
                func=crossing_abscissa,
                args=(theta_from_units(units), eps, self.cfg.integrator),
            )
            for units in p.eta_thetas
            for eps in p.eta_eps
        ]
        rows = []
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            units, eps = r.key
            c = r.value
            window = c.lower_bound / eps ** (1 / 3)
            rows.append(
                (units, eps, c.t_eps, c.t_bound, c.eta, c.lower_bound, c.ratio)
            )
            self.check(
                f'crossing_time:{units}:{eps}',
                't_ε ≤ 1/(−sin θ)',
                c.t_eps <= c.t_bound,
                value=c.t_eps,
                bound=c.t_bound,
            )
            self.check(
                f'eta_window:{units}:{eps}',
                'η_ε/ε^(1/3) lies in the negative window',
                window <= c.ratio < 0,
                value=c.ratio,
                bound=window,
            )
        self.writer.csv(
            'crossing.csv',
            ('theta_units', 'eps', 't_eps', 't_bound', 'eta', 'lower_bound', 'ratio'),
            rows,
        )

    def _equilibria(self) -> None:
        p = self.params
        rows = []
        for units in p.eta_thetas:
            theta = theta_from_units(units)
            point = equilibrium_point(theta, p.eps)
            residual = field_residual(point, theta, p.eps)
            rows.append((float(units), p.eps, point.x1, point.x2, residual))
            self.check(
                f'equilibrium:{units}',
                'closed-form rest point annihilates the field',
                residual <= 1e-9,
                value=residual,
                bound=1e-9,
            )
        self.writer.csv(
            'equilibria.csv', ('theta_units', 'eps', 'x1', 'x2', 'residual'), rows
        )

    def _witnesses(self) -> None:
        p = self.params
        angle_tol = self.cfg.geometry.angle_tol
        semigroup = semigroup_witness(p.witness_s, angle_tol)
        expected = p.witness_s / ROOT2
        self.check(
            'semigroup_witness',
            'through-junction and restarted limits differ by s/√2',
            abs(semigroup.discrepancy - expected) <= 1e-12,
            value=semigroup.discrepancy,
            bound=expected,
        )

        witness = instability_witness(p.witness_n, horizon=1.0, angle_tol=angle_tol)
        for row in witness.rows:
            radius = (1.0 - ROOT2 / row.n) / ROOT2
            if radius <= 0:
                continue
            self.check(
                f'instability:{row.n}',
                'start e_N/n ends on W at (T − √2/n)/√2',
                row.branch is Branch.W and abs(row.radius - radius) <= 1e-12,
                value=row.radius,
                bound=radius,
            )
        self.check(
            'instability:junction',
            'the same control from O stays at O',
            witness.from_junction.is_junction(),
        )
        self.writer.json(
            'witnesses.json',
            {
                'semigroup': semigroup.model_dump(mode='json'),
                'instability': witness.model_dump(mode='json'),
            },
        )


class ZenoStrategy(ScenarioStrategy):
    """A control visiting every branch infinitely often before t = 1."""

    name = 'zeno'
    anchors = [
        'dyadic-junction-returns',
        'every-branch-visited',
        'penalty-inactive-on-network',
    ]

    async def execute(self) -> None:
        p = self.params
        construction = zeno_control(p.cycle, p.depth)

        rows = []
        for k, (t, point) in enumerate(construction.junction_returns()):
            rows.append((k, t, point.branch.value, point.radius))
            self.check(
                f'junction_return:{k}',
                'X(2^(−k)) = O',
                point.is_junction(),
                value=point.radius,
                bound=0.0,
            )
        visits = branch_visits(construction)
        cycle = construction.cycle
        for k, branch in visits.items():
            self.check(
                f'visit:{k}',
                'branch visited on (2^(−k−1), 2^(−k)) follows the cycle',
                branch is cycle[k % len(cycle)],
            )
        self.check(
            'speed',
            'limit path speed ≤ 1',
            construction.trajectory.speed_ok(),
            value=construction.trajectory.max_speed(),
            bound=1.0,
        )
        self.writer.csv('returns.csv', ('k', 't', 'branch', 'radius'), rows)
        self.writer.json(
            'construction.json',
            {
                'cycle': [b.value for b in cycle],
                'depth': construction.depth,
                'control': construction.control.to_dict(),
                'trajectory': construction.trajectory.to_dict(),
            },
        )

        jobs = [
            Job(
                key=(float(eps),),
                func=zeno_eps_independence,
                args=(construction, [eps], self.cfg.integrator),
            )
            for eps in p.eps_values
        ]
        bound = EXACT_FACTOR * (self.cfg.integrator.rel_tol + self.cfg.integrator.abs_tol)
        rows = []
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            check = r.value[0]
            rows.append((check.eps, check.max_deviation))
            self.check(
                f'eps_independent:{check.eps}',
                'the ε-trajectory equals the limit path',
                check.max_deviation <= bound,
                value=check.max_deviation,
                bound=bound,
            )
        self.writer.csv('independence.csv', ('eps', 'max_deviation'), rows)


class ScalingLawStrategy(ScenarioStrategy):
    """X^{x,θ,ε}(t) = (1/ρ)·X^{ρx,θ,ρ³ε}(ρt) for constant controls."""

    name = 'scaling-law'
    anchors = ['penalized-scaling-law']

    async def execute(self) -> None:
        p = self.params
        rng = np.random.default_rng(p.seed)
        samples = []
        for i in range(p.n_samples):
            x = random_point(rng)
            theta = float(rng.uniform(0.0, 2 * math.pi))
            samples.append((i, x, theta))
        cfg = self.cfg.integrator
        jobs = [
            Job(
                key=(i, float(rho)),
                func=scaling_discrepancy,
                args=(x, theta, rho, p.eps, p.horizon, cfg),
            )
            for i, x, theta in samples
            for rho in p.rhos
        ]
        by_index = {i: (x, theta) for i, x, theta in samples}
        rows = []
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            i, rho = r.key
            x, theta = by_index[i]
            bound = p.tolerance_factor * (cfg.rel_tol * max(1.0, x.norm()) + cfg.abs_tol)
            rows.append((i, x.x1, x.x2, theta, rho, r.value, bound))
            self.check(
                f'scaling:{i}:{rho}',
                'matched-sample discrepancy within the tolerance budget',
                r.value <= bound,
                value=r.value,
                bound=bound,
            )
        self.writer.csv(
            'scaling.csv',
            ('sample', 'x1', 'x2', 'theta', 'rho', 'discrepancy', 'bound'),
            rows,
        )


def _tracking_job(x, alpha, eps, gamma, horizon, cfg) -> Dict:
    traj = integrate_perturbed(x, alpha, eps, cfg, horizon=horizon)
    result = tracking_trajectory(traj, gamma)
    surgery = restricted_control(traj)
    driven = drive_on_network(surgery.start, surgery.control, traj.times)
    return {
        'tracking': result,
        'max_norm': surgery.max_norm,
        'clipped': surgery.clipped,
        'surgery_gap': float(np.max(np.linalg.norm(driven - traj.states, axis=1)[
            traj.times >= surgery.skip_time
        ])),
    }


class TrackingStrategy(ScenarioStrategy):
    """On-network paths shadowing ε-trajectories after the initial layer."""

    name = 'tracking'
    anchors = [
        'tracking-error-rate',
        'tracked-path-speed-bound',
        'restricted-control-unit-ball',
    ]

    async def execute(self) -> None:
        p = self.params
        rng = np.random.default_rng(p.seed)
        samples = [
            (i, random_point(rng), random_control(rng, p.horizon))
            for i in range(p.n_samples)
        ]
        jobs = [
            Job(
                key=(i, float(eps)),
                func=_tracking_job,
                args=(x, alpha, eps, p.gamma, p.horizon, self.cfg.integrator),
            )
            for i, x, alpha in samples
            for eps in p.eps_values
        ]
        rows = []
        ratios = []
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            i, eps = r.key
            tr = r.value['tracking']
            ratios.append(tr.ratio)
            rows.append(
                (i, eps, tr.start_time, tr.sup_distance, tr.error_scale, tr.ratio,
                 tr.max_speed, tr.speed_bound, r.value['max_norm'],
                 r.value['clipped'], r.value['surgery_gap'])
            )
            self.check(
                f'speed:{i}:{eps}',
                'tracked path speed ≤ √2·|f|∞',
                tr.speed_ok,
                value=tr.max_speed,
                bound=tr.speed_bound,
            )
            self.check(
                f'restricted:{i}:{eps}',
                'restricted control stays in the unit ball up to clipping tolerance',
                r.value['max_norm'] <= 1.0 + 1e-3,
                value=r.value['max_norm'],
                bound=1.0 + 1e-3,
            )
        self.check(
            'ratio',
            'sup distance / (ε^(γ/8) + ε^(5γ/24)T) stays bounded across ε',
            bool(ratios) and max(ratios) <= p.ratio_bound,
            value=max(ratios) if ratios else None,
            bound=p.ratio_bound,
        )
        self.writer.csv(
            'tracking.csv',
            ('sample', 'eps', 'start_time', 'sup_distance', 'error_scale', 'ratio',
             'max_speed', 'speed_bound', 'restricted_norm', 'clipped', 'surgery_gap'),
            rows,
        )


class CounterexampleStrategy(ScenarioStrategy):
    """V̄ < V_Γ at e_N when the running cost depends on the control."""

    name = 'counterexample'
    anchors = ['control-dependent-cost-counterexample']

    async def execute(self) -> None:
        p = self.params
        rows = []
        for lam in p.lambdas:
            result = counterexample_costs(lam, horizon=p.horizon * max(1.0, 1.0 / lam))
            rows.append(
                (lam, result.upper, result.lower, result.numeric_upper, result.tail)
            )
            self.check(
                f'strict:{lam}',
                'steering off the network undercuts every network control',
                result.strict,
                value=result.upper,
                bound=result.lower,
            )
            self.check(
                f'quadrature:{lam}',
                'quadrature re-derives the closed-form upper cost',
                result.numeric_gap <= p.quad_tol,
                value=result.numeric_gap,
                bound=p.quad_tol,
            )
            if lam == 1.0:
                for name, got, ref in zip(
                    ('upper', 'lower'), (result.upper, result.lower), COUNTEREXAMPLE_REFERENCE
                ):
                    self.check(
                        f'reference:{name}',
                        'closed form at λ = 1 matches the reference value',
                        abs(got - ref) <= REFERENCE_TOL,
                        value=got,
                        bound=ref,
                    )
        self.writer.csv(
            'costs.csv', ('lambda', 'upper', 'lower', 'numeric_upper', 'tail'), rows
        )

        sweep = counterexample_sweep(p.n_sweep)
        self.check(
            'sweep',
            'strict inequality on log-spaced λ in [0.1, 10]',
            all(r.strict for r in sweep),
            value=max(r.upper - r.lower for r in sweep),
            bound=0.0,
        )
        self.writer.csv(
            'sweep.csv',
            ('lambda', 'upper', 'lower'),
            [(r.lam, r.upper, r.lower) for r in sweep],
        )


class ValueConvergenceStrategy(ScenarioStrategy):
    """sup |V^ε − V̄∘φ_d| over a region shrinking with ε."""

    name = 'value-convergence'
    anchors = [
        'value-function-convergence',
        'value-chain-inequalities',
        'uniform-lipschitz-on-network',
        'constant-cost-exact-value',
    ]

    async def execute(self) -> None:
        p = self.params
        solver = self.cfg.solver
        prob = ValueProblem(lam=p.lam, cost=CostField.from_name(p.cost, cap=p.cap))
        self._constant_cost(p.lam)

        report = convergence_study(
            prob, p.eps_values, p.grid, p.edge_grid, solver, p.n_probes, p.seed
        )
        self.check(
            'monotone',
            'sup error strictly decreasing in ε',
            report.monotone,
            value=report.sup_errors[-1],
            bound=report.sup_errors[0],
        )
        for m in report.chain_margins:
            self.check(
                f'chain_upper:{m.eps}',
                'V^ε(x̄) ≤ V̄(x̄) up to scheme slack',
                m.upper >= 0,
                value=m.upper,
                bound=0.0,
            )
            self.check(
                f'chain_layer:{m.eps}',
                'V^ε(x) ≤ V^ε(x̄) + Cε^(1/4) up to scheme slack',
                m.layer >= 0,
                value=m.layer,
                bound=0.0,
            )
        self.check(
            'lipschitz_stable',
            'fitted Lipschitz constant on Γ stable across ε',
            report.lipschitz_stable,
            value=max(report.lipschitz_fit),
            bound=min(report.lipschitz_fit),
        )
        self.writer.csv(
            'errors.csv',
            ('eps', 'sup_error', 'lower', 'upper', 'layer', 'modulus', 'lipschitz'),
            [
                (e, err, m.lower, m.upper, m.layer, m.modulus, fit)
                for e, err, m, fit in zip(
                    report.eps, report.sup_errors, report.chain_margins,
                    report.lipschitz_fit,
                )
            ],
        )
        self.writer.json('convergence.json', report.to_dict())

    def _constant_cost(self, lam: float) -> None:
        """ℓ ≡ 1 has value 1/λ in both solvers."""
        prob = ValueProblem(lam=lam, cost=CostField.constant(1.0))
        p = self.params
        coarse = p.grid.model_copy(update={'h': max(p.grid.h, 0.1)})
        edge = p.edge_grid.model_copy(update={'h': max(p.edge_grid.h, 0.05)})
        grid_value = solve_value_eps(prob, p.eps_values[0], coarse, self.cfg.solver)
        net_value = solve_value_network(prob, edge, self.cfg.solver)
        gap_grid = float(np.max(np.abs(grid_value.values - 1.0 / lam)))
        gap_net = max(
            abs(net_value.junction_value - 1.0 / lam),
            max(float(np.max(np.abs(v - 1.0 / lam))) for v in net_value.branch_values.values()),
        )
        for name, gap in (('grid', gap_grid), ('network', gap_net)):
            self.check(
                f'constant_cost:{name}',
                'ℓ ≡ 1 gives u ≡ 1/λ',
                gap <= 1e-8,
                value=gap,
                bound=1e-8,
            )


def _apriori_job(x, alpha, eps, horizon, cfg) -> Dict:
    traj = integrate_perturbed(x, alpha, eps, cfg, horizon=horizon)
    report = check_apriori_estimates(traj)
    invariance = check_invariance(traj, invariance_threshold(alpha.f_inf, eps))
    return {'report': report, 'invariance': invariance}


def _entry_job(x, alpha, eps, gamma, lam, horizon, cfg) -> Dict:
    traj = integrate_perturbed(x, alpha, eps, cfg, horizon=horizon)
    return {
        'layer': entry_time(traj, eps ** (4 * gamma / 3)),
        'level': entry_time(traj, lam),
    }


class AprioriSuiteStrategy(ScenarioStrategy):
    """A priori estimates, invariant layers, entry times and the initial jump."""

    name = 'apriori-suite'
    anchors = [
        'penalty-sublevel-growth',
        'penalty-integral-bound',
        'energy-estimate',
        'invariant-layer',
        'layer-entry-time',
        'level-entry-time',
        'initial-jump-to-projection',
        'accelerated-descent-time',
    ]

    async def execute(self) -> None:
        p = self.params
        rng = np.random.default_rng(p.seed)
        samples = [
            (i, random_point(rng), random_control(rng, p.horizon))
            for i in range(p.n_samples)
        ]
        await self._estimates(samples)
        await self._entry_times(samples)
        self._initial_jump()
        self._descent()

    async def _estimates(self, samples) -> None:
        p = self.params
        jobs = [
            Job(
                key=(float(eps), i),
                func=_apriori_job,
                args=(x, alpha, eps, p.horizon, self.cfg.integrator),
            )
            for eps in p.eps_values
            for i, x, alpha in samples
        ]
        worst: Dict[str, float] = {}
        invariance_ratio = 0.0
        rows = []
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            eps, i = r.key
            report, invariance = r.value['report'], r.value['invariance']
            for c in report.checks:
                worst[c.name] = min(worst.get(c.name, math.inf), c.margin)
                rows.append((eps, i, c.name, int(c.passed), c.margin))
            invariance_ratio = max(invariance_ratio, invariance.max_ratio)
        for name in sorted(worst):
            self.check(
                f'estimate:{name}',
                'holds on every sampled (x, α, ε)',
                worst[name] >= 0,
                value=worst[name],
                bound=0.0,
            )
        self.check(
            'invariance',
            'd(X) stays below κε^(4/3)(1 + 1e-6) after entering the layer',
            invariance_ratio <= 1 + 1e-6,
            value=invariance_ratio,
            bound=1 + 1e-6,
        )
        self.writer.csv('estimates.csv', ('eps', 'sample', 'estimate', 'passed', 'margin'), rows)

    async def _entry_times(self, samples) -> None:
        p = self.params
        jobs = [
            Job(
                key=(float(eps), i),
                func=_entry_job,
                args=(x, alpha, eps, p.gamma, p.lam, p.horizon, self.cfg.integrator),
            )
            for eps in p.entry_eps
            for i, x, alpha in samples
        ]
        points = {i: x for i, x, _ in samples}
        validity = reach_time_validity(1.0, p.gamma)
        rows = []
        worst_layer = -math.inf
        fitted: Dict[float, float] = {}
        for r in await self.run_jobs(jobs):
            if not r.success:
                continue
            eps, i = r.key
            x = points[i]
            layer, level = r.value['layer'], r.value['level']
            bound = reach_time_bound(x, eps, p.gamma)
            rows.append((eps, i, x.x1, x.x2, layer, bound, level))
            if eps <= validity and layer is not None:
                worst_layer = max(worst_layer, layer - bound)
            if level is not None and penalty(x) > p.lam:
                fitted[eps] = max(fitted.get(eps, 0.0), level * p.lam / eps)
        self.check(
            'layer_entry',
            'entry into Z(ε^(4γ/3)) before 4d(x)^(1/4)ε^(1−γ)',
            worst_layer <= 1e-9,
            value=worst_layer,
            bound=0.0,
        )
        if fitted:
            spread = max(fitted.values()) / min(fitted.values())
            self.check(
                'level_entry_stable',
                'fitted C in t ≤ Cε/λ stable within 2× across ε',
                spread <= 2.0,
                value=spread,
                bound=2.0,
            )
        self.writer.csv(
            'entry_times.csv',
            ('eps', 'sample', 'x1', 'x2', 'layer_entry', 'layer_bound', 'level_entry'),
            rows,
        )

    def _initial_jump(self) -> None:
        p = self.params
        # near the diagonal the flow is slow enough to stay above solver noise
        x = PlanePoint(x1=1.0, x2=1.02)
        errors = jump_errors(x, p.entry_eps, t=0.05, cfg=self.cfg.integrator)
        values = [e.error for e in sorted(errors, key=lambda e: -e.eps)]
        self.check(
            'initial_jump',
            'X^ε(t) → φ_d(x) as ε decreases',
            is_decreasing(values),
            value=values[-1],
            bound=values[0],
        )
        self.writer.csv('jump.csv', ('eps', 'error'), [(e.eps, e.error) for e in errors])

    def _descent(self) -> None:
        p = self.params
        x = PlanePoint(x1=1.0, x2=2.0)
        rows = []
        for eps in p.entry_eps:
            result = accelerated_descent(x, eps)
            rows.append((eps, result.arrival_time, result.scaled_time))
        worst = max(r[2] for r in rows)
        bound = 4.0 * penalty(x) ** 0.25 + ROOT2
        self.check(
            'descent_time',
            'feedback descent reaches Γ by (4d(x)^(1/4) + √2)·ε^(1/4)',
            worst <= bound,
            value=worst,
            bound=bound,
        )
        self.writer.csv('descent.csv', ('eps', 'arrival_time', 'scaled_time'), rows)


SCENARIOS: Dict[str, Type[ScenarioStrategy]] = {
    cls.name: cls
    for cls in (
        JunctionBehaviorStrategy,
        ZenoStrategy,
        ScalingLawStrategy,
        TrackingStrategy,
        CounterexampleStrategy,
        ValueConvergenceStrategy,
        AprioriSuiteStrategy,
    )
}


def strategy_for(name: str) -> Type[ScenarioStrategy]:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ScenarioError(
            f'Unknown scenario: {name}', details={'known': sorted(SCENARIOS)}
        ) from None
