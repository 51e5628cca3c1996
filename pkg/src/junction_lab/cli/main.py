"""Main CLI entry point for the junction lab."""

import asyncio
import json
import os
import sys
from pathlib import Path
from typing import Callable, List, Optional, Tuple, TypeVar

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from .. import __version__
from ..config.config import Config, EdgeGridConfig, ExperimentConfig, GridConfig
from ..dynamics.estimates import check_apriori_estimates
from ..dynamics.integrator import integrate_perturbed
from ..exceptions import DomainError, JunctionLabError, ManifestError
from ..experiments.engine import execute
from ..experiments.manifest import Manifest, summarize
from ..experiments.scenarios import SCENARIOS
from ..experiments.selftest import run_selftest
from ..geometry.projection import project_to_network
from ..limits.junction import constant_control_limit
from ..models.control import ControlSchedule
from ..models.points import NetworkPoint, PlanePoint
from ..models.value import COST_KINDS, CostField, ValueProblem
from ..utils.formatting import fmt, to_jsonable
from ..utils.logging import setup_logging
from ..value.convergence import convergence_study
from ..value.grid_solver import solve_value_eps
from ..value.network_solver import solve_value_network

console = Console()
err_console = Console(stderr=True)

T = TypeVar('T')

# Scenario flags and the parameter each one overrides.
SCENARIO_FLAGS = {'eps': 'eps', 'lam': 'lam', 'gamma': 'gamma', 'horizon': 'horizon'}


@click.group()
@click.version_option(version=__version__, prog_name='junction-lab')
@click.option(
    '--config',
    '-c',
    type=click.Path(exists=True),
    help='Path to configuration file',
)
@click.option(
    '--verbose',
    '-v',
    is_flag=True,
    help='Enable verbose logging',
)
@click.pass_context
def cli(ctx: click.Context, config: Optional[str], verbose: bool) -> None:
    """Junction Lab - penalized control towards the cross network and its limits."""
    ctx.ensure_object(dict)

    if config:
        ctx.obj['config_path'] = config
    ctx.obj['verbose'] = verbose

    setup_logging('DEBUG' if verbose else 'WARNING')


@cli.command()
@click.option(
    '--output',
    '-o',
    default='junction-lab.yaml',
    help='Output configuration file path',
)
def init(output: str) -> None:
    """Write a configuration file with every documented key."""
    console.print(
        Panel.fit(
            '[bold green]Junction Lab[/bold green]\nInitializing configuration...',
            border_style='green',
        )
    )
    try:
        Config.create_template(output)
        console.print(f'[green]✓[/green] Configuration template created at: {output}')
    except Exception as e:
        console.print(f'[red]✗[/red] Failed to create configuration: {e}')
        sys.exit(1)


@cli.command()
@click.option('--x', 'x_text', required=True, help='Initial state "x1,x2"')
@click.option(
    '--alpha',
    default='zero',
    show_default=True,
    help="Control: 'zero', 'theta=<rad>', 'a1,a2' or 't0:a1,a2;t1:a1,a2'",
)
@click.option('--eps', type=float, required=True, help='Penalty parameter ε')
@click.option('--horizon', type=float, default=None, help='Horizon T')
@click.option(
    '--out',
    type=click.Path(),
    default=None,
    help='CSV path, with a JSON manifest beside it (default stdout)',
)
@click.option('--check', is_flag=True, help='Run the a priori estimate checks')
@click.pass_context
def simulate(
    ctx: click.Context,
    x_text: str,
    alpha: str,
    eps: float,
    horizon: Optional[float],
    out: Optional[str],
    check: bool,
) -> None:
    """Integrate the ε-penalized dynamics and write t, x1, x2, k1, k2."""
    x = _parse('--x', PlanePoint.parse, x_text)
    control = _parse('--alpha', ControlSchedule.parse, alpha)
    _require_positive('--eps', eps)
    if horizon is not None:
        _require_positive('--horizon', horizon)
    config = _load_config(ctx)

    traj = _compute(
        ctx, lambda: integrate_perturbed(x, control, eps, config.integrator, horizon=horizon)
    )
    if out:
        traj.to_csv(out)
        manifest = traj.to_json(str(Path(out).with_suffix('.json')))
        err_console.print(f'[green]✓[/green] Trajectory written to: {out} and {manifest}')
    else:
        _echo_csv(('t', 'x1', 'x2', 'k1', 'k2'), traj.csv_rows())

    if check:
        report = check_apriori_estimates(traj)
        for c in report.checks:
            mark = '[green]✓[/green]' if c.passed else '[red]✗[/red]'
            err_console.print(f'{mark} {c.name}: margin {c.margin:.3e}')
        if not report.passed:
            sys.exit(1)


@cli.command()
@click.option('--x', 'x_text', required=True, help='Plane point "x1,x2"')
def project(x_text: str) -> None:
    """Print the network point φ_d(x) as 'BRANCH radius'."""
    x = _parse('--x', PlanePoint.parse, x_text)
    point = project_to_network(x)
    click.echo(f'{point.branch.value} {fmt(point.radius)}')


@cli.command()
@click.option('--start', required=True, help="Start on the network: 'O' or 'B,r'")
@click.option('--theta', type=float, required=True, help='Control angle θ in radians')
@click.option('--horizon', type=float, default=1.0, show_default=True, help='Horizon T')
@click.option('--out', type=click.Path(), default=None, help='JSON path (default stdout)')
@click.pass_context
def limit(
    ctx: click.Context, start: str, theta: float, horizon: float, out: Optional[str]
) -> None:
    """Closed-form limit trajectory for the constant control e_θ."""
    point = _parse('--start', NetworkPoint.parse, start)
    _require_positive('--horizon', horizon)
    config = _load_config(ctx)
    trajectory = _compute(
        ctx,
        lambda: constant_control_limit(point, theta, horizon, config.geometry.angle_tol),
    )
    _emit_json(trajectory.to_dict(), out)


@cli.command()
@click.option('--eps', type=float, required=True, help='Penalty parameter ε')
@click.option('--lambda', 'lam', type=float, default=1.0, show_default=True, help='Discount λ')
@click.option(
    '--cost',
    type=click.Choice([k for k in COST_KINDS if k != 'counterexample']),
    default='capped_distance',
    show_default=True,
)
@click.option('--cap', type=float, default=2.0, show_default=True, help='Cap of capped_distance')
@click.option('--grid-h', type=float, default=None, help='Grid spacing h')
@click.option('--region', default=None, help='Region "x_min,x_max,y_min,y_max"')
@click.option('--out', type=click.Path(), default=None, help='CSV path (default stdout)')
@click.pass_context
def value2d(
    ctx: click.Context,
    eps: float,
    lam: float,
    cost: str,
    cap: float,
    grid_h: Optional[float],
    region: Optional[str],
    out: Optional[str],
) -> None:
    """Solve V^ε on a 2D grid and write x1, x2, u."""
    _require_positive('--eps', eps)
    config = _load_config(ctx)
    prob = _problem(lam, cost, cap)
    grid = _grid(config.grid, grid_h, region)
    vf = _compute(ctx, lambda: solve_value_eps(prob, eps, grid, config.solver))
    err_console.print(
        f'{vf.iterations} iterations, residual {vf.residual:.3e}, '
        f'boundary slack {vf.boundary_slack:.3e}'
    )
    if out:
        vf.to_csv(out)
        err_console.print(f'[green]✓[/green] Value function written to: {out}')
    else:
        _echo_csv(('x1', 'x2', 'u'), vf.csv_rows())


@cli.command()
@click.option('--lambda', 'lam', type=float, default=1.0, show_default=True, help='Discount λ')
@click.option(
    '--cost',
    type=click.Choice([k for k in COST_KINDS if k != 'counterexample']),
    default='capped_distance',
    show_default=True,
)
@click.option('--cap', type=float, default=2.0, show_default=True, help='Cap of capped_distance')
@click.option('--edge-h', type=float, default=None, help='Edge grid spacing')
@click.option('--radius', type=float, default=None, help='Edge length R')
@click.option('--out', type=click.Path(), default=None, help='CSV path (default stdout)')
@click.pass_context
def valuenet(
    ctx: click.Context,
    lam: float,
    cost: str,
    cap: float,
    edge_h: Optional[float],
    radius: Optional[float],
    out: Optional[str],
) -> None:
    """Solve V_Γ on the four edges and write branch, r, u."""
    config = _load_config(ctx)
    prob = _problem(lam, cost, cap)
    edge = _edge_grid(config.edge_grid, edge_h, radius)
    vf = _compute(ctx, lambda: solve_value_network(prob, edge, config.solver))
    err_console.print(f'{vf.iterations} iterations, residual {vf.residual:.3e}')
    if out:
        vf.to_csv(out)
        err_console.print(f'[green]✓[/green] Network value written to: {out}')
    else:
        _echo_csv(('branch', 'r', 'u'), vf.csv_rows())


@cli.command()
@click.option('--eps', 'eps_text', default='0.2,0.1,0.05', show_default=True, help='ε ladder')
@click.option('--lambda', 'lam', type=float, default=1.0, show_default=True, help='Discount λ')
@click.option(
    '--cost',
    type=click.Choice([k for k in COST_KINDS if k != 'counterexample']),
    default='capped_distance',
    show_default=True,
)
@click.option('--cap', type=float, default=2.0, show_default=True, help='Cap of capped_distance')
@click.option('--grid-h', type=float, default=None, help='Grid spacing h')
@click.option('--region', default=None, help='Region "x_min,x_max,y_min,y_max"')
@click.option('--out', type=click.Path(), default=None, help='JSON path (default stdout)')
@click.pass_context
def converge(
    ctx: click.Context,
    eps_text: str,
    lam: float,
    cost: str,
    cap: float,
    grid_h: Optional[float],
    region: Optional[str],
    out: Optional[str],
) -> None:
    """sup |V^ε − V̄∘φ_d| over an ε ladder, with the value-chain margins."""
    eps_values = _parse('--eps', _float_list, eps_text)
    for eps in eps_values:
        _require_positive('--eps', eps)
    config = _load_config(ctx)
    prob = _problem(lam, cost, cap)
    grid = _grid(config.grid, grid_h, region)
    report = _compute(
        ctx,
        lambda: convergence_study(prob, eps_values, grid, config.edge_grid, config.solver),
    )

    table = Table(title='Convergence')
    table.add_column('ε', justify='right')
    table.add_column('sup error', justify='right')
    table.add_column('m_R', justify='right')
    table.add_column('Lipschitz', justify='right')
    for eps, err, margin, fit in zip(
        report.eps, report.sup_errors, report.chain_margins, report.lipschitz_fit
    ):
        table.add_row(fmt(eps), f'{err:.4e}', f'{margin.modulus:.3e}', f'{fit:.3f}')
    err_console.print(table)
    _emit_json(report.to_dict(), out)
    if not report.passed:
        sys.exit(1)


@cli.command()
@click.argument('name', type=click.Choice(sorted(SCENARIOS)))
@click.option('--out', type=click.Path(), default=None, help='Artifact directory')
@click.option('--eps', type=float, default=None, help='Override the scenario ε')
@click.option('--lambda', 'lam', type=float, default=None, help='Override the scenario λ')
@click.option('--gamma', type=float, default=None, help='Override the scenario γ')
@click.option('--horizon', type=float, default=None, help='Override the scenario horizon')
@click.option('--parallel/--sequential', default=None, help='Run jobs concurrently')
@click.pass_context
def scenario(
    ctx: click.Context,
    name: str,
    out: Optional[str],
    eps: Optional[float],
    lam: Optional[float],
    gamma: Optional[float],
    horizon: Optional[float],
    parallel: Optional[bool],
) -> None:
    """Run one named scenario and write its artifacts and manifest."""
    config = _load_config(ctx)
    cfg = ExperimentConfig.from_config(config, name)
    overrides = {'eps': eps, 'lam': lam, 'gamma': gamma, 'horizon': horizon}
    params = dict(cfg.params)
    for flag, value in overrides.items():
        if value is None:
            continue
        key = SCENARIO_FLAGS[flag]
        if key not in params:
            raise click.UsageError(f'--{flag.replace("lam", "lambda")} does not apply to {name}')
        params[key] = value
    update = {'params': params}
    if out:
        update['output_dir'] = out
    if parallel is not None:
        update['parallel'] = parallel
    cfg = _parse('scenario options', lambda u: ExperimentConfig(**{**cfg.model_dump(), **u}), update)

    console.print(
        Panel.fit(
            f'[bold blue]Junction Lab[/bold blue]\nRunning scenario {name}...',
            border_style='blue',
        )
    )
    manifest = _compute(ctx, lambda: asyncio.run(execute(cfg)))
    _display_manifests([manifest])
    sys.exit(0 if manifest.status.value == 'passed' else 1)


@cli.command(name='summarize')
@click.argument('manifests', nargs=-1, type=click.Path())
@click.option('--out', type=click.Path(), default=None, help='JSON report path')
def summarize_command(manifests: Tuple[str, ...], out: Optional[str]) -> None:
    """Aggregate manifests into one JSON report and a plain-text table."""
    try:
        report = summarize(list(manifests))
    except ManifestError as e:
        raise click.UsageError(str(e))
    click.echo(report.render_text(), nl=False)
    click.echo(f'Overall: {report.overall}')
    for failing in report.failing:
        click.echo(f'  failed: {failing}')
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(report.to_json() + '\n', encoding='utf-8')
    sys.exit(0 if report.passed else 1)


@cli.command()
@click.option('--full', is_flag=True, help='Include the value-convergence ladder')
@click.option('--out', type=click.Path(), default=None, help='Artifact directory')
@click.pass_context
def selftest(ctx: click.Context, full: bool, out: Optional[str]) -> None:
    """Run the invariant suites and report every assertion."""
    config = _load_config(ctx)
    if out:
        config = config.model_copy(
            update={'experiment': config.experiment.model_copy(update={'output_dir': out})}
        )
    console.print(
        Panel.fit(
            '[bold cyan]Junction Lab[/bold cyan]\nRunning self-test...',
            border_style='cyan',
        )
    )
    report = _compute(ctx, lambda: asyncio.run(run_selftest(config, full=full)))
    console.print(report.table())
    if report.passed:
        console.print('[green]✓[/green] All assertions passed')
        sys.exit(0)
    console.print(f'[red]✗[/red] Failed: {", ".join(report.failing)}')
    sys.exit(1)


def _load_config(ctx: click.Context) -> Config:
    """Load configuration from file or environment; JUNCTION_LAB_THREADS wins."""
    try:
        if 'config_path' in ctx.obj:
            config = Config.from_file(ctx.obj['config_path'])
        else:
            config = Config.from_env()
        threads = os.getenv('JUNCTION_LAB_THREADS')
        if threads:
            config = config.model_copy(
                update={
                    'experiment': config.experiment.model_copy(
                        update={'threads': int(threads), 'parallel': int(threads) > 1}
                    )
                }
            )
    except (ValueError, FileNotFoundError) as e:
        raise click.UsageError(f'Invalid configuration: {e}')

    setup_logging(
        'DEBUG' if ctx.obj.get('verbose') else config.logging.level,
        config.logging.file,
        config.logging.format,
    )
    return config


def _parse(what: str, parser: Callable[..., T], value) -> T:
    """Validate a flag before any computation; failures are usage errors."""
    try:
        return parser(value)
    except (ValueError, DomainError) as e:
        raise click.UsageError(f'Invalid {what}: {e}')


def _problem(lam: float, cost: str, cap: float) -> ValueProblem:
    return _parse(
        '--lambda',
        lambda v: ValueProblem(lam=v, cost=CostField.from_name(cost, cap=cap)),
        lam,
    )


def _require_positive(flag: str, value: float) -> None:
    if not value > 0:
        raise click.UsageError(f'{flag} must be positive, got {value}')


def _float_list(text: str) -> List[float]:
    values = [float(p) for p in text.split(',') if p.strip()]
    if not values:
        raise ValueError('expected a comma-separated list of numbers')
    return values


def _grid(base: GridConfig, h: Optional[float], region: Optional[str]) -> GridConfig:
    update = {}
    if h is not None:
        update['h'] = h
    if region is not None:
        values = _parse('--region', _float_list, region)
        if len(values) != 4:
            raise click.UsageError('--region needs four numbers "x_min,x_max,y_min,y_max"')
        update['region'] = tuple(values)
    return _parse('grid options', lambda u: GridConfig(**{**base.model_dump(), **u}), update)


def _edge_grid(
    base: EdgeGridConfig, h: Optional[float], radius: Optional[float]
) -> EdgeGridConfig:
    update = {k: v for k, v in (('h', h), ('radius', radius)) if v is not None}
    return _parse(
        'edge grid options', lambda u: EdgeGridConfig(**{**base.model_dump(), **u}), update
    )


def _compute(ctx: click.Context, work: Callable[[], T]) -> T:
    """Run a computation; domain errors exit 2, other failures exit 1."""
    try:
        return work()
    except DomainError as e:
        raise click.UsageError(str(e))
    except JunctionLabError as e:
        err_console.print(f'[red]✗[/red] {e}')
        if ctx.obj.get('verbose'):
            err_console.print_exception()
        sys.exit(1)


def _echo_csv(header, rows) -> None:
    click.echo(','.join(header))
    for row in rows:
        click.echo(
            ','.join(fmt(v) if isinstance(v, float) else str(v) for v in row)
        )


def _emit_json(payload, out: Optional[str]) -> None:
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + '\n', encoding='utf-8')
        err_console.print(f'[green]✓[/green] Written to: {out}')
    else:
        click.echo(text)


def _display_manifests(manifests: List[Manifest]) -> None:
    """Display the assertion table for finished scenarios."""
    report = summarize(manifests)
    console.print(report.table())
    for manifest in manifests:
        status = manifest.status.value
        mark = '[green]✓[/green]' if status == 'passed' else '[red]✗[/red]'
        console.print(f'{mark} {manifest.scenario}: {status}')
        for artifact in manifest.artifacts:
            console.print(f'    {artifact.path}  {artifact.sha256[:12]}')


def main() -> None:
    """Main entry point for the CLI application."""
    try:
        cli()
    except KeyboardInterrupt:
        console.print('\n[red]Interrupted by user[/red]')
        sys.exit(1)
    except Exception as e:
        console.print(f'[red]Error: {e}[/red]')
        sys.exit(1)


if __name__ == '__main__':
    main()
