#!/usr/bin/env python3
"""
ARW Lab CLI
Command-line interface for Activated Random Walk experiments.
"""

import sys
from pathlib import Path
import click
import logging

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src import __version__
from src.config import EXPERIMENTS, ConfigError, RunConfig, apply_overrides, load_config
from src.analysis.reporter import render_outcome
from src.analysis.runner import run

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def common_options(func):
    """Flags shared by every experiment command; each overrides the config file."""
    options = [
        click.option('--dim', type=int, help='Lattice dimension'),
        click.option('--size', '-L', type=int, help='Side length'),
        click.option('--lambda', 'lam', type=float, help='Sleep rate'),
        click.option('--kernel', help="Jump kernel: nn, biased:<p>, tasep or a kernel file"),
        click.option('--seed', type=int, help='Experiment seed'),
        click.option('--replicas', '-r', type=int, help='Replicas per grid point'),
        click.option('--scheduler', help='Toppling scheduler (fifo, raster, random, wavefront)'),
        click.option('--cap', type=int, help='Toppling cap per stabilization'),
        click.option('--workers', '-j', type=int, help='Worker processes'),
        click.option('--out', '-o', help='Output directory'),
        click.option('--progress/--no-progress', default=False, help='Show progress bars'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def execute(ctx, experiment, boundary=None, progress=False, **overrides):
    """Apply overrides, run the experiment, print the summary and set the exit code."""
    config: RunConfig = ctx.obj['config']
    config.experiment = experiment
    try:
        apply_overrides(config, boundary=boundary, **overrides)
        outcome = run(config, progress=progress)
    except ConfigError as e:
        click.secho(f"❌ Invalid configuration:\n{e}", fg='red', err=True)
        raise click.Abort()
    except ValueError as e:
        click.secho(f"❌ {e}", fg='red', err=True)
        raise click.Abort()

    render_outcome(outcome)
    if outcome.status:
        sys.exit(outcome.status)


@click.group()
@click.option('--config', '-c', type=click.Path(exists=True),
              help='Path to configuration YAML file')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.pass_context
def cli(ctx, config, verbose):
    """
    ARW Lab - simulation and verification of Activated Random Walk.

    Stabilizes particle configurations with a site-wise instruction field,
    checks the abelian properties, measures critical densities and runs the
    two-density coupling.
    """
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    ctx.ensure_object(dict)
    try:
        ctx.obj['config'] = load_config(config)
    except ConfigError as e:
        click.secho(f"❌ Invalid configuration file {config}:\n{e}", fg='red', err=True)
        raise click.Abort()
    ctx.obj['verbose'] = verbose


@cli.command()
@common_options
@click.pass_context
def drive(ctx, **options):
    """
    Measure the retained density zeta(u) on an absorbing box.

    Examples:

        arw drive --dim 1 -L 64 --lambda 1 -r 8

        arw --config drive.yaml drive --workers 4
    """
    execute(ctx, 'drive', boundary='absorbing', **options)


@cli.command()
@click.option('--double', is_flag=True, default=None,
              help='Also run on a torus of twice the side length')
@common_options
@click.pass_context
def scan(ctx, double, **options):
    """
    Stabilize on a torus across a density grid and report activity.

    Examples:

        arw scan --dim 1 -L 128 --lambda 1

        arw scan --double
    """
    if double is not None:
        ctx.obj['config'].grid.double = double
    execute(ctx, 'scan', boundary='torus', **options)


@cli.command()
@click.option('--horizon', type=float, help='Stop at this continuous time')
@common_options
@click.pass_context
def gillespie(ctx, horizon, **options):
    """
    Run the continuous-time process on the shared instruction stream.

    Examples:

        arw gillespie --dim 1 -L 16 --horizon 50
    """
    if horizon is not None:
        ctx.obj['config'].engine.horizon = horizon
    execute(ctx, 'gillespie', **options)


@cli.command()
@click.option('--zeta1', type=float, help='Lower density')
@click.option('--zeta2', type=float, help='Higher density')
@click.option('--runs', type=int, help='Number of coupled runs')
@click.option('--round-cap', type=int, help='Maximum embedding rounds')
@common_options
@click.pass_context
def couple(ctx, zeta1, zeta2, runs, round_cap, **options):
    """
    Run the two-density coupling on a torus and check its bounds.

    Examples:

        arw couple --zeta1 0.2 --zeta2 0.5 -L 64 --runs 20
    """
    coupling = ctx.obj['config'].coupling
    for attr, value in (('zeta1', zeta1), ('zeta2', zeta2), ('runs', runs),
                        ('round_cap', round_cap)):
        if value is not None:
            setattr(coupling, attr, value)
    execute(ctx, 'couple', boundary='torus', **options)


@cli.command()
@click.option('--quick', is_flag=True, help='Run a tenth of the default instances')
@common_options
@click.pass_context
def selftest(ctx, quick, **options):
    """
    Run the randomized property suites; exits non-zero on any failure.

    Examples:

        arw selftest

        arw selftest --quick --seed 7
    """
    if quick:
        suites = ctx.obj['config'].selftest
        for name in ('abelian', 'least_action', 'monotonicity', 'gillespie', 'coupling',
                     'pigeonhole'):
            setattr(suites, name, max(1, getattr(suites, name) // 10))
    execute(ctx, 'selftest', **options)


@cli.command()
@click.argument('curve', type=click.Path(exists=True))
@click.option('--bootstrap', '-b', type=int, help='Bootstrap resamples')
@click.option('--seed', type=int, help='Bootstrap seed')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def estimate(ctx, curve, bootstrap, seed, out):
    """
    Fit min(u, c) to an existing curve CSV.

    CURVE: CSV with columns u and zeta

    Examples:

        arw estimate results/curve.csv
    """
    config = ctx.obj['config']
    config.estimate.curve = curve
    if bootstrap is not None:
        config.estimate.bootstrap = bootstrap
    execute(ctx, 'estimate', seed=seed, out=out)


@cli.command()
@common_options
@click.pass_context
def universality(ctx, **options):
    """
    Compare initial-state families listed under 'families' in the config.

    Examples:

        arw --config families.yaml universality
    """
    execute(ctx, 'universality', **options)


@cli.command(name='run')
@click.option('--progress/--no-progress', default=False, help='Show progress bars')
@click.pass_context
def run_config(ctx, progress):
    """
    Run the experiment named in the configuration file.

    Examples:

        arw --config experiment.yaml run
    """
    config = ctx.obj['config']
    execute(ctx, config.experiment, progress=progress)


@cli.command()
@click.option('--output', '-o', default='arw-config.yaml',
              help='Output configuration file path')
@click.option('--experiment', '-e', default='drive', type=click.Choice(EXPERIMENTS),
              help='Experiment kind written into the file')
@click.pass_context
def init_config(ctx, output, experiment):
    """
    Generate example configuration file.

    Examples:

        arw init-config

        arw init-config --experiment scan --output scan.yaml
    """
    config = RunConfig.from_defaults(experiment)

    config.save_yaml(output)
    click.echo(f"✅ Configuration file created: {output}")
    click.echo("\nEdit the file and run:")
    click.echo(f"  arw --config {output} run")


@cli.command()
@click.pass_context
def version(ctx):
    """Show version information."""
    click.echo(f"ARW Lab v{__version__}")
    click.echo("Activated Random Walk simulation and verification")


def main():
    """Entry point for the CLI."""
    cli(obj={})


if __name__ == '__main__':
    main()
