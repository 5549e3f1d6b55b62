"""Command-line entry point.

Subcommands map one-to-one onto the experiment runners; common flags
override values from ``--config``.  Exit codes: 0 success, 1 cross-check
or verify failure, 2 configuration error, 3 capacity error.
"""

from __future__ import annotations

import sys

import click

from .config import build_config
from .errors import CapacityError, ConfigError, VerificationError
from .experiments import RUNNERS

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def common_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="Config file (strict key = value sections)."),
        click.option("--q", type=int, default=None, help="Character modulus."),
        click.option("--char", type=int, default=None, help="Character index."),
        click.option("--max", "max_", type=int, default=None, help="Range limit."),
        click.option("--threads", type=int, default=None, help="Worker pool size."),
        click.option("--out", type=click.Path(), default=None, help="Output directory."),
        click.option("--seed", type=int, default=None, help="Random-model seed."),
        click.option("--figures/--no-figures", "figures", default=None,
                     help="Render PNG figures next to the CSVs."),
    ]):
        fn = opt(fn)
    return fn


def _dispatch(kind: str, config_path, **overrides):
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if "max_" in overrides:
        overrides["max"] = overrides.pop("max_")
    try:
        cfg = build_config(kind, config_path, **overrides)
        result = RUNNERS[kind](cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except CapacityError as exc:
        click.echo(f"capacity error: {exc}", err=True)
        sys.exit(EXIT_CAPACITY)
    except VerificationError as exc:
        click.echo(f"cross-check failed: {exc}", err=True)
        sys.exit(EXIT_CHECK_FAILED)
    return cfg, result


@click.group()
def main():
    """Summatory experiments for Mobius-resembling multiplicative functions."""


@main.command()
@common_options
def growth(config_path, **overrides):
    """Partial sums of f at a geometric grid, both methods, with ratios."""
    cfg, result = _dispatch("growth", config_path, **overrides)
    fit = result["fit"]
    if fit is not None:
        click.echo(f"fitted exponent: {fit.exponent:.4f} (constant {fit.constant:.4g})")
    sup, at = result["sup_quarter"]
    click.echo(f"sup |sum|/x^(1/4) = {sup:.6f} at x = {at}")
    click.echo(f"report: {result['csv']}")


@main.command()
@common_options
@click.option("--t-max", type=float, default=None, help="Zero-scan height.")
@click.option("--threshold", "noncancel_threshold", type=float, default=None,
              help="Non-cancellation threshold on |L| at a zero.")
def omega(config_path, **overrides):
    """Analytic x^(1/4) lower-bound constant vs the empirical supremum."""
    cfg, result = _dispatch("omega", config_path, **overrides)
    click.echo(f"analytic constant:  {result['analytic_constant']:.9f}")
    click.echo(f"empirical supremum: {result['empirical_sup']:.9f} "
               f"at x = {result['empirical_argmax']}")
    if result["shortfall"]:
        click.echo("note: empirical supremum falls short of the analytic constant "
                   "on this range (the bound only bites at some larger x)")


@main.command()
@common_options
@click.option("--t-max", type=float, default=None, help="Zero-scan height.")
@click.option("--threshold", "noncancel_threshold", type=float, default=None,
              help="Non-cancellation threshold on |L| at a zero.")
def zeros(config_path, **overrides):
    """Scan quarter-line zeros and evaluate L, P, zeta' at each."""
    cfg, result = _dispatch("zeros", config_path, **overrides)
    records = result["records"]
    nc = sum(1 for r in records if r.noncancelled)
    click.echo(f"found {len(records)} zeros, {nc} non-cancelled; {result['csv']}")


@main.command()
@common_options
@click.option("--sigma", "sigmas", type=float, multiple=True,
              help="Real parts to probe (repeatable).")
def tail(config_path, sigmas, **overrides):
    """Measured decay of the truncation tail over doublings of M."""
    overrides["sigmas"] = tuple(sigmas) if sigmas else None
    cfg, result = _dispatch("tail-decay", config_path, **overrides)
    for sigma, avg in result["averages"].items():
        click.echo(f"sigma={sigma:g}: avg log2 ratio {avg:+.4f} "
                   f"(reference {0.25 - sigma:+.4f})")


@main.command("random")
@common_options
@click.option("--trials", type=int, default=None, help="Monte Carlo trials.")
@click.option("--all-ones", "all_ones", is_flag=True, default=None,
              help="Debug: force every prime sign to +1.")
def random_cmd(config_path, **overrides):
    """Random multiplicative model: seeded, reproducible trials."""
    cfg, result = _dispatch("random-model", config_path, **overrides)
    run = result["run"]
    click.echo(f"{run.trials} trials to x = {run.x_max}; "
               f"median |sum|/sqrt(x) at max: {run.quantiles[0.5][-1]:.4f}")


@main.command()
@common_options
def verify(config_path, **overrides):
    """Run the cross-module identity suites; exit 0 iff all pass."""
    cfg, result = _dispatch("verify", config_path, **overrides)
    for name, status, detail in result["results"]:
        click.echo(f"{status:4s} {name}: {detail}")
    if not result["all_pass"]:
        sys.exit(EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
