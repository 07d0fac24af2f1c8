"""Command-line driver.

Subcommands run the verification suites and write one JSON report each,
plus CSV/binary side artifacts.  Exit codes: 0 all checks pass, 1 a check
failed, 2 configuration error, 3 unsupported regime or parameter domain.
"""

from __future__ import annotations

import sys
from dataclasses import replace

import click

from . import suites
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, UnsupportedRegimeError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_REGIME = 3


def _load(config_path, out_dir, seed, suite) -> RunConfig:
    try:
        cfg = load_config(config_path) if config_path else RunConfig()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    overrides = {}
    if out_dir is not None:
        overrides["out_dir"] = out_dir
    if seed is not None:
        overrides["seed"] = seed
    if suite is not None:
        overrides["suite"] = suite
    return replace(cfg, **overrides) if overrides else cfg


def _run(runner, cfg: RunConfig):
    try:
        report = runner(cfg, out_dir=cfg.out_dir)
    except (DomainError, UnsupportedRegimeError) as exc:
        click.echo(f"unsupported regime: {exc}", err=True)
        sys.exit(EXIT_REGIME)
    for line in report.summary_lines():
        click.echo(line)
    click.echo(f"suite {report.suite}: {'PASS' if report.passed else 'FAIL'}")
    sys.exit(EXIT_OK if report.passed else EXIT_CHECK_FAILED)


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(), default=None,
                      help="flat key-value config file")(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None,
                      help="output directory for reports and artifacts")(fn)
    fn = click.option("--seed", type=int, default=None, help="random seed override")(fn)
    fn = click.option("--suite", type=str, default=None,
                      help="restrict to a named sub-suite where supported")(fn)
    return fn


@click.group()
def main():
    """Star products, the Grosse-Wulkenhaar model, and trajectory-space
    constrained dynamics: verification suites and solvers."""


@main.command("verify-algebra")
@_common
def cmd_verify_algebra(config_path, out_dir, seed, suite):
    """Run the matrix-base and cross-representation verification suites."""
    _run(suites.verify_algebra, _load(config_path, out_dir, seed, suite))


@main.command("solve-gw")
@_common
def cmd_solve_gw(config_path, out_dir, seed, suite):
    """Solve the self-dual model exactly and verify stationarity/duality."""
    _run(suites.solve_gw, _load(config_path, out_dir, seed, suite))


@main.command("tensors")
@_common
def cmd_tensors(config_path, out_dir, seed, suite):
    """Energy-momentum and current checks."""
    _run(suites.tensors, _load(config_path, out_dir, seed, suite))


@main.command("mollifier-scan")
@_common
def cmd_mollifier_scan(config_path, out_dir, seed, suite):
    """Kernel normalization and mean-convergence scan."""
    _run(suites.mollifier_scan, _load(config_path, out_dir, seed, suite))


@main.command("hamiltonian-demo")
@_common
def cmd_hamiltonian_demo(config_path, out_dir, seed, suite):
    """Trajectory-space constraint and stability demonstrations."""
    _run(suites.hamiltonian_demo, _load(config_path, out_dir, seed, suite))


if __name__ == "__main__":
    main()
