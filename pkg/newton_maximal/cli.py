"""Command line: ``run`` executes verification suites, ``diagram`` prints a Newton diagram."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import typer

from newton_maximal.config import ExperimentConfig, load_experiment_config
from newton_maximal.diagram import build_diagram
from newton_maximal.errors import ConfigError, DiagramError, PolynomialSyntaxError
from newton_maximal.polynomial import parse_polynomial
from newton_maximal.suites import run_experiment

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

app = typer.Typer(add_completion=False, help="Newton diagrams, multi-parameter maximal operators and weak-type checks.")


@app.command()
def run(
    config: Optional[Path] = typer.Option(None, "--config", help="Sectioned key = value configuration file."),
    suite: Optional[str] = typer.Option(None, "--suite", help="diagram, partition, monomial, maximal, cz, oscillatory, weaktype or all."),
    poly: Optional[str] = typer.Option(None, "--poly", help="Polynomial in t1..tn, e.g. 't1^2*t2 + t1*t2^3'."),
    n: Optional[int] = typer.Option(None, "--n", help="Number of variables."),
    qmax: Optional[int] = typer.Option(None, "--qmax", help="Largest dyadic index for the partition check."),
    seed: Optional[int] = typer.Option(None, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory."),
    log_level: str = typer.Option("INFO", "--log-level"),
) -> None:
    """Run the configured suites and write report.json, CSV tables and SVG plots."""

    logging.basicConfig(level=log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_experiment_config(config) if config is not None else ExperimentConfig()
        cfg = cfg.with_overrides(suite=suite, poly=poly, n=n, qmax=qmax, seed=seed, out=out)
        report = run_experiment(cfg)
    except (ConfigError, PolynomialSyntaxError, ValueError) as exc:
        logger.error(f"{exc}")
        raise typer.Exit(EXIT_USAGE)

    summary = report.generate_summary()
    typer.echo(json.dumps(summary, indent=2, sort_keys=True))
    raise typer.Exit(EXIT_FAILURE if report.has_errors() else EXIT_PASS)


@app.command()
def diagram(
    poly: str = typer.Option(..., "--poly", help="Polynomial in t1..tn."),
    n: int = typer.Option(..., "--n", help="Number of variables."),
) -> None:
    """Print the Newton diagram of a polynomial as JSON."""

    try:
        result = build_diagram(parse_polynomial(poly, n))
    except ValueError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_USAGE)
    except DiagramError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(EXIT_FAILURE)
    typer.echo(json.dumps(result.to_dict(), indent=2, sort_keys=True))


def main() -> None:
    app()
