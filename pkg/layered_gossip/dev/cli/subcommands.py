"""Simulation commands of the command line.

Every public function here is registered as a command. Command bodies import
their implementation lazily so ``--help`` stays fast.
"""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer

from layered_gossip.src.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

CONFIG_ERROR_EXIT = 1
IO_ERROR_EXIT = 2


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Turn configuration and output errors into exit codes 1 and 2."""
    try:
        yield
    except ConfigurationError as error:
        logger.error("Invalid scenario: %s", error)  # noqa: TRY400
        raise typer.Exit(CONFIG_ERROR_EXIT) from error
    except OSError as error:
        logger.error("%s", error)  # noqa: TRY400
        raise typer.Exit(IO_ERROR_EXIT) from error


def simulate(
    scenario: Path = typer.Option(
        ..., "--scenario", help="Scenario JSON file or bundled scenario name."
    ),
    seed: int | None = typer.Option(
        None, "--seed", min=0, help="Seed overriding the scenario's own."
    ),
    out: Path = typer.Option(Path(), "--out", help="Output directory."),
    trace: bool = typer.Option(  # noqa: FBT001
        False,  # noqa: FBT003
        "--trace",
        help="Also write trace.jsonl and snapshots.jsonl.",
    ),
) -> None:
    """Simulate one scenario and write report.csv and report.json.

    Example:
        $ uv run layered-gossip simulate --scenario s.json --seed 7 --out out --trace
    """
    from layered_gossip.dev.cli.commands.simulate import (  # noqa: PLC0415
        simulate_scenario,
    )

    with _exit_on_error():
        simulate_scenario(scenario, out, seed, trace=trace)


def compare(
    scenario: Path = typer.Option(
        ..., "--scenario", help="Scenario JSON file or bundled scenario name."
    ),
    schemes: str = typer.Option(
        "layered,flat,central", "--schemes", help="Comma separated schemes."
    ),
    seeds: int = typer.Option(1, "--seeds", min=1, help="Seeds per scheme."),
    out: Path = typer.Option(Path(), "--out", help="Output directory."),
    jobs: int = typer.Option(1, "--jobs", min=1, help="Runs in parallel."),
) -> None:
    """Compare schemes over several seeds and write compare.csv.

    Seeds count up from the scenario's seed. Every scheme gets its overhead
    ratio against centralized collection of the same seed.
    """
    from layered_gossip.dev.cli.commands.compare import (  # noqa: PLC0415
        compare_schemes,
    )

    with _exit_on_error():
        reports = compare_schemes(scenario, schemes, seeds, out, jobs)
    for report in reports:
        ratio = "n/a"
        if report.overhead_ratio is not None:
            ratio = f"{report.overhead_ratio:.1f}%"
        typer.echo(
            f"seed {report.seed} {report.scheme}: {report.total} messages, "
            f"convergence round {report.convergence_round}, overhead {ratio}"
        )


def sweep(
    scenario: Path = typer.Option(
        ..., "--scenario", help="Scenario JSON file or bundled scenario name."
    ),
    param: str = typer.Option(
        ..., "--param", help="Parameter and values, e.g. population=50,100,200."
    ),
    schemes: str = typer.Option(
        "layered,central", "--schemes", help="Comma separated schemes."
    ),
    seeds: int = typer.Option(1, "--seeds", min=1, help="Seeds per value."),
    out: Path = typer.Option(Path(), "--out", help="Output directory."),
    jobs: int = typer.Option(1, "--jobs", min=1, help="Runs in parallel."),
) -> None:
    """Vary one parameter, compare schemes at every value and write sweep.csv."""
    from layered_gossip.dev.cli.commands.sweep import (  # noqa: PLC0415
        sweep_parameter,
    )

    with _exit_on_error():
        sweep_parameter(scenario, param, schemes, seeds, out, jobs)
