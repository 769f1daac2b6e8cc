"""Vary one scenario parameter and compare schemes at every value."""

import logging
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path

from layered_gossip.dev.cli.commands.compare import parse_schemes, run_paired
from layered_gossip.src.exceptions import ConfigurationError, InvalidInputError
from layered_gossip.src.report.emit import write_csv
from layered_gossip.src.report.metrics import MetricsReport
from layered_gossip.src.simulator.scenario import Scenario, load_scenario

logger = logging.getLogger(__name__)

SWEEP_COLUMNS: tuple[str, ...] = (
    "param",
    "value",
    "seed",
    "scheme",
    "population",
    "total",
    "overhead_ratio",
)


def _optional_int(text: str) -> int | None:
    return None if text.lower() == "none" else int(text)


SWEEPABLE: dict[str, Callable[[str], object]] = {
    "population": int,
    "rounds": int,
    "tau": float,
    "protocol.beta": float,
    "protocol.f_max": int,
    "protocol.k_group": _optional_int,
    "protocol.k_cloud": _optional_int,
    "latency.loss_intra": float,
}
"""Parameters ``sweep`` can vary, with the parser of their values."""


def parse_param(text: str) -> tuple[str, list[str]]:
    """Split ``name=v1,v2`` into the name and its raw values.

    Raises:
        ConfigurationError: On a malformed argument or an unsupported name.
    """
    name, sep, values = text.partition("=")
    name = name.strip()
    raw = [value.strip() for value in values.split(",") if value.strip()]
    if not sep or not raw:
        raise ConfigurationError("param", f"expected name=v1,v2,... got {text!r}")
    if name not in SWEEPABLE:
        raise ConfigurationError(
            "param", f"cannot sweep {name!r}, choose from {', '.join(SWEEPABLE)}"
        )
    return name, raw


def with_param(scenario: Scenario, name: str, raw: str) -> Scenario:
    """Return ``scenario`` with parameter ``name`` set from its text ``raw``.

    Raises:
        ConfigurationError: If the value does not parse or is out of range.
    """
    try:
        value = SWEEPABLE[name](raw)
        if name == "population":
            return scenario.resized(value)  # type: ignore[arg-type]
        section, _, field = name.rpartition(".")
        if not section:
            return replace(scenario, **{field: value})
        nested = replace(getattr(scenario, section), **{field: value})
        return replace(scenario, **{section: nested})
    except InvalidInputError as error:
        raise ConfigurationError(name, str(error)) from error
    except ValueError as error:
        if isinstance(error, ConfigurationError):
            raise
        raise ConfigurationError(name, f"invalid value {raw!r}") from error


def sweep_parameter(  # noqa: PLR0913
    scenario_path: Path,
    param: str,
    schemes: str,
    seeds: int,
    out: Path,
    jobs: int = 1,
) -> list[tuple[str, MetricsReport]]:
    """Run the schemes at every value of one parameter and write ``sweep.csv``.

    Args:
        scenario_path: Scenario JSON file.
        param: ``name=v1,v2,...``.
        schemes: Comma separated scheme names.
        seeds: Seeds per value.
        out: Output directory.
        jobs: Runs executed in parallel.

    Returns:
        ``(value, report)`` pairs in sweep order.
    """
    scenario = load_scenario(scenario_path)
    name, values = parse_param(param)
    selected = parse_schemes(schemes)
    results: list[tuple[str, MetricsReport]] = []
    for raw in values:
        logger.info("Sweeping %s=%s", name, raw)
        variant = with_param(scenario, name, raw)
        results.extend(
            (raw, report) for report in run_paired(variant, selected, seeds, jobs)
        )
    rows = [
        [
            name,
            raw,
            report.seed,
            report.scheme,
            report.population,
            report.total,
            "" if report.overhead_ratio is None else f"{report.overhead_ratio:.4f}",
        ]
        for raw, report in results
    ]
    write_csv(out / "sweep.csv", SWEEP_COLUMNS, rows)
    return results
