"""Run several schemes over several seeds and pair them with centralized.

Runs are independent and CPU bound, so with ``jobs > 1`` they execute in a
process pool. Results are merged in ``(seed, scheme)`` order and the output does
not depend on ``jobs``.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from layered_gossip.src.exceptions import ConfigurationError
from layered_gossip.src.report.emit import write_csv
from layered_gossip.src.report.metrics import MetricsReport
from layered_gossip.src.simulator.engine import run
from layered_gossip.src.simulator.scenario import Scenario, Scheme, load_scenario

logger = logging.getLogger(__name__)

COMPARE_COLUMNS: tuple[str, ...] = (
    "seed",
    "scheme",
    "population",
    "groups",
    "regions",
    "total",
    "convergence_round",
    "overhead_ratio",
)


def parse_schemes(text: str) -> list[Scheme]:
    """Parse a comma separated scheme list such as ``layered,flat,central``.

    Raises:
        ConfigurationError: On an unknown or repeated scheme.
    """
    names = [name.strip() for name in text.split(",") if name.strip()]
    if not names:
        raise ConfigurationError("schemes", "at least one scheme is required")
    try:
        schemes = [Scheme(name) for name in names]
    except ValueError:
        options = ", ".join(scheme.value for scheme in Scheme)
        raise ConfigurationError("schemes", f"expected some of {options}") from None
    if len(set(schemes)) != len(schemes):
        raise ConfigurationError("schemes", "a scheme is listed twice")
    return schemes


def _run_report(scenario: Scenario) -> MetricsReport:
    return run(scenario)[0]


def run_paired(
    scenario: Scenario, schemes: Sequence[Scheme], seeds: int, jobs: int = 1
) -> list[MetricsReport]:
    """Run every scheme on every seed and attach overhead ratios.

    Seeds are ``scenario.seed + i`` for ``i < seeds``. When centralized
    collection is among the schemes, every other report of the same seed gets
    its overhead ratio against it.

    Args:
        scenario: Base scenario; its scheme is replaced per run.
        schemes: Schemes to run.
        seeds: Number of seeds.
        jobs: Worker processes; 1 runs everything in this process.

    Returns:
        Reports in ``(seed, scheme)`` order.
    """
    if seeds < 1:
        raise ConfigurationError("seeds", "must be at least 1")
    runs = [
        scenario.with_seed(scenario.seed + index).with_scheme(scheme)
        for index in range(seeds)
        for scheme in schemes
    ]
    logger.info("Running %d simulations with %d jobs", len(runs), jobs)
    if jobs <= 1:
        reports = [_run_report(run_scenario) for run_scenario in runs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            reports = list(executor.map(_run_report, runs))
    central = {
        report.seed: report.total
        for report in reports
        if report.scheme == Scheme.CENTRAL and report.total > 0
    }
    return [
        report.paired_with(central[report.seed])
        if report.scheme != Scheme.CENTRAL and report.seed in central
        else report
        for report in reports
    ]


def compare_row(report: MetricsReport) -> list[object]:
    """Return the ``compare.csv`` row of a report."""
    ratio = "" if report.overhead_ratio is None else f"{report.overhead_ratio:.4f}"
    return [
        report.seed,
        report.scheme,
        report.population,
        report.groups,
        report.regions,
        report.total,
        "" if report.convergence_round is None else report.convergence_round,
        ratio,
    ]


def compare_schemes(
    scenario_path: Path, schemes: str, seeds: int, out: Path, jobs: int = 1
) -> list[MetricsReport]:
    """Compare schemes on a scenario file and write ``compare.csv``.

    Args:
        scenario_path: Scenario JSON file.
        schemes: Comma separated scheme names.
        seeds: Number of seeds.
        out: Output directory.
        jobs: Runs executed in parallel.

    Returns:
        The reports in ``(seed, scheme)`` order.
    """
    scenario = load_scenario(scenario_path)
    reports = run_paired(scenario, parse_schemes(schemes), seeds, jobs)
    write_csv(out / "compare.csv", COMPARE_COLUMNS, map(compare_row, reports))
    return reports
