"""Writers for reports, traces and snapshots.

Every writer produces the same bytes for the same input: fixed column order,
``\\n`` line endings and sorted JSON keys where order is not prescribed.
"""

import csv
import io
import json
import logging
from collections.abc import Iterable, Sequence
from enum import StrEnum
from pathlib import Path
from typing import Any

from layered_gossip.src.exceptions import ReportWriteError
from layered_gossip.src.report.metrics import TIERS, MetricsReport
from layered_gossip.src.simulator.trace import EventTrace

logger = logging.getLogger(__name__)

REPORT_COLUMNS: tuple[str, ...] = (
    "scheme",
    "population",
    "groups",
    "regions",
    "round",
    "intra_group_msgs",
    "inter_group_msgs",
    "inter_cloud_msgs",
    "dropped",
    "total",
)


class ReportFormat(StrEnum):
    """Supported report file formats."""

    CSV = "csv"
    JSON = "json"


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as error:
        raise ReportWriteError(path, str(error)) from error
    logger.info("Wrote %s", path)
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as CSV with ``\\n`` line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    return _write_text(path, csv_text(header, rows))


def report_rows(report: MetricsReport) -> list[list[Any]]:
    """Return the CSV rows of a report: one per round, then the TOTAL row."""
    prefix = [report.scheme, report.population, report.groups, report.regions]
    rows: list[list[Any]] = []
    for counts in report.per_round:
        tiers = [counts.tier(name).sent for name in TIERS]
        rows.append([*prefix, counts.round, *tiers, counts.dropped, counts.total])
    columns = list(zip(*(row[4:] for row in rows), strict=True)) if rows else []
    sums = [sum(column) for column in columns[1:]] if columns else [0] * 5
    rows.append([*prefix, "TOTAL", *sums])
    return rows


def emit_report(report: MetricsReport, fmt: ReportFormat | str, path: Path) -> Path:
    """Write a report as CSV or JSON.

    Args:
        report: Report to write.
        fmt: ``csv`` or ``json``.
        path: Target file; parent directories are created.

    Returns:
        ``path``.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    if ReportFormat(fmt) is ReportFormat.CSV:
        return write_csv(path, REPORT_COLUMNS, report_rows(report))
    return _write_text(path, json.dumps(report.to_dict(), indent=4) + "\n")


def write_lines(path: Path, lines: Iterable[str]) -> Path:
    """Write one string per line.

    Raises:
        ReportWriteError: If the file cannot be written.
    """
    return _write_text(path, "".join(f"{line}\n" for line in lines))


def write_trace(trace: EventTrace, path: Path) -> Path:
    """Write the events of a trace as JSON lines."""
    return write_lines(path, trace.lines())


def write_snapshots(trace: EventTrace, path: Path) -> Path:
    """Write the round snapshots of a trace as JSON lines."""
    return write_lines(path, trace.snapshot_lines())
