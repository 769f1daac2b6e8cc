"""Per-VM resource usage samples and the record set gossiped inside a group.

A VM samples its CPU, memory, disk and network utilisation, stamps the sample
with the current simulation tick and keeps the newest record per origin VM.
Records from different nodes reconcile last-writer-wins by stamp.
"""

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from typing import Self

from layered_gossip.src.exceptions import InvalidInputError

type VmId = str

METRICS: tuple[str, ...] = ("cpu_pct", "mem_pct", "disk_pct", "net_kbps")
"""Metric names in reporting order."""

PERCENT_METRICS: tuple[str, ...] = METRICS[:3]


@dataclass(frozen=True, slots=True)
class ResourceUsage:
    """Point-in-time utilisation of one VM.

    Attributes:
        cpu_pct: CPU utilisation in percent.
        mem_pct: Memory utilisation in percent.
        disk_pct: Disk utilisation in percent.
        net_kbps: Network throughput in kilobits per second.
    """

    cpu_pct: float
    mem_pct: float
    disk_pct: float
    net_kbps: float

    def __post_init__(self) -> None:
        """Reject values outside the metric ranges.

        Raises:
            InvalidInputError: If a percentage is outside [0, 100], the network
                rate is negative, or any value is not finite.
        """
        for name in PERCENT_METRICS:
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 100.0):  # noqa: PLR2004
                msg = f"{name} must be within [0, 100], got {value}"
                raise InvalidInputError(msg)
        if not (math.isfinite(self.net_kbps) and self.net_kbps >= 0.0):
            msg = f"net_kbps must be a non-negative rate, got {self.net_kbps}"
            raise InvalidInputError(msg)

    def metric(self, name: str) -> float:
        """Return the value of one metric by name.

        Args:
            name: One of ``METRICS``.

        Returns:
            The metric value.
        """
        return float(getattr(self, name))


@dataclass(frozen=True, slots=True)
class UsageRecord:
    """A usage sample attributed to its origin VM and stamped with a tick."""

    origin: VmId
    stamp: int
    usage: ResourceUsage

    def __post_init__(self) -> None:
        """Reject negative stamps.

        Raises:
            InvalidInputError: If the stamp is negative.
        """
        if self.stamp < 0:
            msg = f"stamp must be non-negative, got {self.stamp}"
            raise InvalidInputError(msg)


@dataclass(frozen=True, slots=True)
class OriginRecordSet:
    """Newest known record per origin VM.

    Instances are never mutated; every update returns a new set.
    """

    records: Mapping[VmId, UsageRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        """Return the number of origins."""
        return len(self.records)

    def __iter__(self) -> Iterator[UsageRecord]:
        """Iterate over records in origin order."""
        return (self.records[origin] for origin in sorted(self.records))

    def __contains__(self, origin: object) -> bool:
        """Return whether a record for ``origin`` is held."""
        return origin in self.records

    def get(self, origin: VmId) -> UsageRecord | None:
        """Return the record of ``origin`` or None."""
        return self.records.get(origin)

    def origins(self) -> frozenset[VmId]:
        """Return the set of origins held."""
        return frozenset(self.records)

    @classmethod
    def of(cls, *records: UsageRecord) -> Self:
        """Build a set from records, keeping the newest per origin.

        Args:
            *records: Records in any order.

        Returns:
            The record set.
        """
        merged = cls()
        for record in records:
            merged = merged.with_record(record)
        return merged

    def with_record(self, record: UsageRecord) -> Self:
        """Return a copy holding ``record`` unless a newer one is already held.

        Args:
            record: Record to insert.

        Returns:
            The updated set, or ``self`` when nothing changed.
        """
        return self.absorb(type(self)({record.origin: record}))[0]

    def absorb(self, other: "OriginRecordSet") -> tuple[Self, bool]:
        """Merge ``other`` into a copy of this set.

        A record from ``other`` replaces the held one only when its stamp is
        strictly larger, so on equal stamps the receiver keeps its own.

        Args:
            other: Incoming records.

        Returns:
            The merged set and whether any record was added or replaced.
        """
        updates = {
            origin: record
            for origin, record in other.records.items()
            if (held := self.records.get(origin)) is None or record.stamp > held.stamp
        }
        if not updates:
            return self, False
        return type(self)({**self.records, **updates}), True


def merge_usage_records(a: OriginRecordSet, b: OriginRecordSet) -> OriginRecordSet:
    """Merge two record sets last-writer-wins by stamp.

    Args:
        a: Receiver side; wins ties.
        b: Incoming side.

    Returns:
        Every origin of ``a`` or ``b`` with its newest record.
    """
    return a.absorb(b)[0]
