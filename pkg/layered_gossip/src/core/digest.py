"""Aggregate digests summarising the usage of a group or a region.

A digest stores count, sum, min and max per metric, which is enough to derive
the mean and to compose group digests into region digests. Freshness is a
sequence number incremented by the emitting leader, so no clocks are compared.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Self

from layered_gossip.src.core.usage import METRICS, OriginRecordSet
from layered_gossip.src.exceptions import InvalidInputError

type GroupId = str
type RegionId = str


class ScopeKind(StrEnum):
    """What a digest summarises."""

    GROUP = "group"
    REGION = "region"


@dataclass(frozen=True, slots=True, order=True)
class Scope:
    """A group or region identifier tagged with its kind."""

    kind: ScopeKind
    id: str

    @classmethod
    def group(cls, group_id: GroupId) -> Self:
        """Return the scope of a group."""
        return cls(ScopeKind.GROUP, group_id)

    @classmethod
    def region(cls, region_id: RegionId) -> Self:
        """Return the scope of a region."""
        return cls(ScopeKind.REGION, region_id)


@dataclass(frozen=True, slots=True)
class MetricStats:
    """Sum, minimum and maximum of one metric over the contributors."""

    sum: float
    min: float
    max: float

    def combine(self, other: "MetricStats") -> "MetricStats":
        """Return the stats of the union of both contributor sets."""
        return MetricStats(
            self.sum + other.sum, min(self.min, other.min), max(self.max, other.max)
        )


@dataclass(frozen=True, slots=True)
class AggregateDigest:
    """Summarised usage of a scope.

    Attributes:
        scope: Group or region summarised.
        seq: Leader-assigned sequence number, larger is fresher.
        contributing: Number of VMs summarised.
        stats: Per-metric statistics keyed by the names in ``METRICS``.
        freshest: Largest record stamp among the contributors.
    """

    scope: Scope
    seq: int
    contributing: int
    stats: Mapping[str, MetricStats]
    freshest: int

    def __post_init__(self) -> None:
        """Reject digests without contributors or with missing metrics.

        Raises:
            InvalidInputError: If ``contributing`` is below one, ``seq`` is
                negative or a metric is missing.
        """
        if self.contributing < 1:
            msg = f"digest for {self.scope.id} needs a contributor"
            raise InvalidInputError(msg)
        if self.seq < 0:
            msg = f"digest seq must be non-negative, got {self.seq}"
            raise InvalidInputError(msg)
        if missing := set(METRICS) - set(self.stats):
            msg = f"digest for {self.scope.id} lacks metrics {sorted(missing)}"
            raise InvalidInputError(msg)

    def stat(self, metric: str) -> MetricStats:
        """Return the statistics of one metric."""
        return self.stats[metric]

    def mean(self, metric: str) -> float:
        """Return the mean of one metric over the contributors."""
        return self.stats[metric].sum / self.contributing


@dataclass(frozen=True, slots=True)
class DigestSet:
    """Freshest known digest per group and per region."""

    group_digests: Mapping[GroupId, AggregateDigest] = field(default_factory=dict)
    region_digests: Mapping[RegionId, AggregateDigest] = field(default_factory=dict)

    def __len__(self) -> int:
        """Return the number of digests held."""
        return len(self.group_digests) + len(self.region_digests)

    def get(self, scope: Scope) -> AggregateDigest | None:
        """Return the digest held for ``scope`` or None."""
        table = (
            self.group_digests
            if scope.kind is ScopeKind.GROUP
            else self.region_digests
        )
        return table.get(scope.id)

    def digests(self) -> list[AggregateDigest]:
        """Return all digests ordered by scope."""
        held = [*self.group_digests.values(), *self.region_digests.values()]
        return sorted(held, key=lambda digest: digest.scope)

    def covers(self, groups: Iterable[GroupId], regions: Iterable[RegionId]) -> bool:
        """Return whether a digest is held for every given group and region."""
        return set(groups) <= self.group_digests.keys() and set(
            regions
        ) <= self.region_digests.keys()

    def with_digest(self, digest: AggregateDigest) -> Self:
        """Return a copy holding ``digest`` unless an equal or higher seq is held."""
        if digest.scope.kind is ScopeKind.GROUP:
            other = type(self)(group_digests={digest.scope.id: digest})
        else:
            other = type(self)(region_digests={digest.scope.id: digest})
        return self.absorb(other)[0]

    def absorb(self, other: "DigestSet") -> tuple[Self, bool]:
        """Merge ``other`` into a copy of this set.

        Per key the digest with the larger seq wins; equal seq keeps the held one.

        Args:
            other: Incoming digests.

        Returns:
            The merged set and whether any digest was added or replaced.
        """
        groups, groups_changed = _merge_table(self.group_digests, other.group_digests)
        regions, regions_changed = _merge_table(
            self.region_digests, other.region_digests
        )
        if not (groups_changed or regions_changed):
            return self, False
        return type(self)(groups, regions), True


def _merge_table[K](
    held: Mapping[K, AggregateDigest], incoming: Mapping[K, AggregateDigest]
) -> tuple[Mapping[K, AggregateDigest], bool]:
    updates = {
        key: digest
        for key, digest in incoming.items()
        if (current := held.get(key)) is None or digest.seq > current.seq
    }
    if not updates:
        return held, False
    return {**held, **updates}, True


def merge_digest_sets(a: DigestSet, b: DigestSet) -> DigestSet:
    """Merge two digest sets keeping the larger seq per key.

    Args:
        a: Receiver side; wins ties.
        b: Incoming side.

    Returns:
        Union of the keys with the freshest digest for each.
    """
    return a.absorb(b)[0]


def compute_aggregate(
    records: OriginRecordSet,
    now: int,
    staleness_window: int,
    scope: Scope,
    seq: int,
) -> AggregateDigest | None:
    """Summarise the records that are no older than the staleness window.

    Args:
        records: Records of the scope's VMs.
        now: Current tick.
        staleness_window: Largest admitted age in ticks.
        scope: Scope the digest describes.
        seq: Sequence number to stamp on the digest.

    Returns:
        The digest, or None when no record is fresh.

    Raises:
        InvalidInputError: If ``staleness_window`` is below one.
    """
    if staleness_window < 1:
        msg = f"staleness_window must be at least 1, got {staleness_window}"
        raise InvalidInputError(msg)
    fresh = [record for record in records if now - record.stamp <= staleness_window]
    if not fresh:
        return None
    stats: dict[str, MetricStats] = {}
    for metric in METRICS:
        values = [record.usage.metric(metric) for record in fresh]
        stats[metric] = MetricStats(sum(values), min(values), max(values))
    return AggregateDigest(
        scope=scope,
        seq=seq,
        contributing=len(fresh),
        stats=stats,
        freshest=max(record.stamp for record in fresh),
    )


def combine_digests(
    digests: Iterable[AggregateDigest], scope: Scope, seq: int
) -> AggregateDigest | None:
    """Compose digests of disjoint scopes into one digest.

    Sums and counts add up, minima and maxima carry over.

    Args:
        digests: Component digests, e.g. the group digests of a region.
        scope: Scope of the composed digest.
        seq: Sequence number to stamp on the result.

    Returns:
        The composed digest, or None when ``digests`` is empty.
    """
    parts = sorted(digests, key=lambda digest: digest.scope)
    if not parts:
        return None
    stats = dict(parts[0].stats)
    for part in parts[1:]:
        stats = {
            metric: stats[metric].combine(part.stats[metric]) for metric in METRICS
        }
    return AggregateDigest(
        scope=scope,
        seq=seq,
        contributing=sum(part.contributing for part in parts),
        stats=stats,
        freshest=max(part.freshest for part in parts),
    )
