"""Message counts, overhead ratio and convergence round of a run."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from typing import Any, Self

from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.messages import MessageKind
from layered_gossip.src.simulator.topology import Topology
from layered_gossip.src.simulator.trace import EventKind, EventTrace, TraceEvent

TIERS: tuple[str, ...] = ("intra_group", "inter_group", "inter_cloud")
"""Report columns in order; centralized polling counts as intra_group."""


def tier_of(msg_kind: str) -> str:
    """Return the report tier of a message kind."""
    try:
        return MessageKind(msg_kind).tier
    except ValueError:
        return TIERS[0]


@dataclass(frozen=True, slots=True)
class TierCounts:
    """Messages of one tier in one round.

    Attributes:
        initiated: Copies sent by the VM that started the message.
        forwarded: Copies relayed by another VM.
        dropped: Copies lost or addressed to a departed VM.
    """

    initiated: int = 0
    forwarded: int = 0
    dropped: int = 0

    @property
    def sent(self) -> int:
        """All copies put on the wire, dropped ones included."""
        return self.initiated + self.forwarded

    def __add__(self, other: "TierCounts") -> "TierCounts":
        """Add two counts field by field."""
        return TierCounts(
            self.initiated + other.initiated,
            self.forwarded + other.forwarded,
            self.dropped + other.dropped,
        )

    def to_dict(self) -> dict[str, int]:
        """Return the counts as a plain mapping."""
        return {
            "initiated": self.initiated,
            "forwarded": self.forwarded,
            "dropped": self.dropped,
        }


@dataclass(frozen=True, slots=True)
class RoundCounts:
    """Messages of every tier in one round."""

    round: int
    tiers: Mapping[str, TierCounts] = field(default_factory=dict)

    def tier(self, name: str) -> TierCounts:
        """Return the counts of one tier, zero when nothing was sent."""
        return self.tiers.get(name, TierCounts())

    @property
    def dropped(self) -> int:
        """Drops across tiers."""
        return sum(self.tier(name).dropped for name in TIERS)

    @property
    def total(self) -> int:
        """Copies sent across tiers."""
        return sum(self.tier(name).sent for name in TIERS)

    def to_dict(self) -> dict[str, Any]:
        """Return the round as a plain mapping."""
        return {
            "round": self.round,
            **{name: self.tier(name).to_dict() for name in TIERS},
            "dropped": self.dropped,
            "total": self.total,
        }


@dataclass(frozen=True, slots=True)
class MetricsReport:
    """Everything reported about one run.

    Attributes:
        scheme: Scheme that ran.
        population: Initial VM count.
        groups: Groups of the topology.
        regions: Regions of the topology.
        rounds: Rounds simulated.
        seed: Seed of the run.
        per_round: Counts of every round, in round order.
        convergence_round: First fully covered round; None if never reached or
            not applicable.
        overhead_ratio: Percent more messages than centralized collection;
            only set for paired comparisons.
    """

    scheme: str
    population: int
    groups: int
    regions: int
    rounds: int
    seed: int
    per_round: tuple[RoundCounts, ...] = ()
    convergence_round: int | None = None
    overhead_ratio: float | None = None

    @property
    def total(self) -> int:
        """Copies sent over the whole run."""
        return sum(counts.total for counts in self.per_round)

    def tier_total(self, name: str) -> TierCounts:
        """Return the counts of one tier summed over all rounds."""
        total = TierCounts()
        for counts in self.per_round:
            total += counts.tier(name)
        return total

    def paired_with(self, central_total: int) -> Self:
        """Return a copy carrying the overhead ratio against ``central_total``."""
        return replace(self, overhead_ratio=overhead_ratio(self.total, central_total))

    def to_dict(self) -> dict[str, Any]:
        """Return the report as a plain mapping."""
        return {
            "scheme": self.scheme,
            "population": self.population,
            "groups": self.groups,
            "regions": self.regions,
            "rounds": self.rounds,
            "seed": self.seed,
            "total": self.total,
            "convergence_round": self.convergence_round,
            "overhead_ratio": self.overhead_ratio,
            "per_round": [counts.to_dict() for counts in self.per_round],
        }


def count_rounds(
    trace: Iterable[TraceEvent], rounds: int, t_gossip: int
) -> tuple[RoundCounts, ...]:
    """Bucket the sends and drops of a trace into rounds.

    Round ``k`` covers ticks ``[(k - 1) * t_gossip, k * t_gossip)``.

    Args:
        trace: Events to count.
        rounds: Rounds of the run.
        t_gossip: Ticks per round.

    Returns:
        One entry per round, rounds without traffic included.
    """
    table = [dict.fromkeys(TIERS, (0, 0, 0)) for _ in range(rounds)]
    for event in trace:
        if event.kind not in {EventKind.SEND, EventKind.DROP}:
            continue
        index = min(event.tick // t_gossip, rounds - 1)
        tier = tier_of(event.msg_kind)
        initiated, forwarded, dropped = table[index][tier]
        if event.kind is EventKind.DROP:
            dropped += 1
        elif event.hops == 0:
            initiated += 1
        else:
            forwarded += 1
        table[index][tier] = (initiated, forwarded, dropped)
    return tuple(
        RoundCounts(
            round=index + 1,
            tiers={name: TierCounts(*row[name]) for name in TIERS},
        )
        for index, row in enumerate(table)
    )


def overhead_ratio(scheme_total: int, central_total: int) -> float:
    """Return how many percent more messages a scheme sent than centralized.

    Args:
        scheme_total: Messages of the scheme.
        central_total: Messages of centralized collection on the same setup.

    Returns:
        ``100 * (scheme_total - central_total) / central_total``.

    Raises:
        InvalidInputError: If ``central_total`` is not positive.
    """
    if central_total <= 0:
        msg = f"central_total must be positive, got {central_total}"
        raise InvalidInputError(msg)
    return 100.0 * (scheme_total - central_total) / central_total


def convergence_round(trace: EventTrace, topology: Topology) -> int | None:
    """Return the first round after which every VM knows the whole system.

    For the layered scheme every VM must hold a digest of every group and
    every region; for flat gossip every VM must hold a record of every alive
    VM. Centralized collection has no notion of convergence.

    Args:
        trace: Trace with round snapshots.
        topology: Topology of the run.

    Returns:
        The round, or None.
    """
    if trace.scheme == "central":
        return None
    groups = set(topology.groups())
    regions = set(topology.live_regions())
    for snapshot in trace.snapshots:
        views = snapshot.views.values()
        if not views:
            continue
        if trace.scheme == "flat":
            alive = set(snapshot.views)
            covered = all(alive <= view.origins for view in views)
        else:
            covered = all(
                groups <= view.groups and regions <= view.regions for view in views
            )
        if covered:
            return snapshot.round
    return None
