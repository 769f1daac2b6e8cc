"""Three-tier latency and loss model.

Latency depends on the relation between two VMs: members of one group sit
closest, groups of one region a little further, regions far apart. Each pair
gets one latency drawn at first use and keeps it for the whole run.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from layered_gossip.src import consts
from layered_gossip.src.core.usage import VmId
from layered_gossip.src.exceptions import InvalidInputError


class PairClass(StrEnum):
    """Relation between two communicating VMs."""

    INTRA_GROUP = "intra_group"
    INTRA_REGION = "intra_region"
    INTER_REGION = "inter_region"


@dataclass(frozen=True, slots=True)
class LatencyModel:
    """Latency ranges in milliseconds and loss probabilities per pair class."""

    intra_group: tuple[float, float] = consts.INTRA_GROUP_MS
    intra_region: tuple[float, float] = consts.INTRA_REGION_MS
    inter_region: tuple[float, float] = consts.INTER_REGION_MS
    loss_intra: float = consts.LOSS_INTRA
    loss_inter_region: float = 0.0

    def __post_init__(self) -> None:
        """Check ranges and probabilities.

        Raises:
            InvalidInputError: Naming the first invalid field.
        """
        midpoints = []
        for name in PairClass:
            low, high = getattr(self, name)
            if not 0.0 < low <= high:
                msg = f"{name} range must satisfy 0 < low <= high, got {(low, high)}"
                raise InvalidInputError(msg, field=name)
            midpoints.append((low + high) / 2)
        if midpoints != sorted(midpoints):
            msg = "latency midpoints must grow from intra_group to inter_region"
            raise InvalidInputError(msg, field="intra_region")
        if not 0.0 <= self.loss_intra < 1.0:
            msg = f"loss_intra must be within [0, 1), got {self.loss_intra}"
            raise InvalidInputError(msg, field="loss_intra")
        if self.loss_inter_region != 0.0:
            msg = "loss_inter_region is fixed to 0: inter-region transport is reliable"
            raise InvalidInputError(msg, field="loss_inter_region")

    def range_of(self, pair_class: PairClass) -> tuple[float, float]:
        """Return the latency range of a pair class."""
        low, high = getattr(self, pair_class.value)
        return float(low), float(high)

    def loss_of(self, pair_class: PairClass) -> float:
        """Return the drop probability of a pair class."""
        if pair_class is PairClass.INTER_REGION:
            return self.loss_inter_region
        return self.loss_intra


def sample_latency(
    model: LatencyModel, pair_class: PairClass, rng: np.random.Generator
) -> float:
    """Draw a latency uniformly from the range of ``pair_class``.

    Args:
        model: Latency model.
        pair_class: Relation of the pair.
        rng: Seeded random source.

    Returns:
        Latency in milliseconds.
    """
    low, high = model.range_of(pair_class)
    return float(rng.uniform(low, high))


def latency_ticks(latency_ms: float) -> int:
    """Convert a latency to whole ticks, never less than one."""
    return max(1, round(latency_ms))


class LatencyTable:
    """Symmetric per-pair latencies, drawn once and then memoised."""

    def __init__(self, model: LatencyModel, rng: np.random.Generator) -> None:
        """Initialize an empty table.

        Args:
            model: Latency model to draw from.
            rng: Seeded random source shared with the run.
        """
        self.model = model
        self._rng = rng
        self._latency: dict[tuple[VmId, VmId], float] = {}
        self._classes: dict[tuple[VmId, VmId], PairClass] = {}

    def __len__(self) -> int:
        """Return the number of pairs drawn so far."""
        return len(self._latency)

    @staticmethod
    def _key(a: VmId, b: VmId) -> tuple[VmId, VmId]:
        return (a, b) if a <= b else (b, a)

    def draw(self, a: VmId, b: VmId, pair_class: PairClass) -> float:
        """Return the latency of a pair, drawing it on first use.

        Args:
            a: One VM.
            b: The other VM.
            pair_class: Relation of the pair, used only for the first draw.

        Returns:
            Latency in milliseconds.

        Raises:
            InvalidInputError: If ``a`` and ``b`` are the same VM.
        """
        if a == b:
            msg = f"no latency between {a} and itself"
            raise InvalidInputError(msg)
        key = self._key(a, b)
        if key not in self._latency:
            self._latency[key] = sample_latency(self.model, pair_class, self._rng)
            self._classes[key] = pair_class
        return self._latency[key]

    def latency(self, a: VmId, b: VmId) -> float:
        """Return the memoised latency of a pair.

        Raises:
            KeyError: If the pair was never drawn.
        """
        return self._latency[self._key(a, b)]

    def pair_class(self, a: VmId, b: VmId) -> PairClass:
        """Return the class the pair was drawn with.

        Raises:
            KeyError: If the pair was never drawn.
        """
        return self._classes[self._key(a, b)]

    def items(self) -> list[tuple[tuple[VmId, VmId], float]]:
        """Return all drawn pairs with their latency in key order."""
        return sorted(self._latency.items())
