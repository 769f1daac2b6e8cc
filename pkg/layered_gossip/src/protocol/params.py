"""Tunable parameters of the layered gossip protocol."""

from dataclasses import dataclass

from layered_gossip.src import consts
from layered_gossip.src.exceptions import InvalidInputError


@dataclass(frozen=True, slots=True)
class ProtocolParams:
    """Gossip periods, fanout shape and record expiry.

    Attributes:
        t_gossip: Intra-group gossip period in ticks.
        beta: Fanout coefficient applied to the peer count.
        f_max: Fanout cap.
        k_group: Intra rounds per inter-group round; None disables the tier.
        k_cloud: Inter-group rounds per inter-cloud round; None disables the tier.
        staleness_window: Largest record age admitted into a digest, in ticks.
            None means ``STALENESS_ROUNDS * t_gossip``.
        epsilon_latency: Latency offset (ms) in the selection weights.
        seen_capacity: Message ids remembered for duplicate suppression.
    """

    t_gossip: int = consts.T_GOSSIP
    beta: float = consts.BETA
    f_max: int = consts.F_MAX
    k_group: int | None = consts.K_GROUP
    k_cloud: int | None = consts.K_CLOUD
    staleness_window: int | None = None
    epsilon_latency: float = consts.EPSILON_LATENCY
    seen_capacity: int = consts.SEEN_CAPACITY

    def __post_init__(self) -> None:
        """Check parameter ranges.

        Raises:
            InvalidInputError: Naming the first parameter out of range.
        """
        checks = {
            "t_gossip": self.t_gossip >= 1,
            "beta": 0.0 < self.beta <= 1.0,
            "f_max": self.f_max >= 1,
            "k_group": self.k_group is None or self.k_group >= 1,
            "k_cloud": self.k_cloud is None or self.k_cloud >= 1,
            "staleness_window": self.staleness_window is None
            or self.staleness_window >= 1,
            "epsilon_latency": self.epsilon_latency > 0.0,
            "seen_capacity": self.seen_capacity >= 1,
        }
        for name, ok in checks.items():
            if not ok:
                msg = f"{name} out of range: {getattr(self, name)!r}"
                raise InvalidInputError(msg, field=name)

    @property
    def window(self) -> int:
        """Effective staleness window in ticks."""
        if self.staleness_window is None:
            return consts.STALENESS_ROUNDS * self.t_gossip
        return self.staleness_window

    def fires_inter_group(self, round_index: int) -> bool:
        """Return whether the inter-group timer fires on a 0-based round."""
        return self.k_group is not None and round_index % self.k_group == 0

    def fires_inter_cloud(self, round_index: int) -> bool:
        """Return whether the inter-cloud timer fires on a 0-based round.

        The inter-cloud timer rides on every ``k_cloud``-th inter-group firing,
        counting firings from one, so region leaders already hold every group
        digest of their region when they first report.
        """
        if self.k_group is None or self.k_cloud is None:
            return False
        if round_index % self.k_group != 0:
            return False
        return (round_index // self.k_group + 1) % self.k_cloud == 0
