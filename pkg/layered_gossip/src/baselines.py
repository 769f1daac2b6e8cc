"""The two comparison schemes: flat gossip and centralized collection.

Flat gossip runs the intra-group machinery over the whole population as one
group; the inter-group and inter-cloud tiers never fire. Centralized
collection has a single server poll every VM each cycle over unicast.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from layered_gossip.src import consts
from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.node import Outgoing, on_timer_intra
from layered_gossip.src.protocol.params import ProtocolParams
from layered_gossip.src.protocol.state import NodeState


class PollKind(StrEnum):
    """Message kinds of the centralized scheme."""

    REQUEST = "PollRequest"
    RESPONSE = "PollResponse"


@dataclass(frozen=True, slots=True)
class CentralizedParams:
    """Polling cadence of the central collector.

    Attributes:
        t_poll: Ticks between polling cycles; None means ``t_gossip``.
        messages_per_poll: 2 for request plus response, 1 for push-only.
    """

    t_poll: int | None = None
    messages_per_poll: int = consts.MESSAGES_PER_POLL

    def __post_init__(self) -> None:
        """Check parameter ranges.

        Raises:
            InvalidInputError: If a parameter is out of range.
        """
        if self.t_poll is not None and self.t_poll < 1:
            msg = f"t_poll must be at least 1, got {self.t_poll}"
            raise InvalidInputError(msg, field="t_poll")
        if self.messages_per_poll not in {1, 2}:
            msg = f"messages_per_poll must be 1 or 2, got {self.messages_per_poll}"
            raise InvalidInputError(msg, field="messages_per_poll")

    def period(self, t_gossip: int) -> int:
        """Return the polling period in ticks."""
        return self.t_poll if self.t_poll is not None else t_gossip


def centralized_cycle(n: int, params: CentralizedParams) -> int:
    """Return the messages one polling cycle costs for ``n`` VMs.

    Args:
        n: Population size.
        params: Polling parameters.

    Returns:
        ``n * messages_per_poll``.

    Raises:
        InvalidInputError: If ``n`` is negative.
    """
    if n < 0:
        msg = f"population must be non-negative, got {n}"
        raise InvalidInputError(msg)
    return n * params.messages_per_poll


def flat_gossip_round(
    nodes: Sequence[NodeState],
    params: ProtocolParams,
    rng: np.random.Generator,
    now: int = 0,
) -> tuple[list[NodeState], Outgoing]:
    """Fire the gossip timer of every VM of a flat population once.

    The population must already be wired as one group, every VM listing all
    others as peers. Only rumor initiations are produced; relays happen on
    receipt.

    Args:
        nodes: States of all VMs, fired in the given order.
        params: Protocol parameters.
        rng: Seeded random source.
        now: Current tick.

    Returns:
        The next states and the initiated messages.
    """
    states: list[NodeState] = []
    messages: Outgoing = []
    for node in nodes:
        state, outgoing = on_timer_intra(node, now, rng, params)
        states.append(state)
        messages.extend(outgoing)
    return states, messages
