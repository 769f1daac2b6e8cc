"""Fanout, gossip target selection and leader agreement."""

import math
from collections.abc import Collection, Sequence

import numpy as np

from layered_gossip.src import consts
from layered_gossip.src.core.usage import VmId
from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.params import ProtocolParams


def fanout(group_size: int, params: ProtocolParams) -> int:
    """Return how many peers a VM contacts per gossip round.

    Grows linearly with the group, ``ceil(beta * (group_size - 1))``, clamped
    to ``[1, f_max]``; a VM alone in its group contacts nobody.

    Args:
        group_size: Members of the group including the VM itself.
        params: Protocol parameters.

    Returns:
        The fanout.

    Raises:
        InvalidInputError: If ``group_size`` is below one.
    """
    if group_size < 1:
        msg = f"group_size must be at least 1, got {group_size}"
        raise InvalidInputError(msg)
    if group_size == 1:
        return 0
    # rounding absorbs float noise such as 0.1 * 30 = 3.0000000000000004
    raw = math.ceil(round(params.beta * (group_size - 1), 9))
    return min(params.f_max, max(1, raw))


def initial_ttl(group_size: int) -> int:
    """Return the relay budget of a fresh IntraGroup rumor: ``max(1, ceil(log2 n))``."""
    return max(1, (group_size - 1).bit_length())


def select_targets(
    peers: Sequence[tuple[VmId, float]],
    k: int,
    rng: np.random.Generator,
    epsilon: float = consts.EPSILON_LATENCY,
) -> list[VmId]:
    """Draw distinct gossip targets, preferring low-latency peers.

    Sampling is without replacement; each draw picks a remaining peer with
    probability proportional to ``1 / (latency + epsilon)``.

    Args:
        peers: Candidate ids with their latency in milliseconds.
        k: Targets wanted.
        rng: Seeded random source.
        epsilon: Latency offset keeping the weights finite.

    Returns:
        ``min(k, len(peers))`` distinct peer ids.

    Raises:
        InvalidInputError: If ``k`` is negative.
    """
    if k < 0:
        msg = f"k must be non-negative, got {k}"
        raise InvalidInputError(msg)
    k = min(k, len(peers))
    if k == 0:
        return []
    weights = 1.0 / (np.array([latency for _, latency in peers]) + epsilon)
    picks = rng.choice(len(peers), size=k, replace=False, p=weights / weights.sum())
    return [peers[int(index)][0] for index in picks]


def elect_group_leader(members: Collection[VmId]) -> VmId:
    """Return the agreed upon VM of a group: the smallest id in the view.

    Args:
        members: Membership view believed alive.

    Returns:
        The leader.

    Raises:
        InvalidInputError: If the view is empty.
    """
    if not members:
        msg = "cannot elect a leader of an empty group"
        raise InvalidInputError(msg)
    return min(members)
