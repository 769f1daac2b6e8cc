"""Event handlers of the per-VM layered gossip state machine.

Every handler is a pure function of the state, the event, the injected tick
and the injected random source. It returns the next state and the messages to
send as ``(target, message)`` pairs; routing them is the caller's job.

Tiers:
    - Intra-group: every ``t_gossip`` a VM sends its records and digests to
      ``fanout`` latency-preferred peers. Receivers relay a copy while the ttl
      allows, the copy brought news and its id was not seen before.
    - Inter-group: every ``k_group`` rounds the group leader summarises the
      group and sends the digest to one contact in every other group of the
      region, piggybacking everything it knows.
    - Inter-cloud: every ``k_cloud`` inter-group rounds the region leader
      composes the group digests of its region and sends the result to one
      contact in every other region.
"""

import logging
from dataclasses import replace

import numpy as np

from layered_gossip.src.core.digest import (
    AggregateDigest,
    DigestSet,
    Scope,
    combine_digests,
    compute_aggregate,
)
from layered_gossip.src.core.usage import ResourceUsage, UsageRecord, VmId
from layered_gossip.src.protocol.messages import (
    GossipMessage,
    MessageKind,
    validate_message,
)
from layered_gossip.src.protocol.params import ProtocolParams
from layered_gossip.src.protocol.selection import (
    fanout,
    initial_ttl,
    select_targets,
)
from layered_gossip.src.protocol.state import NodeState

logger = logging.getLogger(__name__)

type Outgoing = list[tuple[VmId, GossipMessage]]


def on_local_sample(state: NodeState, usage: ResourceUsage, now: int) -> NodeState:
    """Record the VM's own usage sample stamped with ``now``.

    Args:
        state: Current state.
        usage: Freshly measured usage.
        now: Current tick.

    Returns:
        State whose records hold the new own record.
    """
    record = UsageRecord(origin=state.id, stamp=now, usage=usage)
    return replace(state, records=state.records.with_record(record))


def on_timer_intra(
    state: NodeState, now: int, rng: np.random.Generator, params: ProtocolParams
) -> tuple[NodeState, Outgoing]:
    """Start one intra-group rumor carrying everything the VM knows.

    Args:
        state: Current state.
        now: Current tick.
        rng: Seeded random source.
        params: Protocol parameters.

    Returns:
        The next state and ``fanout(group_size)`` IntraGroup messages.
    """
    del now
    k = fanout(state.group_size, params)
    if k == 0:
        return state, []
    targets = select_targets(state.peers, k, rng, params.epsilon_latency)
    msg_id, state = state.next_msg_id()
    message = GossipMessage(
        msg_id=msg_id,
        kind=MessageKind.INTRA_GROUP,
        sender=state.id,
        origin=state.id,
        ttl=initial_ttl(state.group_size),
        records=state.records,
        digests=state.digests,
    )
    state = replace(state, seen=state.seen.add(msg_id))
    return state, [(target, message) for target in targets]


def on_receive(
    state: NodeState,
    msg: GossipMessage,
    now: int,
    rng: np.random.Generator,
    params: ProtocolParams,
) -> tuple[NodeState, Outgoing]:
    """Merge a received message and decide whether to relay it.

    Only IntraGroup messages are relayed, and only when the ttl is positive,
    the merge added or replaced at least one record and the id is new.

    Args:
        state: Current state.
        msg: Received message.
        now: Current tick.
        rng: Seeded random source.
        params: Protocol parameters.

    Returns:
        The next state and the relayed copies.

    Raises:
        ProtocolViolationError: If the message is malformed; the caller keeps
            the old state.
    """
    del now
    validate_message(msg)
    duplicate = msg.msg_id in state.seen
    outgoing: Outgoing = []
    digests = state.digests
    if msg.digests is not None:
        digests = digests.absorb(msg.digests)[0]
    if msg.digest is not None:
        digests = digests.with_digest(msg.digest)
    records = state.records
    if msg.kind is MessageKind.INTRA_GROUP and msg.records is not None:
        records, news = records.absorb(msg.records)
        if news and msg.ttl > 0 and not duplicate:
            candidates = [
                (peer, latency)
                for peer, latency in state.peers
                if peer not in {msg.sender, msg.origin}
            ]
            targets = select_targets(
                candidates,
                fanout(state.group_size, params),
                rng,
                params.epsilon_latency,
            )
            relayed = msg.relayed_by(state.id)
            outgoing = [(target, relayed) for target in targets]
    state = replace(
        state, records=records, digests=digests, seen=state.seen.add(msg.msg_id)
    )
    return state, outgoing


def refresh_region_digest(
    state: NodeState, now: int
) -> tuple[NodeState, AggregateDigest | None]:
    """Compose the held group digests of the own region into a region digest.

    Only the region leader does this; other VMs get the state back unchanged.

    Args:
        state: Current state.
        now: Current tick.

    Returns:
        The state holding the new region digest, and that digest (None when
        the VM is not region leader or holds no group digest of its region).
    """
    del now
    if not state.is_region_leader:
        return state, None
    scope = Scope.region(state.region)
    parts = [
        digest
        for group in state.region_groups()
        if (digest := state.digests.group_digests.get(group)) is not None
    ]
    held = state.digests.get(scope)
    seq = max(state.region_seq, held.seq if held else 0) + 1
    digest = combine_digests(parts, scope, seq)
    if digest is None:
        return state, None
    state = replace(state, region_seq=seq, digests=state.digests.with_digest(digest))
    return state, digest


def on_timer_inter_group(
    state: NodeState, now: int, round_index: int, params: ProtocolParams
) -> tuple[NodeState, Outgoing]:
    """Send the group digest to every other group of the region.

    Fires on 0-based rounds divisible by ``k_group`` and only emits on the
    group leader when at least one record is fresh. The region leader also
    refreshes its own region digest here, without sending it.

    Args:
        state: Current state.
        now: Current tick.
        round_index: 0-based intra round of the VM.
        params: Protocol parameters.

    Returns:
        The next state and one InterGroup message per other group.
    """
    if not (params.fires_inter_group(round_index) and state.is_group_leader):
        return state, []
    scope = Scope.group(state.group)
    held = state.digests.get(scope)
    seq = max(state.leader_seq, held.seq if held else 0) + 1
    digest = compute_aggregate(state.records, now, params.window, scope, seq)
    if digest is None:
        return state, []
    state = replace(state, leader_seq=seq, digests=state.digests.with_digest(digest))
    state, _ = refresh_region_digest(state, now)
    msg_id, state = state.next_msg_id()
    message = GossipMessage(
        msg_id=msg_id,
        kind=MessageKind.INTER_GROUP,
        sender=state.id,
        origin=state.id,
        digest=digest,
        digests=state.digests,
    )
    state = replace(state, seen=state.seen.add(msg_id))
    targets = [state.group_contacts[group] for group in sorted(state.group_contacts)]
    logger.debug(
        "%s sends group digest seq %d to %d groups", state.id, seq, len(targets)
    )
    return state, [(target, message) for target in targets]


def on_timer_inter_cloud(state: NodeState, now: int) -> tuple[NodeState, Outgoing]:
    """Send the region digest to every other region.

    Only the region leader emits. The message also carries the group digests
    the region digest was composed from.

    Args:
        state: Current state.
        now: Current tick.

    Returns:
        The next state and one InterCloud message per other region.
    """
    state, digest = refresh_region_digest(state, now)
    if digest is None:
        return state, []
    groups = {
        group: held
        for group in state.region_groups()
        if (held := state.digests.group_digests.get(group)) is not None
    }
    msg_id, state = state.next_msg_id()
    message = GossipMessage(
        msg_id=msg_id,
        kind=MessageKind.INTER_CLOUD,
        sender=state.id,
        origin=state.id,
        digest=digest,
        digests=DigestSet(group_digests=groups),
    )
    state = replace(state, seen=state.seen.add(msg_id))
    targets = [
        state.region_contacts[region] for region in sorted(state.region_contacts)
    ]
    logger.debug(
        "%s sends region digest seq %d to %d regions",
        state.id,
        digest.seq,
        len(targets),
    )
    return state, [(target, message) for target in targets]
