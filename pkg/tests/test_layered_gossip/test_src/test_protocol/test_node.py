"""Tests module."""

from collections import deque
from collections.abc import Callable

import numpy as np
import pytest

from layered_gossip.src.core.digest import (
    AggregateDigest,
    DigestSet,
    MetricStats,
    Scope,
)
from layered_gossip.src.core.usage import (
    METRICS,
    OriginRecordSet,
    ResourceUsage,
    UsageRecord,
)
from layered_gossip.src.exceptions import ProtocolViolationError
from layered_gossip.src.protocol.messages import GossipMessage, MessageKind
from layered_gossip.src.protocol.node import (
    on_local_sample,
    on_receive,
    on_timer_inter_cloud,
    on_timer_inter_group,
    on_timer_intra,
    refresh_region_digest,
)
from layered_gossip.src.protocol.params import ProtocolParams
from layered_gossip.src.protocol.selection import initial_ttl
from layered_gossip.src.protocol.state import NodeState

PARAMS = ProtocolParams()


def group_states(size: int, group: str = "g", region: str = "r") -> list[NodeState]:
    """Return the states of a fully connected group with 1 ms latencies."""
    ids = [f"vm-{index:02d}" for index in range(size)]
    return [
        NodeState(
            vm,
            group,
            region,
            peers=tuple((peer, 1.0) for peer in ids if peer != vm),
        )
        for vm in ids
    ]


def group_digest(group: str, contributing: int, seq: int = 1) -> AggregateDigest:
    """Return a digest of ``group`` where every contributor is at level 10."""
    stats = {
        metric: MetricStats(10.0 * contributing, 10.0, 10.0) for metric in METRICS
    }
    return AggregateDigest(Scope.group(group), seq, contributing, stats, 0)


def test_on_local_sample(usage_factory: Callable[[float], ResourceUsage]) -> None:
    """Test func for on_local_sample."""
    state = NodeState("vm-1", "g", "r")
    state = on_local_sample(state, usage_factory(40.0), 0)
    assert state.records.origins() == frozenset({"vm-1"})
    first = state.records.get("vm-1")
    assert first is not None
    assert first.usage.cpu_pct == 40.0  # noqa: PLR2004

    state = on_local_sample(state, usage_factory(50.0), 1000)
    second = state.records.get("vm-1")
    assert second is not None
    assert second.stamp > first.stamp

    stale = OriginRecordSet.of(UsageRecord("vm-1", 0, usage_factory(40.0)))
    message = GossipMessage(
        "vm-2#0",
        MessageKind.INTRA_GROUP,
        "vm-2",
        "vm-2",
        1,
        records=stale,
        digests=DigestSet(),
    )
    state, _ = on_receive(state, message, 1500, np.random.default_rng(0), PARAMS)
    assert state.records.get("vm-1") == second


def test_on_timer_intra(rng: np.random.Generator) -> None:
    """Test func for on_timer_intra."""
    alone = NodeState("vm-1", "g", "r")
    state, outgoing = on_timer_intra(alone, 0, rng, PARAMS)
    assert outgoing == []
    assert state == alone

    node = group_states(21)[0]
    state, outgoing = on_timer_intra(node, 0, rng, PARAMS)
    assert len(outgoing) == 2  # noqa: PLR2004
    assert len({target for target, _ in outgoing}) == 2  # noqa: PLR2004
    message = outgoing[0][1]
    assert message.ttl == 5  # noqa: PLR2004
    assert message.kind is MessageKind.INTRA_GROUP
    assert message.msg_id == "vm-00#0"
    assert message.msg_id in state.seen
    assert state.sent == 1


def test_on_receive(
    rng: np.random.Generator, usage_factory: Callable[[float], ResourceUsage]
) -> None:
    """Test func for on_receive."""
    a, b, c = group_states(3)
    a = on_local_sample(a, usage_factory(10.0), 0)

    # ttl 2 from a reaches b, which relays it to c, the only fresh target
    a, outgoing = on_timer_intra(a, 0, rng, ProtocolParams(f_max=1))
    target, message = outgoing[0]
    if target != b.id:
        b, c = c, b
    message = GossipMessage(
        message.msg_id,
        message.kind,
        message.sender,
        message.origin,
        2,
        records=message.records,
        digests=message.digests,
    )
    b, relayed = on_receive(b, message, 1, rng, PARAMS)
    assert "vm-00" in b.records
    assert [target for target, _ in relayed] == [c.id]
    copy = relayed[0][1]
    assert (copy.ttl, copy.hops, copy.sender) == (1, 1, b.id)
    c, relayed = on_receive(c, copy, 2, rng, PARAMS)
    assert "vm-00" in c.records
    assert relayed == []

    # duplicate id: merged, never relayed
    again = GossipMessage(
        message.msg_id,
        message.kind,
        message.sender,
        message.origin,
        2,
        records=OriginRecordSet.of(UsageRecord("vm-00", 5, usage_factory(20.0))),
        digests=DigestSet(),
    )
    b, relayed = on_receive(b, again, 3, rng, PARAMS)
    assert relayed == []
    record = b.records.get("vm-00")
    assert record is not None
    assert record.stamp == 5  # noqa: PLR2004

    # ttl exhausted: merged, never relayed
    spent = GossipMessage(
        "vm-00#9",
        MessageKind.INTRA_GROUP,
        "vm-00",
        "vm-00",
        0,
        records=OriginRecordSet.of(UsageRecord("vm-00", 9, usage_factory(30.0))),
        digests=DigestSet(),
    )
    b, relayed = on_receive(b, spent, 4, rng, PARAMS)
    assert relayed == []
    record = b.records.get("vm-00")
    assert record is not None
    assert record.stamp == 9  # noqa: PLR2004


def test_on_receive_merges_digests(rng: np.random.Generator) -> None:
    """Test func for on_receive."""
    state = group_states(2)[1]
    message = GossipMessage(
        "vm-07#0",
        MessageKind.INTER_GROUP,
        "vm-07",
        "vm-07",
        digest=group_digest("other", 3),
        digests=DigestSet().with_digest(group_digest("third", 2)),
    )
    state, outgoing = on_receive(state, message, 0, rng, PARAMS)
    assert outgoing == []
    assert set(state.digests.group_digests) == {"other", "third"}
    assert "vm-07#0" in state.seen


def test_on_receive_rejects_malformed(rng: np.random.Generator) -> None:
    """Test func for on_receive."""
    state = group_states(2)[0]
    message = GossipMessage(
        "vm-01#0",
        MessageKind.INTRA_GROUP,
        "vm-01",
        "vm-01",
        -1,
        records=OriginRecordSet(),
        digests=DigestSet(),
    )
    with pytest.raises(ProtocolViolationError):
        on_receive(state, message, 0, rng, PARAMS)


def test_group_of_sixteen_converges() -> None:
    """Test func for on_timer_intra."""
    converged = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        states = {state.id: state for state in group_states(16)}
        for round_number in range(4):
            now = round_number * PARAMS.t_gossip
            queue: deque[tuple[str, GossipMessage]] = deque()
            for vm in sorted(states):
                level = float(rng.uniform(0, 100))
                sampled = on_local_sample(
                    states[vm], ResourceUsage(level, level, level, level), now
                )
                states[vm], outgoing = on_timer_intra(sampled, now, rng, PARAMS)
                queue.extend(outgoing)
            while queue:
                target, message = queue.popleft()
                assert message.hops <= initial_ttl(16)
                states[target], outgoing = on_receive(
                    states[target], message, now, rng, PARAMS
                )
                queue.extend(outgoing)
            if all(len(state.records) == len(states) for state in states.values()):
                converged += 1
                break
    assert converged >= 95, f"converged in {converged} of 100 trials"  # noqa: PLR2004


def test_on_timer_inter_group(usage_factory: Callable[[float], ResourceUsage]) -> None:
    """Test func for on_timer_inter_group."""
    contacts = {"r/g01": "vm-10", "r/g02": "vm-20", "r/g03": "vm-30"}
    leader, follower = (
        NodeState(vm, "r/g00", "r", peers=((peer, 1.0),), group_contacts=contacts)
        for vm, peer in (("vm-00", "vm-01"), ("vm-01", "vm-00"))
    )
    follower = on_local_sample(follower, usage_factory(10.0), 0)
    assert on_timer_inter_group(follower, 0, 0, PARAMS) == (follower, [])

    leader = on_local_sample(leader, usage_factory(10.0), 0)
    assert on_timer_inter_group(leader, 0, 1, PARAMS) == (leader, [])

    leader, outgoing = on_timer_inter_group(leader, 0, 0, PARAMS)
    assert [target for target, _ in outgoing] == ["vm-10", "vm-20", "vm-30"]
    message = outgoing[0][1]
    assert message.kind is MessageKind.INTER_GROUP
    assert message.digest is not None
    assert message.digest.scope == Scope.group("r/g00")
    first_seq = message.digest.seq
    # smallest group of the region: the leader also refreshed its region digest
    assert leader.digests.get(Scope.region("r")) is not None

    leader = on_local_sample(leader, usage_factory(20.0), 5000)
    leader, outgoing = on_timer_inter_group(leader, 5000, 5, PARAMS)
    digest = outgoing[0][1].digest
    assert digest is not None
    assert digest.seq > first_seq
    assert digest.stat("cpu_pct").sum == 20.0  # noqa: PLR2004


def test_on_timer_inter_group_without_fresh_records(
    usage_factory: Callable[[float], ResourceUsage],
) -> None:
    """Test func for on_timer_inter_group."""
    state = on_local_sample(NodeState("vm-00", "g", "r"), usage_factory(10.0), 0)
    late = PARAMS.window + 1
    assert on_timer_inter_group(state, late, 0, PARAMS) == (state, [])


def test_on_timer_inter_cloud() -> None:
    """Test func for on_timer_inter_cloud."""
    state = NodeState(
        "vm-00",
        "r1/g00",
        "r1",
        group_contacts={"r1/g01": "vm-10", "r1/g02": "vm-20"},
        region_contacts={"r2": "vm-50", "r3": "vm-90"},
        digests=DigestSet()
        .with_digest(group_digest("r1/g00", 3))
        .with_digest(group_digest("r1/g02", 2))
        .with_digest(group_digest("r2/g00", 7)),
    )
    state, outgoing = on_timer_inter_cloud(state, 0)
    assert [target for target, _ in outgoing] == ["vm-50", "vm-90"]
    message = outgoing[0][1]
    assert message.kind is MessageKind.INTER_CLOUD
    assert message.digest is not None
    assert message.digest.scope == Scope.region("r1")
    assert message.digest.contributing == 5  # noqa: PLR2004
    assert message.digest.stat("mem_pct").sum == 50.0  # noqa: PLR2004
    assert message.digests is not None
    assert set(message.digests.group_digests) == {"r1/g00", "r1/g02"}
    assert state.region_seq == 1

    state, outgoing = on_timer_inter_cloud(state, 1000)
    assert outgoing[0][1].digest is not None
    assert outgoing[0][1].digest.seq == 2  # noqa: PLR2004


def test_on_timer_inter_cloud_needs_region_leader() -> None:
    """Test func for on_timer_inter_cloud."""
    state = NodeState(
        "vm-10",
        "r1/g01",
        "r1",
        group_contacts={"r1/g00": "vm-00"},
        region_contacts={"r2": "vm-50"},
        digests=DigestSet().with_digest(group_digest("r1/g01", 3)),
    )
    assert on_timer_inter_cloud(state, 0) == (state, [])


def test_refresh_region_digest() -> None:
    """Test func for refresh_region_digest."""
    empty = NodeState("vm-00", "r/g00", "r")
    assert refresh_region_digest(empty, 0) == (empty, None)

    stats = group_digest("x", 1).stats
    stale_region = AggregateDigest(Scope.region("r"), 6, 1, stats, 0)
    held = NodeState(
        "vm-00",
        "r/g00",
        "r",
        digests=DigestSet()
        .with_digest(group_digest("r/g00", 4))
        .with_digest(stale_region),
    )
    state, digest = refresh_region_digest(held, 0)
    assert digest is not None
    assert digest.seq == 7  # noqa: PLR2004
    assert digest.contributing == 4  # noqa: PLR2004
    assert state.digests.get(Scope.region("r")) == digest
