"""Gossip messages exchanged between VMs.

Message kinds and the payload each carries:
    - IntraGroup: the sender's records plus its piggybacked digest set;
      relayed while ``ttl`` allows and the payload brings news.
    - InterGroup: one group digest plus the sender's digest set; never relayed.
    - InterCloud: one region digest plus the group digests it was composed
      from; never relayed.
"""

from dataclasses import dataclass, replace
from enum import StrEnum
from typing import Self

from layered_gossip.src.core.digest import AggregateDigest, DigestSet, ScopeKind
from layered_gossip.src.core.usage import OriginRecordSet, VmId
from layered_gossip.src.exceptions import ProtocolViolationError


class MessageKind(StrEnum):
    """Communication tier of a gossip message."""

    INTRA_GROUP = "IntraGroup"
    INTER_GROUP = "InterGroup"
    INTER_CLOUD = "InterCloud"

    @property
    def tier(self) -> str:
        """Column name used in reports (``intra_group``, ...)."""
        return {
            MessageKind.INTRA_GROUP: "intra_group",
            MessageKind.INTER_GROUP: "inter_group",
            MessageKind.INTER_CLOUD: "inter_cloud",
        }[self]


@dataclass(frozen=True, slots=True)
class GossipMessage:
    """One message copy in flight.

    Attributes:
        msg_id: Id shared by all relayed copies of one rumor.
        kind: Tier of the message.
        sender: VM that sent this copy.
        origin: VM that initiated the rumor.
        ttl: Remaining relay budget (IntraGroup only, 0 otherwise).
        hops: Relays performed so far.
        records: IntraGroup payload records.
        digests: Piggybacked digest set.
        digest: InterGroup group digest or InterCloud region digest.
    """

    msg_id: str
    kind: MessageKind
    sender: VmId
    origin: VmId
    ttl: int = 0
    hops: int = 0
    records: OriginRecordSet | None = None
    digests: DigestSet | None = None
    digest: AggregateDigest | None = None

    def relayed_by(self, sender: VmId) -> Self:
        """Return the copy ``sender`` relays: one hop further, one ttl less."""
        return replace(self, sender=sender, ttl=self.ttl - 1, hops=self.hops + 1)


def validate_message(msg: GossipMessage) -> None:
    """Check that the payload matches the message kind.

    Args:
        msg: Message to check.

    Raises:
        ProtocolViolationError: Describing the first violation found.
    """
    problem = _payload_problem(msg)
    if msg.ttl < 0:
        problem = f"negative ttl {msg.ttl}"
    elif msg.hops < 0:
        problem = f"negative hop count {msg.hops}"
    if problem is not None:
        msg_text = f"{msg.kind} message {msg.msg_id} from {msg.sender}: {problem}"
        raise ProtocolViolationError(msg_text)


def _payload_problem(msg: GossipMessage) -> str | None:
    if msg.kind is MessageKind.INTRA_GROUP:
        if msg.records is None or msg.digests is None or msg.digest is not None:
            return "IntraGroup carries records and digests only"
        return None
    scope = ScopeKind.GROUP if msg.kind is MessageKind.INTER_GROUP else ScopeKind.REGION
    if msg.digest is None or msg.digest.scope.kind is not scope:
        return f"{msg.kind} needs a {scope} digest"
    if msg.digests is None:
        return f"{msg.kind} also carries the digest set it was composed from"
    if msg.records is not None or msg.ttl != 0:
        return f"{msg.kind} carries no records and is never relayed"
    return None
