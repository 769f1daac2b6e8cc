"""Per-VM protocol state."""

from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from typing import Self

from layered_gossip.src import consts
from layered_gossip.src.core.digest import DigestSet, GroupId, RegionId
from layered_gossip.src.core.usage import OriginRecordSet, VmId
from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.selection import elect_group_leader


@dataclass(frozen=True, slots=True)
class SeenIds:
    """Bounded first-in first-out set of message ids."""

    order: tuple[str, ...] = ()
    capacity: int = consts.SEEN_CAPACITY
    _ids: frozenset[str] = field(
        default=frozenset(), init=False, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        """Index the retained ids."""
        object.__setattr__(self, "_ids", frozenset(self.order))

    def __contains__(self, msg_id: object) -> bool:
        """Return whether ``msg_id`` is remembered."""
        return msg_id in self._ids

    def __len__(self) -> int:
        """Return the number of remembered ids."""
        return len(self.order)

    def add(self, msg_id: str) -> Self:
        """Return a copy remembering ``msg_id``, evicting the oldest id if full."""
        if msg_id in self._ids:
            return self
        return replace(self, order=(*self.order, msg_id)[-self.capacity :])


@dataclass(frozen=True, slots=True)
class NodeState:
    """Everything one VM knows.

    Attributes:
        id: The VM.
        group: Its group.
        region: Its cloud region.
        peers: Other group members with their latency in milliseconds.
        group_contacts: One contact per other group of the region.
        region_contacts: One contact per other region.
        records: Newest record per origin of the own group.
        digests: Freshest digest per group and region.
        leader_seq: Last seq this VM stamped on a group digest.
        region_seq: Last seq this VM stamped on a region digest.
        seen: Message ids already processed.
        sent: Messages initiated so far, used to mint message ids.
    """

    id: VmId
    group: GroupId
    region: RegionId
    peers: tuple[tuple[VmId, float], ...] = ()
    group_contacts: Mapping[GroupId, VmId] = field(default_factory=dict)
    region_contacts: Mapping[RegionId, VmId] = field(default_factory=dict)
    records: OriginRecordSet = field(default_factory=OriginRecordSet)
    digests: DigestSet = field(default_factory=DigestSet)
    leader_seq: int = 0
    region_seq: int = 0
    seen: SeenIds = field(default_factory=SeenIds)
    sent: int = 0

    def __post_init__(self) -> None:
        """Reject a peer list that contains the VM itself.

        Raises:
            InvalidInputError: If the own id is among the peers.
        """
        if any(peer == self.id for peer, _ in self.peers):
            msg = f"{self.id} cannot be its own peer"
            raise InvalidInputError(msg)

    @property
    def group_size(self) -> int:
        """Size of the own group as seen by this VM."""
        return len(self.peers) + 1

    def members(self) -> frozenset[VmId]:
        """Return the membership view of the own group."""
        return frozenset(peer for peer, _ in self.peers) | {self.id}

    def region_groups(self) -> list[GroupId]:
        """Return every group of the own region in id order."""
        return sorted({self.group, *self.group_contacts})

    @property
    def is_group_leader(self) -> bool:
        """Whether this VM is its group's agreed upon VM."""
        return elect_group_leader(self.members()) == self.id

    @property
    def is_region_leader(self) -> bool:
        """Whether this VM leads the smallest group id of its region."""
        return self.is_group_leader and self.region_groups()[0] == self.group

    def next_msg_id(self) -> tuple[str, Self]:
        """Mint a message id and return it with the advanced state."""
        return f"{self.id}#{self.sent}", replace(self, sent=self.sent + 1)
