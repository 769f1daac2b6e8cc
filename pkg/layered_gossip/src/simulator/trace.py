"""Event trace and round snapshots recorded by the simulator.

Trace lines are JSON objects with the fields ``tick``, ``kind``, ``node``,
``msg_kind`` and ``msg_id``, serialised compactly so that two runs of the same
scenario and seed produce byte-identical files.
"""

import json
from collections import Counter
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

from layered_gossip.src.core.digest import GroupId, RegionId
from layered_gossip.src.core.usage import VmId


class EventKind(StrEnum):
    """What happened at a trace event."""

    SEND = "send"
    DELIVER = "deliver"
    DROP = "drop"
    TIMER = "timer"
    SAMPLE = "sample"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    """One line of the trace.

    Attributes:
        tick: Simulation tick of the event.
        kind: Event kind.
        node: Sender for sends, receiver for deliveries and drops, the firing
            VM for timers and samples.
        msg_kind: Message kind, or the tier of a timer.
        msg_id: Message id; empty for timers and samples.
        peer: Receiver of a send, sender of a delivery or drop. Not serialised.
        ttl: Relay budget of the copy. Not serialised.
        hops: Relays the copy went through. Not serialised.
    """

    tick: int
    kind: EventKind
    node: VmId
    msg_kind: str = ""
    msg_id: str = ""
    peer: VmId = ""
    ttl: int = 0
    hops: int = 0

    def to_json(self) -> str:
        """Return the compact JSON line of the event."""
        return json.dumps(
            {
                "tick": self.tick,
                "kind": self.kind.value,
                "node": self.node,
                "msg_kind": self.msg_kind,
                "msg_id": self.msg_id,
            },
            separators=(",", ":"),
        )

    @property
    def copy_key(self) -> tuple[str, VmId, VmId]:
        """Identify one message copy as ``(msg_id, sender, receiver)``."""
        if self.kind is EventKind.SEND:
            return self.msg_id, self.node, self.peer
        return self.msg_id, self.peer, self.node


@dataclass(frozen=True, slots=True)
class NodeView:
    """What one VM knows at a round boundary."""

    groups: frozenset[GroupId] = frozenset()
    regions: frozenset[RegionId] = frozenset()
    origins: frozenset[VmId] = frozenset()

    def to_dict(self) -> dict[str, list[str]]:
        """Return the view with sorted lists."""
        return {
            "groups": sorted(self.groups),
            "regions": sorted(self.regions),
            "origins": sorted(self.origins),
        }


@dataclass(frozen=True, slots=True)
class RoundSnapshot:
    """Views of every alive VM after the last event of a round."""

    round: int
    views: Mapping[VmId, NodeView]

    def to_json(self) -> str:
        """Return the compact JSON line of the snapshot."""
        payload: dict[str, Any] = {
            "round": self.round,
            "nodes": {vm: self.views[vm].to_dict() for vm in sorted(self.views)},
        }
        return json.dumps(payload, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "RoundSnapshot":
        """Parse a line written by ``to_json``."""
        payload = json.loads(line)
        return cls(
            round=payload["round"],
            views={
                vm: NodeView(
                    groups=frozenset(view["groups"]),
                    regions=frozenset(view["regions"]),
                    origins=frozenset(view["origins"]),
                )
                for vm, view in payload["nodes"].items()
            },
        )


@dataclass(slots=True)
class EventTrace:
    """Ordered events of one run plus its round snapshots."""

    scheme: str
    events: list[TraceEvent] = field(default_factory=list)
    snapshots: list[RoundSnapshot] = field(default_factory=list)

    def __iter__(self) -> Iterator[TraceEvent]:
        """Iterate over the events in order."""
        return iter(self.events)

    def __len__(self) -> int:
        """Return the number of events."""
        return len(self.events)

    def record(self, event: TraceEvent) -> None:
        """Append an event."""
        self.events.append(event)

    def count(self, kind: EventKind, msg_kind: str | None = None) -> int:
        """Count events of a kind, optionally of one message kind."""
        return sum(
            1
            for event in self.events
            if event.kind is kind and (msg_kind is None or event.msg_kind == msg_kind)
        )

    def in_flight(self) -> Counter[str]:
        """Count the copies per message kind that were sent but never arrived."""
        pending: Counter[tuple[str, VmId, VmId]] = Counter()
        kinds: dict[tuple[str, VmId, VmId], str] = {}
        for event in self.events:
            if event.kind is EventKind.SEND:
                pending[event.copy_key] += 1
                kinds[event.copy_key] = event.msg_kind
            elif event.kind in {EventKind.DELIVER, EventKind.DROP}:
                pending[event.copy_key] -= 1
        result: Counter[str] = Counter()
        for key, count in pending.items():
            if count:
                result[kinds[key]] += count
        return result

    def lines(self) -> Iterator[str]:
        """Yield the JSON lines of the events."""
        for event in self.events:
            yield event.to_json()

    def snapshot_lines(self) -> Iterator[str]:
        """Yield the JSON lines of the snapshots."""
        for snapshot in self.snapshots:
            yield snapshot.to_json()
