"""Tests module."""

import pytest

from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.state import NodeState, SeenIds


class TestSeenIds:
    """Test class."""

    def test___contains__(self) -> None:
        """Test method."""
        seen = SeenIds().add("a#0")
        assert "a#0" in seen
        assert "a#1" not in seen

    def test___len__(self) -> None:
        """Test method."""
        assert len(SeenIds(("a", "b"))) == 2  # noqa: PLR2004

    def test_add(self) -> None:
        """Test method."""
        seen = SeenIds(capacity=2).add("a").add("b")
        assert seen.add("a") is seen
        seen = seen.add("c")
        assert seen.order == ("b", "c")
        assert "a" not in seen


class TestNodeState:
    """Test class."""

    def test___post_init__(self) -> None:
        """Test method."""
        with pytest.raises(InvalidInputError, match="own peer"):
            NodeState("vm-1", "g", "r", peers=(("vm-1", 1.0),))

    def test_group_size(self) -> None:
        """Test method."""
        state = NodeState("vm-1", "g", "r", peers=(("vm-2", 1.0), ("vm-3", 1.0)))
        assert state.group_size == 3  # noqa: PLR2004
        assert NodeState("vm-1", "g", "r").group_size == 1

    def test_members(self) -> None:
        """Test method."""
        state = NodeState("vm-2", "g", "r", peers=(("vm-1", 1.0),))
        assert state.members() == frozenset({"vm-1", "vm-2"})

    def test_region_groups(self) -> None:
        """Test method."""
        state = NodeState("vm-1", "r/g01", "r", group_contacts={"r/g00": "vm-9"})
        assert state.region_groups() == ["r/g00", "r/g01"]

    def test_is_group_leader(self) -> None:
        """Test method."""
        assert NodeState("vm-1", "g", "r", peers=(("vm-2", 1.0),)).is_group_leader
        assert not NodeState("vm-2", "g", "r", peers=(("vm-1", 1.0),)).is_group_leader

    def test_is_region_leader(self) -> None:
        """Test method."""
        first = NodeState("vm-1", "r/g00", "r", group_contacts={"r/g01": "vm-5"})
        second = NodeState("vm-5", "r/g01", "r", group_contacts={"r/g00": "vm-1"})
        assert first.is_region_leader
        assert second.is_group_leader
        assert not second.is_region_leader

    def test_next_msg_id(self) -> None:
        """Test method."""
        state = NodeState("vm-1", "g", "r")
        first, state = state.next_msg_id()
        second, state = state.next_msg_id()
        assert (first, second) == ("vm-1#0", "vm-1#1")
        assert state.sent == 2  # noqa: PLR2004
