"""Tests module."""

import pytest

from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.protocol.params import ProtocolParams


class TestProtocolParams:
    """Test class."""

    def test___post_init__(self) -> None:
        """Test method."""
        for name, value in [
            ("t_gossip", 0),
            ("beta", 0.0),
            ("beta", 1.5),
            ("f_max", 0),
            ("k_group", 0),
            ("k_cloud", 0),
            ("staleness_window", 0),
            ("epsilon_latency", 0.0),
            ("seen_capacity", 0),
        ]:
            with pytest.raises(InvalidInputError) as info:
                ProtocolParams(**{name: value})
            assert info.value.field == name, f"Expected {name}, got {info.value.field}"
        assert ProtocolParams(k_group=None, k_cloud=None).k_group is None

    def test_window(self) -> None:
        """Test method."""
        assert ProtocolParams().window == 10_000  # noqa: PLR2004
        assert ProtocolParams(t_gossip=50).window == 500  # noqa: PLR2004
        assert ProtocolParams(staleness_window=3).window == 3  # noqa: PLR2004

    def test_fires_inter_group(self) -> None:
        """Test method."""
        params = ProtocolParams(k_group=5)
        fired = [r for r in range(21) if params.fires_inter_group(r)]
        assert fired == [0, 5, 10, 15, 20], f"Expected every fifth round, got {fired}"
        assert not ProtocolParams(k_group=None).fires_inter_group(0)

    def test_fires_inter_cloud(self) -> None:
        """Test method."""
        params = ProtocolParams(k_group=5, k_cloud=5)
        fired = [r for r in range(100) if params.fires_inter_cloud(r)]
        assert fired == [20, 45, 70, 95], f"Got {fired}"
        every = ProtocolParams(k_group=2, k_cloud=1)
        assert [r for r in range(7) if every.fires_inter_cloud(r)] == [0, 2, 4, 6]
        assert not ProtocolParams(k_cloud=None).fires_inter_cloud(20)
        assert not ProtocolParams(k_group=None).fires_inter_cloud(20)
