"""Tests module."""

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from layered_gossip.dev.tests.fixtures.factories import BASE_SCENARIO
from layered_gossip.src.exceptions import ConfigurationError
from layered_gossip.src.resource import bundled_scenario
from layered_gossip.src.simulator.scenario import (
    ChurnAction,
    ClusterSpec,
    RegionSpec,
    Scenario,
    Scheme,
    load_scenario,
    parse_scenario,
    split_evenly,
)


def field_of(data: dict[str, Any]) -> str:
    """Return the field a failing scenario mapping is rejected for."""
    with pytest.raises(ConfigurationError) as info:
        parse_scenario(data)
    return info.value.field


def test_split_evenly() -> None:
    """Test func for split_evenly."""
    assert split_evenly(12, parts=2) == [6, 6]
    assert split_evenly(10, parts=3) == [4, 3, 3]
    assert split_evenly(7, [1, 2, 4]) == [1, 2, 4]
    assert split_evenly(3, [1, 1, 1, 1]) == [1, 1, 1, 0]
    assert sum(split_evenly(301, [40, 30, 20, 10, 35, 35, 30])) == 301  # noqa: PLR2004


class TestRegionSpec:
    """Test class."""

    def test_count(self) -> None:
        """Test method."""
        region = RegionSpec("r", (ClusterSpec(("a",), 3), ClusterSpec(("b",), 4)))
        assert region.count == 7  # noqa: PLR2004


class TestScenario:
    """Test class."""

    def test___post_init__(self) -> None:
        """Test method."""
        regions = (RegionSpec("r", (ClusterSpec(("a",), 3),)),)
        scenario = Scenario(3, regions, Scheme.LAYERED, 5, 0)
        assert scenario.tau == 0.8  # noqa: PLR2004
        with pytest.raises(ConfigurationError) as info:
            Scenario(4, regions, Scheme.LAYERED, 5, 0)
        assert info.value.field == "population"
        with pytest.raises(ConfigurationError) as info:
            Scenario(3, regions, Scheme.LAYERED, 0, 0)
        assert info.value.field == "rounds"
        twice = (regions[0], regions[0])
        with pytest.raises(ConfigurationError) as info:
            Scenario(6, twice, Scheme.LAYERED, 5, 0)
        assert info.value.field == "regions[1].id"

    def test_applications(self, scenario_factory: Callable[..., Scenario]) -> None:
        """Test method."""
        assert scenario_factory().applications() == ("app-0", "app-1")

    def test_with_scheme(self, scenario_factory: Callable[..., Scenario]) -> None:
        """Test method."""
        scenario = scenario_factory().with_scheme(Scheme.FLAT)
        assert scenario.scheme is Scheme.FLAT

    def test_with_seed(self, scenario_factory: Callable[..., Scenario]) -> None:
        """Test method."""
        assert scenario_factory().with_seed(99).seed == 99  # noqa: PLR2004

    def test_resized(self, scenario_factory: Callable[..., Scenario]) -> None:
        """Test method."""
        scenario = scenario_factory()
        bigger = scenario.resized(24)
        assert bigger.population == 24  # noqa: PLR2004
        counts = [c.count for region in bigger.regions for c in region.clusters]
        assert counts == [6, 6, 6, 6]
        with pytest.raises(ConfigurationError, match="region-1"):
            scenario.resized(2)


def test_parse_scenario(scenario_factory: Callable[..., Scenario]) -> None:
    """Test func for parse_scenario."""
    scenario = scenario_factory()
    assert scenario.population == 12  # noqa: PLR2004
    assert [region.id for region in scenario.regions] == ["region-0", "region-1"]
    assert [c.count for c in scenario.regions[0].clusters] == [3, 3]
    assert scenario.protocol.k_group == 5  # noqa: PLR2004

    explicit = parse_scenario(
        {
            "population": 3,
            "regions": [
                {"id": "eu", "clusters": [{"apps": ["web"], "count": 3, "weight": 2}]}
            ],
            "scheme": "flat",
            "rounds": 4,
            "seed": 0,
            "protocol": {"k_group": None, "beta": 0.5},
            "latency": {"loss_intra": 0, "intra_group": [1, 2]},
            "workload": {"freeze_round": 2},
            "churn": [
                {"round": 2, "action": "leave", "vm": "vm-0001"},
                {
                    "round": 3,
                    "action": "join",
                    "vm": "late",
                    "region": "eu",
                    "apps": ["web"],
                },
            ],
        }
    )
    assert explicit.scheme is Scheme.FLAT
    assert explicit.regions[0].clusters[0] == ClusterSpec(("web",), 3, 2.0)
    assert explicit.protocol.k_group is None
    assert explicit.protocol.beta == 0.5  # noqa: PLR2004
    assert explicit.latency.intra_group == (1.0, 2.0)
    assert explicit.workload.freeze_round == 2  # noqa: PLR2004
    assert [event.action for event in explicit.churn] == [
        ChurnAction.LEAVE,
        ChurnAction.JOIN,
    ]


def test_parse_scenario_names_the_field() -> None:
    """Test func for parse_scenario."""
    cases = {
        "population": {"population": 0},
        "rounds": {"rounds": "ten"},
        "seed": {"seed": None},
        "scheme": {"scheme": "gossip"},
        "protocol.beta": {"protocol": {"beta": 2.0}},
        "protocol.gamma": {"protocol": {"gamma": 1}},
        "latency.intra_group": {"latency": {"intra_group": [1, 2, 3]}},
        "latency.loss_intra": {"latency": {"loss_intra": 1.5}},
        "centralized.messages_per_poll": {"centralized": {"messages_per_poll": 3}},
        "workload.freeze_round": {"workload": {"freeze_round": 0}},
        "groups_per_region": {"groups_per_region": 0},
        "colour": {"colour": "red"},
        "churn[0].round": {"churn": [{"round": 99, "action": "leave", "vm": "x"}]},
        "churn[0].region": {
            "churn": [{"round": 2, "action": "join", "vm": "x", "apps": ["app-0"]}]
        },
    }
    for expected, overrides in cases.items():
        result = field_of({**BASE_SCENARIO, **overrides})
        assert result == expected, f"Expected {expected}, got {result}"

    missing = dict(BASE_SCENARIO)
    del missing["rounds"]
    assert field_of(missing) == "rounds"

    listed = {
        **{k: v for k, v in BASE_SCENARIO.items() if k != "groups_per_region"},
        "population": 2,
        "regions": [{"id": "r", "clusters": [{"apps": ["a"], "count": 0}]}],
    }
    assert field_of(listed) == "regions[0].clusters[0].count"
    listed["regions"] = [{"id": 7, "clusters": [{"apps": ["a"], "count": 2}]}]
    assert field_of(listed) == "regions[0].id"
    assert field_of({**listed, "groups_per_region": 2}) == "groups_per_region"


def test_load_scenario(tmp_path: Path, scenario_file: Callable[..., Path]) -> None:
    """Test func for load_scenario."""
    scenario = load_scenario(scenario_file(rounds=3))
    assert scenario.rounds == 3  # noqa: PLR2004

    with pytest.raises(ConfigurationError, match="cannot read"):
        load_scenario(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigurationError, match="invalid JSON") as info:
        load_scenario(broken)
    assert info.value.field == "scenario"
    listed = tmp_path / "list.json"
    listed.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="JSON object"):
        load_scenario(listed)


def test_load_scenario_bundled(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """Test func for load_scenario."""
    monkeypatch.chdir(tmp_path)
    scenario = load_scenario(Path("overhead_reference"))
    assert scenario == load_scenario(bundled_scenario("overhead_reference"))
    assert (scenario.population, scenario.seed) == (40, 1)  # noqa: PLR2004
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_scenario(Path("no_such_scenario"))
