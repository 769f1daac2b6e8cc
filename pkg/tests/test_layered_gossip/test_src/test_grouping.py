"""Tests module."""

import math

import numpy as np
import pytest

from layered_gossip.src.exceptions import InvalidInputError
from layered_gossip.src.grouping import (
    GroupAssignment,
    as_array,
    assign_groups,
    cosine_similarity,
    group_id_for,
    nearest_group,
)


def test_as_array() -> None:
    """Test function."""
    assert as_array([1, 0, 2]).tolist() == [1.0, 0.0, 2.0]
    with pytest.raises(InvalidInputError):
        as_array([])
    with pytest.raises(InvalidInputError):
        as_array([1.0, -1.0])
    with pytest.raises(InvalidInputError):
        as_array([0.0, 0.0])
    with pytest.raises(InvalidInputError):
        as_array([1.0, float("inf")])


def test_cosine_similarity() -> None:
    """Test function."""
    assert cosine_similarity([1, 0, 1], [1, 0, 1]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    assert math.isclose(
        cosine_similarity([1, 1, 0], [1, 0, 0]), 0.70710678, abs_tol=1e-8
    )
    with pytest.raises(InvalidInputError, match="dimensionality"):
        cosine_similarity([1, 0], [1, 0, 0])
    with pytest.raises(InvalidInputError):
        cosine_similarity([0, 0], [1, 0])


class TestGroupAssignment:
    """Test class."""

    def test_group_of(self) -> None:
        """Test method."""
        assignment = GroupAssignment(groups={"g00": ("a", "b"), "g01": ("c",)})
        assert assignment.group_of("c") == "g01"
        with pytest.raises(KeyError):
            assignment.group_of("z")

    def test_members(self) -> None:
        """Test method."""
        assignment = GroupAssignment(groups={"g01": ("c",), "g00": ("b", "a")})
        assert assignment.members() == ["b", "a", "c"]


def test_group_id_for() -> None:
    """Test function."""
    assert group_id_for("eu/", 3) == "eu/g03"
    assert group_id_for("", 12) == "g12"
    assert group_id_for("", 5, 120) == "g005"
    assert group_id_for("", 119, 120) == "g119"
    assert group_id_for("", 100) == "g100"


def test_assign_groups_orders_ids_by_founding() -> None:
    """Test func for assign_groups."""
    count = 120
    vms = [
        (f"vm-{i:03d}", tuple(1.0 if d == i else 0.0 for d in range(count)))
        for i in range(count)
    ]
    assignment = assign_groups(vms, 0.5)
    ids = list(assignment.groups)
    assert len(ids) == count
    assert sorted(ids) == ids, "lexicographic order differs from founding order"
    assert assignment.groups["g000"] == ("vm-000",)
    assert assignment.groups["g100"] == ("vm-100",)
    assert assignment.groups["g011"] == ("vm-011",)


def test_assign_groups() -> None:
    """Test function."""
    same = [(f"vm-{i}", (1.0, 0.0, 1.0)) for i in range(10)]
    assignment = assign_groups(same, 0.8)
    assert list(assignment.groups) == ["g00"]
    assert len(assignment.groups["g00"]) == 10  # noqa: PLR2004

    split = [(f"a-{i}", (1.0, 0.0, 0.0)) for i in range(5)] + [
        (f"b-{i}", (0.0, 1.0, 0.0)) for i in range(5)
    ]
    assignment = assign_groups(split, 0.8, prefix="r/")
    assert sorted(len(members) for members in assignment.groups.values()) == [5, 5]
    assert set(assignment.groups) == {"r/g00", "r/g01"}
    assert assignment.centroids["r/g00"] == (1.0, 0.0, 0.0)


def test_assign_groups_mixed_vectors() -> None:
    """Test function."""
    vms = [
        ("vm-1", (1.0, 0.0, 0.0)),
        ("vm-2", (1.0, 1.0, 0.0)),
        ("vm-3", (1.0, 0.2, 0.0)),
        ("vm-4", (0.0, 1.0, 0.0)),
        ("vm-5", (0.5, 1.0, 0.0)),
        ("vm-6", (0.0, 0.0, 1.0)),
    ]
    # vm-2 is 0.707 similar to vm-1, below tau; vm-5 is 0.949 similar to vm-2
    # but only 0.534 to the centroid of vm-1 and vm-3
    assignment = assign_groups(list(reversed(vms)), 0.8)
    assert dict(assignment.groups) == {
        "g00": ("vm-1", "vm-3"),
        "g01": ("vm-2", "vm-5"),
        "g02": ("vm-4",),
        "g03": ("vm-6",),
    }
    assert assignment.centroids["g01"] == pytest.approx((0.75, 1.0, 0.0))


def test_assign_groups_partitions_and_is_deterministic() -> None:
    """Test function."""
    rng = np.random.default_rng(5)
    vms = [
        (f"vm-{i:03d}", tuple(rng.uniform(0, 1, size=4).tolist())) for i in range(80)
    ]
    first = assign_groups(vms, 0.9)
    assert sorted(first.members()) == sorted(vm for vm, _ in vms)
    assert all(first.groups.values())
    assert assign_groups(vms, 0.9) == first

    distinct = [(f"vm-{i}", tuple(float(i == j) for j in range(4))) for i in range(4)]
    assert len(assign_groups(distinct, 1.0).groups) == 4  # noqa: PLR2004
    assert len(assign_groups(vms, 1e-9).groups) == 1


def test_assign_groups_errors() -> None:
    """Test function."""
    with pytest.raises(InvalidInputError, match="empty"):
        assign_groups([], 0.8)
    with pytest.raises(InvalidInputError, match="tau"):
        assign_groups([("a", (1.0,))], 0.0)
    with pytest.raises(InvalidInputError, match="dimensionality"):
        assign_groups([("a", (1.0,)), ("b", (1.0, 0.0))], 0.8)


def test_nearest_group() -> None:
    """Test function."""
    split = [(f"a-{i}", (1.0, 0.0, 0.0)) for i in range(5)] + [
        (f"b-{i}", (0.0, 1.0, 0.0)) for i in range(5)
    ]
    assignment = assign_groups(split, 0.8)
    group, updated = nearest_group(assignment, "c-0", (0.9, 0.1, 0.0))
    assert group == assignment.group_of("a-0")
    assert updated.groups[group][-1] == "c-0"
    assert len(updated.groups[group]) == 6  # noqa: PLR2004
    assert updated.centroids[group] == pytest.approx((5.9 / 6, 0.1 / 6, 0.0))
    assert updated.groups[updated.group_of("b-0")] == assignment.groups[
        assignment.group_of("b-0")
    ]

    tie, _ = nearest_group(assignment, "c-1", (1.0, 1.0, 0.0))
    assert tie == "g00"

    with pytest.raises(InvalidInputError, match="no group"):
        nearest_group(GroupAssignment(), "c-0", (1.0,))
