"""Group formation from application feature vectors.

Each VM describes the applications it runs as a vector with one non-negative
weight per known application tag. VMs whose vectors point in similar
directions end up in the same group, so all web servers gossip with each other
and all Hadoop nodes with each other.

Groups are formed with greedy leader clustering: VMs are visited in id order,
each joins the first existing group whose running centroid is at least ``tau``
similar to it, and otherwise founds a new group. The procedure needs no group
count, is deterministic and only depends on the visiting order.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from layered_gossip.src.core.digest import GroupId
from layered_gossip.src.core.usage import VmId
from layered_gossip.src.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

type FeatureVector = tuple[float, ...]


def as_array(vector: Sequence[float]) -> NDArray[np.float64]:
    """Validate a feature vector and convert it to a numpy array.

    Args:
        vector: Non-negative finite weights, at least one strictly positive.

    Returns:
        The vector as a float array.

    Raises:
        InvalidInputError: If the vector is empty, has negative or non-finite
            entries, or is all zero.
    """
    array = np.asarray(vector, dtype=np.float64)
    if array.ndim != 1 or array.size == 0:
        msg = f"feature vector must be a non-empty sequence, got {vector!r}"
        raise InvalidInputError(msg)
    if not np.all(np.isfinite(array)) or np.any(array < 0):
        msg = f"feature vector entries must be finite and non-negative: {vector!r}"
        raise InvalidInputError(msg)
    if not np.any(array > 0):
        msg = "feature vector must have a strictly positive dimension"
        raise InvalidInputError(msg)
    return array


def cosine_similarity(u: Sequence[float], v: Sequence[float]) -> float:
    """Return the cosine of the angle between two feature vectors.

    Args:
        u: First vector.
        v: Second vector of the same dimensionality.

    Returns:
        Similarity in [0, 1]; 1 for parallel, 0 for orthogonal vectors.

    Raises:
        InvalidInputError: On dimensionality mismatch or an invalid vector.
    """
    a, b = as_array(u), as_array(v)
    if a.shape != b.shape:
        msg = f"dimensionality mismatch: {a.size} vs {b.size}"
        raise InvalidInputError(msg)
    similarity = float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))
    return min(1.0, max(0.0, similarity))


@dataclass(frozen=True, slots=True)
class GroupAssignment:
    """Partition of VMs into groups with the centroid of each group.

    Attributes:
        groups: Members per group in joining order.
        centroids: Arithmetic mean of the member vectors per group.
    """

    groups: Mapping[GroupId, tuple[VmId, ...]] = field(default_factory=dict)
    centroids: Mapping[GroupId, FeatureVector] = field(default_factory=dict)

    def group_of(self, vm_id: VmId) -> GroupId:
        """Return the group containing ``vm_id``.

        Raises:
            KeyError: If the VM is not assigned.
        """
        for group_id, members in self.groups.items():
            if vm_id in members:
                return group_id
        raise KeyError(vm_id)

    def members(self) -> list[VmId]:
        """Return every assigned VM in group order."""
        return [vm for group_id in sorted(self.groups) for vm in self.groups[group_id]]


def group_id_for(prefix: str, index: int, count: int = 0) -> GroupId:
    """Return the id of the ``index``-th group founded under ``prefix``.

    Indexes are zero padded to at least two digits and to the width of the
    largest index below ``count``, so lexicographic order equals founding order
    among the ids of one assignment.

    Args:
        prefix: Prepended to the id.
        index: Founding position, from 0.
        count: Groups founded in the same assignment.
    """
    width = max(2, len(str(max(count, index + 1) - 1)))
    return f"{prefix}g{index:0{width}d}"


def assign_groups(
    vms: Sequence[tuple[VmId, Sequence[float]]], tau: float, prefix: str = ""
) -> GroupAssignment:
    """Assign VMs to groups with greedy threshold clustering.

    Args:
        vms: VM ids with their feature vectors.
        tau: Similarity a VM needs to the running centroid to join a group.
        prefix: Prepended to generated group ids (e.g. ``"eu-west/"``).

    Returns:
        A partition of the VMs.

    Raises:
        InvalidInputError: If the input is empty, ``tau`` is outside (0, 1],
            vectors are invalid or dimensionalities differ.
    """
    if not vms:
        msg = "cannot group an empty VM set"
        raise InvalidInputError(msg)
    if not 0.0 < tau <= 1.0:
        msg = f"tau must be within (0, 1], got {tau}"
        raise InvalidInputError(msg)
    dims = {len(vector) for _, vector in vms}
    if len(dims) != 1:
        msg = f"feature vectors differ in dimensionality: {sorted(dims)}"
        raise InvalidInputError(msg)

    members: list[list[VmId]] = []
    sums: list[NDArray[np.float64]] = []
    for vm_id, vector in sorted(vms, key=lambda item: item[0]):
        array = as_array(vector)
        for index, total in enumerate(sums):
            centroid = total / len(members[index])
            if cosine_similarity(centroid, array) >= tau:
                members[index].append(vm_id)
                sums[index] = total + array
                break
        else:
            members.append([vm_id])
            sums.append(array.copy())

    group_ids = [
        group_id_for(prefix, index, len(members)) for index in range(len(members))
    ]
    assignment = GroupAssignment(
        groups={
            gid: tuple(group) for gid, group in zip(group_ids, members, strict=True)
        },
        centroids={
            gid: tuple(float(x) for x in total / len(group))
            for gid, total, group in zip(group_ids, sums, members, strict=True)
        },
    )
    logger.debug(
        "Formed %d groups from %d VMs with tau=%s", len(members), len(vms), tau
    )
    return assignment


def nearest_group(
    assignment: GroupAssignment, vm_id: VmId, vector: Sequence[float]
) -> tuple[GroupId, GroupAssignment]:
    """Place a late-joining VM into the most similar existing group.

    Groups are never split or merged; ties go to the smallest group id.

    Args:
        assignment: Current assignment, must hold at least one group.
        vm_id: Joining VM.
        vector: Its feature vector.

    Returns:
        The chosen group and the assignment with the VM added and the
        centroid updated.

    Raises:
        InvalidInputError: If the assignment is empty or the vector invalid.
    """
    if not assignment.groups:
        msg = "no group to join"
        raise InvalidInputError(msg)
    array = as_array(vector)
    # max() keeps the first of equal keys, so sorting makes ties go to the smallest id
    chosen = max(
        sorted(assignment.groups),
        key=lambda gid: cosine_similarity(assignment.centroids[gid], array),
    )
    size = len(assignment.groups[chosen])
    centroid = (np.asarray(assignment.centroids[chosen]) * size + array) / (size + 1)
    return chosen, GroupAssignment(
        groups={**assignment.groups, chosen: (*assignment.groups[chosen], vm_id)},
        centroids={**assignment.centroids, chosen: tuple(float(x) for x in centroid)},
    )
