"""Simulated cloud topology: regions, VMs, groups and pairwise latencies.

The hierarchy has three layers: clouds (regions), groups and VMs. Groups are
formed per region from application feature vectors; a group never spans two
regions. Latencies are drawn once per pair from the pair's class and kept for
the whole run.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from layered_gossip.src.core.digest import GroupId, RegionId
from layered_gossip.src.core.usage import VmId
from layered_gossip.src.grouping import (
    FeatureVector,
    GroupAssignment,
    assign_groups,
    nearest_group,
)
from layered_gossip.src.simulator.latency import LatencyTable, PairClass
from layered_gossip.src.simulator.scenario import Scenario

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class VmDescriptor:
    """Static facts about one VM.

    Attributes:
        id: The VM.
        region: Region it runs in.
        apps: Applications it runs.
        vector: Feature vector derived from ``apps``.
    """

    id: VmId
    region: RegionId
    apps: tuple[str, ...]
    vector: FeatureVector


def vm_id_for(index: int, population: int) -> VmId:
    """Return the id of the ``index``-th VM, zero padded so ids sort by index."""
    width = max(4, len(str(population)))
    return f"vm-{index:0{width}d}"


def feature_vector(
    apps: Iterable[str],
    applications: Sequence[str],
    weight: float,
    noise: float,
    rng: np.random.Generator,
) -> FeatureVector:
    """Build the feature vector of a VM running ``apps``.

    Args:
        apps: Applications present on the VM.
        applications: All known application tags, one dimension each.
        weight: Value of a present tag.
        noise: Upper bound of the uniform noise added to every dimension.
        rng: Seeded random source, drawn from only when ``noise`` is positive.

    Returns:
        The vector.
    """
    present = set(apps)
    base = np.array([weight if app in present else 0.0 for app in applications])
    if noise > 0:
        base = base + rng.uniform(0.0, noise, size=base.size)
    return tuple(float(x) for x in base)


class Topology:
    """Regions, groups and latencies of a run, including scripted churn.

    Membership queries only consider VMs that are currently alive.
    """

    def __init__(
        self,
        regions: Sequence[RegionId],
        vms: Iterable[VmDescriptor],
        assignments: Mapping[RegionId, GroupAssignment],
        latency: LatencyTable,
    ) -> None:
        """Initialize from an already built partition.

        Args:
            regions: Region ids in declaration order.
            vms: Every VM of the initial population.
            assignments: Group partition per region.
            latency: Latency table, holding every pair drawn so far.
        """
        self.regions = tuple(regions)
        self.latency = latency
        self._vms = {vm.id: vm for vm in vms}
        self._assignments = dict(assignments)
        self._group_of = {
            vm: group
            for assignment in self._assignments.values()
            for group, members in assignment.groups.items()
            for vm in members
        }
        self._region_of_group = {
            group: region
            for region, assignment in self._assignments.items()
            for group in assignment.groups
        }
        self._departed: set[VmId] = set()

    def __contains__(self, vm_id: object) -> bool:
        """Return whether ``vm_id`` is alive."""
        return vm_id in self._vms and vm_id not in self._departed

    def __len__(self) -> int:
        """Return the number of alive VMs."""
        return len(self._vms) - len(self._departed)

    def vms(self) -> list[VmId]:
        """Return the alive VMs in id order."""
        return sorted(vm for vm in self._vms if vm not in self._departed)

    def descriptor(self, vm_id: VmId) -> VmDescriptor:
        """Return the static facts about a VM, alive or departed."""
        return self._vms[vm_id]

    def region_of(self, vm_id: VmId) -> RegionId:
        """Return the region of a VM."""
        return self._vms[vm_id].region

    def group_of(self, vm_id: VmId) -> GroupId:
        """Return the group of a VM."""
        return self._group_of[vm_id]

    def assignment(self, region: RegionId) -> GroupAssignment:
        """Return the group partition of one region."""
        return self._assignments[region]

    def groups(self, region: RegionId | None = None) -> list[GroupId]:
        """Return the groups with at least one alive member, in id order.

        Args:
            region: Restrict to one region.
        """
        regions = self.regions if region is None else (region,)
        return sorted(
            group
            for name in regions
            for group in self._assignments[name].groups
            if self.members(group)
        )

    def live_regions(self) -> list[RegionId]:
        """Return the regions with at least one alive VM, in id order."""
        return sorted({self.region_of(vm) for vm in self.vms()})

    def members(self, group: GroupId) -> list[VmId]:
        """Return the alive members of a group in id order."""
        assignment = self._assignments[self._region_of_group[group]]
        members = assignment.groups.get(group, ())
        return sorted(vm for vm in members if vm not in self._departed)

    def pair_class(self, a: VmId, b: VmId) -> PairClass:
        """Return the relation between two VMs."""
        if self.region_of(a) != self.region_of(b):
            return PairClass.INTER_REGION
        if self.group_of(a) != self.group_of(b):
            return PairClass.INTRA_REGION
        return PairClass.INTRA_GROUP

    def peers(self, vm_id: VmId) -> tuple[tuple[VmId, float], ...]:
        """Return the alive group mates of a VM with their latency."""
        return tuple(
            (peer, self.latency.latency(vm_id, peer))
            for peer in self.members(self.group_of(vm_id))
            if peer != vm_id
        )

    def everyone_else(self, vm_id: VmId) -> tuple[tuple[VmId, float], ...]:
        """Return every other alive VM with its latency, as flat gossip sees it."""
        return tuple(
            (peer, self.latency.latency(vm_id, peer))
            for peer in self.vms()
            if peer != vm_id
        )

    def _closest(self, vm_id: VmId, candidates: Iterable[VmId]) -> VmId | None:
        ranked = sorted((self.latency.latency(vm_id, c), c) for c in candidates)
        return ranked[0][1] if ranked else None

    def group_contacts(self, vm_id: VmId) -> dict[GroupId, VmId]:
        """Return the lowest-latency member of every other group of the region."""
        own = self.group_of(vm_id)
        contacts = {
            group: self._closest(vm_id, self.members(group))
            for group in self.groups(self.region_of(vm_id))
            if group != own
        }
        return {group: vm for group, vm in contacts.items() if vm is not None}

    def region_contacts(self, vm_id: VmId) -> dict[RegionId, VmId]:
        """Return the lowest-latency VM of every other region."""
        own = self.region_of(vm_id)
        contacts = {
            region: self._closest(
                vm_id, (vm for vm in self.vms() if self.region_of(vm) == region)
            )
            for region in self.live_regions()
            if region != own
        }
        return {region: vm for region, vm in contacts.items() if vm is not None}

    def join(self, vm: VmDescriptor) -> GroupId:
        """Add a VM to the most similar group of its region.

        Latencies to every alive VM are drawn in id order.

        Args:
            vm: The joining VM.

        Returns:
            The group it joined.
        """
        group, assignment = nearest_group(
            self._assignments[vm.region], vm.id, vm.vector
        )
        others = self.vms()
        self._assignments[vm.region] = assignment
        self._vms[vm.id] = vm
        self._departed.discard(vm.id)
        self._group_of[vm.id] = group
        for other in others:
            self.latency.draw(vm.id, other, self.pair_class(vm.id, other))
        logger.debug("%s joined %s", vm.id, group)
        return group

    def leave(self, vm_id: VmId) -> None:
        """Mark a VM as departed."""
        self._departed.add(vm_id)
        logger.debug("%s left %s", vm_id, self._group_of.get(vm_id))


def build_topology(
    scenario: Scenario, rng: np.random.Generator | None = None
) -> Topology:
    """Build the regions, groups and latencies a scenario describes.

    Draw order is fixed: feature noise per VM in id order, then one latency
    per VM pair in sorted pair order.

    Args:
        scenario: Validated scenario.
        rng: Random source of the run; a fresh one seeded with
            ``scenario.seed`` when omitted.

    Returns:
        The topology.
    """
    rng = rng if rng is not None else np.random.default_rng(scenario.seed)
    applications = scenario.applications()
    vms: list[VmDescriptor] = []
    for region in scenario.regions:
        for cluster in region.clusters:
            for _ in range(cluster.count):
                vm_id = vm_id_for(len(vms), scenario.population)
                vector = feature_vector(
                    cluster.apps,
                    applications,
                    cluster.weight,
                    scenario.feature_noise,
                    rng,
                )
                vms.append(VmDescriptor(vm_id, region.id, cluster.apps, vector))
    assignments = {
        region.id: assign_groups(
            [(vm.id, vm.vector) for vm in vms if vm.region == region.id],
            scenario.tau,
            prefix=f"{region.id}/",
        )
        for region in scenario.regions
    }
    topology = Topology(
        [region.id for region in scenario.regions],
        vms,
        assignments,
        LatencyTable(scenario.latency, rng),
    )
    ids = topology.vms()
    for index, a in enumerate(ids):
        for b in ids[index + 1 :]:
            topology.latency.draw(a, b, topology.pair_class(a, b))
    logger.debug(
        "Built topology with %d VMs, %d groups, %d regions",
        len(topology),
        len(topology.groups()),
        len(topology.regions),
    )
    return topology
