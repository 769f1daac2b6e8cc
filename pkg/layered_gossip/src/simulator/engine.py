"""Deterministic discrete-event engine running one scenario.

Time is counted in ticks of one millisecond. Every VM runs a process that
wakes once per ``t_gossip`` ticks, starting at a random phase within the first
round, and fires its timers there: sample the workload, start an intra-group
rumor and, on the rounds the parameters select, run the inter-group and
inter-cloud tiers. A message sent at tick ``t`` arrives at
``t + latency_ticks(latency)``; losses are decided at send time.

Events run in tick order and, within a tick, in scheduling order, which is
what the ``simpy`` event queue guarantees. All randomness comes from a single
``numpy`` generator seeded with the scenario seed, so a scenario and seed
always produce the same trace.

Snapshots are taken half a tick before a round ends and churn happens a quarter
tick before the next round starts, so neither interleaves with message events
and a round's snapshot still sees the VMs that leave at the next round.
"""

import logging
from collections.abc import Generator
from dataclasses import dataclass, replace
from functools import partial
from itertools import groupby
from typing import Self

import numpy as np
import simpy

from layered_gossip.src import consts
from layered_gossip.src.baselines import PollKind, flat_gossip_round
from layered_gossip.src.core.usage import ResourceUsage, VmId
from layered_gossip.src.exceptions import ConfigurationError, ProtocolViolationError
from layered_gossip.src.protocol.messages import GossipMessage, MessageKind
from layered_gossip.src.protocol.node import (
    Outgoing,
    on_local_sample,
    on_receive,
    on_timer_inter_cloud,
    on_timer_inter_group,
    on_timer_intra,
)
from layered_gossip.src.protocol.params import ProtocolParams
from layered_gossip.src.protocol.state import NodeState, SeenIds
from layered_gossip.src.report.metrics import (
    MetricsReport,
    convergence_round,
    count_rounds,
)
from layered_gossip.src.simulator.latency import PairClass, latency_ticks
from layered_gossip.src.simulator.scenario import (
    ChurnAction,
    ChurnEvent,
    Scenario,
    Scheme,
)
from layered_gossip.src.simulator.topology import (
    VmDescriptor,
    build_topology,
    feature_vector,
)
from layered_gossip.src.simulator.trace import (
    EventKind,
    EventTrace,
    NodeView,
    RoundSnapshot,
    TraceEvent,
)

logger = logging.getLogger(__name__)

FLAT_GROUP = "flat"
"""Group id every VM carries under flat gossip."""

type Process = Generator[simpy.Event, None, None]


@dataclass(frozen=True, slots=True)
class Copy:
    """One message copy travelling from sender to target.

    Attributes:
        message: Gossip payload; None for polling traffic.
    """

    sender: VmId
    target: VmId
    msg_kind: str
    msg_id: str
    ttl: int = 0
    hops: int = 0
    message: GossipMessage | None = None

    @classmethod
    def of(cls, sender: VmId, target: VmId, message: GossipMessage) -> Self:
        """Wrap a gossip message addressed to ``target``."""
        return cls(
            sender,
            target,
            message.kind.value,
            message.msg_id,
            message.ttl,
            message.hops,
            message,
        )


def protocol_for(scenario: Scenario) -> ProtocolParams:
    """Return the protocol parameters a scheme runs with.

    Flat gossip is the intra-group tier alone, so both upper tiers are off.
    """
    if scenario.scheme is Scheme.LAYERED:
        return scenario.protocol
    return replace(scenario.protocol, k_group=None, k_cloud=None)


class Simulation:
    """One run of a scenario.

    Build it, call ``run`` once, then inspect ``states``, ``usage`` and
    ``topology`` for the final situation.

    Processes:
        - One process per VM: sleeps until its phase, then fires its timers
          every ``t_gossip`` ticks until it leaves or the run ends
        - Churn: applies the leave and join events of each round
        - Snapshots: records what every alive VM knows at the end of a round
        - Collector (central scheme only): polls every VM once per period

    Scheme Handling:
        - ``layered``: VMs gossip inside their group; leaders run the
          inter-group and inter-cloud tiers on the rounds the parameters select
        - ``flat``: one group of every VM, fired through ``flat_gossip_round``
          with both inter tiers disabled
        - ``central``: VMs only sample; the collector's requests and responses
          are the traffic

    Attributes:
        scenario: The scenario being run.
        params: Protocol parameters after scheme adjustments.
        rng: The single seeded generator every draw comes from.
        env: The ``simpy`` environment.
        trace: Every event of the run, in the order it happened.
        states: Latest state of every VM that ran; departed VMs keep theirs.
        usage: Latest usage sample of every VM that ran.
        topology: Regions, groups, peers and leaders, rewired after churn.

    Example:
        >>> simulation = Simulation(load_scenario(Path("overhead_reference")))
        >>> report, trace = simulation.run()
        >>> report.scheme, len(simulation.states)
        ('layered', 40)

    See Also:
        layered_gossip.src.protocol.node: The per-VM state machine
        layered_gossip.src.report.metrics: How the trace is counted
    """

    def __init__(self, scenario: Scenario) -> None:
        """Build the topology and schedule every process.

        Args:
            scenario: Validated scenario.

        Raises:
            ConfigurationError: If the churn script adds a VM twice or removes
                one that is not there.
        """
        self.scenario = scenario
        self.params = protocol_for(scenario)
        self.rng = np.random.default_rng(scenario.seed)
        self.env = simpy.Environment()
        self.trace = EventTrace(scheme=scenario.scheme.value)
        self.states: dict[VmId, NodeState] = {}
        self.usage: dict[VmId, ResourceUsage] = {}
        self._t = self.params.t_gossip
        self._applications = scenario.applications()
        self._polls = 0
        self.topology = build_topology(scenario, self.rng)
        self._check_churn()

        batches = {
            round_number: list(batch)
            for round_number, batch in groupby(
                sorted(scenario.churn, key=lambda event: event.round),
                key=lambda event: event.round,
            )
        }
        for event in batches.pop(1, []):
            self._apply_churn(event)
        if scenario.scheme is Scheme.CENTRAL:
            for vm in self.topology.vms():
                self._draw_collector_latency(vm)
        for vm in self.topology.vms():
            self._start(vm, 0.0)
        self._rewire()

        if batches:
            self.env.process(self._churn(batches))
        if scenario.scheme is Scheme.CENTRAL:
            self.env.process(self._collector())
        else:
            self.env.process(self._snapshots())

    @property
    def central(self) -> bool:
        """Whether the run simulates centralized collection."""
        return self.scenario.scheme is Scheme.CENTRAL

    def _now(self) -> int:
        return int(self.env.now)

    def _check_churn(self) -> None:
        present = set(self.topology.vms())
        known = set(present)
        ordered = sorted(
            enumerate(self.scenario.churn), key=lambda item: item[1].round
        )
        for index, event in ordered:
            if event.action is ChurnAction.JOIN:
                if event.vm in known:
                    raise ConfigurationError(f"churn[{index}].vm", "already joined")
                known.add(event.vm)
                present.add(event.vm)
            elif event.vm not in present:
                raise ConfigurationError(f"churn[{index}].vm", "not present")
            else:
                present.discard(event.vm)

    # wiring

    def _fresh_state(self, vm: VmId) -> NodeState:
        return NodeState(
            id=vm,
            group=FLAT_GROUP
            if self.scenario.scheme is Scheme.FLAT
            else self.topology.group_of(vm),
            region=self.topology.region_of(vm),
            seen=SeenIds(capacity=self.params.seen_capacity),
        )

    def _rewire(self) -> None:
        """Refresh peers and contacts of every alive VM after a membership change."""
        for vm in self.topology.vms():
            state = self.states[vm]
            if self.scenario.scheme is Scheme.FLAT:
                state = replace(state, peers=self.topology.everyone_else(vm))
            else:
                state = replace(
                    state,
                    peers=self.topology.peers(vm),
                    group_contacts=self.topology.group_contacts(vm),
                    region_contacts=self.topology.region_contacts(vm),
                )
            self.states[vm] = state

    def _draw_collector_latency(self, vm: VmId) -> None:
        pair_class = (
            PairClass.INTRA_REGION
            if self.topology.region_of(vm) == self.topology.regions[0]
            else PairClass.INTER_REGION
        )
        self.topology.latency.draw(consts.COLLECTOR_ID, vm, pair_class)

    def _start(self, vm: VmId, delay: float) -> None:
        """Draw a VM's first usage and phase and start its timer process."""
        self.usage[vm] = self.scenario.workload.initial(self.rng)
        phase = int(self.rng.integers(0, self._t))
        self.states[vm] = self._fresh_state(vm)
        self.env.process(self._node(vm, delay + phase))

    def _apply_churn(self, event: ChurnEvent) -> None:
        if event.action is ChurnAction.LEAVE:
            self.topology.leave(event.vm)
            logger.debug("Round %d: %s leaves", event.round, event.vm)
            return
        region = event.region or self.topology.regions[0]
        vector = feature_vector(
            event.apps,
            self._applications,
            1.0,
            self.scenario.feature_noise,
            self.rng,
        )
        group = self.topology.join(VmDescriptor(event.vm, region, event.apps, vector))
        logger.debug("Round %d: %s joins %s", event.round, event.vm, group)

    # processes

    def _node(self, vm: VmId, delay: float) -> Process:
        yield self.env.timeout(delay)
        round_index = 0
        while vm in self.topology:
            self._fire(vm, round_index)
            round_index += 1
            yield self.env.timeout(self._t)

    def _churn(self, batches: dict[int, list[ChurnEvent]]) -> Process:
        for round_number in sorted(batches):
            yield self.env.timeout((round_number - 1) * self._t - 0.25 - self.env.now)
            for event in batches[round_number]:
                self._apply_churn(event)
                if event.action is ChurnAction.JOIN:
                    if self.central:
                        self._draw_collector_latency(event.vm)
                    self._start(event.vm, 0.25)
            self._rewire()

    def _snapshots(self) -> Process:
        for round_number in range(1, self.scenario.rounds + 1):
            yield self.env.timeout(round_number * self._t - 0.5 - self.env.now)
            views = {
                vm: NodeView(
                    groups=frozenset(self.states[vm].digests.group_digests),
                    regions=frozenset(self.states[vm].digests.region_digests),
                    origins=self.states[vm].records.origins(),
                )
                for vm in self.topology.vms()
            }
            self.trace.snapshots.append(RoundSnapshot(round_number, views))

    def _collector(self) -> Process:
        period = self.scenario.centralized.period(self._t)
        while True:
            msg_id = f"{consts.COLLECTOR_ID}#{self._polls}"
            self._polls += 1
            for vm in self.topology.vms():
                if self.scenario.centralized.messages_per_poll == 2:  # noqa: PLR2004
                    request = PollKind.REQUEST.value
                    self._send(Copy(consts.COLLECTOR_ID, vm, request, msg_id))
                else:
                    self._respond(vm)
            yield self.env.timeout(period)

    # events

    def _note(self, kind: EventKind, node: VmId, msg_kind: str) -> None:
        self.trace.record(TraceEvent(self._now(), kind, node, str(msg_kind)))

    def _note_copy(self, kind: EventKind, copy: Copy) -> None:
        node, peer = (
            (copy.sender, copy.target)
            if kind is EventKind.SEND
            else (copy.target, copy.sender)
        )
        self.trace.record(
            TraceEvent(
                self._now(),
                kind,
                node,
                copy.msg_kind,
                copy.msg_id,
                peer=peer,
                ttl=copy.ttl,
                hops=copy.hops,
            )
        )

    def _fire(self, vm: VmId, round_index: int) -> None:
        """Run the timers of one VM for one of its rounds."""
        now = self._now()
        if round_index > 0:
            self.usage[vm] = self.scenario.workload.advance(
                self.usage[vm], now // self._t + 1, self.rng
            )
        self._note(EventKind.SAMPLE, vm, "")
        state = on_local_sample(self.states[vm], self.usage[vm], now)
        self.states[vm] = state
        if self.central:
            return

        self._note(EventKind.TIMER, vm, MessageKind.INTRA_GROUP)
        if self.scenario.scheme is Scheme.FLAT:
            fired, outgoing = flat_gossip_round([state], self.params, self.rng, now)
            state = fired[0]
        else:
            state, outgoing = on_timer_intra(state, now, self.rng, self.params)
        self.states[vm] = state
        self._dispatch(vm, outgoing)
        if not self.params.fires_inter_group(round_index):
            return
        self._note(EventKind.TIMER, vm, MessageKind.INTER_GROUP)
        state, outgoing = on_timer_inter_group(state, now, round_index, self.params)
        self.states[vm] = state
        self._dispatch(vm, outgoing)
        if not self.params.fires_inter_cloud(round_index):
            return
        self._note(EventKind.TIMER, vm, MessageKind.INTER_CLOUD)
        state, outgoing = on_timer_inter_cloud(state, now)
        self.states[vm] = state
        self._dispatch(vm, outgoing)

    def _dispatch(self, sender: VmId, outgoing: Outgoing) -> None:
        for target, message in outgoing:
            self._send(Copy.of(sender, target, message))

    def _respond(self, vm: VmId) -> None:
        msg_id, state = self.states[vm].next_msg_id()
        self.states[vm] = state
        self._send(Copy(vm, consts.COLLECTOR_ID, PollKind.RESPONSE.value, msg_id))

    def _send(self, copy: Copy) -> None:
        """Put one copy on the wire, decide its loss and schedule its arrival."""
        self._note_copy(EventKind.SEND, copy)
        latency = self.topology.latency
        loss = 0.0
        if not self.central:
            loss = latency.model.loss_of(latency.pair_class(copy.sender, copy.target))
        if loss > 0 and self.rng.random() < loss:
            self._note_copy(EventKind.DROP, copy)
            return
        delay = latency_ticks(latency.latency(copy.sender, copy.target))
        self.env.timeout(delay).callbacks.append(partial(self._arrive, copy))

    def _arrive(self, copy: Copy, _event: simpy.Event) -> None:
        target = copy.target
        if target != consts.COLLECTOR_ID and target not in self.topology:
            self._note_copy(EventKind.DROP, copy)
            return
        if copy.message is None:
            self._note_copy(EventKind.DELIVER, copy)
            if copy.msg_kind == PollKind.REQUEST:
                self._respond(target)
            return
        try:
            state, outgoing = on_receive(
                self.states[target], copy.message, self._now(), self.rng, self.params
            )
        except ProtocolViolationError as error:
            logger.warning(
                "%s rejected %s from %s: %s", target, copy.msg_id, copy.sender, error
            )
            self._note_copy(EventKind.DROP, copy)
            return
        self._note_copy(EventKind.DELIVER, copy)
        self.states[target] = state
        self._dispatch(target, outgoing)

    def run(self) -> tuple[MetricsReport, EventTrace]:
        """Run every round of the scenario.

        Returns:
            The metrics report and the full event trace.
        """
        scenario = self.scenario
        logger.info(
            "Running %s scheme: %d VMs in %d groups and %d regions, %d rounds, seed %d",
            scenario.scheme,
            scenario.population,
            len(self.topology.groups()),
            len(self.topology.regions),
            scenario.rounds,
            scenario.seed,
        )
        self.env.run(until=scenario.rounds * self._t)
        report = MetricsReport(
            scheme=scenario.scheme.value,
            population=scenario.population,
            groups=len(self.topology.groups()),
            regions=len(self.topology.regions),
            rounds=scenario.rounds,
            seed=scenario.seed,
            per_round=count_rounds(self.trace, scenario.rounds, self._t),
            convergence_round=convergence_round(self.trace, self.topology),
        )
        logger.info(
            "Finished %s scheme: %d messages, convergence round %s",
            scenario.scheme,
            report.total,
            report.convergence_round,
        )
        return report, self.trace


def run(scenario: Scenario) -> tuple[MetricsReport, EventTrace]:
    """Simulate a scenario.

    Shorthand for ``Simulation(scenario).run()`` when the final states are not
    needed.

    Args:
        scenario: Validated scenario.

    Returns:
        The metrics report and the event trace of the run.

    Raises:
        ConfigurationError: If the churn script is inconsistent with the
            population.

    Example:
        >>> report, _ = run(scenario.with_seed(3))
        >>> report.total > 0
        True

    Note:
        Two calls with equal scenarios return equal reports and traces.
    """
    return Simulation(scenario).run()
