"""layered_gossip - simulate layered gossip monitoring of multi-region clouds.

VMs are grouped by the applications they run. Members of a group gossip their
resource usage to each other, group leaders exchange group digests inside a
region and region leaders exchange region digests between regions. The
simulator compares the message cost of this scheme with flat gossip and with
centralized collection.

Subpackages:
    src: Runtime code. Data model (core), group formation (grouping), the
        per-VM protocol (protocol), comparison schemes (baselines), the
        discrete-event engine (simulator) and metrics and writers (report).
    dev: Command line (cli) and shared pytest fixtures (tests).
    resources: Bundled scenario files, located with
        ``layered_gossip.src.resource.bundled_scenario``.
"""
