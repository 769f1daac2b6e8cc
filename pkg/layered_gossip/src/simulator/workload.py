"""Synthetic VM workloads: bounded random walks per metric."""

from dataclasses import dataclass

import numpy as np

from layered_gossip.src import consts
from layered_gossip.src.core.usage import PERCENT_METRICS, ResourceUsage
from layered_gossip.src.exceptions import InvalidInputError


@dataclass(frozen=True, slots=True)
class WorkloadSpec:
    """Shape of the random walk every VM's usage follows.

    Attributes:
        percent_step: Largest per-round change of a percentage metric.
        net_max_kbps: Upper clamp of the network metric.
        net_step_kbps: Largest per-round change of the network metric.
        freeze_round: 1-based round from which usage stops changing; None
            keeps walking for the whole run.
    """

    percent_step: float = consts.PERCENT_STEP
    net_max_kbps: float = consts.NET_MAX_KBPS
    net_step_kbps: float = consts.NET_STEP_KBPS
    freeze_round: int | None = None

    def __post_init__(self) -> None:
        """Check parameter ranges.

        Raises:
            InvalidInputError: If a parameter is out of range.
        """
        checks = {
            "percent_step": self.percent_step >= 0,
            "net_max_kbps": self.net_max_kbps > 0,
            "net_step_kbps": self.net_step_kbps >= 0,
        }
        for name, ok in checks.items():
            if not ok:
                msg = f"{name} out of range: {getattr(self, name)!r}"
                raise InvalidInputError(msg, field=name)
        if self.freeze_round is not None and self.freeze_round < 1:
            msg = f"freeze_round must be at least 1, got {self.freeze_round}"
            raise InvalidInputError(msg, field="freeze_round")

    def initial(self, rng: np.random.Generator) -> ResourceUsage:
        """Draw the usage of a VM's first round."""
        cpu, mem, disk = (float(x) for x in rng.uniform(0.0, 100.0, size=3))
        net = float(rng.uniform(0.0, self.net_max_kbps))
        return ResourceUsage(cpu, mem, disk, net)

    def advance(
        self, usage: ResourceUsage, round_number: int, rng: np.random.Generator
    ) -> ResourceUsage:
        """Return the usage of ``round_number`` given the previous round's.

        Args:
            usage: Usage of the previous round.
            round_number: 1-based round being entered.
            rng: Seeded random source.

        Returns:
            The stepped and clamped usage, or ``usage`` unchanged once frozen.
        """
        if self.freeze_round is not None and round_number > self.freeze_round:
            return usage
        steps = rng.uniform(-self.percent_step, self.percent_step, size=3)
        percents = [
            float(np.clip(usage.metric(name) + step, 0.0, 100.0))
            for name, step in zip(PERCENT_METRICS, steps, strict=True)
        ]
        net_step = float(rng.uniform(-self.net_step_kbps, self.net_step_kbps))
        net = float(np.clip(usage.net_kbps + net_step, 0.0, self.net_max_kbps))
        return ResourceUsage(*percents, net)
