"""Scenario description and the JSON scenario loader.

A scenario fixes everything a run depends on: population and its split into
regions and application clusters, protocol and baseline parameters, the
latency model, the workload, an optional churn script, the scheme to run and
the seed.

Scenario files are JSON objects. Only ``population``, ``regions``, ``scheme``,
``rounds`` and ``seed`` are required::

    {
        "population": 60,
        "regions": 2,
        "groups_per_region": 3,
        "scheme": "layered",
        "rounds": 40,
        "seed": 7,
        "protocol": {"beta": 0.1, "f_max": 5, "k_group": 5, "k_cloud": 5},
        "latency": {"loss_intra": 0.0},
        "workload": {"freeze_round": 10}
    }

``regions`` may instead list regions explicitly::

    "regions": [
        {"id": "eu-west", "clusters": [
            {"apps": ["webserver"], "count": 20},
            {"apps": ["hadoop", "hdfs"], "count": 10, "weight": 0.5}
        ]}
    ]

Unknown keys are rejected at every level. Errors name the dotted field path.
"""

import json
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace
from enum import StrEnum
from pathlib import Path
from types import UnionType
from typing import Any, Self, TypeAliasType, Union, get_args, get_origin

from layered_gossip.src import consts
from layered_gossip.src.baselines import CentralizedParams
from layered_gossip.src.core.digest import RegionId
from layered_gossip.src.core.usage import VmId
from layered_gossip.src.exceptions import ConfigurationError, InvalidInputError
from layered_gossip.src.protocol.params import ProtocolParams
from layered_gossip.src.resource import resolve_scenario
from layered_gossip.src.simulator.latency import LatencyModel
from layered_gossip.src.simulator.workload import WorkloadSpec

logger = logging.getLogger(__name__)


class Scheme(StrEnum):
    """Monitoring scheme a run simulates."""

    LAYERED = "layered"
    FLAT = "flat"
    CENTRAL = "central"


class ChurnAction(StrEnum):
    """Scripted membership change."""

    JOIN = "join"
    LEAVE = "leave"


@dataclass(frozen=True, slots=True)
class ClusterSpec:
    """VMs of one region that run the same applications.

    Attributes:
        apps: Application tags present on these VMs.
        count: Number of VMs.
        weight: Value of the present tags in the feature vector.
    """

    apps: tuple[str, ...]
    count: int
    weight: float = 1.0


@dataclass(frozen=True, slots=True)
class RegionSpec:
    """One cloud region and its application clusters."""

    id: RegionId
    clusters: tuple[ClusterSpec, ...]

    @property
    def count(self) -> int:
        """VMs in the region."""
        return sum(cluster.count for cluster in self.clusters)


@dataclass(frozen=True, slots=True)
class ChurnEvent:
    """A VM joining or leaving at the start of a round.

    Attributes:
        round: 1-based round at whose start the change happens.
        action: Join or leave.
        vm: The VM concerned.
        region: Region of a joining VM.
        apps: Application tags of a joining VM.
    """

    round: int
    action: ChurnAction
    vm: VmId
    region: RegionId | None = None
    apps: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class Scenario:
    """Complete, validated description of one simulation run."""

    population: int
    regions: tuple[RegionSpec, ...]
    scheme: Scheme
    rounds: int
    seed: int
    tau: float = consts.TAU
    feature_noise: float = 0.0
    protocol: ProtocolParams = field(default_factory=ProtocolParams)
    centralized: CentralizedParams = field(default_factory=CentralizedParams)
    latency: LatencyModel = field(default_factory=LatencyModel)
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    churn: tuple[ChurnEvent, ...] = ()

    def __post_init__(self) -> None:
        """Check cross-field constraints.

        Raises:
            ConfigurationError: Naming the offending field.
        """
        if self.population < 1:
            raise ConfigurationError("population", "must be at least 1")
        if self.rounds < 1:
            raise ConfigurationError("rounds", "must be at least 1")
        if self.seed < 0:
            raise ConfigurationError("seed", "must be a non-negative integer")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigurationError("tau", "must be within (0, 1]")
        if self.feature_noise < 0.0:
            raise ConfigurationError("feature_noise", "must be non-negative")
        if not self.regions:
            raise ConfigurationError("regions", "at least one region is required")
        seen: set[str] = set()
        for index, region in enumerate(self.regions):
            if region.id in seen or not region.id:
                raise ConfigurationError(
                    f"regions[{index}].id", f"duplicate or empty id {region.id!r}"
                )
            seen.add(region.id)
            for position, cluster in enumerate(region.clusters):
                path = f"regions[{index}].clusters[{position}]"
                if cluster.count < 1:
                    raise ConfigurationError(f"{path}.count", "must be at least 1")
                if not cluster.apps:
                    raise ConfigurationError(f"{path}.apps", "needs an application")
                if cluster.weight <= 0:
                    raise ConfigurationError(f"{path}.weight", "must be positive")
        total = sum(region.count for region in self.regions)
        if total != self.population:
            raise ConfigurationError(
                "population", f"is {self.population} but regions hold {total} VMs"
            )
        for index, event in enumerate(self.churn):
            self._check_churn(index, event, seen)

    def _check_churn(self, index: int, event: ChurnEvent, regions: set[str]) -> None:
        path = f"churn[{index}]"
        if not 1 <= event.round <= self.rounds:
            raise ConfigurationError(f"{path}.round", "must fall within the run")
        if event.action is ChurnAction.JOIN:
            if event.region not in regions:
                raise ConfigurationError(f"{path}.region", "unknown region")
            if unknown := set(event.apps) - set(self.applications()):
                raise ConfigurationError(f"{path}.apps", f"unknown apps {unknown}")
            if not event.apps:
                raise ConfigurationError(f"{path}.apps", "needs an application")

    def applications(self) -> tuple[str, ...]:
        """Return the application tags in order of first appearance."""
        tags: dict[str, None] = {}
        for region in self.regions:
            for cluster in region.clusters:
                tags.update(dict.fromkeys(cluster.apps))
        return tuple(tags)

    def with_scheme(self, scheme: Scheme) -> Self:
        """Return a copy running ``scheme``."""
        return replace(self, scheme=scheme)

    def with_seed(self, seed: int) -> Self:
        """Return a copy using ``seed``."""
        return replace(self, seed=seed)

    def resized(self, population: int) -> Self:
        """Return a copy with ``population`` VMs spread like the current ones.

        Counts are scaled per cluster with largest-remainder rounding;
        clusters that end up empty are dropped.

        Raises:
            ConfigurationError: If a region would end up empty.
        """
        if population < 1:
            raise ConfigurationError("population", "must be at least 1")
        weights = [c.count for region in self.regions for c in region.clusters]
        counts = iter(split_evenly(population, weights))
        regions = []
        for region in self.regions:
            scaled = [(cluster, next(counts)) for cluster in region.clusters]
            clusters = tuple(
                replace(cluster, count=count) for cluster, count in scaled if count > 0
            )
            if not clusters:
                raise ConfigurationError(
                    "population", f"{population} VMs leave region {region.id} empty"
                )
            regions.append(replace(region, clusters=clusters))
        return replace(self, population=population, regions=tuple(regions))


def split_evenly(
    total: int, weights: list[int] | None = None, parts: int = 0
) -> list[int]:
    """Split ``total`` proportionally to ``weights`` with largest remainders.

    Args:
        total: Amount to split.
        weights: Relative shares; ``parts`` equal shares when None.
        parts: Number of equal shares, used when ``weights`` is None.

    Returns:
        Integer shares summing to ``total``; ties favour earlier shares.
    """
    shares = weights if weights is not None else [1] * parts
    whole = sum(shares)
    exact = [total * share / whole for share in shares]
    counts = [int(value) for value in exact]
    order = sorted(range(len(shares)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[: total - sum(counts)]:
        counts[i] += 1
    return counts


def _join(path: str, key: str | int) -> str:
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _check_value(value: Any, annotation: Any, path: str) -> Any:
    """Check a JSON value against a dataclass field annotation."""
    if isinstance(annotation, TypeAliasType):
        return _check_value(value, annotation.__value__, path)
    if get_origin(annotation) in {Union, UnionType}:
        args = get_args(annotation)
        if value is None and type(None) in args:
            return None
        annotation = next(arg for arg in args if arg is not type(None))
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(path, f"expected an integer, got {value!r}")
        return value
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, int | float):
            raise ConfigurationError(path, f"expected a number, got {value!r}")
        return float(value)
    enum = isinstance(annotation, type) and issubclass(annotation, StrEnum)
    if annotation is str or enum:
        if not isinstance(value, str):
            raise ConfigurationError(path, f"expected a string, got {value!r}")
        if annotation is not str:
            try:
                return annotation(value)
            except ValueError:
                options = ", ".join(member.value for member in annotation)
                raise ConfigurationError(path, f"expected one of {options}") from None
        return value
    if get_origin(annotation) is tuple:
        if not isinstance(value, list):
            raise ConfigurationError(path, f"expected a list, got {value!r}")
        item_types = get_args(annotation)
        if len(item_types) == 2 and item_types[1] is Ellipsis:  # noqa: PLR2004
            item_types = (item_types[0],) * len(value)
        if len(item_types) != len(value):
            raise ConfigurationError(path, f"expected {len(item_types)} items")
        return tuple(
            _check_value(item, item_type, _join(path, index))
            for index, (item, item_type) in enumerate(
                zip(value, item_types, strict=True)
            )
        )
    return value


def _build[T](cls: type[T], data: Any, path: str, **prepared: Any) -> T:
    """Build a dataclass from a JSON object, rejecting unknown keys."""
    if not isinstance(data, Mapping):
        raise ConfigurationError(path or "scenario", "expected an object")
    init_fields = {f.name: f for f in fields(cls) if f.init}  # type: ignore[arg-type]
    for key in data:
        if key not in init_fields:
            raise ConfigurationError(_join(path, key), "unknown key")
    kwargs = {
        key: prepared[key]
        if key in prepared
        else _check_value(value, init_fields[key].type, _join(path, key))
        for key, value in data.items()
    }
    kwargs.update({key: value for key, value in prepared.items() if key not in kwargs})
    try:
        return cls(**kwargs)
    except InvalidInputError as error:
        raise ConfigurationError(
            _join(path, error.field) if error.field else path or "scenario", str(error)
        ) from error
    except TypeError as error:
        raise ConfigurationError(path or "scenario", str(error)) from error


def _require(data: Mapping[str, Any], key: str) -> Any:
    if key not in data:
        raise ConfigurationError(key, "is required")
    return data[key]


def _generated_regions(
    data: Mapping[str, Any], population: int, count: int
) -> list[dict[str, Any]]:
    """Expand ``"regions": <count>`` into explicit region objects."""
    groups = data.get("groups_per_region", 1)
    _check_value(groups, int, "groups_per_region")
    if count < 1:
        raise ConfigurationError("regions", "at least one region is required")
    if groups < 1:
        raise ConfigurationError("groups_per_region", "must be at least 1")
    regions = []
    for index, size in enumerate(split_evenly(population, parts=count)):
        sizes = split_evenly(size, parts=groups)
        clusters = [
            {"apps": [f"app-{g}"], "count": n} for g, n in enumerate(sizes) if n > 0
        ]
        regions.append({"id": f"region-{index}", "clusters": clusters})
    return regions


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario object and apply defaults.

    Validation Order:
        1. Required keys: ``population``, ``regions``, ``scheme``, ``rounds``
           and ``seed``
        2. Regions: a count is expanded into ``region-<i>`` regions of
           ``groups_per_region`` single application clusters each, splitting
           the population evenly; a list is checked region by region
        3. Sections: ``protocol``, ``centralized``, ``latency`` and
           ``workload``, each falling back to its defaults
        4. Churn events, then the scenario's cross field checks (cluster
           counts summing to the population, known churn regions)

    Args:
        data: Decoded JSON.

    Returns:
        The scenario.

    Raises:
        ConfigurationError: Naming the first invalid field by its dotted path,
            for example ``regions[1].clusters[0].count``.

    Example:
        >>> scenario = parse_scenario(
        ...     {"population": 12, "regions": 2, "groups_per_region": 2,
        ...      "scheme": "flat", "rounds": 5, "seed": 7}
        ... )
        >>> [len(region.clusters) for region in scenario.regions]
        [2, 2]
    """
    if not isinstance(data, Mapping):
        raise ConfigurationError("scenario", "expected a JSON object")
    for key in ("scheme", "rounds", "seed"):
        _require(data, key)
    population = _check_value(_require(data, "population"), int, "population")
    if population < 1:
        raise ConfigurationError("population", "must be at least 1")
    raw_regions = _require(data, "regions")
    if isinstance(raw_regions, int) and not isinstance(raw_regions, bool):
        raw_regions = _generated_regions(data, population, raw_regions)
    elif "groups_per_region" in data:
        raise ConfigurationError(
            "groups_per_region", "only applies when regions is a count"
        )
    if not isinstance(raw_regions, list):
        raise ConfigurationError("regions", "expected a count or a list of regions")
    regions = []
    for index, raw in enumerate(raw_regions):
        path = f"regions[{index}]"
        raw_clusters = raw.get("clusters") if isinstance(raw, Mapping) else None
        if not isinstance(raw_clusters, list):
            raise ConfigurationError(f"{path}.clusters", "expected a list")
        clusters = tuple(
            _build(ClusterSpec, cluster, f"{path}.clusters[{position}]")
            for position, cluster in enumerate(raw_clusters)
        )
        regions.append(_build(RegionSpec, raw, path, clusters=clusters))
    raw_churn = data.get("churn", [])
    if not isinstance(raw_churn, list):
        raise ConfigurationError("churn", "expected a list")
    sections = {
        "protocol": ProtocolParams,
        "centralized": CentralizedParams,
        "latency": LatencyModel,
        "workload": WorkloadSpec,
    }
    prepared: dict[str, Any] = {
        name: _build(cls, data.get(name, {}), name) for name, cls in sections.items()
    }
    prepared["regions"] = tuple(regions)
    prepared["churn"] = tuple(
        _build(ChurnEvent, event, f"churn[{index}]")
        for index, event in enumerate(raw_churn)
    )
    body = {key: value for key, value in data.items() if key != "groups_per_region"}
    return _build(Scenario, body, "", **prepared)


def load_scenario(path: Path) -> Scenario:
    """Read, parse and validate a scenario file.

    Loading runs in three steps:

    1. Resolution: ``path`` is read as given when it exists. A bare name that
       is not a file in the working directory is looked up among the bundled
       scenarios (see ``resolve_scenario``).
    2. Decoding: the file must hold one JSON object.
    3. Validation: ``parse_scenario`` applies defaults, derives the region
       layout and checks every field and cross field constraint.

    Args:
        path: JSON scenario file, or the name of a bundled scenario.

    Returns:
        The scenario with defaults applied.

    Raises:
        ConfigurationError: If the file cannot be read, is not JSON, or
            describes an invalid scenario. The error names the dotted field
            path, or ``scenario`` for file level problems.

    Example:
        >>> scenario = load_scenario(Path("overhead_reference"))
        >>> scenario.population, scenario.scheme
        (40, <Scheme.LAYERED: 'layered'>)

    Note:
        Nothing is cached; every call rereads the file.
    """
    path = resolve_scenario(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigurationError("scenario", f"cannot read {path}: {error}") from error
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigurationError(
            "scenario", f"invalid JSON in {path} at line {error.lineno}: {error.msg}"
        ) from error
    scenario = parse_scenario(data)
    logger.debug("Loaded scenario %s: %s", path, scenario)
    return scenario
