"""Access to scenario files shipped inside the package."""

from importlib.resources import as_file, files
from pathlib import Path
from types import ModuleType

from layered_gossip.resources import scenarios


def get_resource_path(name: str, package: ModuleType) -> Path:
    """Get the filesystem path of a resource file.

    Args:
        name: Resource filename.
        package: Package module containing the resource.

    Returns:
        Path to the resource, valid for the process lifetime.
    """
    resource_path = files(package) / name
    with as_file(resource_path) as path:
        return path


def bundled_scenario(name: str) -> Path:
    """Return the path of a scenario shipped with the package.

    Args:
        name: Filename, with or without the ``.json`` suffix.

    Returns:
        Path to the scenario file.
    """
    filename = name if name.endswith(".json") else f"{name}.json"
    return get_resource_path(filename, scenarios)


def bundled_scenarios() -> list[str]:
    """Return the names of every bundled scenario, sorted."""
    return sorted(
        entry.name.removesuffix(".json")
        for entry in files(scenarios).iterdir()
        if entry.name.endswith(".json")
    )


def resolve_scenario(path: Path) -> Path:
    """Resolve a scenario argument to a file.

    An existing file always wins. A bare name such as ``ec2_three_regions``
    or ``overhead_reference.json`` that is not a file in the working
    directory falls back to the bundled scenario of that name. Anything else
    is returned unchanged, so reading it reports the missing file.

    Args:
        path: Scenario file or bundled scenario name.

    Returns:
        Path to read the scenario from.
    """
    if path.exists() or len(path.parts) != 1:
        return path
    name = path.name.removesuffix(".json")
    if name not in bundled_scenarios():
        return path
    return bundled_scenario(name)
