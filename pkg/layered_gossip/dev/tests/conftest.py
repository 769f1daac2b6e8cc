"""Pytest plugin registering every fixture module of ``layered_gossip``.

Module Attributes:
    pytest_plugins: Module names of all ``.py`` files under ``fixtures``.
"""

from pathlib import Path

from layered_gossip.dev.tests import fixtures

fixtures_dir = Path(fixtures.__file__).parent

pytest_plugins = [
    f"{fixtures.__name__}.{path.stem}"
    for path in sorted(fixtures_dir.glob("*.py"))
    if path.stem != "__init__"
]
