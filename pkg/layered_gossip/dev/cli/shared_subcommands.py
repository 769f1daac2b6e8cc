"""Commands every distribution of the tool carries."""

from importlib.metadata import version as get_version

import typer

DISTRIBUTION = "layered-gossip"


def version() -> None:
    """Display the installed version.

    Example:
        $ uv run layered-gossip version
        layered-gossip version 0.1.0
    """
    typer.echo(f"{DISTRIBUTION} version {get_version(DISTRIBUTION)}")
