"""Command line entry point.

Subcommands are the public functions of ``subcommands`` and
``shared_subcommands``; ``main`` registers them and runs the Typer app.

Logging is configured by the root callback:
    - Default: INFO level with bare messages
    - ``-q/--quiet``: WARNING level
    - ``-v``: DEBUG level with level prefix
    - ``-vv``: DEBUG level with logger names
    - ``-vvv``: DEBUG level with timestamps

Example:
    $ uv run layered-gossip simulate --scenario scenario.json --out out
    $ uv run layered-gossip -v compare --scenario scenario.json --seeds 5
"""

import inspect
import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from types import ModuleType
from typing import Any

import click
import typer
from typer.core import TyperGroup

from layered_gossip.dev.cli import shared_subcommands, subcommands

logger = logging.getLogger(__name__)


@contextmanager
def _usage_error_exit() -> Iterator[None]:
    """Give click usage errors the configuration error exit code."""
    try:
        yield
    except click.UsageError as error:
        error.exit_code = subcommands.CONFIG_ERROR_EXIT
        raise


class UsageErrorGroup(TyperGroup):
    """Root command group whose usage errors exit with code 1.

    Click exits with 2 on usage errors such as a missing option. Here 2 means
    an output file could not be written, and usage errors exit like an invalid
    scenario.
    """

    def make_context(
        self,
        info_name: str | None,
        args: list[str],
        parent: click.Context | None = None,
        **extra: Any,
    ) -> click.Context:
        """Parse the root options."""
        with _usage_error_exit():
            return super().make_context(info_name, args, parent, **extra)

    def invoke(self, ctx: click.Context) -> Any:
        """Resolve and run the subcommand, parsing its options."""
        with _usage_error_exit():
            return super().invoke(ctx)


app = typer.Typer(cls=UsageErrorGroup, no_args_is_help=True)
"""Root Typer application every command is registered to."""


@app.callback()
def configure_logging(
    verbose: int = typer.Option(
        0,
        "--verbose",
        "-v",
        count=True,
        help="Increase verbosity: -v (DEBUG), -vv (modules), -vvv (timestamps)",
    ),
    quiet: bool = typer.Option(  # noqa: FBT001
        False,  # noqa: FBT003
        "--quiet",
        "-q",
        help="Only show warnings and errors",
    ),
) -> None:
    """Configure logging from the verbosity flags.

    Args:
        verbose: Number of ``-v`` flags.
        quiet: Only warnings and errors; wins over ``verbose``.
    """
    if quiet:
        level = logging.WARNING
        fmt = "%(levelname)s: %(message)s"
    elif verbose == 0:
        level = logging.INFO
        fmt = "%(message)s"
    elif verbose == 1:
        level = logging.DEBUG
        fmt = "%(levelname)s: %(message)s"
    elif verbose == 2:  # noqa: PLR2004
        level = logging.DEBUG
        fmt = "%(levelname)s [%(name)s] %(message)s"
    else:
        level = logging.DEBUG
        fmt = "%(asctime)s %(levelname)s [%(name)s] %(message)s"

    logging.basicConfig(level=level, format=fmt, force=True)


def public_functions(module: ModuleType) -> list[Callable[..., Any]]:
    """Return the public functions defined in ``module``, in source order."""
    functions = [
        obj
        for name, obj in inspect.getmembers(module, inspect.isfunction)
        if not name.startswith("_") and obj.__module__ == module.__name__
    ]
    return sorted(functions, key=lambda function: function.__code__.co_firstlineno)


def add_subcommands() -> None:
    """Register the commands of ``subcommands`` and ``shared_subcommands``."""
    registered = {command.callback for command in app.registered_commands}
    for module in (subcommands, shared_subcommands):
        for command in public_functions(module):
            if command in registered:
                continue
            logger.debug("Registering subcommand: %s", command.__name__)
            app.command()(command)


def main() -> None:
    """Register every command and run the app."""
    add_subcommands()
    app()
