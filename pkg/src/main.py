import logging
import sys
from typing import Annotated, Optional

import click
import typer

from src.core.config import settings
from src.core.exceptions import EXIT_USAGE
from src.schemas import AppInfo
from src.modules.graph import router as graph_router
from src.modules.maxflow import router as maxflow_router
from src.modules.patterns import router as patterns_router
from src.modules.workload import router as workload_router

# --- Global Logging Configuration ---
# stderr only: stdout carries command output
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr)
    ]
)
logger = logging.getLogger(__name__)


# --- Typer Application Instance ---
app = typer.Typer(
    name=settings.APP_NAME,
    help="Flow computation in temporal interaction networks.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log at DEBUG level.")] = False,
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Override LOG_LEVEL for this run.")] = None,
):
    """
    Greedy and maximum flow, reductions, pattern search and benchmarks over
    interaction records `src dst timestamp quantity`.
    """
    level = "DEBUG" if verbose else (log_level or settings.LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        raise typer.BadParameter(f"unknown log level '{level}'", param_hint="--log-level")
    logging.getLogger().setLevel(level)
    logger.debug(f"{settings.APP_NAME} {settings.APP_VERSION} ({settings.ENVIRONMENT}) at log level {level}.")


@app.command("info")
def info(as_json: Annotated[bool, typer.Option("--json", help="Print JSON.")] = False):
    """Shows the version and the active settings."""
    payload = AppInfo(
        service=settings.APP_NAME,
        version=settings.APP_VERSION,
        environment=settings.ENVIRONMENT,
        commands=sorted(c.name for c in typer.main.get_command(app).commands.values()),
        settings=settings.model_dump(),
    )
    if as_json:
        typer.echo(payload.model_dump_json())
        return
    typer.echo(f"{payload.service} {payload.version} ({payload.environment})")
    typer.echo("commands: " + ", ".join(payload.commands))
    for key, value in payload.settings.items():
        typer.echo(f"  {key}={value}")


# --- Mount the Routers ---
app.add_typer(graph_router)
app.add_typer(maxflow_router)
app.add_typer(patterns_router)
app.add_typer(workload_router)


def run() -> None:
    """Entry point; click usage errors exit with the usage code."""
    try:
        code = app(standalone_mode=False)
    except click.ClickException as e:
        e.show()
        code = EXIT_USAGE
    except click.exceptions.Abort:
        code = EXIT_USAGE
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    run()
