from pathlib import Path
from typing import Annotated, Optional

import typer
from rich.console import Console
from rich.table import Table

from src.core.dependencies import FormatOpt, GraphFile, JsonOpt, WindowOpt, load_graph
from src.core.exceptions import exit_on_error
from src.modules.graph import services

router = typer.Typer()
console = Console()


@router.command("ingest")
def ingest(
    file: GraphFile,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write canonical records here, intern table alongside.")] = None,
    as_json: JsonOpt = False,
):
    """Parses an interaction file and reports its size and time span."""
    with exit_on_error("ingest"):
        graph = load_graph(file, fmt, window)
        summary = services.summarize(graph)
        if out is not None:
            with open(out, "w", encoding="utf-8", newline="") as fp:
                services.serialize_interactions(graph, fp, fmt or "tsv")
            with open(out.with_name(out.name + ".vertices.json"), "w", encoding="utf-8") as fp:
                services.write_intern_table(graph, fp)

    if as_json:
        typer.echo(summary.model_dump_json())
        return
    table = Table(title=f"{file.name}", show_header=False)
    for key, value in summary.model_dump().items():
        table.add_row(key, "-" if value is None else str(value))
    console.print(table)
