import logging
from pathlib import Path
from typing import Annotated, List, Optional

import typer

from src.core.config import settings
from src.core.dependencies import FormatOpt, GraphFile, JsonOpt, WindowOpt, load_graph
from src.core.exceptions import MissingTableError, UsageError, exit_on_error
from src.modules.patterns import services
from .dsl import parse_pattern
from .schemas import PatternMatch, PatternSummary
from .tables import load_tables, precompute_paths, save_table

router = typer.Typer()
logger = logging.getLogger(__name__)


@router.command("precompute")
def precompute(
    file: GraphFile,
    hops: Annotated[int, typer.Option("--hops", "-k", help="Path length in hops (>= 2).")],
    out: Annotated[Path, typer.Option("--out", "-o", file_okay=False, help="Directory receiving the table files.")],
    cyclic: Annotated[bool, typer.Option("--cyclic/--open", help="Keep only cycles, or only open simple paths.")] = False,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
):
    """Precomputes a k-hop path table with greedy boundary sequences."""
    with exit_on_error("precompute"):
        graph = load_graph(file, fmt, window)
        table = precompute_paths(graph, hops, cyclic)
        path = save_table(table, graph, out)
    typer.echo(f"{path}: {len(table)} rows")


def _print_summary(summary: PatternSummary, as_json: bool) -> None:
    if as_json:
        typer.echo(summary.model_dump_json())
    else:
        typer.echo(f"instances: {summary.instances}, avg_flow: {summary.avg_flow:.2f}")


def _echo_match(match: PatternMatch, as_json: bool) -> None:
    if as_json:
        typer.echo(match.model_dump_json(exclude_none=True))
    else:
        bindings = " ".join(f"{k}={v}" for k, v in match.bindings.items())
        typer.echo(f"{bindings} {match.value}")


@router.command("patterns")
def patterns(
    file: GraphFile,
    pattern_file: Annotated[Path, typer.Option("--pattern", "-p", exists=True, dir_okay=False, help="Pattern file, one `x -> y` edge per line.")],
    method: Annotated[str, typer.Option("--method", "-m", help="gb (graph browsing) or pb (path tables).")] = "gb",
    tables_dir: Annotated[Optional[Path], typer.Option("--tables", help="Directory of precomputed path tables.")] = None,
    min_paths: Annotated[Optional[int], typer.Option("--min-paths", min=1, help="Treat the pattern as a non-rigid path template.")] = None,
    limit: Annotated[Optional[int], typer.Option("--limit", min=0, help="Stop after this many instances (default PATTERN_LIMIT).")] = None,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
    as_json: JsonOpt = False,
):
    """Enumerates pattern instances and their flows."""
    limit = settings.PATTERN_LIMIT if limit is None else limit
    with exit_on_error("patterns"):
        if method not in ("gb", "pb"):
            raise UsageError(f"Unknown method '{method}'; expected gb or pb.")
        graph = load_graph(file, fmt, window)
        with open(pattern_file, encoding="utf-8") as fp:
            pattern = parse_pattern(fp.read())
        tables = load_tables(tables_dir, graph) if tables_dir else None

        if min_paths is not None:
            rp = services.relaxed_from_pattern(pattern, min_paths)
            if tables is None:
                tables = {(rp.hops, rp.cyclic): precompute_paths(graph, rp.hops, rp.cyclic)} if rp.hops >= 2 else {}
            matches = list(services.enumerate_nonrigid(graph, rp, tables))
            if limit:
                matches = matches[:limit]
            for m in matches:
                typer.echo(m.model_dump_json() if as_json else f"{m.anchor}{'->' + m.sink if m.sink else ''} paths={m.path_count} {m.total_flow}")
            flows: List[int] = [m.total_flow for m in matches]
            _print_summary(PatternSummary(method="nonrigid", instances=len(flows), avg_flow=sum(flows) / len(flows) if flows else 0.0), as_json)
            return

        if method == "pb":
            if tables is None:
                tables = services.tables_for_pattern(graph, pattern)
            stream = services.run_pb(graph, pattern, tables, limit or None)
        else:
            stream = services.run_gb(graph, pattern, limit or None)

        flows = []
        try:
            for match in stream:
                flows.append(match.value)
                _echo_match(match, as_json)
        except MissingTableError as e:
            if flows:
                raise
            logger.warning(f"{e.detail} Falling back to graph browsing.")
            method = "gb"
            for match in services.run_gb(graph, pattern, limit or None):
                flows.append(match.value)
                _echo_match(match, as_json)

    _print_summary(PatternSummary(method=method, instances=len(flows), avg_flow=sum(flows) / len(flows) if flows else 0.0), as_json)
