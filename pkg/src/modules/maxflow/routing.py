import logging
import time
from pathlib import Path
from typing import Annotated, List, Optional

import typer
from rich.console import Console
from rich.table import Table

from src.core.dependencies import FormatOpt, GraphFile, JsonOpt, SinkOpt, SourceOpt, WindowOpt, load_graph
from src.core.exceptions import UsageError, exit_on_error
from src.modules.analysis.schemas import ReductionReport
from src.modules.graph.models import TemporalGraph
from src.modules.graph.services import normalize, resolve_seeds
from src.modules.greedy.schemas import TraceRow
from src.modules.greedy.services import greedy_flow
from src.modules.maxflow import services
from src.modules.maxflow.lp import build_lp, emit_lp
from .schemas import FlowReport

router = typer.Typer()
console = Console()
logger = logging.getLogger(__name__)

METHODS = ("greedy", "lp", "pre", "presim")


def _default_seeds(graph: TemporalGraph, names: Optional[List[str]], incoming: bool) -> set:
    if names:
        return resolve_seeds(graph, names)
    # without explicit seeds, every boundary vertex of the graph is a seed
    if incoming:
        seeds = {v for v in graph.vertices if not graph.in_degree(v)}
    else:
        seeds = {v for v in graph.vertices if not graph.out_degree(v)}
    logger.info(f"Inferred {len(seeds)} {'source' if incoming else 'sink'} vertices.")
    return seeds


def _print_trace(rows: List[TraceRow]) -> None:
    columns = list(rows[0].buffers) if rows else []
    table = Table(title="greedy trace")
    for name in ["#", "edge", "(t, q)", "moved", *[f"B_{c}" for c in columns]]:
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(
            str(row.step), f"({row.src},{row.dst})", f"({row.t},{row.q})", str(row.moved),
            *[str(row.buffers[c]) for c in columns],
        )
    console.print(table)


def _print_report(report: FlowReport) -> None:
    typer.echo(f"value: {report.value}")
    typer.echo(f"method: {report.method} ({report.solver})")
    if report.instance_class:
        typer.echo(f"class: {report.instance_class}")
    if report.reduction is not None:
        r = report.reduction
        typer.echo(
            f"reduction: interactions={r.interactions_removed} edges={r.edges_removed} "
            f"vertices={r.vertices_removed} chains={r.chains_reduced} merged={r.edges_merged} "
            f"resolved_by={r.resolved_by}"
        )
    if report.lp_variables is not None:
        typer.echo(f"lp_variables: {report.lp_variables}")
    typer.echo(f"runtime_us: {report.runtime_us}")


@router.command("flow")
def flow(
    file: GraphFile,
    method: Annotated[str, typer.Option("--method", "-m", help="greedy, lp, pre or presim.")] = "presim",
    source: SourceOpt = None,
    sink: SinkOpt = None,
    trace: Annotated[bool, typer.Option("--trace", help="Print the greedy buffer table.")] = False,
    strict_ties: Annotated[bool, typer.Option("--strict-ties", help="Greedy sees only buffers from strictly earlier timestamps.")] = False,
    simplex: Annotated[bool, typer.Option("--simplex", help="With --method lp, solve with the rational simplex oracle.")] = False,
    emit_lp_path: Annotated[Optional[Path], typer.Option("--emit-lp", help="Write the LP model in CPLEX LP format.")] = None,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
    as_json: JsonOpt = False,
):
    """Computes the greedy or the maximum flow from source to sink."""
    with exit_on_error("flow"):
        if method not in METHODS:
            raise UsageError(f"Unknown method '{method}'; expected one of {', '.join(METHODS)}.")
        graph = load_graph(file, fmt, window)
        instance = normalize(graph, _default_seeds(graph, source, True), _default_seeds(graph, sink, False))
        if emit_lp_path is not None:
            with open(emit_lp_path, "w", encoding="utf-8") as fp:
                emit_lp(build_lp(instance), fp)

        if method == "greedy":
            started = time.perf_counter_ns()
            result = greedy_flow(instance, strict=strict_ties, trace=trace)
            runtime = (time.perf_counter_ns() - started) // 1000
            reduction = None
        elif method == "lp" and simplex:
            started = time.perf_counter_ns()
            result = services.lp_flow(instance)
            runtime = (time.perf_counter_ns() - started) // 1000
            reduction = ReductionReport(resolved_by="exact")
        else:
            result, reduction = services.max_flow(instance, method)
            runtime = result.runtime_us or 0

        report = FlowReport(
            source=instance.name(instance.source),
            sink=instance.name(instance.sink),
            value=result.value,
            method=method,
            solver=result.method,
            reduction=reduction,
            runtime_us=runtime,
            lp_variables=services.lp_variable_count(instance),
            instance_class=services.classify(instance),
            trace=result.trace,
        )

    if as_json:
        typer.echo(report.model_dump_json(exclude_none=True))
        return
    if report.trace:
        _print_trace(report.trace)
    _print_report(report)
