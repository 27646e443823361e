import csv
import json
import logging
import sys
from pathlib import Path
from typing import Annotated, List, Optional

import typer
from rich.console import Console
from rich.table import Table

from src.core.config import settings
from src.core.dependencies import FormatOpt, JsonOpt, SeedOpt, WindowOpt, load_graph
from src.core.exceptions import UsageError, exit_on_error
from src.modules.graph.services import serialize_interactions
from src.modules.workload import services
from .schemas import BenchRecord, BenchSummaryRow, SyntheticSpec
from .synthetic import DEFAULT_SPECS, expand_specs, gen_synthetic, load_specs

router = typer.Typer()
console = Console()
logger = logging.getLogger(__name__)

HopsOpt = Annotated[int, typer.Option("--hops", "-k", help="Longest cycle (or path) considered, in edges.")]
MinIntOpt = Annotated[Optional[int], typer.Option("--min-int", min=0, help="Discard subgraphs with fewer interactions.")]
MaxIntOpt = Annotated[Optional[int], typer.Option("--max-int", min=0, help="Discard subgraphs with more interactions.")]


@router.command("generate")
def generate(
    vertices: Annotated[int, typer.Option("--vertices", "-n", min=2, help="Vertex count including source and sink.")] = 12,
    edges: Annotated[int, typer.Option("--edges", "-e", min=1, help="Edge count.")] = 20,
    interactions: Annotated[int, typer.Option("--interactions", "-i", min=1, help="Interaction count.")] = 60,
    class_bias: Annotated[str, typer.Option("--class", help="Topology family: A, B or C.")] = "C",
    seed: SeedOpt = None,
    spec_file: Annotated[Optional[Path], typer.Option("--spec", exists=True, dir_okay=False, help="YAML file holding a single spec; overrides the shape options.")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Write records here instead of stdout.")] = None,
    fmt: FormatOpt = None,
):
    """Writes a synthetic flow instance as interaction records (source `s`, sink `t`)."""
    with exit_on_error("generate"):
        if spec_file is not None:
            specs = load_specs(spec_file)
            if len(specs) != 1 or specs[0].count != 1:
                raise UsageError("generate writes one instance; use bench --synthetic for batches.")
            spec = specs[0]
        else:
            if class_bias not in ("A", "B", "C"):
                raise UsageError(f"Unknown class '{class_bias}'; expected A, B or C.")
            spec = SyntheticSpec(
                vertices=vertices, edges=edges, interactions=interactions,
                class_bias=class_bias, rng_seed=settings.BENCH_SEED,
            )
        instance = gen_synthetic(spec, seed)
        if out is None:
            serialize_interactions(instance.graph, sys.stdout, fmt or settings.INPUT_FORMAT)
        else:
            with open(out, "w", encoding="utf-8", newline="") as fp:
                serialize_interactions(instance.graph, fp, fmt or settings.INPUT_FORMAT)
    if out is not None:
        typer.echo(f"{out}: {instance.interaction_count} interactions", err=True)


@router.command("extract")
def extract(
    file: Annotated[Path, typer.Argument(exists=True, dir_okay=False, readable=True, help="Interaction records.")],
    hops: HopsOpt = 3,
    min_int: MinIntOpt = None,
    max_int: MaxIntOpt = None,
    sink: Annotated[Optional[str], typer.Option("--sink", "-t", help="Extract paths from every seed to this vertex instead of cycles.")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", file_okay=False, help="Directory receiving one record file per subgraph.")] = None,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
    as_json: JsonOpt = False,
):
    """Extracts one flow instance per seed vertex from the cycles (or paths) around it."""
    with exit_on_error("extract"):
        graph = load_graph(file, fmt, window)
        target = graph.vertex(sink) if sink else None
        found = list(services.extract_subgraphs(graph, hops, min_int, max_int, target))
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            for n, (_, instance) in enumerate(found):
                with open(out / f"subgraph_{n:04d}.{fmt or settings.INPUT_FORMAT}", "w", encoding="utf-8", newline="") as fp:
                    serialize_interactions(instance.graph, fp, fmt or settings.INPUT_FORMAT)

    summaries = [services.describe_extracted(name, instance) for name, instance in found]
    if as_json:
        typer.echo(json.dumps([s.model_dump() for s in summaries]))
        return
    table = Table(title=f"{len(summaries)} subgraphs")
    for column in ("seed", "sink", "vertices", "edges", "interactions"):
        table.add_column(column)
    for s in summaries:
        table.add_row(s.seed, s.sink or "-", str(s.vertices), str(s.edges), str(s.interactions))
    console.print(table)


def _summary_table(title: str, rows: List[BenchSummaryRow]) -> Table:
    table = Table(title=title)
    for column in ("group", "instances", "interactions", "greedy ms", "lp ms", "pre ms", "presim ms", "greedy exact"):
        table.add_column(column, justify="right")
    for r in rows:
        table.add_row(
            r.group, str(r.instances), f"{r.avg_interactions:.1f}",
            f"{r.greedy_ms:.3f}", f"{r.lp_ms:.3f}", f"{r.pre_ms:.3f}", f"{r.presim_ms:.3f}",
            f"{r.greedy_exact}/{r.instances}",
        )
    return table


def _write_csv(path: Path, records: List[BenchRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=list(BenchRecord.model_fields))
        writer.writeheader()
        for r in records:
            writer.writerow(r.model_dump())


@router.command("bench")
def bench(
    file: Annotated[Optional[Path], typer.Argument(exists=True, dir_okay=False, help="Extract instances from this graph instead of generating them.")] = None,
    synthetic: Annotated[Optional[Path], typer.Option("--synthetic", exists=True, dir_okay=False, help="YAML synthetic spec (one mapping or a list).")] = None,
    hops: HopsOpt = 3,
    min_int: MinIntOpt = None,
    max_int: MaxIntOpt = None,
    jobs: Annotated[Optional[int], typer.Option("--jobs", "-j", min=1, help="Worker processes (default BENCH_JOBS).")] = None,
    repetitions: Annotated[Optional[int], typer.Option("--repetitions", "-r", min=1, help="Timed runs per method (default BENCH_REPETITIONS).")] = None,
    seed: SeedOpt = None,
    csv_out: Annotated[Optional[Path], typer.Option("--csv", help="Also write per-instance records as CSV.")] = None,
    fmt: FormatOpt = None,
    window: WindowOpt = (None, None),
    as_json: JsonOpt = False,
):
    """Times greedy, lp, pre and presim per instance and summarizes them by class and size."""
    with exit_on_error("bench"):
        if file is not None and synthetic is not None:
            raise UsageError("Give either a graph file or --synthetic, not both.")
        if file is not None:
            graph = load_graph(file, fmt, window)
            instances = services.extract_subgraphs(graph, hops, min_int, max_int)
        else:
            specs = load_specs(synthetic) if synthetic else DEFAULT_SPECS
            instances = expand_specs(specs, seed if seed is not None else (None if synthetic else settings.BENCH_SEED))
        records = services.bench(instances, repetitions, jobs)
        services.check_speedup_trend(records)
        if csv_out is not None:
            _write_csv(csv_out, records)

    by_class = services.summarize_by_class(records)
    by_size = services.summarize_by_size(records)
    if as_json:
        typer.echo(json.dumps({
            "records": [r.model_dump() for r in records],
            "by_class": [r.model_dump() for r in by_class],
            "by_size": [r.model_dump() for r in by_size],
        }))
        return
    console.print(_summary_table("Average runtime per class", by_class))
    console.print(_summary_table("Average runtime per size", by_size))
