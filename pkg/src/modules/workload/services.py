import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from src.core.config import settings
from src.core.exceptions import MethodDisagreementError, UsageError
from src.modules.graph.builder import GraphBuilder
from src.modules.graph.models import EdgeKey, FlowInstance, TemporalGraph, VertexId
from src.modules.graph.services import normalize
from src.modules.greedy.services import greedy_flow
from src.modules.maxflow.services import STRATEGIES, classify, max_flow
from .schemas import BenchRecord, BenchSummaryRow, ExtractedSummary, SizeBucket

logger = logging.getLogger(__name__)

Named = Tuple[str, FlowInstance]


# --- Subgraph extraction ---

def _cycle_edges(graph: TemporalGraph, root: VertexId, max_hops: int) -> Set[EdgeKey]:
    """Edges of every simple directed cycle through ``root`` with at most ``max_hops`` edges."""
    found: Set[EdgeKey] = set()
    path = [root]
    on_path = {root}

    def walk(v: VertexId) -> None:
        for u in graph.successors(v):
            if u == root:
                found.update(zip(path, path[1:] + [root]))
            elif u not in on_path and len(path) < max_hops:
                path.append(u)
                on_path.add(u)
                walk(u)
                on_path.discard(path.pop())

    walk(root)
    return found


def _path_edges(graph: TemporalGraph, root: VertexId, sink: VertexId, max_hops: int) -> Set[EdgeKey]:
    """Edges of every simple path from ``root`` to ``sink`` with at most ``max_hops`` edges."""
    found: Set[EdgeKey] = set()
    path = [root]

    def walk(v: VertexId) -> None:
        for u in graph.successors(v):
            if u == sink:
                found.update(zip(path, path[1:] + [sink]))
            elif u not in path and len(path) < max_hops:
                path.append(u)
                walk(u)
                path.pop()

    walk(root)
    return found


def _edge_subgraph(graph: TemporalGraph, edges: Iterable[EdgeKey]) -> TemporalGraph:
    builder = GraphBuilder(graph.names)
    for src, dst in sorted(edges):
        builder.add_vertex(src)
        builder.add_vertex(dst)
        builder.set_series(src, dst, graph.edges[(src, dst)].interactions)
    return builder.freeze()


def extract_subgraphs(
    graph: TemporalGraph,
    max_hops: int,
    min_interactions: Optional[int] = None,
    max_interactions: Optional[int] = None,
    sink: Optional[VertexId] = None,
) -> Iterator[Named]:
    """
    Grows one flow instance per seed vertex v: the union of the edges on all
    cycles through v of at most ``max_hops`` edges, with v split into source
    and sink. Given ``sink``, paths from v to that vertex are used instead and
    v stays the source. Subgraphs whose interaction count falls outside the
    bounds are skipped.
    """
    if not 2 <= max_hops <= settings.EXTRACT_MAX_HOPS:
        raise UsageError(f"--hops must lie in [2, {settings.EXTRACT_MAX_HOPS}], got {max_hops}.")
    low = settings.EXTRACT_MIN_INTERACTIONS if min_interactions is None else min_interactions
    high = settings.EXTRACT_MAX_INTERACTIONS if max_interactions is None else max_interactions

    emitted = skipped = 0
    for root in sorted(graph.vertices):
        if root == sink:
            continue
        edges = _cycle_edges(graph, root, max_hops) if sink is None else _path_edges(graph, root, sink, max_hops)
        if not edges:
            continue
        count = sum(len(graph.edges[e]) for e in edges)
        if not low <= count <= high:
            logger.debug(f"Skipping seed '{graph.name(root)}': {count} interactions outside [{low}, {high}].")
            skipped += 1
            continue
        sub = _edge_subgraph(graph, edges)
        target = root if sink is None else sink
        name = graph.name(root) if sink is None else f"{graph.name(root)}->{graph.name(sink)}"
        emitted += 1
        yield name, normalize(sub, {root}, {target})
    logger.info(f"Extracted {emitted} subgraphs ({skipped} outside the interaction bounds).")


def describe_extracted(name: str, instance: FlowInstance) -> ExtractedSummary:
    seed, _, sink = name.partition("->")
    graph = instance.graph
    return ExtractedSummary(
        seed=seed,
        sink=sink or None,
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        interactions=graph.interaction_count,
    )


# --- Benchmark ---

def _timed(fn: Callable[[], int], repetitions: int) -> Tuple[int, int]:
    """Runs ``fn`` and returns its value with the mean wall-clock time in microseconds."""
    total = 0
    value = 0
    for _ in range(repetitions):
        started = time.perf_counter_ns()
        value = fn()
        total += time.perf_counter_ns() - started
    return value, total // repetitions // 1000


def bench_instance(instance_id: str, instance: FlowInstance, repetitions: int = 1) -> BenchRecord:
    """
    Times greedy and the three exact strategies on one instance. Timings cover
    each strategy's own preprocessing. Raises MethodDisagreementError when the
    exact strategies disagree.
    """
    greedy_value, greedy_us = _timed(lambda: greedy_flow(instance).value, repetitions)
    values: Dict[str, int] = {}
    runtimes: Dict[str, int] = {}
    for strategy in STRATEGIES:
        values[strategy], runtimes[strategy] = _timed(lambda: max_flow(instance, strategy)[0].value, repetitions)
    if len(set(values.values())) != 1:
        found = ", ".join(f"{k}={v}" for k, v in values.items())
        raise MethodDisagreementError(f"Strategies disagree on '{instance_id}': {found}.")
    value = values["lp"]
    if greedy_value > value:
        logger.warning(f"Greedy exceeds the maximum flow on '{instance_id}' ({greedy_value} > {value}); same-timestamp relays?")
    return BenchRecord(
        instance_id=instance_id,
        instance_class=classify(instance),
        interactions=instance.interaction_count,
        value=value,
        greedy_value=greedy_value,
        greedy_us=greedy_us,
        lp_us=runtimes["lp"],
        pre_us=runtimes["pre"],
        presim_us=runtimes["presim"],
    )


def _bench_task(args: Tuple[str, FlowInstance, int]) -> BenchRecord:
    return bench_instance(*args)


def bench(instances: Iterable[Named], repetitions: Optional[int] = None, jobs: Optional[int] = None) -> List[BenchRecord]:
    """
    Benchmarks every instance. With ``jobs`` > 1 instances run in worker
    processes, one instance per task; records come back in input order.
    """
    repetitions = repetitions or settings.BENCH_REPETITIONS
    jobs = jobs or settings.BENCH_JOBS
    tasks = [(name, instance, repetitions) for name, instance in instances]
    logger.info(f"Benchmarking {len(tasks)} instances with {jobs} worker(s), {repetitions} repetition(s).")
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(_bench_task, tasks))
    return [_bench_task(task) for task in tasks]


def size_bucket(interactions: int) -> SizeBucket:
    if interactions < 100:
        return "<100"
    if interactions <= 1000:
        return "100-1000"
    return ">1000"


def _summary_row(group: str, records: List[BenchRecord]) -> BenchSummaryRow:
    n = len(records)

    def avg_ms(field: str) -> float:
        return round(sum(getattr(r, field) for r in records) / n / 1000, 3)

    return BenchSummaryRow(
        group=group,
        instances=n,
        avg_interactions=round(sum(r.interactions for r in records) / n, 1),
        greedy_ms=avg_ms("greedy_us"),
        lp_ms=avg_ms("lp_us"),
        pre_ms=avg_ms("pre_us"),
        presim_ms=avg_ms("presim_us"),
        greedy_exact=sum(1 for r in records if r.greedy_value == r.value),
    )


def summarize_by_class(records: List[BenchRecord]) -> List[BenchSummaryRow]:
    return [
        _summary_row(c, [r for r in records if r.instance_class == c])
        for c in ("A", "B", "C")
        if any(r.instance_class == c for r in records)
    ]


def summarize_by_size(records: List[BenchRecord]) -> List[BenchSummaryRow]:
    return [
        _summary_row(b, [r for r in records if size_bucket(r.interactions) == b])
        for b in ("<100", "100-1000", ">1000")
        if any(size_bucket(r.interactions) == b for r in records)
    ]


def check_speedup_trend(records: List[BenchRecord]) -> bool:
    """
    On class C records, the median presim and pre runtimes should not exceed
    the median lp runtime. A miss is reported as a warning only.
    """
    hard = [r for r in records if r.instance_class == "C"]
    if not hard:
        return True
    lp = statistics.median(r.lp_us for r in hard)
    pre = statistics.median(r.pre_us for r in hard)
    presim = statistics.median(r.presim_us for r in hard)
    holds = presim <= lp and pre <= lp
    if not holds:
        logger.warning(
            f"Speed-up trend not observed on {len(hard)} class C instances: "
            f"median lp {lp} us, pre {pre} us, presim {presim} us."
        )
    return holds
