import csv
import io
import json
import logging
from pathlib import Path
from typing import BinaryIO, Dict, Iterable, Iterator, List, Optional, Sequence, Set, TextIO, Tuple

import networkx as nx

from src.core.config import settings
from src.core.exceptions import (
    CycleDetectedError,
    EmptySeedSetError,
    InvariantViolation,
    MalformedRecordError,
    QuantityOverflowError,
    SelfLoopError,
    UnknownVertexError,
)
from .builder import GraphBuilder
from .models import FlowInstance, Interaction, TemporalGraph, VertexId, interaction_order
from .quantity import INFINITE
from .schemas import GraphSummary, InstanceSummary

logger = logging.getLogger(__name__)

T_LOWEST = -(2**63)
T_HIGHEST = 2**63 - 1
SYNTHETIC_SOURCE = "__source__"
SYNTHETIC_SINK = "__sink__"

Window = Optional[Tuple[int, int]]


# --- Ingestion ---

def _iter_rows(text: TextIO, fmt: str) -> Iterator[Tuple[int, List[str]]]:
    if fmt == "csv":
        reader = csv.reader(text)
        for row in reader:
            yield reader.line_num, [c.strip() for c in row]
    else:
        for line_number, line in enumerate(text, start=1):
            yield line_number, line.split()


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def parse_interactions(reader: BinaryIO, fmt: Optional[str] = None, window: Window = None) -> TemporalGraph:
    """
    Reads `src dst timestamp quantity` records into a TemporalGraph.

    Records for the same ordered pair are merged into one series sorted by
    timestamp, input order breaking ties. Lines starting with `#` and blank
    lines are skipped; a leading header row (non-numeric timestamp and
    quantity columns) is tolerated. With ``window=(t0, t1)`` only records with
    t0 <= t <= t1 are kept.
    """
    fmt = fmt or settings.INPUT_FORMAT
    builder = GraphBuilder()
    seq = 0
    skipped = 0
    seen_data = False
    text = io.TextIOWrapper(reader, encoding="utf-8", newline="")
    try:
        for line_number, fields in _iter_rows(text, fmt):
            if not fields or not any(fields) or fields[0].startswith("#"):
                continue
            if len(fields) != 4:
                raise MalformedRecordError(line_number, f"expected 4 fields, found {len(fields)}")
            src, dst, t_raw, q_raw = fields
            if not seen_data and not _is_int(t_raw) and not _is_int(q_raw):
                logger.debug(f"Skipping header row at line {line_number}.")
                seen_data = True
                continue
            seen_data = True
            if not src or not dst:
                raise MalformedRecordError(line_number, "empty vertex name")
            try:
                t = int(t_raw)
            except ValueError:
                raise MalformedRecordError(line_number, f"timestamp '{t_raw}' is not an integer")
            try:
                q = int(q_raw)
            except ValueError:
                raise MalformedRecordError(line_number, f"quantity '{q_raw}' is not an integer")
            if not T_LOWEST <= t <= T_HIGHEST:
                raise MalformedRecordError(line_number, f"timestamp {t} outside the signed 64-bit range")
            if q < 0:
                raise MalformedRecordError(line_number, f"negative quantity {q}")
            if q >= INFINITE:
                raise QuantityOverflowError(f"line {line_number}: quantity {q} reaches the INFINITE sentinel")
            if src == dst:
                raise SelfLoopError(f"line {line_number}: self-loop on vertex '{src}'")
            if window is not None and not window[0] <= t <= window[1]:
                skipped += 1
                continue
            u = builder.intern(src)
            v = builder.intern(dst)
            builder.add_interaction(u, v, Interaction(t, q, seq))
            seq += 1
    finally:
        text.detach()

    graph = builder.freeze()
    logger.info(
        f"Parsed {graph.interaction_count} interactions on {len(graph.edges)} edges "
        f"between {len(graph.vertices)} vertices."
    )
    if skipped:
        logger.info(f"Window filter dropped {skipped} interactions outside {window}.")
    return graph


def read_graph(path: Path, fmt: Optional[str] = None, window: Window = None) -> TemporalGraph:
    logger.info(f"Reading interactions from '{path}'.")
    with open(path, "rb") as fp:
        return parse_interactions(fp, fmt, window)


def serialize_interactions(graph: TemporalGraph, writer: TextIO, fmt: str = "tsv") -> int:
    """Writes every interaction in canonical (src, dst, t, seq) order. Returns the record count."""
    rows = sorted(
        (graph.name(e.src), graph.name(e.dst), i.t, i.seq, i.q)
        for e in graph.edges.values()
        for i in e.interactions
    )
    if fmt == "csv":
        out = csv.writer(writer, lineterminator="\n")
        out.writerows((src, dst, t, q) for src, dst, t, _, q in rows)
    else:
        for src, dst, t, _, q in rows:
            writer.write(f"{src}\t{dst}\t{t}\t{q}\n")
    return len(rows)


def write_intern_table(graph: TemporalGraph, writer: TextIO) -> None:
    json.dump({"version": 1, "vertices": list(graph.names)}, writer, indent=1)


def read_intern_table(reader: TextIO) -> Tuple[str, ...]:
    payload = json.load(reader)
    return tuple(payload["vertices"])


# --- Normalization ---

def resolve_seeds(graph: TemporalGraph, names: Iterable[str]) -> Set[VertexId]:
    return {graph.vertex(n) for n in names}


def _fresh_name(builder: GraphBuilder, base: str) -> str:
    name, n = base, 1
    while builder.lookup(name) is not None:
        n += 1
        name = f"{base}#{n}"
    return name


def _split_vertex(builder: GraphBuilder, v: VertexId, aliases: Dict[VertexId, VertexId]) -> Tuple[VertexId, VertexId]:
    """Replaces v by v@out (keeps outgoing edges) and v@in (keeps incoming edges)."""
    name = builder.names[v]
    out_v = builder.intern(_fresh_name(builder, f"{name}@out"))
    in_v = builder.intern(_fresh_name(builder, f"{name}@in"))
    for dst in sorted(builder.out_adj[v]):
        builder.set_series(out_v, dst, builder.series[(v, dst)])
    for src in sorted(builder.in_adj[v]):
        builder.set_series(src, in_v, builder.series[(src, v)])
    builder.remove_vertex(v)
    aliases[out_v] = v
    aliases[in_v] = v
    logger.debug(f"Split seed '{name}' into source and sink halves.")
    return out_v, in_v


def _component(graph: TemporalGraph, v: VertexId) -> Set[VertexId]:
    return nx.node_connected_component(graph.to_networkx().to_undirected(as_view=True), v)


def normalize(graph: TemporalGraph, sources: Iterable[VertexId], sinks: Iterable[VertexId]) -> FlowInstance:
    """
    Turns a graph with declared source and sink sets into a single-source,
    single-sink FlowInstance.

    A vertex declared on both sides is split first. Each side that is not
    already a single boundary vertex gets a synthetic vertex joined to every
    declared vertex by one INFINITE interaction placed just outside the
    observed time range. The result is restricted to the connected component
    of the source; if the sink falls outside it, the instance is flagged
    ``zero_flow`` instead of raising.
    """
    sources, sinks = set(sources), set(sinks)
    if not sources:
        raise EmptySeedSetError("The source set is empty.")
    if not sinks:
        raise EmptySeedSetError("The sink set is empty.")
    for v in sources | sinks:
        if v not in graph.vertices:
            raise UnknownVertexError(f"Seed vertex id {v} does not exist in the graph.")

    if len(sources) == 1 and len(sinks) == 1 and sources != sinks:
        s, t = next(iter(sources)), next(iter(sinks))
        if graph.in_degree(s) == 0 and graph.out_degree(t) == 0 and _component(graph, s) == set(graph.vertices):
            return FlowInstance(graph=graph, source=s, sink=t)

    builder = GraphBuilder.from_graph(graph)
    aliases: Dict[VertexId, VertexId] = {}
    source_side, sink_side = set(sources), set(sinks)
    for v in sorted(sources & sinks):
        out_v, in_v = _split_vertex(builder, v, aliases)
        source_side = (source_side - {v}) | {out_v}
        sink_side = (sink_side - {v}) | {in_v}

    t_range = graph.time_range() or (0, 0)
    seqs = [i.seq for s in builder.series.values() for i in s]
    next_seq = max(seqs, default=-1) + 1

    if len(source_side) == 1 and not builder.in_adj[next(iter(source_side))]:
        source = next(iter(source_side))
    else:
        source = builder.intern(_fresh_name(builder, SYNTHETIC_SOURCE))
        ordered = sorted(source_side)
        for n, v in enumerate(ordered):
            builder.set_series(source, v, [Interaction(t_range[0] - 1, INFINITE, n - len(ordered))])
        logger.debug(f"Added synthetic source feeding {len(ordered)} vertices.")

    if len(sink_side) == 1 and not builder.out_adj[next(iter(sink_side))]:
        sink = next(iter(sink_side))
    else:
        sink = builder.intern(_fresh_name(builder, SYNTHETIC_SINK))
        for n, v in enumerate(sorted(sink_side)):
            builder.set_series(v, sink, [Interaction(t_range[1] + 1, INFINITE, next_seq + n)])
        logger.debug(f"Added synthetic sink drained by {len(sink_side)} vertices.")

    working = builder.freeze()
    keep = _component(working, source)
    zero_flow = sink not in keep
    if zero_flow:
        keep = keep | _component(working, sink)
        logger.info("Sink is disconnected from the source; instance carries zero flow.")
    for v in list(builder.vertices - keep):
        builder.remove_vertex(v)

    return FlowInstance(graph=builder.freeze(), source=source, sink=sink, zero_flow=zero_flow, aliases=aliases)


def normalize_by_name(graph: TemporalGraph, sources: Sequence[str], sinks: Sequence[str]) -> FlowInstance:
    if not sources:
        raise EmptySeedSetError("At least one source vertex is required.")
    if not sinks:
        raise EmptySeedSetError("At least one sink vertex is required.")
    return normalize(graph, resolve_seeds(graph, sources), resolve_seeds(graph, sinks))


# --- Structure ---

def topological_order(graph: TemporalGraph) -> List[VertexId]:
    """Kahn order with ties broken by ascending vertex id."""
    try:
        return list(nx.lexicographical_topological_sort(graph.to_networkx()))
    except nx.NetworkXUnfeasible:
        raise CycleDetectedError("The graph contains a directed cycle; no topological order exists.")


def is_dag(graph: TemporalGraph) -> bool:
    return nx.is_directed_acyclic_graph(graph.to_networkx())


def relay_vertices(graph: TemporalGraph) -> List[VertexId]:
    """Vertices with an incoming and an outgoing interaction at the same timestamp."""
    found = []
    for v in sorted(graph.vertices):
        incoming = {i.t for u in graph.predecessors(v) for i in graph.edges[(u, v)].interactions}
        if not incoming:
            continue
        if any(i.t in incoming for w in graph.successors(v) for i in graph.edges[(v, w)].interactions):
            found.append(v)
    return found


def has_same_timestamp_relay(graph: TemporalGraph) -> bool:
    return bool(relay_vertices(graph))


def validate_instance(instance: FlowInstance) -> None:
    """Raises InvariantViolation listing every FlowInstance invariant that does not hold."""
    graph = instance.graph
    problems = []
    if instance.source not in graph.vertices:
        problems.append("source is not a vertex of the graph")
    elif graph.in_degree(instance.source):
        problems.append("source has incoming edges")
    if instance.sink not in graph.vertices:
        problems.append("sink is not a vertex of the graph")
    elif graph.out_degree(instance.sink):
        problems.append("sink has outgoing edges")
    if not graph.adjacency_consistent():
        problems.append("adjacency lists disagree with the edge map")
    for (src, dst), series in graph.edges.items():
        if src == dst:
            problems.append(f"self-loop on '{graph.name(src)}'")
        keys = [interaction_order(i) for i in series.interactions]
        if keys != sorted(keys):
            problems.append(f"edge ({graph.name(src)}, {graph.name(dst)}) is not time-sorted")
        if any(i.q < 0 for i in series.interactions):
            problems.append(f"edge ({graph.name(src)}, {graph.name(dst)}) has a negative quantity")
    if instance.interaction_count != sum(len(s) for s in graph.edges.values()):
        problems.append("interaction count does not match the edge series")
    if not instance.zero_flow and instance.source in graph.vertices:
        if _component(graph, instance.source) != set(graph.vertices):
            problems.append("graph is not connected")
    if problems:
        raise InvariantViolation("Invalid flow instance: " + "; ".join(problems))


# --- Summaries ---

def summarize(graph: TemporalGraph) -> GraphSummary:
    t_range = graph.time_range()
    return GraphSummary(
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        interactions=graph.interaction_count,
        t_min=t_range[0] if t_range else None,
        t_max=t_range[1] if t_range else None,
        same_timestamp_relays=len(relay_vertices(graph)),
    )


def summarize_instance(instance: FlowInstance) -> InstanceSummary:
    graph = instance.graph
    synthetic = [
        graph.name(v) for v in sorted(graph.vertices)
        if v in instance.aliases or graph.name(v).startswith(("__source__", "__sink__"))
    ]
    return InstanceSummary(
        source=graph.name(instance.source),
        sink=graph.name(instance.sink),
        vertices=len(graph.vertices),
        edges=len(graph.edges),
        interactions=graph.interaction_count,
        zero_flow=instance.zero_flow,
        synthetic=synthetic,
    )
