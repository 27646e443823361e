import logging
from itertools import combinations, groupby
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from src.core.exceptions import MissingTableError, UsageError
from src.modules.analysis.services import BoundaryLookup
from src.modules.graph.builder import GraphBuilder
from src.modules.graph.models import FlowInstance, Interaction, TemporalGraph, VertexId
from src.modules.graph.services import normalize
from src.modules.greedy.schemas import FlowResult
from src.modules.maxflow.services import max_flow
from .browsing import enumerate_gb
from .joins import enumerate_pb, table_shaped_paths
from .models import PathRecord, Pattern, PatternInstance, TableSet
from .schemas import NonrigidMatch, PatternMatch, RelaxedPattern
from .tables import build_tables, edge_table, find_table

logger = logging.getLogger(__name__)


def instance_subgraph(graph: TemporalGraph, pattern: Pattern, instance: PatternInstance) -> TemporalGraph:
    """Image of the pattern edges, each with its full interaction sequence."""
    builder = GraphBuilder(graph.names)
    for a, b in pattern.label_edges:
        src, dst = instance.bindings[a], instance.bindings[b]
        builder.add_vertex(src)
        builder.add_vertex(dst)
        builder.set_series(src, dst, graph.edges[(src, dst)].interactions)
    return builder.freeze()


def table_lookup(instance: FlowInstance, tables: TableSet) -> BoundaryLookup:
    """Boundary lookup for simplification, translating split vertices back to graph vertices."""
    def lookup(chain: Sequence[VertexId]) -> Optional[List[Interaction]]:
        vertices = tuple(instance.original(v) for v in chain)
        k = len(vertices) - 1
        table = find_table(tables, k, vertices[0] == vertices[-1])
        row = table.lookup(vertices) if table else None
        return list(row.boundary) if row else None
    return lookup


def _boundary_result(boundaries: Sequence[Sequence[Interaction]]) -> FlowResult:
    transfers = {i.seq: i.q for b in boundaries for i in b}
    return FlowResult(value=sum(i.q for b in boundaries for i in b), transfers=transfers, method="greedy")


def instance_flow(
    graph: TemporalGraph, pattern: Pattern, instance: PatternInstance, tables: Optional[TableSet] = None
) -> FlowResult:
    """
    Flow through one instance. Chain instances and fully covered instances
    already carry their boundaries and just sum them; anything else is
    normalized (splitting the anchor when source and sink labels coincide)
    and solved with the presim strategy, reusing table boundaries for
    source-anchored chains.
    """
    if instance.boundary is not None:
        return _boundary_result([instance.boundary])
    if instance.path_boundaries is not None:
        return _boundary_result(instance.path_boundaries)

    sub = instance_subgraph(graph, pattern, instance)
    source = instance.bindings[pattern.label_index[pattern.source_label]]
    sink = instance.bindings[pattern.label_index[pattern.sink_label]]
    flow_instance = normalize(sub, {source}, {sink})
    lookup = table_lookup(flow_instance, tables) if tables else None
    result, _ = max_flow(flow_instance, "presim", lookup)
    return result


def tables_for_pattern(graph: TemporalGraph, pattern: Pattern) -> TableSet:
    """Precomputes a table for every table-shaped source-to-sink path of the pattern."""
    cyclic = pattern.source_label == pattern.sink_label
    shapes = {(len(p) - 1, cyclic) for p in table_shaped_paths(pattern) if len(p) > 2}
    return build_tables(graph, shapes)


def to_match(graph: TemporalGraph, pattern: Pattern, instance: PatternInstance, value: int, coverage: Optional[str] = None) -> PatternMatch:
    return PatternMatch(
        bindings={label: graph.name(v) for label, v in zip(pattern.labels, instance.bindings)},
        value=value,
        coverage=coverage,
    )


def run_gb(graph: TemporalGraph, pattern: Pattern, limit: Optional[int] = None) -> Iterator[PatternMatch]:
    for instance in enumerate_gb(graph, pattern, limit):
        yield to_match(graph, pattern, instance, instance_flow(graph, pattern, instance).value)


def run_pb(graph: TemporalGraph, pattern: Pattern, tables: TableSet, limit: Optional[int] = None) -> Iterator[PatternMatch]:
    for instance, coverage in enumerate_pb(graph, pattern, tables, limit):
        yield to_match(graph, pattern, instance, instance_flow(graph, pattern, instance, tables).value, coverage)


# --- Non-rigid patterns ---

def relaxed_from_pattern(pattern: Pattern, min_paths: int) -> RelaxedPattern:
    """A chain pattern read as the template of each parallel path."""
    chain = pattern.chain()
    if chain is None:
        raise UsageError("A relaxed pattern is given as a single path, e.g. 'a -> b -> a2:a'.")
    return RelaxedPattern(
        anchor=pattern.source_label,
        sink=pattern.sink_label,
        hops=len(chain) - 1,
        min_paths=min_paths,
    )


def _best_per_interior(rows: List[PathRecord]) -> List[PathRecord]:
    """One row per interior vertex set: the one with the larger flow, first in table order on ties."""
    best: Dict[FrozenSet[VertexId], PathRecord] = {}
    for row in rows:
        key = frozenset(row.vertices[1:-1])
        if key not in best or row.flow > best[key].flow:
            best[key] = row
    return list(best.values())


def _exact_disjoint(rows: List[PathRecord]) -> List[PathRecord]:
    """Branch and bound over one conflict component; score is (path count, total flow)."""
    interiors = [frozenset(r.vertices[1:-1]) for r in rows]
    flows = [r.flow for r in rows]
    best: Tuple[Tuple[int, int], List[int]] = ((0, 0), [])

    def search(k: int, used: FrozenSet[VertexId], chosen: List[int], flow: int) -> None:
        nonlocal best
        rest = range(k, len(rows))
        bound = (len(chosen) + len(rest), flow + sum(flows[j] for j in rest))
        if bound <= best[0]:
            return
        if k == len(rows):
            best = ((len(chosen), flow), list(chosen))
            return
        if not interiors[k] & used:
            chosen.append(k)
            search(k + 1, used | interiors[k], chosen, flow + flows[k])
            chosen.pop()
        search(k + 1, used, chosen, flow)

    search(0, frozenset(), [], 0)
    return [rows[j] for j in best[1]]


def _disjoint_selection(rows: List[PathRecord]) -> List[PathRecord]:
    """
    A largest set of rows with pairwise disjoint interiors, ties broken by total
    flow, returned in table order.
    """
    rows = _best_per_interior(rows)
    widths = {len(r.vertices) - 2 for r in rows}
    if widths <= {0, 1}:
        chosen = rows
    elif widths == {2}:
        by_pair = {frozenset(r.vertices[1:-1]): r for r in rows}
        g = nx.Graph()
        for r in rows:
            g.add_edge(r.vertices[1], r.vertices[2], weight=r.flow)
        matching = nx.max_weight_matching(g, maxcardinality=True)
        chosen = [by_pair[frozenset(pair)] for pair in matching]
    else:
        conflicts = nx.Graph()
        conflicts.add_nodes_from(range(len(rows)))
        for a, b in combinations(range(len(rows)), 2):
            if set(rows[a].vertices[1:-1]) & set(rows[b].vertices[1:-1]):
                conflicts.add_edge(a, b)
        chosen = []
        for component in nx.connected_components(conflicts):
            chosen.extend(_exact_disjoint([rows[j] for j in sorted(component)]))
    return sorted(chosen, key=lambda r: r.vertices)


def enumerate_nonrigid(graph: TemporalGraph, rp: RelaxedPattern, tables: Optional[TableSet]) -> Iterator[NonrigidMatch]:
    """
    Groups the sorted table by start vertex (and end vertex for open paths),
    keeps interior-disjoint paths per group and sums their flows. Anchors with
    fewer than ``min_paths`` paths are skipped.
    """
    if rp.hops == 1 and not rp.cyclic:
        table = edge_table(graph)
    else:
        table = find_table(tables, rp.hops, rp.cyclic)
    if table is None:
        raise MissingTableError(
            f"No {'cyclic' if rp.cyclic else 'open'} {rp.hops}-hop path table available."
        )

    for start, group in groupby(table.rows, key=lambda r: r.vertices[0]):
        rows = list(group)
        if rp.cyclic:
            buckets: List[Tuple[Optional[VertexId], List[PathRecord]]] = [(None, rows)]
        else:
            by_end: Dict[VertexId, List[PathRecord]] = {}
            for r in rows:
                by_end.setdefault(r.vertices[-1], []).append(r)
            buckets = sorted(by_end.items())
        for end, members in buckets:
            chosen = _disjoint_selection(members)
            if len(chosen) < rp.min_paths:
                continue
            yield NonrigidMatch(
                anchor=graph.name(start),
                sink=None if end is None else graph.name(end),
                path_count=len(chosen),
                total_flow=sum(r.flow for r in chosen),
            )
