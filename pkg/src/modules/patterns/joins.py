import logging
from itertools import groupby, product
from typing import Dict, Iterator, List, Optional, Tuple

from src.core.exceptions import MissingTableError
from src.modules.graph.models import TemporalGraph, VertexId
from .browsing import complete_bindings
from .models import Coverage, PathRecord, PathTable, Pattern, PatternInstance, TableSet
from .tables import edge_table, find_table

logger = logging.getLogger(__name__)

Plan = List[Tuple[List[int], PathTable]]


def _table_for(graph: TemporalGraph, tables: Optional[TableSet], k: int, cyclic: bool) -> Optional[PathTable]:
    if k == 1 and not cyclic:
        return edge_table(graph)
    return find_table(tables, k, cyclic)


def _path_is_table_shaped(pattern: Pattern, path: List[int]) -> bool:
    """Interior labels distinct from each other and from both anchors."""
    labels = pattern.label_path(path)
    interior = labels[1:-1]
    return len(set(interior)) == len(interior) and not set(interior) & {labels[0], labels[-1]}


def full_plan(graph: TemporalGraph, pattern: Pattern, tables: Optional[TableSet]) -> Optional[Plan]:
    """
    Tables covering the pattern exactly, when the pattern is a set of
    source-to-sink paths that share nothing but their anchors.
    """
    paths = pattern.source_sink_paths()
    if not paths:
        return None
    cyclic = pattern.source_label == pattern.sink_label
    seen: set = set()
    plan: Plan = []
    for path in paths:
        if not _path_is_table_shaped(pattern, path):
            return None
        interior = set(pattern.label_path(path)[1:-1])
        if interior & seen:
            return None
        seen |= interior
        table = _table_for(graph, tables, len(path) - 1, cyclic)
        if table is None:
            return None
        plan.append((path, table))
    return plan


def table_shaped_paths(pattern: Pattern) -> List[List[int]]:
    """Source-to-sink pattern paths a table row can bind, longest first (ties: label order)."""
    found: List[List[int]] = []

    def walk(path: List[int]) -> None:
        if path[-1] == pattern.sink:
            found.append(list(path))
            return
        for nxt in pattern.successors(path[-1]):
            path.append(nxt)
            walk(path)
            path.pop()

    walk([pattern.source])
    shaped = [p for p in found if _path_is_table_shaped(pattern, p)]
    return sorted(shaped, key=lambda p: (-len(p), pattern.label_path(p)))


def choose_spine(graph: TemporalGraph, pattern: Pattern, tables: Optional[TableSet]) -> Optional[Tuple[List[int], PathTable]]:
    """Longest table-shaped source-to-sink path with an available table."""
    cyclic = pattern.source_label == pattern.sink_label
    for path in table_shaped_paths(pattern):
        table = _table_for(graph, tables, len(path) - 1, cyclic)
        if table is not None:
            return path, table
    return None


def _merge_join(tables: List[PathTable]) -> Iterator[Tuple[VertexId, List[List[PathRecord]]]]:
    """Sorted merge-join of several tables on their start vertex."""
    streams = [groupby(t.rows, key=lambda r: r.vertices[0]) for t in tables]
    heads = [next(s, None) for s in streams]
    while all(h is not None for h in heads):
        keys = [h[0] for h in heads]
        top = max(keys)
        if all(k == top for k in keys):
            yield top, [list(h[1]) for h in heads]
            heads = [next(s, None) for s in streams]
            continue
        heads = [next(s, None) if h[0] < top else h for s, h in zip(streams, heads)]


def _bindings(pattern: Pattern, plan: Plan, rows: Tuple[PathRecord, ...]) -> Optional[Tuple[VertexId, ...]]:
    bound: Dict[int, VertexId] = {}
    for (path, _), row in zip(plan, rows):
        for v, g in zip(path, row.vertices):
            k = pattern.label_index[pattern.vertex_labels[v]]
            if bound.setdefault(k, g) != g:
                return None
    if len(set(bound.values())) != len(bound):
        return None
    return tuple(bound[k] for k in range(len(pattern.labels)))


def _join_full(pattern: Pattern, plan: Plan) -> Iterator[PatternInstance]:
    cyclic = pattern.source_label == pattern.sink_label
    for _, groups in _merge_join([table for _, table in plan]):
        if cyclic:
            combos = product(*groups)
        else:
            by_end: List[Dict[VertexId, List[PathRecord]]] = []
            for rows in groups:
                buckets: Dict[VertexId, List[PathRecord]] = {}
                for r in rows:
                    buckets.setdefault(r.vertices[-1], []).append(r)
                by_end.append(buckets)
            ends = sorted(set.intersection(*(set(b) for b in by_end)))
            combos = (c for end in ends for c in product(*(b[end] for b in by_end)))
        for combo in combos:
            bindings = _bindings(pattern, plan, combo)
            if bindings is None:
                continue
            yield PatternInstance(bindings, coverage="full", path_boundaries=tuple(r.boundary for r in combo))


def _join_partial(graph: TemporalGraph, pattern: Pattern, spine: List[int], table: PathTable) -> Iterator[PatternInstance]:
    labels = [pattern.label_index[pattern.vertex_labels[v]] for v in spine]
    for row in table.rows:
        seed = dict(zip(labels, row.vertices))
        for bindings in complete_bindings(graph, pattern, seed):
            yield PatternInstance(bindings, coverage="partial")


def enumerate_pb(
    graph: TemporalGraph, pattern: Pattern, tables: Optional[TableSet], limit: Optional[int] = None
) -> Iterator[Tuple[PatternInstance, Coverage]]:
    """
    Path-based enumeration. Patterns made of anchor-sharing parallel paths are
    answered by merge-joining the tables alone (coverage ``full``); any other
    pattern scans the table of its longest table-shaped source-to-sink path and
    completes each row against graph adjacency (coverage ``partial``).
    Raises MissingTableError when no usable table exists.
    """
    plan = full_plan(graph, pattern, tables)
    if plan is not None:
        logger.info(f"Pattern covered by {len(plan)} path tables; joining without graph access.")
        stream = _join_full(pattern, plan)
    else:
        chosen = choose_spine(graph, pattern, tables)
        if chosen is None:
            raise MissingTableError("No precomputed path table matches any source-to-sink path of the pattern.")
        spine, table = chosen
        logger.info(f"Scanning the {table.k}-hop table and verifying the rest of the pattern against the graph.")
        stream = _join_partial(graph, pattern, spine, table)

    emitted = 0
    for instance in stream:
        yield instance, instance.coverage
        emitted += 1
        if limit and emitted >= limit:
            return
