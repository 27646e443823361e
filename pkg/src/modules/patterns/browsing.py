import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.modules.graph.models import Interaction, TemporalGraph, VertexId
from src.modules.greedy.services import extend_boundary, greedy_chain_boundary
from .models import Pattern, PatternInstance

logger = logging.getLogger(__name__)


def _candidates(graph: TemporalGraph, pattern: Pattern, k: int, bound: Dict[int, VertexId]) -> List[VertexId]:
    pools = []
    for a, b in pattern.label_edges:
        if b == k and a in bound:
            pools.append(set(graph.successors(bound[a])))
        elif a == k and b in bound:
            pools.append(set(graph.predecessors(bound[b])))
    if not pools:
        return sorted(graph.vertices)
    return sorted(set.intersection(*pools))


def _consistent(graph: TemporalGraph, pattern: Pattern, k: int, v: VertexId, bound: Dict[int, VertexId]) -> bool:
    for a, b in pattern.label_edges:
        if a == k and b in bound and not graph.has_edge(v, bound[b]):
            return False
        if b == k and a in bound and not graph.has_edge(bound[a], v):
            return False
    return True


def complete_bindings(graph: TemporalGraph, pattern: Pattern, seed: Dict[int, VertexId]) -> Iterator[Tuple[VertexId, ...]]:
    """
    Backtracking over labels in pattern order from a partial binding. A label is
    bound to one graph vertex, distinct labels to distinct vertices, and every
    pattern edge must exist between the bound vertices.
    """
    n = len(pattern.labels)
    bound = dict(seed)
    used = set(bound.values())
    if len(used) != len(bound):
        return
    for a, b in pattern.label_edges:
        if a in bound and b in bound and not graph.has_edge(bound[a], bound[b]):
            return

    def search(k: int) -> Iterator[Tuple[VertexId, ...]]:
        while k < n and k in bound:
            k += 1
        if k == n:
            yield tuple(bound[j] for j in range(n))
            return
        for v in _candidates(graph, pattern, k, bound):
            if v in used or not _consistent(graph, pattern, k, v, bound):
                continue
            bound[k] = v
            used.add(v)
            yield from search(k + 1)
            used.discard(v)
            del bound[k]

    yield from search(0)


def _chain_labels(pattern: Pattern) -> Optional[List[int]]:
    """Label indices along a chain pattern whose labels are distinct, except that the
    last may repeat the first."""
    chain = pattern.chain()
    if chain is None:
        return None
    seq = [pattern.label_index[pattern.vertex_labels[v]] for v in chain]
    body = seq[:-1] if seq[-1] == seq[0] else seq
    if len(set(body)) != len(body):
        return None
    return seq


def _browse_chain(graph: TemporalGraph, seq: List[int]) -> Iterator[PatternInstance]:
    """Path walk that carries the chain boundary along, one greedy step per hop."""
    n = len(set(seq))
    closes = seq[-1] == seq[0]
    hops = len(seq) - 1

    def walk(path: List[VertexId], boundary: Sequence[Interaction]) -> Iterator[PatternInstance]:
        depth = len(path) - 1
        if depth == hops:
            bindings = [0] * n
            for label, v in zip(seq, path):
                bindings[label] = v
            yield PatternInstance(tuple(bindings), boundary=tuple(boundary))
            return
        last = path[-1]
        if closes and depth == hops - 1:
            if graph.has_edge(last, path[0]):
                step = extend_boundary(boundary, graph.edges[(last, path[0])].interactions, strict=True)
                yield from walk(path + [path[0]], step)
            return
        for nxt in graph.successors(last):
            if nxt in path:
                continue
            step = extend_boundary(boundary, graph.edges[(last, nxt)].interactions, strict=True)
            yield from walk(path + [nxt], step)

    for start in sorted(graph.vertices):
        for first in graph.successors(start):
            if closes and hops == 2 and not graph.has_edge(first, start):
                continue
            boundary = greedy_chain_boundary([graph.edges[(start, first)]], strict=True)
            yield from walk([start, first], boundary)


def enumerate_gb(graph: TemporalGraph, pattern: Pattern, limit: Optional[int] = None) -> Iterator[PatternInstance]:
    """
    Graph-browsing enumeration: instantiates pattern labels in topological order,
    expanding partial matches along graph adjacency. Each binding tuple is
    emitted once. Chain patterns compute their flow incrementally while
    browsing.
    """
    seq = _chain_labels(pattern)
    if seq is not None:
        stream = _browse_chain(graph, seq)
    else:
        stream = (PatternInstance(b, coverage="partial") for b in complete_bindings(graph, pattern, {}))
    emitted = 0
    for instance in stream:
        yield instance
        emitted += 1
        if limit and emitted >= limit:
            logger.info(f"Stopped graph browsing after {emitted} instances.")
            return
