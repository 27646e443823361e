import logging
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

from src.core.config import settings
from src.core.exceptions import ChainPremiseError
from src.modules.graph.builder import GraphBuilder
from src.modules.graph.models import EdgeKey, EdgeSeries, FlowInstance, Interaction, VertexId
from src.modules.graph.services import is_dag, topological_order
from src.modules.greedy.services import chain_schedule, greedy_chain_boundary
from .schemas import ReductionReport

logger = logging.getLogger(__name__)

# vertex sequence of a source-anchored chain -> precomputed boundary, or None if unknown
BoundaryLookup = Callable[[Sequence[VertexId]], Optional[List[Interaction]]]
# per-hop interactions of a chain as it stood when it was reduced
ChainHops = Tuple[Tuple[Interaction, ...], ...]


def greedy_soluble(instance: FlowInstance) -> bool:
    """True iff the instance is a DAG where every vertex but source and sink has exactly one outgoing edge."""
    graph = instance.graph
    for v in graph.vertices:
        if v in (instance.source, instance.sink):
            continue
        if graph.out_degree(v) != 1:
            return False
    return is_dag(graph)


def _size(builder: GraphBuilder) -> Tuple[int, int, int]:
    return builder.interaction_count(), len(builder.series), len(builder.vertices)


def _report(before: Tuple[int, int, int], after: Tuple[int, int, int], **extra) -> ReductionReport:
    return ReductionReport(
        interactions_removed=before[0] - after[0],
        edges_removed=before[1] - after[1],
        vertices_removed=before[2] - after[2],
        **extra,
    )


def _trivial_instance(instance: FlowInstance, builder: GraphBuilder) -> FlowInstance:
    for v in list(builder.vertices):
        builder.remove_vertex(v)
    builder.add_vertex(instance.source)
    builder.add_vertex(instance.sink)
    return instance.with_graph(builder.freeze(), zero_flow=True)


def preprocess(instance: FlowInstance, strict_prune: Optional[bool] = None) -> Tuple[FlowInstance, ReductionReport]:
    """
    Deletes interactions that leave a vertex before anything can have arrived
    there, in one pass over the topological order, cascading edge and vertex
    deletions.

    An outgoing interaction is pruned when t < mintime, mintime being the
    earliest incoming timestamp of its vertex; ``strict_prune`` also prunes
    t == mintime. Raises CycleDetectedError on cyclic instances.
    """
    strict_prune = settings.STRICT_PRUNE if strict_prune is None else strict_prune
    order = topological_order(instance.graph)
    source, sink = instance.source, instance.sink
    builder = GraphBuilder.from_graph(instance.graph)
    before = _size(builder)

    for v in order:
        if v in (source, sink) or v not in builder.vertices:
            continue
        if not builder.in_adj[v]:
            builder.remove_vertex(v)
            continue
        mintime = min(
            (i.t for u in builder.in_adj[v] for i in builder.series[(u, v)]),
            default=None,
        )
        for u in sorted(builder.out_adj[v]):
            items = builder.series[(v, u)]
            if mintime is None:
                kept = []
            elif strict_prune:
                kept = [i for i in items if i.t > mintime]
            else:
                kept = [i for i in items if i.t >= mintime]
            if not kept:
                builder.remove_edge(v, u)
            elif len(kept) < len(items):
                builder.series[(v, u)] = kept
        if not builder.out_adj[v]:
            # worklist instead of recursion: upstream chains can be long
            worklist = [v]
            while worklist:
                w = worklist.pop()
                if w not in builder.vertices:
                    continue
                preds = sorted(builder.in_adj[w])
                builder.remove_vertex(w)
                worklist.extend(p for p in preds if not builder.out_adj[p])

    trivial = (
        source not in builder.vertices
        or sink not in builder.vertices
        or not builder.in_adj[sink]
    )
    if trivial:
        logger.info("Preprocessing left no route from source to sink; flow is 0.")
        reduced = _trivial_instance(instance, builder)
    else:
        reduced = instance.with_graph(builder.freeze())
    report = _report(before, _size(GraphBuilder.from_graph(reduced.graph)), became_trivial=trivial)
    logger.info(
        f"Preprocessing removed {report.interactions_removed} interactions, "
        f"{report.edges_removed} edges, {report.vertices_removed} vertices."
    )
    return reduced, report


def _check_chain(builder: GraphBuilder, source: VertexId, chain: Sequence[VertexId]) -> None:
    if len(chain) < 2:
        raise ChainPremiseError("A chain needs at least one edge.")
    if chain[0] != source:
        raise ChainPremiseError("A chain must start at the instance source.")
    for u, v in zip(chain, chain[1:]):
        if not builder.has_edge(u, v):
            raise ChainPremiseError(f"Chain edge ({builder.names[u]}, {builder.names[v]}) does not exist.")
    for v in chain[1:-1]:
        if len(builder.in_adj[v]) != 1 or len(builder.out_adj[v]) != 1:
            raise ChainPremiseError(f"Chain vertex '{builder.names[v]}' must have in-degree and out-degree 1.")


def _reduce_chain(builder: GraphBuilder, chain: Sequence[VertexId], boundary: Optional[List[Interaction]]) -> bool:
    if boundary is None:
        edges = [EdgeSeries(u, v, tuple(builder.series[(u, v)])) for u, v in zip(chain, chain[1:])]
        boundary = greedy_chain_boundary(edges, strict=True)
    source, end = chain[0], chain[-1]
    for v in chain[1:-1]:
        builder.remove_vertex(v)
    merged = builder.merge_series(source, end, boundary)
    logger.debug(
        f"Reduced chain {[builder.names[v] for v in chain]} to {len(boundary)} interactions"
        f"{' (merged)' if merged else ''}."
    )
    return merged


def chain_reduce(instance: FlowInstance, chain: Sequence[VertexId]) -> FlowInstance:
    """
    Replaces a source-anchored chain by the single edge (source, last vertex)
    carrying the chain's boundary; an existing edge there absorbs it.
    A one-edge chain is returned unchanged.
    """
    builder = GraphBuilder.from_graph(instance.graph)
    _check_chain(builder, instance.source, chain)
    if len(chain) == 2:
        return instance
    _reduce_chain(builder, chain, None)
    return instance.with_graph(builder.freeze())


def _find_chain(builder: GraphBuilder, source: VertexId, sink: VertexId) -> Optional[List[VertexId]]:
    for first in sorted(builder.out_adj[source]):
        path = [source, first]
        current = first
        while current != sink and len(builder.in_adj[current]) == 1 and len(builder.out_adj[current]) == 1:
            nxt = next(iter(builder.out_adj[current]))
            if nxt in path:
                break
            path.append(nxt)
            current = nxt
        if len(path) >= 3:
            return path
    return None


def simplify(
    instance: FlowInstance,
    boundary_lookup: Optional[BoundaryLookup] = None,
    reductions: Optional[List[ChainHops]] = None,
) -> Tuple[FlowInstance, ReductionReport]:
    """
    Reduces maximal source-anchored chains of two or more edges until none is left,
    trying the source's out-neighbours in ascending id order.

    ``boundary_lookup`` may supply a precomputed boundary for a chain; it is only
    consulted while every edge of the chain is still an original edge. When
    ``reductions`` is given, the hops of every reduced chain are appended to it
    in reduction order, for ``expand_chain_transfers``.
    """
    builder = GraphBuilder.from_graph(instance.graph)
    before = _size(builder)
    touched: Set[EdgeKey] = set()
    chains = merges = 0
    while True:
        chain = _find_chain(builder, instance.source, instance.sink)
        if chain is None:
            break
        boundary = None
        if boundary_lookup is not None and not touched.intersection(zip(chain, chain[1:])):
            boundary = boundary_lookup(chain)
        if reductions is not None:
            reductions.append(tuple(tuple(builder.series[(u, v)]) for u, v in zip(chain, chain[1:])))
        merges += _reduce_chain(builder, chain, boundary)
        touched.add((chain[0], chain[-1]))
        chains += 1

    if not chains:
        return instance, ReductionReport()
    reduced = instance.with_graph(builder.freeze())
    report = _report(before, _size(builder), chains_reduced=chains, edges_merged=merges)
    logger.info(f"Simplification reduced {chains} chains ({merges} merged into existing edges).")
    return reduced, report


def expand_chain_transfers(reductions: Sequence[ChainHops], transfers: Mapping[int, int]) -> Dict[int, int]:
    """
    Maps transfers solved on a simplified instance back onto the chains that
    ``simplify`` reduced. A reduced edge keeps the seqs of the chain's last hop,
    so chains are unwound newest first: a later chain may run over an edge an
    earlier reduction produced.
    """
    expanded = dict(transfers)
    for hops in reversed(reductions):
        delivered = {i.seq: expanded.get(i.seq, 0) for i in hops[-1]}
        expanded.update(chain_schedule(hops, delivered))
    return expanded
