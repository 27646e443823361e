import logging
from bisect import bisect_left
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple, Union

import networkx as nx
from networkx.algorithms.flow import dinitz

from src.core.exceptions import InvariantViolation
from src.modules.graph.models import FlowInstance, VertexId
from src.modules.graph.quantity import INFINITE
from src.modules.greedy.schemas import FlowResult

logger = logging.getLogger(__name__)

Node = Union[Tuple[VertexId, int], str]
SUPER_SOURCE: Node = "super-source"
SUPER_SINK: Node = "super-sink"
HOLDOVER = "holdover"
SUPER = "super"


@dataclass(frozen=True)
class Arc:
    tail: Node
    head: Node
    capacity: int
    # interaction seq, HOLDOVER or SUPER
    origin: Union[int, str]


@dataclass(frozen=True)
class TimeExpandedNetwork:
    """
    Static network equivalent to the temporal instance: one node per (vertex,
    event time), INFINITE holdover arcs between consecutive slots of a vertex
    and one arc per interaction. ``stranded`` lists interactions whose sender
    has no slot strictly before their timestamp; they can never carry flow.
    """
    nodes: FrozenSet[Node]
    arcs: Tuple[Arc, ...]
    stranded: Tuple[int, ...] = ()
    super_source: Node = SUPER_SOURCE
    super_sink: Node = SUPER_SINK

    def interaction_arcs(self) -> List[Arc]:
        return [a for a in self.arcs if isinstance(a.origin, int)]


def build_time_expanded(instance: FlowInstance) -> TimeExpandedNetwork:
    graph = instance.graph
    source, sink = instance.source, instance.sink
    times: Dict[VertexId, set] = {v: set() for v in graph.vertices if v != source}
    for (src, dst), series in graph.edges.items():
        for i in series.interactions:
            if src != source:
                times[src].add(i.t)
            times[dst].add(i.t)
    slots = {v: sorted(ts) for v, ts in times.items()}

    nodes = {SUPER_SOURCE, SUPER_SINK}
    arcs: List[Arc] = []
    for v in sorted(slots):
        row = slots[v]
        nodes.update((v, t) for t in row)
        arcs.extend(Arc((v, a), (v, b), INFINITE, HOLDOVER) for a, b in zip(row, row[1:]))

    stranded = []
    for ti in graph.timeline:
        i = ti.interaction
        if ti.src == source:
            tail = SUPER_SOURCE
        else:
            # latest sender slot strictly before t
            k = bisect_left(slots[ti.src], i.t) - 1
            if k < 0:
                stranded.append(i.seq)
                continue
            tail = (ti.src, slots[ti.src][k])
        arcs.append(Arc(tail, (ti.dst, i.t), i.q, i.seq))

    arcs.extend(Arc((sink, t), SUPER_SINK, INFINITE, SUPER) for t in slots.get(sink, ()))
    logger.debug(f"Time-expanded network: {len(nodes)} nodes, {len(arcs)} arcs, {len(stranded)} stranded interactions.")
    return TimeExpandedNetwork(nodes=frozenset(nodes), arcs=tuple(arcs), stranded=tuple(stranded))


def max_flow_static(net: TimeExpandedNetwork) -> FlowResult:
    """
    Exact static max flow (Dinitz blocking flows via networkx). INFINITE arcs get
    1 + the sum of all finite capacities, which exceeds every finite cut.
    Parallel interaction arcs are aggregated and their flow handed back in
    sequence order.
    """
    bound = 1 + sum(a.capacity for a in net.arcs if a.capacity != INFINITE)
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    for arc in net.arcs:
        cap = bound if arc.capacity == INFINITE else arc.capacity
        if g.has_edge(arc.tail, arc.head):
            g[arc.tail][arc.head]["capacity"] += cap
        else:
            g.add_edge(arc.tail, arc.head, capacity=cap)

    value, flow = nx.maximum_flow(g, net.super_source, net.super_sink, flow_func=dinitz)
    if value >= bound:
        raise InvariantViolation("Unbounded flow: an INFINITE path joins source and sink.")

    remaining = {}
    transfers = {seq: 0 for seq in net.stranded}
    for arc in sorted(net.interaction_arcs(), key=lambda a: a.origin):
        key = (arc.tail, arc.head)
        left = remaining.get(key, flow[arc.tail][arc.head])
        take = min(arc.capacity, left)
        remaining[key] = left - take
        transfers[arc.origin] = take
    return FlowResult(value=value, transfers=transfers, method="maxflow-expanded")
