import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx

from src.core.exceptions import UnknownVertexError

logger = logging.getLogger(__name__)

VertexId = int
EdgeKey = Tuple[VertexId, VertexId]


class Interaction(NamedTuple):
    """One timestamped transfer. ``seq`` is the global input position, used as the
    equal-timestamp tiebreak and as the interaction id."""
    t: int
    q: int
    seq: int


class TimedInteraction(NamedTuple):
    interaction: Interaction
    src: VertexId
    dst: VertexId

    @property
    def key(self) -> Tuple[int, int]:
        return (self.interaction.t, self.interaction.seq)


def interaction_order(i: Interaction) -> Tuple[int, int]:
    return (i.t, i.seq)


@dataclass(frozen=True)
class EdgeSeries:
    src: VertexId
    dst: VertexId
    interactions: Tuple[Interaction, ...]

    def __len__(self) -> int:
        return len(self.interactions)


@dataclass(frozen=True)
class TemporalGraph:
    """
    Immutable directed graph whose edges carry time-sorted interaction sequences.

    ``names`` is the intern table: vertex id ``i`` was read as ``names[i]``. Ids of
    vertices dropped by a transformation stay reserved so that ids remain stable
    across every graph derived from the same input.
    """
    names: Tuple[str, ...]
    vertices: FrozenSet[VertexId]
    edges: Mapping[EdgeKey, EdgeSeries]
    out_adj: Mapping[VertexId, Tuple[VertexId, ...]]
    in_adj: Mapping[VertexId, Tuple[VertexId, ...]]

    @classmethod
    def build(cls, names, vertices, series) -> "TemporalGraph":
        vertices = frozenset(vertices)
        edges: Dict[EdgeKey, EdgeSeries] = {}
        out_adj: Dict[VertexId, List[VertexId]] = {v: [] for v in vertices}
        in_adj: Dict[VertexId, List[VertexId]] = {v: [] for v in vertices}
        for s in sorted(series, key=lambda e: (e.src, e.dst)):
            edges[(s.src, s.dst)] = s
            out_adj[s.src].append(s.dst)
            in_adj[s.dst].append(s.src)
        return cls(
            names=tuple(names),
            vertices=vertices,
            edges=edges,
            out_adj={v: tuple(sorted(n)) for v, n in out_adj.items()},
            in_adj={v: tuple(sorted(n)) for v, n in in_adj.items()},
        )

    @classmethod
    def empty(cls) -> "TemporalGraph":
        return cls.build((), (), ())

    # --- Lookups ---
    @cached_property
    def ids(self) -> Dict[str, VertexId]:
        return {name: i for i, name in enumerate(self.names)}

    def vertex(self, name: str) -> VertexId:
        v = self.ids.get(name)
        if v is None or v not in self.vertices:
            raise UnknownVertexError(f"Vertex '{name}' does not exist in the graph.")
        return v

    def name(self, v: VertexId) -> str:
        return self.names[v]

    def successors(self, v: VertexId) -> Tuple[VertexId, ...]:
        return self.out_adj.get(v, ())

    def predecessors(self, v: VertexId) -> Tuple[VertexId, ...]:
        return self.in_adj.get(v, ())

    def out_degree(self, v: VertexId) -> int:
        return len(self.successors(v))

    def in_degree(self, v: VertexId) -> int:
        return len(self.predecessors(v))

    def edge(self, src: VertexId, dst: VertexId) -> Optional[EdgeSeries]:
        return self.edges.get((src, dst))

    def has_edge(self, src: VertexId, dst: VertexId) -> bool:
        return (src, dst) in self.edges

    # --- Aggregates ---
    @cached_property
    def interaction_count(self) -> int:
        return sum(len(s) for s in self.edges.values())

    @cached_property
    def timeline(self) -> Tuple[TimedInteraction, ...]:
        """Every interaction of the graph in global (t, seq) order."""
        items = [
            TimedInteraction(i, s.src, s.dst)
            for s in self.edges.values()
            for i in s.interactions
        ]
        items.sort(key=lambda x: x.key)
        return tuple(items)

    def time_range(self) -> Optional[Tuple[int, int]]:
        if not self.timeline:
            return None
        return self.timeline[0].interaction.t, self.timeline[-1].interaction.t

    def iter_interactions(self) -> Iterator[TimedInteraction]:
        return iter(self.timeline)

    def adjacency_consistent(self) -> bool:
        """Rebuilds adjacency from the edge map and compares."""
        rebuilt = TemporalGraph.build(self.names, self.vertices, self.edges.values())
        return rebuilt.out_adj == dict(self.out_adj) and rebuilt.in_adj == dict(self.in_adj)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(self.edges.keys())
        return g


@dataclass(frozen=True)
class FlowInstance:
    """
    A connected graph with one source (no incoming edges) and one sink (no
    outgoing edges). ``zero_flow`` marks instances where no flow can arrive at
    all: the sink is disconnected from the source, or a reduction deleted one
    of the two.
    """
    graph: TemporalGraph
    source: VertexId
    sink: VertexId
    zero_flow: bool = False
    # split or synthetic vertex id -> original vertex id
    aliases: Mapping[VertexId, VertexId] = field(default_factory=dict)

    @property
    def interaction_count(self) -> int:
        return self.graph.interaction_count

    def name(self, v: VertexId) -> str:
        return self.graph.name(v)

    def original(self, v: VertexId) -> VertexId:
        return self.aliases.get(v, v)

    def with_graph(self, graph: TemporalGraph, zero_flow: Optional[bool] = None) -> "FlowInstance":
        return FlowInstance(
            graph=graph,
            source=self.source,
            sink=self.sink,
            zero_flow=self.zero_flow if zero_flow is None else zero_flow,
            aliases=self.aliases,
        )
