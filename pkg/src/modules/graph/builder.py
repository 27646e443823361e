from typing import Dict, Iterable, List, Optional, Set

from src.core.exceptions import SelfLoopError
from .models import EdgeKey, EdgeSeries, Interaction, TemporalGraph, VertexId, interaction_order


class GraphBuilder:
    """
    Mutable working copy of a TemporalGraph.

    Ingestion, normalization and the reductions all edit a builder and freeze it
    into a new immutable graph; nothing edits a TemporalGraph in place.
    """

    def __init__(self, names: Iterable[str] = ()):
        self.names: List[str] = list(names)
        self._ids: Dict[str, VertexId] = {n: i for i, n in enumerate(self.names)}
        self.vertices: Set[VertexId] = set()
        self.series: Dict[EdgeKey, List[Interaction]] = {}
        self.out_adj: Dict[VertexId, Set[VertexId]] = {}
        self.in_adj: Dict[VertexId, Set[VertexId]] = {}

    @classmethod
    def from_graph(cls, graph: TemporalGraph) -> "GraphBuilder":
        builder = cls(graph.names)
        for v in graph.vertices:
            builder.add_vertex(v)
        for (src, dst), s in graph.edges.items():
            builder.series[(src, dst)] = list(s.interactions)
            builder.out_adj[src].add(dst)
            builder.in_adj[dst].add(src)
        return builder

    # --- Vertices ---
    def intern(self, name: str) -> VertexId:
        v = self._ids.get(name)
        if v is None:
            v = len(self.names)
            self.names.append(name)
            self._ids[name] = v
        self.add_vertex(v)
        return v

    def lookup(self, name: str) -> Optional[VertexId]:
        return self._ids.get(name)

    def add_vertex(self, v: VertexId) -> None:
        if v not in self.vertices:
            self.vertices.add(v)
            self.out_adj[v] = set()
            self.in_adj[v] = set()

    def remove_vertex(self, v: VertexId) -> None:
        for dst in list(self.out_adj[v]):
            self.remove_edge(v, dst)
        for src in list(self.in_adj[v]):
            self.remove_edge(src, v)
        self.vertices.discard(v)
        del self.out_adj[v]
        del self.in_adj[v]

    # --- Edges ---
    def add_interaction(self, src: VertexId, dst: VertexId, interaction: Interaction) -> None:
        if src == dst:
            raise SelfLoopError(f"self-loop on vertex '{self.names[src]}'")
        if (src, dst) not in self.series:
            self.series[(src, dst)] = []
            self.out_adj[src].add(dst)
            self.in_adj[dst].add(src)
        self.series[(src, dst)].append(interaction)

    def set_series(self, src: VertexId, dst: VertexId, interactions: Iterable[Interaction]) -> None:
        self.remove_edge(src, dst)
        self.series[(src, dst)] = sorted(interactions, key=interaction_order)
        self.out_adj[src].add(dst)
        self.in_adj[dst].add(src)

    def merge_series(self, src: VertexId, dst: VertexId, interactions: Iterable[Interaction]) -> bool:
        """Adds interactions to (src, dst), creating the edge if needed. Returns True if an
        existing edge absorbed them."""
        existed = (src, dst) in self.series
        if existed:
            merged = self.series[(src, dst)] + list(interactions)
            self.series[(src, dst)] = sorted(merged, key=interaction_order)
        else:
            self.set_series(src, dst, interactions)
        return existed

    def remove_edge(self, src: VertexId, dst: VertexId) -> None:
        if self.series.pop((src, dst), None) is not None:
            self.out_adj[src].discard(dst)
            self.in_adj[dst].discard(src)

    def has_edge(self, src: VertexId, dst: VertexId) -> bool:
        return (src, dst) in self.series

    def interaction_count(self) -> int:
        return sum(len(s) for s in self.series.values())

    def freeze(self) -> TemporalGraph:
        series = (
            EdgeSeries(src, dst, tuple(sorted(items, key=interaction_order)))
            for (src, dst), items in self.series.items()
        )
        return TemporalGraph.build(self.names, self.vertices, series)
