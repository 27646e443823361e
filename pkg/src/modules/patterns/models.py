from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Literal, NamedTuple, Optional, Tuple

from src.modules.graph.models import Interaction, VertexId

Coverage = Literal["full", "partial"]


@dataclass(frozen=True)
class Pattern:
    """
    Labeled DAG template. Pattern vertices are indices into ``names``; vertices
    sharing a label must map to the same graph vertex, vertices with different
    labels to different graph vertices.
    """
    names: Tuple[str, ...]
    vertex_labels: Tuple[str, ...]
    edges: Tuple[Tuple[int, int], ...]
    order: Tuple[int, ...]
    source: int
    sink: int

    @cached_property
    def labels(self) -> Tuple[str, ...]:
        """Distinct labels in order of first appearance along the topological order."""
        seen: List[str] = []
        for v in self.order:
            if self.vertex_labels[v] not in seen:
                seen.append(self.vertex_labels[v])
        return tuple(seen)

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {label: k for k, label in enumerate(self.labels)}

    @cached_property
    def label_edges(self) -> Tuple[Tuple[int, int], ...]:
        """Pattern edges lifted to label indices, deduplicated and sorted."""
        lifted = {
            (self.label_index[self.vertex_labels[a]], self.label_index[self.vertex_labels[b]])
            for a, b in self.edges
        }
        return tuple(sorted(lifted))

    def successors(self, v: int) -> List[int]:
        return sorted(b for a, b in self.edges if a == v)

    def predecessors(self, v: int) -> List[int]:
        return sorted(a for a, b in self.edges if b == v)

    @property
    def source_label(self) -> str:
        return self.vertex_labels[self.source]

    @property
    def sink_label(self) -> str:
        return self.vertex_labels[self.sink]

    def chain(self) -> Optional[List[int]]:
        """Pattern vertices along the path if the pattern is a single source-to-sink path."""
        path = [self.source]
        while path[-1] != self.sink:
            nxt = self.successors(path[-1])
            if len(nxt) != 1:
                return None
            path.append(nxt[0])
        return path if len(path) == len(self.names) else None

    def source_sink_paths(self) -> Optional[List[List[int]]]:
        """
        The pattern as parallel source-to-sink paths, or None when some
        non-boundary vertex does not have exactly one predecessor and one successor.
        """
        for v in range(len(self.names)):
            if v in (self.source, self.sink):
                continue
            if len(self.successors(v)) != 1 or len(self.predecessors(v)) != 1:
                return None
        paths = []
        for first in self.successors(self.source):
            path = [self.source, first]
            while path[-1] != self.sink:
                path.append(self.successors(path[-1])[0])
            paths.append(path)
        return paths

    def label_path(self, path: List[int]) -> Tuple[str, ...]:
        return tuple(self.vertex_labels[v] for v in path)


@dataclass(frozen=True)
class PatternInstance:
    """
    One match: ``bindings[k]`` is the graph vertex of ``pattern.labels[k]``.
    ``boundary`` is set when the flow was computed incrementally along a chain,
    ``path_boundaries`` when the instance was assembled from path-table rows.
    """
    bindings: Tuple[VertexId, ...]
    coverage: Coverage = "partial"
    boundary: Optional[Tuple[Interaction, ...]] = None
    path_boundaries: Optional[Tuple[Tuple[Interaction, ...], ...]] = field(default=None, compare=False)

    def mapping(self, pattern: Pattern) -> Dict[str, VertexId]:
        """Pattern vertex name -> graph vertex."""
        return {
            name: self.bindings[pattern.label_index[label]]
            for name, label in zip(pattern.names, pattern.vertex_labels)
        }


class PathRecord(NamedTuple):
    vertices: Tuple[VertexId, ...]
    boundary: Tuple[Interaction, ...]

    @property
    def flow(self) -> int:
        return sum(i.q for i in self.boundary)


@dataclass
class PathTable:
    """k-hop simple paths (or cycles) with their boundary sequences, sorted by vertex sequence."""
    k: int
    cyclic: bool
    rows: List[PathRecord]

    @cached_property
    def _starts(self) -> List[VertexId]:
        return [r.vertices[0] for r in self.rows]

    @cached_property
    def _index(self) -> Dict[Tuple[VertexId, ...], PathRecord]:
        return {r.vertices: r for r in self.rows}

    def rows_from(self, start: VertexId) -> List[PathRecord]:
        lo = bisect_left(self._starts, start)
        hi = lo
        while hi < len(self.rows) and self._starts[hi] == start:
            hi += 1
        return self.rows[lo:hi]

    def lookup(self, vertices: Tuple[VertexId, ...]) -> Optional[PathRecord]:
        return self._index.get(tuple(vertices))

    def __len__(self) -> int:
        return len(self.rows)


TableSet = Dict[Tuple[int, bool], PathTable]
