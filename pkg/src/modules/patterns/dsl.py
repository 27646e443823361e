"""
Pattern text format: one edge per line, ``x -> y``; a line may continue a chain
(``a -> b -> c``). A token is ``vertex[:label]``; the label defaults to the
vertex name, so ``c -> a2:a`` closes a cycle back onto label ``a``. Lines
starting with ``#`` are comments.
"""
import logging
import re
from typing import Dict, List, Tuple

import networkx as nx

from src.core.exceptions import PatternSyntaxError
from .models import Pattern

logger = logging.getLogger(__name__)

TOKEN = re.compile(r"^([A-Za-z_][\w.]*)(?::([A-Za-z_][\w.]*))?$")


def parse_pattern(text: str) -> Pattern:
    names: List[str] = []
    labels: Dict[str, str] = {}
    edges: List[Tuple[int, int]] = []

    def vertex(token: str, line_number: int) -> int:
        match = TOKEN.match(token.strip())
        if not match:
            raise PatternSyntaxError(f"line {line_number}: bad pattern vertex '{token.strip()}'")
        name, label = match.group(1), match.group(2) or match.group(1)
        if name in labels:
            if labels[name] != label:
                raise PatternSyntaxError(f"line {line_number}: vertex '{name}' relabeled from '{labels[name]}' to '{label}'")
            return names.index(name)
        labels[name] = label
        names.append(name)
        return len(names) - 1

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split("->")
        if len(tokens) < 2:
            raise PatternSyntaxError(f"line {line_number}: expected 'x -> y'")
        ids = [vertex(t, line_number) for t in tokens]
        for a, b in zip(ids, ids[1:]):
            if labels[names[a]] == labels[names[b]]:
                raise PatternSyntaxError(f"line {line_number}: edge joins two vertices labeled '{labels[names[a]]}'")
            if (a, b) not in edges:
                edges.append((a, b))

    if not edges:
        raise PatternSyntaxError("Pattern has no edges.")

    g = nx.DiGraph()
    g.add_nodes_from(range(len(names)))
    g.add_edges_from(edges)
    try:
        order = tuple(nx.lexicographical_topological_sort(g))
    except nx.NetworkXUnfeasible:
        raise PatternSyntaxError("Pattern must be acyclic; repeat a label to close a cycle.")
    if not nx.is_weakly_connected(g):
        raise PatternSyntaxError("Pattern must be connected.")
    sources = [v for v in g if g.in_degree(v) == 0]
    sinks = [v for v in g if g.out_degree(v) == 0]
    if len(sources) != 1 or len(sinks) != 1:
        raise PatternSyntaxError(
            f"Pattern needs exactly one source and one sink vertex, found {len(sources)} and {len(sinks)}."
        )

    pattern = Pattern(
        names=tuple(names),
        vertex_labels=tuple(labels[n] for n in names),
        edges=tuple(edges),
        order=order,
        source=sources[0],
        sink=sinks[0],
    )
    logger.debug(f"Parsed pattern with {len(names)} vertices, {len(edges)} edges, labels {pattern.labels}.")
    return pattern


def format_pattern(pattern: Pattern) -> str:
    def token(v: int) -> str:
        name, label = pattern.names[v], pattern.vertex_labels[v]
        return name if name == label else f"{name}:{label}"

    return "\n".join(f"{token(a)} -> {token(b)}" for a, b in pattern.edges) + "\n"
