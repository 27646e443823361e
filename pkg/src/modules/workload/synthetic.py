import logging
import random
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Set, Tuple

import yaml
from pydantic import ValidationError

from src.core.exceptions import InfeasibleSpecError, UsageError
from src.modules.graph.builder import GraphBuilder
from src.modules.graph.models import FlowInstance, Interaction
from src.modules.graph.services import normalize, validate_instance
from .schemas import SyntheticSpec

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
# (src, dst, t, q) over vertex positions 0..n-1; 0 is the source, n-1 the sink
Record = Tuple[int, int, int, int]


def _spread(rng: random.Random, total: int, slots: int) -> List[int]:
    """Splits ``total`` into ``slots`` positive parts."""
    if total < slots:
        raise InfeasibleSpecError(f"{total} interactions cannot give each of {slots} edges one.")
    counts = [1] * slots
    for _ in range(total - slots):
        counts[rng.randrange(slots)] += 1
    return counts


def _records(rng: random.Random, edges: List[Edge], counts: List[int], lo: int, hi: int, max_q: int) -> List[Record]:
    return [
        (src, dst, rng.randint(lo, hi), rng.randint(1, max_q))
        for (src, dst), n in zip(edges, counts)
        for _ in range(n)
    ]


def _soluble_edges(rng: random.Random, n: int, target: int) -> List[Edge]:
    """
    Edges of a DAG where every vertex but source and sink has exactly one
    outgoing edge, to a later vertex. The source feeds ``target - (n - 2)``
    vertices, always including vertex 1, and every other intermediate vertex
    is fed by exactly one earlier vertex or by the source.
    """
    if n == 2:
        return [(0, 1)]
    fed = {1} | set(rng.sample(range(2, n), target - (n - 2) - 1))
    succ: Dict[int, int] = {}
    for j in range(2, n - 1):
        if j in fed:
            continue
        # never empty: each fed vertex before j leaves one more free predecessor
        free = [i for i in range(1, j) if i not in succ]
        succ[rng.choice(free)] = j
    for i in range(1, n - 1):
        if i not in succ:
            succ[i] = rng.randint(i + 1, n - 1)
    return sorted([(0, j) for j in fed] + list(succ.items()))


def _class_a(rng: random.Random, spec: SyntheticSpec) -> List[Record]:
    n, m = spec.vertices, spec.edges
    if not n - 1 <= m <= max(1, 2 * n - 3):
        raise InfeasibleSpecError(
            f"A greedy-soluble instance on {n} vertices has between {n - 1} and {max(1, 2 * n - 3)} edges, got {m}."
        )
    edges = _soluble_edges(rng, n, m)
    return _records(rng, edges, _spread(rng, spec.interactions, len(edges)), 1, spec.max_timestamp, spec.max_quantity)


def _class_b(rng: random.Random, spec: SyntheticSpec) -> List[Record]:
    """
    A greedy-soluble core whose interactions all happen in the second half of
    the time range, plus dead edges out of intermediate vertices whose
    interactions all predate anything those vertices can receive.
    """
    n, m = spec.vertices, spec.edges
    if n < 4 or m < n:
        raise InfeasibleSpecError(f"Class B needs at least 4 vertices and edges >= vertices, got {n} and {m}.")
    dead = min(m - (n - 1), max(1, m - (2 * n - 3), m // 5))
    core = _soluble_edges(rng, n, m - dead)
    taken = set(core)
    candidates = [(i, j) for i in range(1, n - 1) for j in range(i + 1, n) if (i, j) not in taken]
    if dead > len(candidates):
        raise InfeasibleSpecError(f"Only {len(candidates)} dead edges fit on {n} vertices, {dead} needed.")
    dead_edges = sorted(rng.sample(candidates, dead))

    counts = _spread(rng, spec.interactions, m)
    base = spec.max_timestamp // 2 + 1
    return (
        _records(rng, core, counts[:len(core)], base, spec.max_timestamp, spec.max_quantity)
        + _records(rng, dead_edges, counts[len(core):], 1, base - 1, spec.max_quantity)
    )


def _class_c(rng: random.Random, spec: SyntheticSpec) -> List[Record]:
    """
    A random DAG with an embedded reservation gadget: vertex 1 receives ``a``
    at t=1, may forward it to vertex 2 at t=3 or to the sink at t=4, while
    vertex 2 only passes 1 unit on at t=5. Greedy forwards everything at t=3
    and delivers 1 through the gadget where ``a`` was possible. Everything
    else happens after t=5.
    """
    n, m = spec.vertices, spec.edges
    if n < 4 or m < n + 1:
        raise InfeasibleSpecError(f"Class C needs at least 4 vertices and edges >= vertices + 1, got {n} and {m}.")
    sink = n - 1
    a = rng.randint(4, spec.max_quantity)
    gadget: List[Record] = [
        (0, 1, 1, a),
        (0, 2, 2, rng.randint(1, spec.max_quantity)),
        (1, 2, 3, a),
        (1, sink, 4, a - 1),
        (2, sink, 5, 1),
    ]

    edges: Set[Edge] = set()
    for j in range(3, n - 1):
        edges.add((rng.choice([0] + list(range(3, j))), j))
    candidates = [
        (i, j) for i in [0] + list(range(3, n - 1)) for j in range(max(i + 1, 3), n)
        if (i, j) not in edges
    ]
    extra = m - 5 - len(edges)
    if extra > len(candidates):
        raise InfeasibleSpecError(f"At most {5 + len(edges) + len(candidates)} edges fit on {n} vertices, got {m}.")
    edges.update(rng.sample(candidates, extra))

    pool = sorted(edges)
    surplus = spec.interactions - len(gadget)
    if surplus < len(pool):
        raise InfeasibleSpecError(f"Class C on {m} edges needs at least {len(gadget) + len(pool)} interactions, got {spec.interactions}.")
    if pool:
        counts = _spread(rng, surplus, len(pool))
    else:
        pool, counts = [(0, 2)], [surplus]
    return gadget + _records(rng, pool, counts, 6, spec.max_timestamp, spec.max_quantity)


GENERATORS = {"A": _class_a, "B": _class_b, "C": _class_c}


def gen_synthetic(spec: SyntheticSpec, seed: Optional[int] = None) -> FlowInstance:
    """
    Generates a connected, normalized flow instance with source ``s`` and sink
    ``t``. The same spec and seed always produce the same instance.
    Raises InfeasibleSpecError when the counts cannot be realized.
    """
    seed = spec.rng_seed if seed is None else seed
    if spec.edges < spec.vertices - 1:
        raise InfeasibleSpecError(f"{spec.vertices} vertices need at least {spec.vertices - 1} edges to be connected.")
    if spec.interactions < spec.edges:
        raise InfeasibleSpecError(f"{spec.edges} edges need at least {spec.edges} interactions.")
    rng = random.Random(seed)
    records = GENERATORS[spec.class_bias](rng, spec)

    n = spec.vertices
    builder = GraphBuilder()
    ids = [builder.intern("s")] + [builder.intern(f"v{k}") for k in range(1, n - 1)] + [builder.intern("t")]
    for seq, (src, dst, t, q) in enumerate(sorted(records, key=lambda r: (r[2], r[0], r[1], r[3]))):
        builder.add_interaction(ids[src], ids[dst], Interaction(t, q, seq))
    graph = builder.freeze()
    instance = normalize(graph, {ids[0]}, {ids[-1]})
    validate_instance(instance)
    logger.debug(
        f"Generated class {spec.class_bias} instance (seed {seed}): "
        f"{len(graph.vertices)} vertices, {len(graph.edges)} edges, {graph.interaction_count} interactions."
    )
    return instance


def expand_specs(specs: List[SyntheticSpec], seed: Optional[int] = None) -> Iterator[Tuple[str, FlowInstance]]:
    """Every instance a list of specs describes, with an id naming class and seed. ``seed``
    replaces each spec's own rng_seed."""
    for spec in specs:
        first = spec.rng_seed if seed is None else seed
        for k in range(spec.count):
            s = first + k
            yield f"{spec.class_bias}-n{spec.vertices}-s{s}", gen_synthetic(spec, s)


def load_specs(path: Path) -> List[SyntheticSpec]:
    """Reads a YAML file holding one spec mapping or a list of them."""
    with open(path, encoding="utf-8") as fp:
        try:
            data = yaml.safe_load(fp)
        except yaml.YAMLError as e:
            raise UsageError(f"{path} is not valid YAML: {e}")
    items = data if isinstance(data, list) else [data]
    specs = []
    for n, item in enumerate(items, start=1):
        if not isinstance(item, dict):
            raise UsageError(f"{path}: spec {n} is not a mapping.")
        try:
            specs.append(SyntheticSpec(**item))
        except ValidationError as e:
            raise UsageError(f"{path}: spec {n} is invalid: {e.errors()[0]['loc'][0]} {e.errors()[0]['msg']}")
    if not specs:
        raise UsageError(f"{path} holds no synthetic spec.")
    logger.info(f"Loaded {len(specs)} synthetic specs from {path}.")
    return specs


DEFAULT_SPECS = [
    SyntheticSpec(vertices=12, edges=18, interactions=60, class_bias="A", count=5),
    SyntheticSpec(vertices=12, edges=18, interactions=60, class_bias="B", count=5),
    SyntheticSpec(vertices=12, edges=20, interactions=60, class_bias="C", count=5),
]
