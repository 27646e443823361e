import logging
from itertools import groupby
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.core.exceptions import InvariantViolation, NotAPathError, WitnessInfeasibleError
from src.modules.graph.models import EdgeSeries, FlowInstance, Interaction, VertexId, interaction_order
from src.modules.graph.quantity import INFINITE, q_add, q_min, q_sub
from .schemas import FlowResult, TraceRow

logger = logging.getLogger(__name__)


class BufferState:
    """Per-vertex buffers; the source is pinned at INFINITE, everything else starts at 0."""

    def __init__(self, source: VertexId):
        self.source = source
        self.buffers: Dict[VertexId, int] = {}

    def __getitem__(self, v: VertexId) -> int:
        if v == self.source:
            return INFINITE
        return self.buffers.get(v, 0)

    def withdraw(self, v: VertexId, q: int) -> int:
        moved = q_min(q, self[v])
        if v != self.source:
            self.buffers[v] = q_sub(self.buffers.get(v, 0), moved)
        return moved

    def deposit(self, v: VertexId, q: int) -> None:
        if v != self.source and q:
            self.buffers[v] = q_add(self.buffers.get(v, 0), q)

    def transfer(self, src: VertexId, dst: VertexId, q: int) -> int:
        moved = self.withdraw(src, q)
        self.deposit(dst, moved)
        return moved


def greedy_flow(instance: FlowInstance, strict: bool = False, trace: bool = False) -> FlowResult:
    """
    Single pass over all interactions in (t, seq) order; each moves
    min(q, B_src) from the sender's buffer to the receiver's.

    By default equal timestamps are processed sequentially in input order, so an
    interaction may spend what an equal-timestamp predecessor delivered. With
    ``strict=True`` every same-timestamp group only sees the buffers as they
    stood before that timestamp, arrivals landing after the whole group.
    """
    graph = instance.graph
    state = BufferState(instance.source)
    transfers: Dict[int, int] = {}
    rows: Optional[List[TraceRow]] = [] if trace else None
    watched = sorted(v for v in graph.vertices if v != instance.source)

    def record(ti, moved):
        if rows is not None:
            rows.append(TraceRow(
                step=len(rows) + 1,
                src=graph.name(ti.src),
                dst=graph.name(ti.dst),
                t=ti.interaction.t,
                q=ti.interaction.q,
                moved=moved,
                buffers={graph.name(v): state[v] for v in watched},
            ))

    if not strict:
        for ti in graph.timeline:
            moved = state.transfer(ti.src, ti.dst, ti.interaction.q)
            transfers[ti.interaction.seq] = moved
            record(ti, moved)
    else:
        for _, group in groupby(graph.timeline, key=lambda x: x.interaction.t):
            pending = []
            for ti in group:
                moved = state.withdraw(ti.src, ti.interaction.q)
                transfers[ti.interaction.seq] = moved
                pending.append((ti, moved))
            for ti, moved in pending:
                state.deposit(ti.dst, moved)
                record(ti, moved)

    value = state[instance.sink]
    if value == INFINITE:
        raise InvariantViolation("Greedy delivered an unbounded quantity to the sink.")
    logger.debug(f"Greedy flow {value} over {len(transfers)} interactions (strict={strict}).")
    return FlowResult(value=value, transfers=transfers, method="greedy", trace=rows)


def _simulate_positions(edges: Sequence[Sequence[Interaction]], strict: bool) -> Tuple[List[Interaction], Dict[int, int]]:
    """
    Greedy along a path given as per-hop interaction lists. Position 0 is an
    infinite source; returns what the last hop adds to the terminal buffer,
    and what every interaction moved.
    """
    last = len(edges) - 1
    events = sorted(
        ((i, hop) for hop, items in enumerate(edges) for i in items),
        key=lambda e: interaction_order(e[0]),
    )
    state = BufferState(0)
    boundary: List[Interaction] = []
    moved_by_seq: Dict[int, int] = {}
    if not strict:
        for i, hop in events:
            moved = state.transfer(hop, hop + 1, i.q)
            moved_by_seq[i.seq] = moved
            if hop == last and moved > 0:
                boundary.append(Interaction(i.t, moved, i.seq))
        return boundary, moved_by_seq
    for _, group in groupby(events, key=lambda e: e[0].t):
        pending = []
        for i, hop in group:
            pending.append((i, hop, state.withdraw(hop, i.q)))
        for i, hop, moved in pending:
            state.deposit(hop + 1, moved)
            moved_by_seq[i.seq] = moved
            if hop == last and moved > 0:
                boundary.append(Interaction(i.t, moved, i.seq))
    return boundary, moved_by_seq


def greedy_chain_boundary(chain: Sequence[EdgeSeries], strict: bool = False) -> List[Interaction]:
    """
    Boundary sequence of a path: one interaction (t, delta) per interaction on
    the last edge that raised the terminal buffer by delta > 0, in time order.

    Vertices are tracked by position, so a cycle's closing vertex is kept apart
    from its starting vertex.
    """
    if not chain:
        raise NotAPathError("An empty edge list is not a path.")
    for prev, nxt in zip(chain, chain[1:]):
        if prev.dst != nxt.src:
            raise NotAPathError(f"Edges ({prev.src}, {prev.dst}) and ({nxt.src}, {nxt.dst}) do not connect.")
    return _simulate_positions([e.interactions for e in chain], strict)[0]


def extend_boundary(boundary: Sequence[Interaction], interactions: Sequence[Interaction], strict: bool = False) -> List[Interaction]:
    """Boundary of a path extended by one hop, computed from the prefix boundary alone."""
    return _simulate_positions([boundary, interactions], strict)[0]


def chain_schedule(hops: Sequence[Sequence[Interaction]], delivered: Mapping[int, int]) -> Dict[int, int]:
    """
    Transfers on every interaction of a path that deliver exactly ``delivered``
    (last-hop seq -> amount) at its end, under strict same-timestamp semantics.

    Works backwards from the last hop: each hop draws what the next one sends
    from its earliest strict greedy transfers, so no interaction carries more
    than the greedy moved and every vertex only forwards what arrived before.
    """
    _, greedy = _simulate_positions(hops, strict=True)
    transfers: Dict[int, int] = {}
    demand = {i.seq: delivered.get(i.seq, 0) for i in hops[-1]}
    for hop in range(len(hops) - 1, -1, -1):
        for i in hops[hop]:
            x = demand.get(i.seq, 0)
            if x > greedy.get(i.seq, 0):
                raise InvariantViolation(f"interaction {i.seq} asked to carry {x}, above its greedy transfer")
            transfers[i.seq] = x
        if hop == 0:
            break
        needed = sum(transfers[i.seq] for i in hops[hop])
        demand = {}
        for i in sorted(hops[hop - 1], key=interaction_order):
            take = min(greedy.get(i.seq, 0), needed)
            demand[i.seq] = take
            needed -= take
    return transfers


def boundary_value(boundary: Sequence[Interaction]) -> int:
    return sum(i.q for i in boundary)


def validate_sequential_witness(instance: FlowInstance, result: FlowResult) -> None:
    """Replays transfers in stable order: bounds per interaction and non-negative buffers throughout."""
    graph = instance.graph
    state = BufferState(instance.source)
    delivered = 0
    for ti in graph.timeline:
        x = result.transfers.get(ti.interaction.seq, 0)
        if not 0 <= x <= ti.interaction.q:
            raise WitnessInfeasibleError(f"transfer {x} outside [0, {ti.interaction.q}] for interaction {ti.interaction.seq}")
        if ti.src != instance.source and x > state[ti.src]:
            raise WitnessInfeasibleError(
                f"vertex '{graph.name(ti.src)}' sends {x} at t={ti.interaction.t} holding only {state[ti.src]}"
            )
        state.transfer(ti.src, ti.dst, x)
        if ti.dst == instance.sink:
            delivered = q_add(delivered, x)
    if delivered != result.value:
        raise WitnessInfeasibleError(f"declared value {result.value} differs from delivered {delivered}")
