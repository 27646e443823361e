"""
Linear-program form of the maximum temporal flow and an exact rational simplex
used as an independent oracle for the combinatorial solver.

Variables are the interactions not leaving the source (those are fixed to their
full quantity). For every vertex v and outgoing interaction i of v:

    sum(x_j : j leaves v, t_j <= t_i) - sum(x_j : j enters v, t_j < t_i)
        <= fixed inflow into v before t_i

so departures sharing a timestamp are jointly bounded by what v held before it.
The constraint matrix is a network matrix, hence every basic solution is integral.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, TextIO, Tuple

from src.core.config import settings
from src.core.exceptions import InvariantViolation, IterationCapExceededError
from src.modules.graph.models import FlowInstance, VertexId
from src.modules.graph.quantity import INFINITE, fmt_quantity, q_add
from src.modules.greedy.schemas import FlowResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LpVariable:
    seq: int
    src: VertexId
    dst: VertexId
    t: int
    upper: int
    into_sink: bool

    @property
    def name(self) -> str:
        return f"x{self.seq}"


@dataclass(frozen=True)
class LpConstraint:
    name: str
    # (variable index, +1 | -1)
    terms: Tuple[Tuple[int, int], ...]
    rhs: int


@dataclass(frozen=True)
class LpModel:
    variables: Tuple[LpVariable, ...]
    constraints: Tuple[LpConstraint, ...]
    objective_constant: int
    # seq -> quantity of every interaction leaving the source
    fixed: Dict[int, int]

    @property
    def objective(self) -> List[int]:
        return [k for k, v in enumerate(self.variables) if v.into_sink]


def build_lp(instance: FlowInstance) -> LpModel:
    graph = instance.graph
    source, sink = instance.source, instance.sink
    variables: List[LpVariable] = []
    fixed: Dict[int, int] = {}
    constant = 0
    for ti in graph.timeline:
        i = ti.interaction
        if ti.src == source:
            fixed[i.seq] = i.q
            if ti.dst == sink:
                constant = q_add(constant, i.q)
            continue
        variables.append(LpVariable(i.seq, ti.src, ti.dst, i.t, i.q, ti.dst == sink))
    if constant == INFINITE:
        raise InvariantViolation("Unbounded flow: the source feeds the sink with an INFINITE interaction.")

    index = {v.seq: k for k, v in enumerate(variables)}
    constraints: List[LpConstraint] = []
    for v in sorted(graph.vertices):
        if v == source:
            continue
        incoming = sorted(
            (i for u in graph.predecessors(v) for i in graph.edges[(u, v)].interactions),
            key=lambda i: (i.t, i.seq),
        )
        inflow = {i.seq: u for u in graph.predecessors(v) for i in graph.edges[(u, v)].interactions}
        outgoing = sorted(
            (i for w in graph.successors(v) for i in graph.edges[(v, w)].interactions),
            key=lambda i: (i.t, i.seq),
        )
        for i in outgoing:
            rhs = 0
            terms = [(index[j.seq], 1) for j in outgoing if j.t <= i.t]
            for j in incoming:
                if j.t >= i.t:
                    break
                if inflow[j.seq] == source:
                    rhs = q_add(rhs, j.q)
                else:
                    terms.append((index[j.seq], -1))
            if rhs == INFINITE:
                continue
            constraints.append(LpConstraint(f"c{v}_{i.seq}", tuple(sorted(terms)), rhs))

    model = LpModel(tuple(variables), tuple(constraints), constant, fixed)
    logger.debug(f"LP model: {len(variables)} variables, {len(constraints)} balance constraints.")
    return model


def _simplex(c: List[Fraction], rows: List[Dict[int, Fraction]], b: List[Fraction], cap: int) -> Tuple[Fraction, List[Fraction]]:
    """max c.x subject to rows . x <= b, x >= 0, with b >= 0 (origin feasible). Bland's rule."""
    n, m = len(c), len(rows)
    tableau = [dict(row) for row in rows]
    for r in range(m):
        tableau[r][n + r] = Fraction(1)
    rhs = list(b)
    basis = [n + r for r in range(m)]
    reduced = {j: -cj for j, cj in enumerate(c) if cj}
    value = Fraction(0)

    iterations = 0
    while True:
        entering = min((j for j, cost in reduced.items() if cost < 0), default=None)
        if entering is None:
            break
        pivot_row: Optional[int] = None
        best: Optional[Fraction] = None
        for r, row in enumerate(tableau):
            a = row.get(entering)
            if a is None or a <= 0:
                continue
            ratio = rhs[r] / a
            if best is None or ratio < best or (ratio == best and basis[r] < basis[pivot_row]):
                pivot_row, best = r, ratio
        if pivot_row is None:
            raise InvariantViolation("LP is unbounded; the instance admits infinite flow.")

        iterations += 1
        if iterations > cap:
            raise IterationCapExceededError(f"Simplex exceeded {cap} pivots.")

        prow = tableau[pivot_row]
        a = prow[entering]
        if a != 1:
            for k in prow:
                prow[k] /= a
            rhs[pivot_row] /= a
        for r, row in enumerate(tableau):
            f = row.get(entering)
            if r == pivot_row or not f:
                continue
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs[r] -= f * rhs[pivot_row]
        f = reduced.get(entering)
        if f:
            for k, v in prow.items():
                nv = reduced.get(k, 0) - f * v
                if nv:
                    reduced[k] = nv
                else:
                    reduced.pop(k, None)
            value -= f * rhs[pivot_row]
        basis[pivot_row] = entering

    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = rhs[r]
    return value, x


def solve_lp(model: LpModel) -> FlowResult:
    """Exact optimum by rational simplex; contracted for models up to LP_MAX_VARIABLES variables."""
    n = len(model.variables)
    if n > settings.LP_MAX_VARIABLES:
        logger.warning(f"LP oracle asked to solve {n} variables (contracted for {settings.LP_MAX_VARIABLES}).")
    rows: List[Dict[int, Fraction]] = []
    b: List[Fraction] = []
    for con in model.constraints:
        rows.append({k: Fraction(sign) for k, sign in con.terms})
        b.append(Fraction(con.rhs))
    for k, var in enumerate(model.variables):
        if var.upper != INFINITE:
            rows.append({k: Fraction(1)})
            b.append(Fraction(var.upper))
    c = [Fraction(1) if v.into_sink else Fraction(0) for v in model.variables]

    optimum, x = _simplex(c, rows, b, settings.LP_ITERATION_CAP)
    if any(xi.denominator != 1 for xi in x) or optimum.denominator != 1:
        raise InvariantViolation("Simplex returned a fractional vertex on a network-matrix LP.")

    transfers = dict(model.fixed)
    transfers.update((var.seq, int(xi)) for var, xi in zip(model.variables, x))
    return FlowResult(value=model.objective_constant + int(optimum), transfers=transfers, method="maxflow-lp")


def emit_lp(model: LpModel, writer: TextIO) -> None:
    """Writes the model in CPLEX LP text format; output depends only on the model."""
    names = [v.name for v in model.variables]
    writer.write("\\ tempoflow maximum temporal flow\n")
    writer.write(f"\\ fixed source-to-sink inflow: {model.objective_constant}\n")
    writer.write("Maximize\n")
    objective = [names[k] for k in model.objective]
    writer.write(" obj: " + (" + ".join(objective) if objective else "0") + "\n")
    writer.write("Subject To\n")
    for con in model.constraints:
        parts = []
        for k, sign in con.terms:
            op = "+" if sign > 0 else "-"
            parts.append(f"{op} {names[k]}")
        lhs = " ".join(parts)
        if lhs.startswith("+ "):
            lhs = lhs[2:]
        writer.write(f" {con.name}: {lhs} <= {con.rhs}\n")
    writer.write("Bounds\n")
    for var in model.variables:
        if var.upper == INFINITE:
            writer.write(f" {var.name} >= 0\n")
        else:
            writer.write(f" 0 <= {var.name} <= {fmt_quantity(var.upper)}\n")
    writer.write("End\n")
