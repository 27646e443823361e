import logging
import time
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

from src.core.exceptions import UsageError, WitnessInfeasibleError
from src.modules.analysis.schemas import ReductionReport, ResolvedBy
from src.modules.analysis.services import (
    BoundaryLookup,
    ChainHops,
    expand_chain_transfers,
    greedy_soluble,
    preprocess,
    simplify,
)
from src.modules.graph.models import FlowInstance, Interaction, VertexId
from src.modules.graph.services import has_same_timestamp_relay, is_dag
from src.modules.greedy.schemas import FlowResult
from src.modules.greedy.services import greedy_flow
from .expansion import build_time_expanded, max_flow_static
from .lp import build_lp, solve_lp
from .schemas import InstanceClass, Strategy

logger = logging.getLogger(__name__)

STRATEGIES = ("lp", "pre", "presim")


def exact_flow(instance: FlowInstance) -> FlowResult:
    """Production exact path: time expansion followed by static max flow."""
    return max_flow_static(build_time_expanded(instance))


def lp_flow(instance: FlowInstance) -> FlowResult:
    return solve_lp(build_lp(instance))


def _zero_result(instance: FlowInstance) -> FlowResult:
    transfers = {ti.interaction.seq: 0 for ti in instance.graph.timeline}
    return FlowResult(value=0, transfers=transfers, method="maxflow-expanded")


def _fill_removed(result: FlowResult, instance: FlowInstance) -> FlowResult:
    """Pads a result computed on a pruned copy with zero transfers for deleted interactions."""
    transfers = {ti.interaction.seq: 0 for ti in instance.graph.timeline}
    transfers.update(result.transfers)
    return result.model_copy(update={"transfers": transfers})


def max_flow(
    instance: FlowInstance,
    strategy: Strategy = "lp",
    boundary_lookup: Optional[BoundaryLookup] = None,
) -> Tuple[FlowResult, ReductionReport]:
    """
    Exact maximum temporal flow under one of three strategies:

    - ``lp``: solve the time-expanded network directly.
    - ``pre``: greedy if the instance is greedy-soluble; otherwise preprocess,
      test again, and fall back to the exact solver.
    - ``presim``: as ``pre``, with simplification before the exact solve.

    Greedy shortcuts run in strict same-timestamp mode, the semantics of the
    exact solver, so all strategies return the same value. Transfers always
    cover every original interaction: pruned ones carry 0, and transfers on
    reduced chains are spread back over the chain hops and checked with
    ``validate_witness``.
    """
    if strategy not in STRATEGIES:
        raise UsageError(f"Unknown strategy '{strategy}'; expected one of {', '.join(STRATEGIES)}.")
    started = time.perf_counter_ns()
    graph = instance.graph
    if has_same_timestamp_relay(graph):
        logger.warning(
            "Instance relays quantity within a single timestamp; greedy and exact semantics may diverge."
        )

    if instance.zero_flow:
        result, report = _zero_result(instance), ReductionReport(became_trivial=True, resolved_by="trivial")
    elif strategy == "lp":
        result, report = exact_flow(instance), ReductionReport(resolved_by="exact")
    else:
        result, report = _reduce_and_solve(instance, strategy, boundary_lookup)

    elapsed = (time.perf_counter_ns() - started) // 1000
    logger.info(f"Strategy '{strategy}' resolved by {report.resolved_by}: value {result.value} in {elapsed} us.")
    return result.model_copy(update={"runtime_us": elapsed}), report


def _reduce_and_solve(
    instance: FlowInstance, strategy: Strategy, boundary_lookup: Optional[BoundaryLookup]
) -> Tuple[FlowResult, ReductionReport]:
    dag = is_dag(instance.graph)
    if dag and greedy_soluble(instance):
        return greedy_flow(instance, strict=True), ReductionReport(resolved_by="greedy")

    current, report = instance, ReductionReport()
    if dag:
        current, report = preprocess(instance)
        if report.became_trivial:
            return _zero_result(instance), report.model_copy(update={"resolved_by": "trivial"})
        if greedy_soluble(current):
            result = _fill_removed(greedy_flow(current, strict=True), instance)
            return result, report.model_copy(update={"resolved_by": "greedy-after-preprocess"})

    reductions: List[ChainHops] = []
    resolved_by: ResolvedBy = "exact"
    if strategy == "presim":
        current, sim_report = simplify(current, boundary_lookup, reductions)
        report = report.combine(sim_report)
        if sim_report.chains_reduced and greedy_soluble(current):
            resolved_by = "greedy-after-simplify"

    result = greedy_flow(current, strict=True) if resolved_by != "exact" else exact_flow(current)
    if reductions:
        result = result.model_copy(update={"transfers": expand_chain_transfers(reductions, result.transfers)})
        result = _fill_removed(result, instance)
        validate_witness(instance, result)
    else:
        result = _fill_removed(result, instance)
    return result, report.model_copy(update={"resolved_by": resolved_by})


def classify(instance: FlowInstance) -> InstanceClass:
    """A: greedy-soluble as is; B: soluble after preprocessing; C: otherwise (including cyclic)."""
    if not is_dag(instance.graph):
        return "C"
    if greedy_soluble(instance):
        return "A"
    reduced, report = preprocess(instance)
    if report.became_trivial or greedy_soluble(reduced):
        return "B"
    return "C"


def lp_variable_count(instance: FlowInstance) -> int:
    return sum(1 for ti in instance.graph.timeline if ti.src != instance.source)


def validate_witness(instance: FlowInstance, result: FlowResult) -> None:
    """
    Independent check of a max-flow witness: every transfer within [0, q], and for
    every vertex v and outgoing timestamp T, what v sends at or before T never
    exceeds what it received strictly before T. The declared value must equal
    the total delivered to the sink.
    """
    graph = instance.graph
    sent: Dict[VertexId, List[Tuple[int, int]]] = defaultdict(list)
    received: Dict[VertexId, List[Tuple[int, int]]] = defaultdict(list)
    delivered = 0
    for ti in graph.timeline:
        i: Interaction = ti.interaction
        x = result.transfers.get(i.seq, 0)
        if not 0 <= x <= i.q:
            raise WitnessInfeasibleError(f"transfer {x} outside [0, {i.q}] for interaction {i.seq}")
        sent[ti.src].append((i.t, x))
        received[ti.dst].append((i.t, x))
        if ti.dst == instance.sink:
            delivered += x
    for v, departures in sent.items():
        if v == instance.source:
            continue
        arrivals = received.get(v, [])
        out_total = in_total = 0
        a = 0
        for k, (t, x) in enumerate(departures):
            out_total += x
            if k + 1 < len(departures) and departures[k + 1][0] == t:
                continue
            while a < len(arrivals) and arrivals[a][0] < t:
                in_total += arrivals[a][1]
                a += 1
            if out_total > in_total:
                raise WitnessInfeasibleError(
                    f"vertex '{graph.name(v)}' sends {out_total} by t={t} having received {in_total} before it"
                )
    if delivered != result.value:
        raise WitnessInfeasibleError(f"declared value {result.value} differs from delivered {delivered}")
