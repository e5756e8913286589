"""
Mécanisme SDM (Strong Demand Matching).

Chaque enchérisseur a un budget unitaire ; les prix partent de 1 et ne font
que monter. Étape 1 : affectation valide maximale (capacités ⌊p_j⌋). Étape 2 :
les prix des objets atteignables R depuis les enchérisseurs libres U sont
multipliés par le plus petit x déclenchant un événement :

    (a)    un prix de R devient entier → étape 1
    (b)-i  R grandit, tous les objets ajoutés sont saturés → étape 2
    (b)-ii R grandit, un objet ajouté a une place libre → étape 1

Étape 3 : l'enchérisseur apparié à j reçoit la fraction 1/p_j de j.

Tous les prix sont des Fraction : les événements sont détectés par égalité
exacte. numpy ne sert qu'à présélectionner les candidats de l'événement (b).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import SDM_ITERATION_FACTOR
from src.core.errors import DimensionMismatch, SDMInvariantError
from src.core.model import Allocation, Instance, MechanismResult, evaluate
from src.core.rational import Number, format_rational
from src.pf.solver import reference_pf
from src.sdm.graph import (
    Assignment,
    DemandGraph,
    bidders_within,
    demand_graph,
    max_valid_assignment,
    reachable_items,
)

INTEGRAL_PRICE = "IntegralPrice"
MBB_GROWTH = "MBBGrowth"

# Classement des hausses dans les statistiques et la trace
EVENT_A = "a"
EVENT_B_FULL = "b-i"
EVENT_B_OPEN = "b-ii"

# Présélection flottante des candidats (b), confirmés ensuite en exact
_PREFILTER_SLACK = 1e-9


@dataclass(frozen=True)
class PriceRaise:
    """Hausse des prix de R d'un facteur x, et arêtes MBB qui apparaissent."""

    factor: Fraction
    kind: str
    new_edges: Tuple[Tuple[int, int], ...] = ()


@dataclass
class SDMStatistics:
    step1_calls: int = 0
    events: Dict[str, int] = field(default_factory=lambda: {EVENT_A: 0, EVENT_B_FULL: 0, EVENT_B_OPEN: 0})
    matched_after_step1: List[int] = field(default_factory=list)
    longest_full_growth_run: int = 0

    @property
    def raises(self) -> int:
        return sum(self.events.values())


@dataclass(frozen=True)
class SDMOutcome:
    prices: Tuple[Fraction, ...]
    assignment: Tuple[Optional[int], ...]
    allocation: Allocation
    trace: Tuple[str, ...]
    statistics: SDMStatistics
    result: Optional[MechanismResult] = None


@dataclass
class SDMState:
    """État d'une exécution : prix exacts, graphe de demande et affectation."""

    inst: Instance
    prices: List[Fraction]
    graph: DemandGraph
    assignment: Assignment
    values_array: np.ndarray
    price_array: np.ndarray

    @classmethod
    def start(cls, inst: Instance, prices: Optional[Sequence[Fraction]] = None) -> "SDMState":
        if prices is None:
            prices = [Fraction(1)] * inst.m
        prices = [Fraction(p) for p in prices]
        if len(prices) != inst.m:
            raise DimensionMismatch(f"{len(prices)} start prices for {inst.m} items")
        return cls(
            inst=inst,
            prices=prices,
            graph=demand_graph(inst, prices),
            assignment=Assignment.empty(inst.n, inst.m),
            values_array=inst.as_array(),
            price_array=np.array([float(p) for p in prices]),
        )

    @property
    def capacities(self) -> List[int]:
        return [math.floor(p) for p in self.prices]

    def match(self) -> int:
        """Étape 1 ; renvoie le nombre d'enchérisseurs appariés."""
        max_valid_assignment(self.graph, self.capacities, self.assignment)
        return self.assignment.matched_count

    def unmatched(self) -> List[int]:
        return self.assignment.unmatched()

    def reachable(self) -> FrozenSet[int]:
        return reachable_items(self.graph, self.assignment)

    def bang(self, bidder: int, item: int) -> Fraction:
        return self.inst.row(bidder)[item] / self.prices[item]

    def apply(self, event: PriceRaise, reach: FrozenSet[int], inside: Sequence[int]) -> None:
        """Multiplie les prix de R par x et met à jour le graphe de demande."""
        for j in reach:
            self.prices[j] *= event.factor
            self.price_array[j] = float(self.prices[j])
        inside_set = set(inside)
        # hors de d(R), les arêtes vers R ne sont plus MBB (une arête sort de R)
        for i, edges in enumerate(self.graph.edges):
            if i not in inside_set and any(j in reach for j in edges):
                self.graph.drop_items(i, reach)
        for bidder, item in event.new_edges:
            self.graph.add_edge(bidder, item)


def _integral_factor(prices: Sequence[Fraction], reach: FrozenSet[int]) -> Fraction:
    """Plus petit ⌈p_j⌉/p_j (ou (p_j+1)/p_j pour un prix entier) sur R."""
    best = None
    for j in reach:
        p = prices[j]
        target = p.numerator + 1 if p.denominator == 1 else math.ceil(p)
        factor = target / p
        if best is None or factor < best:
            best = factor
    return best


def next_event(state: SDMState, reach: Optional[FrozenSet[int]] = None,
               inside: Optional[Sequence[int]] = None) -> PriceRaise:
    """
    Plus petit facteur x > 1 déclenchant un événement (a) ou (b).

    Pour (b), chaque enchérisseur de d(R) compare son rapport valeur/prix dans
    R à son meilleur rapport hors de R. En cas d'égalité, (a) l'emporte ; les
    arêtes nouvellement MBB au facteur choisi sont jointes à l'événement.

    Raises:
        SDMInvariantError: si aucun enchérisseur n'est libre, ou si x ≤ 1
    """
    if not state.unmatched():
        raise SDMInvariantError("next_event needs an unmatched bidder")
    if reach is None:
        reach = state.reachable()
    if inside is None:
        inside = bidders_within(state.graph, reach)
    x_integral = _integral_factor(state.prices, reach)

    outside = [j for j in range(state.inst.m) if j not in reach]
    candidates: List[int] = []
    if outside and inside:
        rows = np.asarray(inside)
        anchors = np.array([state.graph.edges[i][0] for i in inside])
        inner = state.values_array[rows, anchors] / state.price_array[anchors]
        outer = (state.values_array[np.ix_(rows, outside)] / state.price_array[outside]).max(axis=1)
        ratios = np.where(outer > 0, inner / np.where(outer > 0, outer, 1.0), np.inf)
        threshold = min(float(x_integral), float(ratios.min())) * (1 + _PREFILTER_SLACK)
        candidates = [int(i) for i in rows[ratios <= threshold]]

    exact: Dict[int, Tuple[Fraction, List[int]]] = {}
    for i in candidates:
        inner_bang = state.bang(i, state.graph.edges[i][0])
        row = state.inst.row(i)
        best_out = max(row[j] / state.prices[j] for j in outside)
        if best_out <= 0:
            continue
        exact[i] = (inner_bang / best_out, [j for j in outside if row[j] / state.prices[j] == best_out])

    x_growth = min((ratio for ratio, _ in exact.values()), default=None)
    if x_growth is not None and x_growth < x_integral:
        factor, kind = x_growth, MBB_GROWTH
    else:
        factor, kind = x_integral, INTEGRAL_PRICE
    if factor <= 1:
        raise SDMInvariantError(f"price raise factor {factor} does not make progress")

    new_edges = tuple(
        (i, j) for i in sorted(exact) if exact[i][0] == factor for j in exact[i][1]
    )
    return PriceRaise(factor=factor, kind=kind, new_edges=new_edges)


def _trace_line(step: int, event: PriceRaise, label: str, reach: FrozenSet[int], prices: Sequence[Fraction]) -> str:
    items = ",".join(str(j) for j in sorted(reach))
    values = ",".join(format_rational(p) for p in prices)
    return f"step={step} x={format_rational(event.factor)} event={label} R=[{items}] prices=[{values}]"


def _allocation(inst: Instance, state: SDMState) -> Allocation:
    shares = [[Fraction(0)] * inst.m for _ in range(inst.n)]
    for i, j in enumerate(state.assignment.match):
        if j is not None:
            shares[i][j] = 1 / state.prices[j]
    return Allocation.from_rows(shares)


def run_sdm(inst: Instance, start_prices: Optional[Sequence[Fraction]] = None,
            with_benchmark: bool = True) -> SDMOutcome:
    """
    Exécute SDM de bout en bout.

    Args:
        inst: instance quelconque
        start_prices: prix de départ (≥ 1), tous à 1 par défaut
        with_benchmark: calcule aussi la solution PF et le MechanismResult

    Returns:
        SDMOutcome: prix finaux q, affectation, allocation (1/q_j), trace,
        statistiques et, si demandé, le résultat comparé au PF

    Raises:
        SDMInvariantError: budget d'itérations dépassé ou invariant violé
    """
    state = SDMState.start(inst, start_prices)
    stats = SDMStatistics()
    trace: List[str] = []
    budget = SDM_ITERATION_FACTOR * inst.n * min(inst.n, inst.m) + 4
    need_matching = True
    reach: Optional[FrozenSet[int]] = None
    full_run = 0
    step = 0

    while True:
        if need_matching:
            stats.step1_calls += 1
            matched = state.match()
            if stats.matched_after_step1 and matched < stats.matched_after_step1[-1]:
                raise SDMInvariantError("matched bidder count decreased")
            stats.matched_after_step1.append(matched)
            reach = None
            if matched == inst.n:
                break

        step += 1
        if step > budget:
            logger.error(f"SDM : budget de {budget} hausses dépassé")
            raise SDMInvariantError(f"SDM exceeded its budget of {budget} price raises")
        if reach is None:
            reach = state.reachable()
        inside = bidders_within(state.graph, reach)
        capacity = sum(state.capacities[j] for j in reach)
        if len(inside) <= capacity:
            raise SDMInvariantError(f"|d(R)| = {len(inside)} does not exceed c(R) = {capacity}")

        event = next_event(state, reach, inside)
        state.apply(event, reach, inside)
        raised = reach

        if event.kind == INTEGRAL_PRICE:
            label, need_matching = EVENT_A, True
        else:
            grown = state.reachable()
            added = grown - reach
            if all(state.assignment.load(j) >= state.capacities[j] for j in added):
                label, need_matching, reach = EVENT_B_FULL, False, grown
            else:
                label, need_matching = EVENT_B_OPEN, True

        stats.events[label] += 1
        full_run = full_run + 1 if label == EVENT_B_FULL else 0
        stats.longest_full_growth_run = max(stats.longest_full_growth_run, full_run)
        line = _trace_line(step, event, label, raised, state.prices)
        trace.append(line)
        logger.debug(line)

    allocation = _allocation(inst, state)
    result = None
    if with_benchmark:
        result = evaluate(inst, allocation, reference_pf(inst), "sdm")
    logger.debug(
        f"SDM : {stats.raises} hausses, {stats.step1_calls} appels à l'étape 1, "
        f"prix finaux [{', '.join(format_rational(p) for p in state.prices)}]"
    )
    return SDMOutcome(
        prices=tuple(state.prices),
        assignment=tuple(state.assignment.match),
        allocation=allocation,
        trace=tuple(trace),
        statistics=stats,
        result=result,
    )


def run_sdm_two_phase(inst: Instance, bidder: int, with_benchmark: bool = True) -> SDMOutcome:
    """
    Variante en deux passes : SDM sans `bidder` donne des prix p′, puis SDM
    avec tout le monde repart de p′. Le résultat final doit être identique à
    celui de run_sdm.
    """
    if not 0 <= bidder < inst.n:
        raise ValueError(f"bidder {bidder} is not in the instance")
    if inst.n == 1:
        first_prices = [Fraction(1)] * inst.m
    else:
        first_prices = list(run_sdm(inst.without_bidder(bidder), with_benchmark=False).prices)
    return run_sdm(inst, start_prices=first_prices, with_benchmark=with_benchmark)


def sdm_mechanism(inst: Instance) -> MechanismResult:
    return run_sdm(inst).result


def sdm_allocation(inst: Instance) -> Allocation:
    """Allocation SDM seule, sans calcul du PF (pour la recherche de déviations)."""
    return run_sdm(inst, with_benchmark=False).allocation


def _rounded_up(price: float, tol: float) -> float:
    # un prix flottant à tol près d'un entier est traité comme entier
    nearest = round(price)
    if abs(price - nearest) <= tol * max(1.0, price):
        return float(max(nearest, 1))
    return float(math.ceil(price))


def price_rounding_factor(pf_prices: Sequence[Number], tol: float = 1e-7) -> Number:
    """f = max_j ⌈p*_j⌉/p*_j sur les prix PF positifs (exact pour des Fraction)."""
    positive = [p for p in pf_prices if p > 0]
    if not positive:
        raise ValueError("no positive PF price")
    if all(isinstance(p, Fraction) for p in positive):
        return max(Fraction(math.ceil(p)) / p for p in positive)
    return max(_rounded_up(float(p), tol) / float(p) for p in positive)


def sdm_guarantee(pf_prices: Sequence[Number], tol: float = 1e-7) -> Number:
    """Garantie min_j p*_j/⌈p*_j⌉ sur les prix PF positifs."""
    positive = [p for p in pf_prices if p > 0]
    if not positive:
        raise ValueError("no positive PF price")
    if all(isinstance(p, Fraction) for p in positive):
        return min(p / math.ceil(p) for p in positive)
    return min(float(p) / _rounded_up(float(p), tol) for p in positive)
