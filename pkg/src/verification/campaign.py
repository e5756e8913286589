"""
Campagnes de vérification : mesure de l'approximation et recherche du pire cas.

Une campagne tire `trials` instances d'une famille, chacune avec son propre
générateur issu de SeedSequence(seed).spawn(trials) : le résultat ne dépend
que de (graine, nombre d'essais), même avec plusieurs processus, car les
essais sont repliés dans l'ordre de leur indice.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import RATIO_TOLERANCE
from src.core.model import Instance, MechanismResult, optimal_social_welfare, pf_fraction
from src.core.rational import Number, Surd
from src.mechanisms.registry import Guarantee, get_mechanism
from src.pf.solution import PFSolution
from src.pf.solver import reference_pf
from src.sdm.mechanism import price_rounding_factor, run_sdm, sdm_guarantee
from src.verification.generators import generate

METRICS = ("rho", "sw_ratio", "sw_pf_ratio", "min_utility", "rho_margin", "price_margin")


class Approximation(NamedTuple):
    rho: Number
    sw_ratio: Number
    sw_pf_ratio: Number


def measure_approximation(mechanism: Callable[[Instance], MechanismResult], inst: Instance,
                          oracle: Optional[PFSolution] = None,
                          sw_opt: Optional[Number] = None) -> Approximation:
    """
    ρ (par rapport à `oracle`), SW/SW* et SW/SW(PF) d'un mécanisme sur une instance.

    Args:
        mechanism: instance → MechanismResult
        inst: instance évaluée
        oracle: solution PF de référence (reference_pf par défaut)
        sw_opt: bien-être optimal (Σ_j max_i v_ij par défaut)
    """
    result = mechanism(inst)
    if oracle is None:
        oracle = result.pf if result.pf is not None else reference_pf(inst)
    if sw_opt is None:
        sw_opt = optimal_social_welfare(inst)
    _, rho = pf_fraction(inst, result.allocation, oracle)
    return Approximation(rho, result.sw / sw_opt, result.sw / sum(oracle.utilities))


@dataclass(frozen=True)
class GuaranteeCheck:
    name: str
    metric: str
    bound: Number
    measured: Optional[Number]
    passed: bool


@dataclass
class CampaignReport:
    """Résultat d'une campagne : un enregistrement par essai et les pires témoins."""

    mechanism: str
    family: str
    n: int
    m: int
    seed: int
    trials: int
    records: pd.DataFrame
    minima: Dict[str, Number] = field(default_factory=dict)
    worst_rho: Optional[Tuple[int, Instance]] = None
    worst_sw: Optional[Tuple[int, Instance]] = None
    checks: List[GuaranteeCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class InstanceMeasure(NamedTuple):
    result: MechanismResult
    metrics: Dict[str, Number]
    prices: Tuple[Number, ...]
    extras: Dict[str, object]


def instance_metrics(name: str, inst: Instance) -> InstanceMeasure:
    """
    Exécute un mécanisme du registre et calcule toutes ses métriques.

    `prices` sont les prix SDM q pour "sdm", les prix PF sinon.
    """
    entry = get_mechanism(name)
    entry.check_shape(inst.n, inst.m)
    outcome = run_sdm(inst) if name == "sdm" else None
    result = outcome.result if outcome is not None else entry.run(inst)
    pf = result.pf if result.pf is not None else reference_pf(inst)
    metrics: Dict[str, Number] = {
        "rho": result.rho,
        "sw_ratio": result.sw / optimal_social_welfare(inst),
        "sw_pf_ratio": result.sw / sum(pf.utilities),
        "min_utility": min(result.per_bidder_utility),
    }
    extras: Dict[str, object] = {}
    prices = tuple(pf.prices)
    if outcome is not None:
        factor = price_rounding_factor(pf.prices)
        metrics["rho_margin"] = result.rho - sdm_guarantee(pf.prices)
        metrics["price_margin"] = min(
            factor * p_star - q for q, p_star in zip(outcome.prices, pf.prices) if p_star > 0
        )
        extras["below_unit_price"] = any(0 < p < 1 for p in pf.prices)
        extras["raises"] = outcome.statistics.raises
        prices = outcome.prices
    return InstanceMeasure(result, metrics, prices, extras)


def _trial(task: Tuple[str, str, int, int, np.random.SeedSequence, int]) -> Tuple[Dict[str, object], Dict[str, Number], Instance]:
    """Un essai : tire l'instance, exécute le mécanisme et calcule les métriques."""
    name, family, n, m, seed_seq, index = task
    inst = generate(family, n, m, np.random.default_rng(seed_seq))
    measure = instance_metrics(name, inst)
    record: Dict[str, object] = {"trial": index, **{k: float(v) for k, v in measure.metrics.items()}}
    record.update(measure.extras)
    return record, measure.metrics, inst


def _meets(measured: Number, bound: Number) -> bool:
    """Comparaison exacte pour des rationnels, à RATIO_TOLERANCE près sinon."""
    if isinstance(measured, Fraction) and isinstance(bound, (Fraction, Surd, int)):
        return measured >= bound
    return float(measured) >= float(bound) - RATIO_TOLERANCE


def check_guarantees(guarantees: Iterable[Guarantee], minima: Dict[str, Number], n: int) -> List[GuaranteeCheck]:
    checks = []
    for guarantee in guarantees:
        bound = guarantee.floor(n)
        measured = minima.get(guarantee.metric)
        passed = measured is not None and _meets(measured, bound)
        checks.append(GuaranteeCheck(guarantee.label, guarantee.metric, bound, measured, passed))
    return checks


def worst_case_search(mechanism: str, family: Optional[str] = None, trials: int = 1000,
                      seed: int = 0, n: Optional[int] = None, m: Optional[int] = None,
                      workers: int = 1, progress: bool = False) -> CampaignReport:
    """
    Cherche les pires ρ et SW/SW* d'un mécanisme sur une famille d'instances.

    Args:
        mechanism: nom dans le registre
        family: famille d'instances (celle du registre par défaut)
        trials: nombre d'essais
        seed: graine de la campagne
        n, m: forme des instances (celle du registre par défaut)
        workers: nombre de processus (1 = séquentiel)
        progress: affiche une barre tqdm

    Returns:
        CampaignReport: enregistrements, minima exacts, témoins et garanties
    """
    entry = get_mechanism(mechanism)
    n = n or entry.default_shape[0]
    m = m or entry.default_shape[1]
    family = family or entry.family
    entry.check_shape(n, m)
    children = np.random.SeedSequence(seed).spawn(trials)
    tasks = [(mechanism, family, n, m, child, index) for index, child in enumerate(children)]
    logger.info(f"Campagne {mechanism} : {trials} essais ({family}, n={n}, m={m}, graine {seed})")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = pool.map(_trial, tasks, chunksize=max(1, trials // (workers * 8)))
            folded = _fold(tqdm(outcomes, total=trials, desc=mechanism, disable=not progress))
    else:
        folded = _fold(tqdm(map(_trial, tasks), total=trials, desc=mechanism, disable=not progress))

    records, minima, worst_rho, worst_sw = folded
    report = CampaignReport(
        mechanism=mechanism,
        family=family,
        n=n,
        m=m,
        seed=seed,
        trials=trials,
        records=pd.DataFrame(records),
        minima=minima,
        worst_rho=worst_rho,
        worst_sw=worst_sw,
    )
    report.checks = check_guarantees(entry.guarantees, minima, n)
    if "below_unit_price" in report.records and report.records["below_unit_price"].any():
        logger.warning(f"{int(report.records['below_unit_price'].sum())} essais avec un prix PF < 1 : garantie SDM vide")
    status = "✅" if report.passed else "❌"
    logger.info(f"{status} {mechanism} : ρ min = {float(minima.get('rho', float('nan'))):.6f}")
    return report


def _fold(outcomes) -> Tuple[List[Dict[str, object]], Dict[str, Number], Optional[Tuple[int, Instance]], Optional[Tuple[int, Instance]]]:
    """Réduit les essais dans l'ordre des indices (minima et premiers témoins)."""
    records = []
    minima: Dict[str, Number] = {}
    worst_rho = worst_sw = None
    for record, metrics, inst in outcomes:
        records.append(record)
        index = record["trial"]
        for key, value in metrics.items():
            if key not in METRICS:
                continue
            if key not in minima or value < minima[key]:
                minima[key] = value
                if key == "rho":
                    worst_rho = (index, inst)
                elif key == "sw_ratio":
                    worst_sw = (index, inst)
    return records, minima, worst_rho, worst_sw
