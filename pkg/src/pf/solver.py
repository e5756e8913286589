"""
Solveur PF général (programme d'Eisenberg-Gale) par réponse proportionnelle.

Chaque enchérisseur répartit son budget unitaire en offres b_ij ; le prix
d'un objet est la somme des offres reçues et chacun obtient x_ij = b_ij/p_j.
À chaque tour, l'offre est remise proportionnellement à la contribution de
l'objet à l'utilité : b_ij ← v_ij·x_ij / u_i. C'est une montée multiplicative
sur l'objectif Σ_i log u_i ; budgets dépensés et marché soldé sont vrais à
chaque tour, seule la condition MBB est approchée.

Arrêt sur les utilités : la variation relative des utilités d'un tour à
l'autre passe sous tol, alors que l'écart MBB max_i (1 − u_i / max_j(v_ij/p_j))
est sous √tol. Aux tours 2^k (k ≥ 4) et à l'arrêt, on tente de retrouver
l'équilibre rationnel exact à partir des offres courantes (pf/rounding.py).
"""

import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from loguru import logger

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import PF_MAX_ITERATIONS, PF_TOLERANCE
from src.core.errors import SolverFailure
from src.core.model import Allocation, Instance
from src.pf.rounding import exact_equilibrium
from src.pf.solution import PFSolution
from src.pf.two_bidder import solve_pf_two_bidder
from src.pf.two_item import solve_pf_two_item

FIRST_EXACT_ATTEMPT = 16


def solve_pf(inst: Instance, tol: float = PF_TOLERANCE,
             max_iterations: int = PF_MAX_ITERATIONS,
             item_order: Optional[Sequence[int]] = None,
             exact_finish: bool = True) -> PFSolution:
    """
    Calcule l'allocation PF : exacte dès que l'équilibre rationnel est retrouvé,
    flottante sinon.

    Args:
        inst: instance quelconque
        tol: variation relative des utilités tolérée entre deux tours
        max_iterations: budget d'itérations
        item_order: permutation des objets utilisée pendant le calcul
                    (le résultat est toujours exprimé dans l'ordre d'origine)
        exact_finish: tente le passage à l'équilibre exact

    Returns:
        PFSolution: exacte (exact=True) ou flottante (exact=False, residual = écart MBB)

    Raises:
        SolverFailure: si ni l'équilibre exact ni l'arrêt sur les utilités
                       ne sont atteints dans le budget d'itérations
    """
    order = list(item_order) if item_order is not None else list(range(inst.m))
    if sorted(order) != list(range(inst.m)):
        raise ValueError("item_order must be a permutation of the items")
    values = inst.as_array()[:, order]
    bids = values.copy()
    mbb_tolerance = math.sqrt(tol)

    def exact_from(current_bids: np.ndarray, iteration: int) -> Optional[PFSolution]:
        if not exact_finish:
            return None
        spend = np.zeros_like(current_bids)
        spend[:, order] = current_bids
        return exact_equilibrium(inst, spend, iteration)

    residual = float("inf")
    previous = None
    converged = False
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        prices = bids.sum(axis=0)
        sold = prices > 0
        shares = np.zeros_like(bids)
        shares[:, sold] = bids[:, sold] / prices[sold]
        utilities = (values * shares).sum(axis=1)
        bang = np.zeros_like(values)
        bang[:, sold] = values[:, sold] / prices[sold]
        residual = float(np.max(1.0 - utilities / bang.max(axis=1)))
        step = float("inf") if previous is None else float(np.max(np.abs(utilities - previous) / utilities))
        converged = residual <= tol or (step <= tol and residual <= mbb_tolerance)
        if converged or (iteration >= FIRST_EXACT_ATTEMPT and (iteration & (iteration - 1)) == 0):
            solution = exact_from(bids, iteration)
            if solution is not None:
                logger.debug(f"Solveur PF : équilibre exact en {iteration} itérations")
                return solution
        if converged:
            break
        previous = utilities
        bids = values * shares / utilities[:, None]

    if not converged:
        solution = exact_from(bids, iteration)
        if solution is not None:
            return solution
        logger.error(f"Solveur PF : pas de convergence ({iteration} itérations, résidu {residual:.3e})")
        raise SolverFailure(residual, iteration)

    # retour à l'ordre d'origine des objets
    restored_shares = np.zeros_like(shares)
    restored_prices = np.zeros(inst.m)
    restored_shares[:, order] = shares
    restored_prices[order] = prices
    logger.debug(f"Solveur PF : convergence en {iteration} itérations (résidu {residual:.2e})")
    return PFSolution(
        allocation=Allocation.from_rows(restored_shares.tolist()),
        prices=tuple(float(p) for p in restored_prices),
        utilities=tuple(float(u) for u in utilities),
        exact=False,
        residual=max(residual, 0.0),
        iterations=iteration,
    )


def _single_bidder(inst: Instance) -> PFSolution:
    row = inst.row(0)
    shares = [Fraction(1) if v > 0 else Fraction(0) for v in row]
    return PFSolution(Allocation.from_rows([shares]), tuple(row), (Fraction(1),))


def _single_item(inst: Instance) -> PFSolution:
    share = Fraction(1, inst.n)
    return PFSolution(
        Allocation.from_rows([[share] for _ in range(inst.n)]),
        (Fraction(inst.n),),
        tuple(share for _ in range(inst.n)),
    )


def reference_pf(inst: Instance) -> PFSolution:
    """Solution PF de référence : formules exactes quand n ≤ 2 ou m ≤ 2, solveur itératif sinon."""
    if inst.n == 1:
        return _single_bidder(inst)
    if inst.m == 1:
        return _single_item(inst)
    if inst.n == 2:
        return solve_pf_two_bidder(inst)
    if inst.m == 2:
        return solve_pf_two_item(inst)[1]
    return solve_pf(inst)
