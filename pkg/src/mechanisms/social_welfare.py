"""
Mécanismes à deux enchérisseurs pour le bien-être social (SW).

- swap_dictatorial : chaque objet est coupé en deux moitiés ; sur la première
  copie A choisit son meilleur lot de ⌊m/2⌋ objets et B prend le reste, sur la
  seconde les rôles sont inversés. C'est l'espérance exacte de la version
  aléatoire (dictateur tiré à pile ou face).
- partial_allocation (PA) : A reçoit la fraction u_B de chaque part de son lot
  PF, B la fraction u_A du sien.
- hybrid : swap_dictatorial sur une moitié de chaque objet, PA sur l'autre.
"""

from fractions import Fraction
from typing import Optional, Sequence, Tuple

from loguru import logger

from src.core.errors import ShapeError
from src.core.model import Allocation, Instance, MechanismResult, evaluate
from src.core.rational import Number
from src.pf.solution import PFSolution
from src.pf.solver import reference_pf
from src.pf.two_bidder import solve_pf_two_bidder

HALF = Fraction(1, 2)


def _require_two_bidders(inst: Instance, mechanism: str) -> None:
    if inst.n != 2:
        raise ShapeError(f"{mechanism} requires n=2 (got n={inst.n})")


def best_bundle(values: Sequence[Number], limit: int) -> Tuple[int, ...]:
    """Les `limit` objets de plus forte valeur (égalités : plus petit indice d'abord)."""
    if not 0 <= limit <= len(values):
        raise ValueError(f"limit {limit} is outside [0, {len(values)}]")
    ranked = sorted(range(len(values)), key=lambda j: (-values[j], j))
    return tuple(sorted(ranked[:limit]))


def dictator_game(inst: Instance, dictator: int) -> Allocation:
    """Le dictateur prend son meilleur lot de ⌊m/2⌋ objets entiers, l'autre le reste."""
    _require_two_bidders(inst, "dictator game")
    chosen = set(best_bundle(inst.row(dictator), inst.m // 2))
    shares = [[Fraction(0)] * inst.m for _ in range(2)]
    for j in range(inst.m):
        owner = dictator if j in chosen else 1 - dictator
        shares[owner][j] = Fraction(1)
    return Allocation.from_rows(shares)


def _swap_allocation(inst: Instance) -> Allocation:
    return dictator_game(inst, 0).scaled(HALF) + dictator_game(inst, 1).scaled(HALF)


def _partial_allocation(pf: PFSolution) -> Allocation:
    u_a, u_b = pf.utilities
    own_a, own_b = pf.allocation.row(0), pf.allocation.row(1)
    return Allocation.from_rows([[s * u_b for s in own_a], [s * u_a for s in own_b]])


def swap_dictatorial(inst: Instance, pf: Optional[PFSolution] = None) -> MechanismResult:
    """Version déterministe du mécanisme dictatorial à échange."""
    _require_two_bidders(inst, "swap")
    pf = pf or solve_pf_two_bidder(inst)
    return evaluate(inst, _swap_allocation(inst), pf, "swap")


def partial_allocation(inst: Instance, pf: Optional[PFSolution] = None) -> MechanismResult:
    """
    Mécanisme PA : chaque lot PF est réduit par l'utilité PF de l'autre.

    On obtient exactement ρ_A = u_B, ρ_B = u_A et SW = 2·u_A·u_B.
    """
    _require_two_bidders(inst, "pa")
    pf = pf or solve_pf_two_bidder(inst)
    return evaluate(inst, _partial_allocation(pf), pf, "pa")


def hybrid(inst: Instance, pf: Optional[PFSolution] = None) -> MechanismResult:
    """Moitié dictatoriale à échange, moitié PA."""
    _require_two_bidders(inst, "hybrid")
    pf = pf or solve_pf_two_bidder(inst)
    allocation = _swap_allocation(inst).scaled(HALF) + _partial_allocation(pf).scaled(HALF)
    result = evaluate(inst, allocation, pf, "hybrid")
    logger.debug(f"Hybride : SW = {result.sw}, SW_PF = {sum(pf.utilities)}")
    return result


def hybrid_pf_ratio_floor(u_a: Fraction, u_b: Fraction) -> Fraction:
    """
    Plancher de SW(hybride)/SW(PF) quand la moitié dictatoriale n'apporte que
    son SW garanti de 1 : (1/2 + u_A·u_B)/(u_A + u_B), minimal (2/3) en (1/2, 1).
    """
    return (HALF + u_a * u_b) / (u_a + u_b)


def pf_mechanism(inst: Instance) -> MechanismResult:
    """L'allocation PF elle-même (ρ = 1), exacte quand c'est possible."""
    pf = reference_pf(inst)
    return evaluate(inst, pf.allocation, pf, "pf")
