"""
Solveur PF exact pour deux enchérisseurs (parcours de la frontière de Pareto).

Les objets sont triés par rapport v_A/v_B décroissant : toute allocation
Pareto-optimale donne à A un préfixe de cet ordre et à B le suffixe, avec au
plus un objet partagé. On maximise u_A·u_B sur chaque segment de la frontière
(une parabole concave en la part f de l'objet frontière), puis on garde le
meilleur segment. Tout est calculé en Fraction.
"""

from fractions import Fraction
from functools import cmp_to_key
from typing import List, Tuple

from loguru import logger

from src.core.errors import ShapeError
from src.core.model import Allocation, Instance, normalize
from src.core.rational import TIGHT_WELFARE_K
from src.pf.solution import PFSolution


def frontier_order(inst: Instance) -> List[int]:
    """
    Objets évalués par au moins un enchérisseur, triés par v_A/v_B décroissant.

    La comparaison se fait par produits croisés (un objet sans valeur pour B
    a un rapport infini). Les égalités conservent l'ordre des indices ; tout
    autre ordre des objets de même rapport donne les mêmes prix et utilités,
    seule la répartition entre ces objets peut changer.
    """
    a, b = inst.row(0), inst.row(1)

    def compare(j: int, k: int) -> int:
        left, right = a[j] * b[k], a[k] * b[j]
        return -1 if left > right else (1 if left < right else 0)

    valued = [j for j in range(inst.m) if a[j] > 0 or b[j] > 0]
    return sorted(valued, key=cmp_to_key(compare))


def _best_split(a0: Fraction, b0: Fraction, a: Fraction, b: Fraction) -> Fraction:
    """Part f ∈ [0,1] de l'objet frontière maximisant (a0 + f·a)(b0 + (1−f)·b)."""
    if a == 0:
        return Fraction(0)
    if b == 0:
        return Fraction(1)
    f = (a * (b0 + b) - b * a0) / (2 * a * b)
    return min(Fraction(1), max(Fraction(0), f))


def solve_pf_two_bidder(inst: Instance) -> PFSolution:
    """
    Calcule exactement l'allocation PF de deux enchérisseurs.

    Args:
        inst: instance avec n = 2

    Returns:
        PFSolution: allocation, prix et utilités rationnels

    Raises:
        ShapeError: si l'instance n'a pas exactement deux enchérisseurs
    """
    if inst.n != 2:
        raise ShapeError(f"two-bidder PF solver requires n=2 (got n={inst.n})")
    a, b = inst.row(0), inst.row(1)
    order = frontier_order(inst)

    prefix_a = Fraction(0)
    suffix_b = sum((b[j] for j in order), Fraction(0))
    best: Tuple[Fraction, int, Fraction] = (Fraction(-1), 0, Fraction(0))
    for position, j in enumerate(order):
        suffix_b -= b[j]
        f = _best_split(prefix_a, suffix_b, a[j], b[j])
        product = (prefix_a + f * a[j]) * (suffix_b + (1 - f) * b[j])
        if product > best[0]:
            best = (product, position, f)
        prefix_a += a[j]

    _, boundary, split = best
    shares = [[Fraction(0)] * inst.m for _ in range(2)]
    for position, j in enumerate(order):
        if position < boundary:
            shares[0][j] = Fraction(1)
        elif position > boundary:
            shares[1][j] = Fraction(1)
        else:
            shares[0][j] = split
            shares[1][j] = 1 - split

    u_a = inst.utility(0, shares[0])
    u_b = inst.utility(1, shares[1])
    prices = []
    for j in range(inst.m):
        if shares[0][j] > 0:
            prices.append(a[j] / u_a)
        elif shares[1][j] > 0:
            prices.append(b[j] / u_b)
        else:
            prices.append(Fraction(0))

    logger.debug(f"PF à deux enchérisseurs : frontière en position {boundary}, part {split}")
    return PFSolution(
        allocation=Allocation.from_rows(shares),
        prices=tuple(prices),
        utilities=(u_a, u_b),
        exact=True,
    )


def tight_welfare_instance(precision: int = 10 ** 12) -> Instance:
    """
    Instance presque serrée pour la borne SW(x_PF)/SW(x*) ≥ (2√3+3)/(4√3).

    Avec k ≈ (1+√3)/2 : B = (1/2, (2−k)/(2k), (k−1)/k) et
    A = (k/2, k·(2−k)/(2k), 0). Les deux premiers objets ont le rapport k.
    """
    k = TIGHT_WELFARE_K.rational_approximation(precision)
    b2 = (2 - k) / (2 * k)
    b3 = (k - 1) / k
    a1 = k / 2
    a2 = k * b2
    return normalize([[a1, a2, 1 - a1 - a2], [1 - b2 - b3, b2, b3]])
