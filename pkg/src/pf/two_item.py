"""
Solveur PF exact pour deux objets (t = haut, b = bas).

Chaque enchérisseur est ramené à une valeur 1 pour l'objet du bas ; sa valeur
pour l'objet du haut devient v_i = v_it / v_ib (infinie si v_ib = 0, gardée
sous forme de paire projective). Triés par v_i décroissant, les premiers
enchérisseurs (Top) ne prennent que l'objet du haut, les derniers (Bottom)
que celui du bas, et au plus un enchérisseur R_b, en position k, reçoit des
parts des deux objets. Ses valeurs fixent le rapport des prix :

    x   = ((n−k+1)·v − (k−1)) / (v+1)      (dépense de R_b sur le haut)
    p_t = k−1+x,   p_b = n−k+1−x

Comme les lignes sont normalisées (v_it + v_ib = 1), x s'écrit
(n−k+1)·v_it − (k−1)·v_ib, sans aucune division. x décroît d'au moins 1
d'une position à la suivante : la recherche dichotomique cherche la dernière
position où x > 0.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional, Tuple

from loguru import logger

from src.core.errors import ShapeError
from src.core.model import Allocation, Instance
from src.pf.solution import PFSolution

TOP = "top"
BOTTOM = "bottom"
RATIO = "ratio"


@dataclass(frozen=True)
class TwoItemPF:
    """Structure de l'équilibre PF à deux objets."""

    top_item: int
    bottom_item: int
    order: Tuple[int, ...]
    position: Optional[int]
    ratio_bidder: Optional[int]
    v: Optional[Fraction]
    x: Optional[Fraction]
    top_price: Fraction
    bottom_price: Fraction
    top_count: int

    def role(self, bidder: int) -> str:
        """Rôle d'un enchérisseur : "top", "bottom" ou "ratio" (R_b)."""
        if bidder == self.ratio_bidder:
            return RATIO
        rank = self.order.index(bidder)
        return TOP if rank < self.top_count else BOTTOM

    @property
    def has_ratio_bidder(self) -> bool:
        return self.ratio_bidder is not None


def scaled_top_value(inst: Instance, bidder: int, top_item: int = 0) -> Optional[Fraction]:
    """Valeur de l'objet du haut quand celui du bas vaut 1 (None = infinie)."""
    top, bottom = inst.row(bidder)[top_item], inst.row(bidder)[1 - top_item]
    return None if bottom == 0 else top / bottom


def _bidder_order(inst: Instance, top_item: int) -> Tuple[int, ...]:
    rows = inst.valuations
    bottom_item = 1 - top_item

    def compare(i: int, k: int) -> int:
        left = rows[i][top_item] * rows[k][bottom_item]
        right = rows[k][top_item] * rows[i][bottom_item]
        return -1 if left > right else (1 if left < right else 0)

    return tuple(sorted(range(inst.n), key=cmp_to_key(compare)))


def _top_spend(inst: Instance, order: Tuple[int, ...], position: int, top_item: int) -> Fraction:
    """x(k) = (n−k+1)·v_t − (k−1)·v_b pour l'enchérisseur en position k (base 1)."""
    row = inst.row(order[position - 1])
    n = inst.n
    return (n - position + 1) * row[top_item] - (position - 1) * row[1 - top_item]


def solve_pf_two_item(inst: Instance, top_item: int = 0) -> Tuple[TwoItemPF, PFSolution]:
    """
    Calcule exactement l'équilibre PF d'une instance à deux objets.

    Args:
        inst: instance avec m = 2
        top_item: indice de l'objet jouant le rôle du haut (0 ou 1)

    Returns:
        (TwoItemPF, PFSolution): structure de l'équilibre et solution rationnelle

    Raises:
        ShapeError: si l'instance n'a pas exactement deux objets
    """
    if inst.m != 2:
        raise ShapeError(f"two-item PF solver requires m=2 (got m={inst.m})")
    if top_item not in (0, 1):
        raise ValueError("top_item must be 0 or 1")
    n = inst.n
    bottom_item = 1 - top_item
    order = _bidder_order(inst, top_item)

    # dernière position k avec x(k) > 0 (0 si personne ne veut l'objet du haut)
    low, high = 0, n
    while low < high:
        middle = (low + high + 1) // 2
        if _top_spend(inst, order, middle, top_item) > 0:
            low = middle
        else:
            high = middle - 1
    last = low

    position = ratio_bidder = v = x = None
    if last > 0 and _top_spend(inst, order, last, top_item) < 1:
        position = last
        ratio_bidder = order[last - 1]
        x = _top_spend(inst, order, last, top_item)
        row = inst.row(ratio_bidder)
        v = row[top_item] / row[bottom_item]
        top_count = last - 1
        top_price = Fraction(last - 1) + x
        bottom_price = Fraction(n - last + 1) - x
    else:
        top_count = last
        top_price = Fraction(last)
        bottom_price = Fraction(n - last)

    shares = [[Fraction(0), Fraction(0)] for _ in range(n)]
    for rank, bidder in enumerate(order):
        if bidder == ratio_bidder:
            shares[bidder][top_item] = x / top_price
            shares[bidder][bottom_item] = (1 - x) / bottom_price
        elif rank < top_count:
            shares[bidder][top_item] = 1 / top_price
        else:
            shares[bidder][bottom_item] = 1 / bottom_price

    structure = TwoItemPF(
        top_item=top_item,
        bottom_item=bottom_item,
        order=order,
        position=position,
        ratio_bidder=ratio_bidder,
        v=v,
        x=x,
        top_price=top_price,
        bottom_price=bottom_price,
        top_count=top_count,
    )
    prices = [Fraction(0), Fraction(0)]
    prices[top_item] = top_price
    prices[bottom_item] = bottom_price
    solution = PFSolution(
        allocation=Allocation.from_rows(shares),
        prices=tuple(prices),
        utilities=tuple(inst.utility(i, shares[i]) for i in range(n)),
        exact=True,
    )
    if ratio_bidder is None:
        logger.debug(f"PF à deux objets : prix entiers ({top_price}, {bottom_price})")
    else:
        logger.debug(f"PF à deux objets : R_b = {ratio_bidder} en position {position}, v = {v}")
    return structure, solution
