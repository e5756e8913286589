"""
Mécanismes véridiques approchant l'allocation PF quand il n'y a que deux objets.

- si_mechanism : n enchérisseurs, chacun reçoit une fraction d'un seul objet.
- two_bidder_two_item : 2 enchérisseurs, garantie 2(√2−1).
- three_bidder_two_item : 3 enchérisseurs, garantie (12−√12)/11.

Toutes les valeurs "v" sont des valeurs de l'objet du haut quand celui du bas
vaut 1 (voir src.pf.two_item).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from loguru import logger

from src.core.errors import ShapeError
from src.core.model import Allocation, Instance, MechanismResult, evaluate
from src.pf.solution import PFSolution
from src.pf.two_item import TwoItemPF, solve_pf_two_item


@dataclass(frozen=True)
class TwoItemSchedule:
    """
    Parts de R_b en fonction de sa valeur v : t(v) = α − β/v² du haut et
    b(v) = γ/v − δ du bas. La condition du premier ordre de véracité impose
    γ = 2β. Le domaine de validité est donné par des bornes sur v², ce qui
    évite les racines irrationnelles (√12).
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: Fraction
    lower_sq: Fraction
    upper_sq: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta", "lower_sq"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.upper_sq is not None:
            object.__setattr__(self, "upper_sq", Fraction(self.upper_sq))
        if self.gamma != 2 * self.beta:
            raise ValueError("a truthful schedule needs gamma = 2 * beta")

    def top(self, v: Fraction) -> Fraction:
        return self.alpha - self.beta / (v * v)

    def bottom(self, v: Fraction) -> Fraction:
        return self.gamma / v - self.delta

    def utility(self, bid: Fraction, true_value: Fraction) -> Fraction:
        """Utilité (haut à true_value, bas à 1) de R_b quand elle annonce `bid`."""
        return self.top(bid) * true_value + self.bottom(bid)

    def contains(self, v: Fraction) -> bool:
        square = v * v
        return v > 0 and square >= self.lower_sq and (self.upper_sq is None or square <= self.upper_sq)

    def rho(self, v: Fraction, n: int) -> Fraction:
        """Part de l'utilité PF ((v+1)/n) obtenue par R_b."""
        return self.utility(v, v) / ((v + 1) / n)

    def top_restriction(self, v: Fraction) -> Fraction:
        """(2α−1)v − δ : doit être ≤ 0 pour que l'enchérisseur Top soit servi."""
        return (2 * self.alpha - 1) * v - self.delta

    def bottom_restriction(self, v: Fraction) -> Fraction:
        """αv² − (2δ+1)v + 3β : doit être ≤ 0 pour que l'enchérisseur Bottom soit servi."""
        return self.alpha * v * v - (2 * self.delta + 1) * v + 3 * self.beta


# t(v) = 1/2 − 1/(2v²), b(v) = 1/v pour v > 1
TWO_BIDDER_SCHEDULE = TwoItemSchedule(Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(0), lower_sq=Fraction(1))
# R_b au milieu de trois enchérisseurs, v ∈ [1, 2)
THREE_BIDDER_MIDDLE_SCHEDULE = TwoItemSchedule(
    Fraction(3, 5), Fraction(2, 5), Fraction(4, 5), Fraction(2, 5), lower_sq=Fraction(1), upper_sq=Fraction(4)
)
# R_b en bas de trois enchérisseurs, v ∈ [2, √12]
THREE_BIDDER_BOTTOM_SCHEDULE = TwoItemSchedule(
    Fraction(1, 4), Fraction(1), Fraction(2), Fraction(0), lower_sq=Fraction(4), upper_sq=Fraction(12)
)


def _require_shape(inst: Instance, mechanism: str, n: Optional[int], m: int) -> None:
    if inst.m != m or (n is not None and inst.n != n):
        wanted = f"n={n} and m={m}" if n is not None else f"m={m}"
        raise ShapeError(f"{mechanism} requires {wanted} (got n={inst.n}, m={inst.m})")


def _empty_shares(n: int) -> List[List[Fraction]]:
    return [[Fraction(0), Fraction(0)] for _ in range(n)]


def si_mechanism(inst: Instance) -> MechanismResult:
    """
    Mécanisme "Single Item" pour deux objets.

    Sans R_b, l'allocation PF est renvoyée telle quelle. Sinon R_b partage
    l'objet du haut à parts égales avec les k−1 Top (1/k chacun) ou celui du
    bas avec les n−k Bottom (1/(n−k+1) chacun), selon ce qu'elle préfère
    (le haut en cas d'égalité). Tous les autres sont réduits au même ρ.
    """
    _require_shape(inst, "si", None, 2)
    structure, pf = solve_pf_two_item(inst)
    if not structure.has_ratio_bidder:
        return evaluate(inst, pf.allocation, pf, "si")

    n, k, v = inst.n, structure.position, structure.v
    top, bottom = structure.top_item, structure.bottom_item
    top_option = v / k
    bottom_option = Fraction(1, n - k + 1)
    shares = _empty_shares(n)
    if top_option >= bottom_option:
        rho = top_option / ((v + 1) / n)
        shares[structure.ratio_bidder][top] = Fraction(1, k)
    else:
        rho = bottom_option / ((v + 1) / n)
        shares[structure.ratio_bidder][bottom] = bottom_option

    for bidder in structure.order:
        if bidder == structure.ratio_bidder:
            continue
        if structure.role(bidder) == "top":
            shares[bidder][top] = rho / structure.top_price
        else:
            shares[bidder][bottom] = rho / structure.bottom_price

    logger.debug(f"SI : R_b = {structure.ratio_bidder} (k={k}, v={v}), ρ = {rho}")
    return evaluate(inst, Allocation.from_rows(shares), pf, "si")


def _reoriented(inst: Instance, swap_when) -> Tuple[TwoItemPF, PFSolution]:
    """Structure PF, recalculée avec les objets échangés si `swap_when` l'exige."""
    structure, pf = solve_pf_two_item(inst, top_item=0)
    if structure.has_ratio_bidder and swap_when(structure):
        structure, pf = solve_pf_two_item(inst, top_item=1)
    return structure, pf


def two_bidder_two_item(inst: Instance) -> MechanismResult:
    """
    Mécanisme amélioré pour 2 enchérisseurs et 2 objets.

    Les objets sont orientés pour que R_b (B) soit en seconde position avec
    v > 1 ; B reçoit alors b(v) = 1/v du bas et t(v) = 1/2 − 1/(2v²) du haut,
    A le reste du haut. Le reste du bas est jeté.
    """
    _require_shape(inst, "two2", 2, 2)
    structure, pf = _reoriented(inst, lambda s: s.position == 1)
    if not structure.has_ratio_bidder:
        return evaluate(inst, pf.allocation, pf, "two2")

    v = structure.v
    top, bottom = structure.top_item, structure.bottom_item
    ratio_bidder = structure.ratio_bidder
    other = 1 - ratio_bidder
    shares = _empty_shares(2)
    shares[ratio_bidder][top] = TWO_BIDDER_SCHEDULE.top(v)
    shares[ratio_bidder][bottom] = TWO_BIDDER_SCHEDULE.bottom(v)
    shares[other][top] = 1 - TWO_BIDDER_SCHEDULE.top(v)
    logger.debug(f"2 enchérisseurs, 2 objets : R_b = {ratio_bidder}, v = {v}")
    return evaluate(inst, Allocation.from_rows(shares), pf, "two2")


def bottom_ratio_shares(v: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    """
    Parts (haut, bas) de R_b placée en bas, et part du haut de chacun des deux
    autres, selon v : v ≤ 2, 2 ≤ v ≤ √12, v > √12.
    """
    if v <= 2:
        return Fraction(0), Fraction(1), Fraction(1, 2)
    if v * v <= 12:
        schedule = THREE_BIDDER_BOTTOM_SCHEDULE
        return schedule.top(v), schedule.bottom(v), Fraction(1, 4) + 1 / (v * v)
    third = Fraction(1, 3)
    return third, Fraction(0), third


def three_bidder_two_item(inst: Instance) -> MechanismResult:
    """
    Mécanisme amélioré pour 3 enchérisseurs et 2 objets.

    Orientation : R_b au milieu avec v ∈ [1, 2), ou R_b en bas avec v > 2.
    Un R_b au milieu avec v < 1 ou en haut est ramené à ces cas en échangeant
    les deux objets.

    L'échange rend le mécanisme manipulable au voisinage de v = 1 : le
    milieu reçoit t(1) = 1/5 du haut et b(1) = 2/5 du bas, donc un R_b
    avec v juste sous 1 gagne à annoncer v = 1 (registre : truthful=False).
    """
    _require_shape(inst, "three2", 3, 2)
    structure, pf = _reoriented(
        inst, lambda s: s.position == 1 or (s.position == 2 and s.v < 1)
    )
    if not structure.has_ratio_bidder:
        return evaluate(inst, pf.allocation, pf, "three2")

    v = structure.v
    top, bottom = structure.top_item, structure.bottom_item
    first, second, third = structure.order
    shares = _empty_shares(3)
    if structure.position == 2:
        schedule = THREE_BIDDER_MIDDLE_SCHEDULE
        rho = schedule.rho(v, 3)
        shares[second][top] = schedule.top(v)
        shares[second][bottom] = schedule.bottom(v)
        shares[first][top] = rho / structure.top_price
        shares[third][bottom] = rho / structure.bottom_price
    else:
        t, b, others = bottom_ratio_shares(v)
        shares[third][top] = t
        shares[third][bottom] = b
        shares[first][top] = others
        shares[second][top] = others

    logger.debug(f"3 enchérisseurs, 2 objets : R_b en position {structure.position}, v = {v}")
    return evaluate(inst, Allocation.from_rows(shares), pf, "three2")
