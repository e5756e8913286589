"""
Types du domaine : instance, allocation, résultat de mécanisme.

Une instance est une matrice n×m de valeurs rationnelles positives ou nulles,
chaque ligne (un enchérisseur) étant normalisée à une somme de 1. Une
allocation donne la fraction x_ij de l'objet j reçue par l'enchérisseur i ;
les restes non alloués sont simplement jetés (sommes de colonnes < 1).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import DegenerateBidder, DimensionMismatch, InvalidPFSolution
from src.core.rational import Number, RationalLike, parse_rational

if TYPE_CHECKING:
    from src.pf.solution import PFSolution

# Marge acceptée sur les allocations flottantes (solveur itératif)
FLOAT_SLACK = 1e-9

Matrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Instance:
    """Matrice de valuations normalisée (chaque ligne somme à 1)."""

    valuations: Matrix

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.valuations)
        object.__setattr__(self, "valuations", rows)
        if not rows or not rows[0]:
            raise ValueError("an instance needs at least one bidder and one item")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise DimensionMismatch(f"row {i} has {len(row)} entries, expected {width}")
            if any(v < 0 for v in row):
                raise ValueError(f"row {i} has a negative valuation")
            total = sum(row)
            if total == 0:
                raise DegenerateBidder(i)
            if total != 1:
                raise ValueError(f"row {i} sums to {total}, use normalize()")

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return len(self.valuations[0])

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.valuations[i]

    def utility(self, i: int, shares: Sequence[Number]) -> Number:
        """Valeur v_i(x) du lot `shares` pour l'enchérisseur i."""
        return sum(v * x for v, x in zip(self.valuations[i], shares))

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.valuations], dtype=float)

    def without_bidder(self, bidder: int) -> "Instance":
        return Instance(self.valuations[:bidder] + self.valuations[bidder + 1:])

    def with_bid(self, bidder: int, bid: Sequence[RationalLike]) -> "Instance":
        """Remplace la ligne d'un enchérisseur par une offre (renormalisée)."""
        rows = list(self.valuations)
        rows[bidder] = normalize([bid]).row(0)
        return Instance(tuple(rows))

    def permuted_items(self, order: Sequence[int]) -> "Instance":
        """Réordonne les colonnes : la colonne k du résultat est l'objet order[k]."""
        return Instance(tuple(tuple(row[j] for j in order) for row in self.valuations))


@dataclass(frozen=True)
class Allocation:
    """Fractions x_ij ∈ [0,1] avec Σ_i x_ij ≤ 1 pour chaque objet."""

    shares: Tuple[Tuple[Number, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.shares)
        object.__setattr__(self, "shares", rows)
        width = len(rows[0]) if rows else 0
        exact = all(isinstance(x, (Fraction, int)) for row in rows for x in row)
        slack = 0 if exact else FLOAT_SLACK
        for i, row in enumerate(rows):
            if len(row) != width:
                raise DimensionMismatch(f"allocation row {i} has {len(row)} entries, expected {width}")
            for j, x in enumerate(row):
                if x < -slack or x > 1 + slack:
                    raise ValueError(f"share x[{i}][{j}] = {x} is outside [0, 1]")
        for j, total in enumerate(self.column_sums()):
            if total > 1 + slack:
                raise ValueError(f"item {j} is over-allocated (total {total})")

    @classmethod
    def zeros(cls, n: int, m: int) -> "Allocation":
        return cls(tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Number]]) -> "Allocation":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def m(self) -> int:
        return len(self.shares[0]) if self.shares else 0

    def row(self, i: int) -> Tuple[Number, ...]:
        return self.shares[i]

    def column_sums(self) -> List[Number]:
        return [sum(row[j] for row in self.shares) for j in range(self.m)]

    def scaled(self, factor: Number) -> "Allocation":
        return Allocation(tuple(tuple(x * factor for x in row) for row in self.shares))

    def __add__(self, other: "Allocation") -> "Allocation":
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionMismatch("cannot add allocations of different shapes")
        return Allocation(tuple(
            tuple(a + b for a, b in zip(mine, theirs))
            for mine, theirs in zip(self.shares, other.shares)
        ))


@dataclass(frozen=True)
class MechanismResult:
    """Allocation produite par un mécanisme et ses mesures (ρ_i, ρ, SW)."""

    mechanism: str
    allocation: Allocation
    per_bidder_utility: Tuple[Number, ...]
    per_bidder_pf_fraction: Tuple[Number, ...]
    rho: Number
    sw: Number
    pf: Optional["PFSolution"] = field(default=None, compare=False, repr=False)


def normalize(raw: Sequence[Sequence[RationalLike]]) -> Instance:
    """
    Divise chaque ligne par sa somme, en arithmétique exacte.

    Args:
        raw: matrice n×m de valeurs positives ou nulles (entiers, Fraction,
             chaînes décimales ou "p/q")

    Returns:
        Instance: matrice dont chaque ligne somme exactement à 1

    Raises:
        DegenerateBidder: si une ligne est entièrement nulle
        DimensionMismatch: si les lignes n'ont pas toutes la même longueur
    """
    rows = [[parse_rational(v) for v in row] for row in raw]
    if not rows or not rows[0]:
        raise ValueError("an instance needs at least one bidder and one item")
    width = len(rows[0])
    normalized = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DimensionMismatch(f"row {i} has {len(row)} entries, expected {width}")
        if any(v < 0 for v in row):
            raise ValueError(f"row {i} has a negative valuation")
        total = sum(row)
        if total == 0:
            raise DegenerateBidder(i)
        normalized.append(tuple(v / total for v in row))
    return Instance(tuple(normalized))


def _check_shapes(inst: Instance, x: Allocation) -> None:
    if (inst.n, inst.m) != (x.n, x.m):
        raise DimensionMismatch(
            f"instance is {inst.n}x{inst.m} but allocation is {x.n}x{x.m}"
        )


def utilities(inst: Instance, x: Allocation) -> Tuple[Number, ...]:
    _check_shapes(inst, x)
    return tuple(inst.utility(i, x.row(i)) for i in range(inst.n))


def social_welfare(inst: Instance, x: Allocation) -> Number:
    """SW(x) = Σ_i Σ_j v_ij·x_ij."""
    return sum(utilities(inst, x))


def optimal_social_welfare(inst: Instance) -> Fraction:
    """SW(x*) : chaque objet va à l'enchérisseur qui l'évalue le plus."""
    return sum(max(inst.row(i)[j] for i in range(inst.n)) for j in range(inst.m))


def pf_fraction(inst: Instance, x: Allocation, pf: "PFSolution") -> Tuple[Tuple[Number, ...], Number]:
    """
    Calcule ρ_i = v_i(x)/v_i(x_PF) pour chaque enchérisseur et leur minimum ρ.

    Raises:
        InvalidPFSolution: si une utilité PF est nulle
        DimensionMismatch: si les dimensions ne correspondent pas
    """
    achieved = utilities(inst, x)
    if len(pf.utilities) != inst.n:
        raise DimensionMismatch("PF solution and instance disagree on the bidder count")
    fractions = []
    for i, (mine, reference) in enumerate(zip(achieved, pf.utilities)):
        if reference <= 0:
            raise InvalidPFSolution(f"bidder {i} has PF utility {reference}")
        fractions.append(mine / reference)
    return tuple(fractions), min(fractions)


def max_envy(inst: Instance, x: Allocation) -> Number:
    """Plus grande envie v_i(x_k) − v_i(x_i) ; une valeur ≤ 0 signifie sans envie."""
    _check_shapes(inst, x)
    worst: Number = Fraction(0)
    for i in range(inst.n):
        own = inst.utility(i, x.row(i))
        for k in range(inst.n):
            if k != i:
                worst = max(worst, inst.utility(i, x.row(k)) - own)
    return worst


def evaluate(inst: Instance, x: Allocation, pf: "PFSolution", mechanism: str) -> MechanismResult:
    """Construit le MechanismResult d'une allocation par rapport à la solution PF."""
    fractions, rho = pf_fraction(inst, x, pf)
    achieved = utilities(inst, x)
    return MechanismResult(
        mechanism=mechanism,
        allocation=x,
        per_bidder_utility=achieved,
        per_bidder_pf_fraction=fractions,
        rho=rho,
        sw=sum(achieved),
        pf=pf,
    )
