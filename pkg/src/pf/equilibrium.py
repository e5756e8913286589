"""Vérification des conditions d'équilibre de marché d'une solution PF."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.core.errors import DimensionMismatch
from src.core.model import Instance
from src.core.rational import Number
from src.pf.solution import PFSolution

CHECKS = ("budget_total", "spending", "mbb", "clearing")


@dataclass(frozen=True)
class Violation:
    """Une condition d'équilibre violée, avec son ampleur."""

    check: str
    magnitude: Number
    bidder: Optional[int] = None
    item: Optional[int] = None

    def describe(self) -> str:
        where = []
        if self.bidder is not None:
            where.append(f"bidder {self.bidder}")
        if self.item is not None:
            where.append(f"item {self.item}")
        location = f" ({', '.join(where)})" if where else ""
        return f"{self.check}{location}: {float(self.magnitude):.3e}"


@dataclass(frozen=True)
class EquilibriumReport:
    violations: Tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed(self, check: str) -> List[Violation]:
        return [v for v in self.violations if v.check == check]


def verify_equilibrium(inst: Instance, sol: PFSolution, tol: float = 0) -> EquilibriumReport:
    """
    Contrôle les quatre conditions d'une solution PF à tol près.

    - budget_total : Σ_j p_j = n
    - spending : chaque enchérisseur dépense exactement 1
    - mbb : un enchérisseur ne dépense que sur ses objets de meilleur rapport
      valeur/prix (l'ampleur est la dépense pondérée par l'écart relatif)
    - clearing : tout objet de prix positif est entièrement alloué

    Avec tol = 0 et des valeurs rationnelles, les contrôles sont exacts.
    """
    x = sol.allocation
    if (x.n, x.m) != (inst.n, inst.m) or len(sol.prices) != inst.m:
        raise DimensionMismatch("solution and instance shapes differ")
    prices = sol.prices
    violations = []

    gap = abs(sum(prices) - inst.n)
    if gap > tol:
        violations.append(Violation("budget_total", gap))

    for i in range(inst.n):
        row, shares = inst.row(i), x.row(i)
        spent = sum(p * s for p, s in zip(prices, shares))
        if abs(spent - 1) > tol:
            violations.append(Violation("spending", abs(spent - 1), bidder=i))

        priced = [j for j in range(inst.m) if prices[j] > 0]
        for j in range(inst.m):
            if prices[j] <= 0 and row[j] > 0:
                violations.append(Violation("mbb", row[j], bidder=i, item=j))
        if not priced:
            continue
        best = max(row[j] / prices[j] for j in priced)
        for j in priced:
            if shares[j] > 0:
                misspent = shares[j] * prices[j] * (best - row[j] / prices[j]) / best
                if misspent > tol:
                    violations.append(Violation("mbb", misspent, bidder=i, item=j))

    for j, total in enumerate(x.column_sums()):
        if prices[j] > 0 and abs(total - 1) > tol:
            violations.append(Violation("clearing", abs(total - 1), item=j))

    return EquilibriumReport(tuple(violations))
