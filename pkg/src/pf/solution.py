"""Solution d'équilibre PF (allocation, prix, utilités)."""

from dataclasses import dataclass
from typing import Tuple

from src.core.model import Allocation
from src.core.rational import Number


@dataclass(frozen=True)
class PFSolution:
    """
    Allocation PF avec les prix d'équilibre du marché de Fisher (budgets unitaires).

    Seuls les prix et les utilités sont contractuels : quand plusieurs
    allocations PF existent, chaque solveur renvoie son choix déterministe.
    `exact` vaut True pour les solveurs rationnels (n=1, n=2, m=2).
    """

    allocation: Allocation
    prices: Tuple[Number, ...]
    utilities: Tuple[Number, ...]
    exact: bool = True
    residual: float = 0.0
    iterations: int = 0
