"""
Registre des mécanismes : nom, forme acceptée, famille d'instances par défaut
et garanties vérifiées par les campagnes (`verify`, `bench`).

Chaque garantie porte sur une métrique mesurée à chaque essai ; la campagne
compare le minimum observé au plancher (exactement quand c'est possible).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from src.core.errors import ShapeError
from src.core.model import Allocation, Instance, MechanismResult
from src.core.rational import (
    HYBRID_SW_BOUND,
    PF_SW_BOUND,
    THREE_BIDDER_BOUND,
    TWO_BIDDER_BOUND,
    Surd,
)
from src.mechanisms.social_welfare import hybrid, partial_allocation, pf_mechanism, swap_dictatorial
from src.mechanisms.two_item import si_mechanism, three_bidder_two_item, two_bidder_two_item
from src.sdm.mechanism import sdm_allocation, sdm_mechanism

Bound = Union[Fraction, Surd]


@dataclass(frozen=True)
class Guarantee:
    """Plancher d'une métrique ; `bound` peut dépendre de n (garantie de SI)."""

    metric: str
    bound: Union[Bound, Callable[[int], Bound]]
    label: str

    def floor(self, n: int) -> Bound:
        return self.bound(n) if callable(self.bound) else self.bound


@dataclass(frozen=True)
class MechanismEntry:
    name: str
    run: Callable[[Instance], MechanismResult]
    bidders: Optional[int]
    items: Optional[int]
    default_shape: Tuple[int, int]
    family: str
    guarantees: Tuple[Guarantee, ...] = ()
    description: str = ""
    allocate: Optional[Callable[[Instance], Allocation]] = field(default=None, compare=False)
    truthful: bool = True

    def accepts(self, n: int, m: int) -> bool:
        return (self.bidders is None or n == self.bidders) and (self.items is None or m == self.items)

    def constraint(self) -> str:
        parts = []
        if self.bidders is not None:
            parts.append(f"n={self.bidders}")
        if self.items is not None:
            parts.append(f"m={self.items}")
        return " and ".join(parts) if parts else "any shape"

    def check_shape(self, n: int, m: int) -> None:
        if not self.accepts(n, m):
            raise ShapeError(f"{self.name} requires {self.constraint()} (got n={n}, m={m})")

    def allocation(self, inst: Instance) -> Allocation:
        """Allocation seule (utilisée par la recherche de déviations)."""
        if self.allocate is not None:
            return self.allocate(inst)
        return self.run(inst).allocation


def _si_floor(n: int) -> Fraction:
    return Fraction(n, n + 1)


MECHANISMS: Dict[str, MechanismEntry] = {
    entry.name: entry
    for entry in (
        MechanismEntry(
            "pf", pf_mechanism, 2, None, (2, 4), "simplex",
            (Guarantee("sw_ratio", PF_SW_BOUND, "SW(PF)/SW* >= (2*sqrt3+3)/(4*sqrt3)"),),
            "allocation PF exacte (référence, non véridique)",
            truthful=False,
        ),
        MechanismEntry(
            "pa", partial_allocation, 2, None, (2, 3), "simplex",
            (Guarantee("rho", Fraction(1, 2), "rho >= 1/2"),),
            "Partial Allocation",
        ),
        MechanismEntry(
            "swap", swap_dictatorial, 2, None, (2, 4), "simplex",
            (
                Guarantee("min_utility", Fraction(1, 2), "each utility >= 1/2"),
                Guarantee("sw_ratio", Fraction(1, 2), "SW/SW* >= 1/2"),
            ),
            "dictateur à échange (version déterministe)",
        ),
        MechanismEntry(
            "hybrid", hybrid, 2, None, (2, 3), "simplex",
            (
                Guarantee("sw_pf_ratio", Fraction(2, 3), "SW/SW(PF) >= 2/3"),
                Guarantee("sw_ratio", HYBRID_SW_BOUND, "SW/SW* >= 0.622"),
            ),
            "moitié dictateur à échange, moitié PA",
        ),
        MechanismEntry(
            "si", si_mechanism, None, 2, (4, 2), "simplex",
            (Guarantee("rho", _si_floor, "rho >= n/(n+1)"),),
            "Single Item, deux objets",
        ),
        MechanismEntry(
            "two2", two_bidder_two_item, 2, 2, (2, 2), "simplex",
            (Guarantee("rho", TWO_BIDDER_BOUND, "rho >= 2(sqrt2-1)"),),
            "2 enchérisseurs, 2 objets",
        ),
        MechanismEntry(
            "three2", three_bidder_two_item, 3, 2, (3, 2), "simplex",
            (Guarantee("rho", THREE_BIDDER_BOUND, "rho >= (12-sqrt12)/11"),),
            "3 enchérisseurs, 2 objets (manipulable près de v = 1, où les objets sont échangés)",
            truthful=False,
        ),
        MechanismEntry(
            "sdm", sdm_mechanism, None, None, (12, 3), "strong-demand",
            (
                Guarantee("rho_margin", Fraction(0), "rho >= min p*/ceil(p*)"),
                Guarantee("price_margin", Fraction(0), "q <= f*p*"),
            ),
            "Strong Demand Matching",
            allocate=sdm_allocation,
        ),
    )
}


def mechanism_names() -> List[str]:
    return list(MECHANISMS)


def get_mechanism(name: str) -> MechanismEntry:
    """
    Raises:
        KeyError: mécanisme inconnu
    """
    try:
        return MECHANISMS[name]
    except KeyError:
        raise KeyError(f"unknown mechanism {name!r} (choose from {', '.join(MECHANISMS)})") from None


def run_mechanism(name: str, inst: Instance) -> MechanismResult:
    """Exécute un mécanisme après contrôle de la forme de l'instance."""
    entry = get_mechanism(name)
    entry.check_shape(inst.n, inst.m)
    return entry.run(inst)
