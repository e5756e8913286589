"""
Recherche de déviations profitables (falsification de la véracité).

Pour chaque enchérisseur et chaque fausse offre d'une grille, on relance le
mécanisme avec les autres offres inchangées et on évalue le lot obtenu avec
la VRAIE valuation du menteur. Un gain strictement positif prouve que le
mécanisme n'est pas véridique ; l'absence de gain ne prouve rien au-delà de
la grille explorée.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import DEVIATION_FACTORS
from src.core.model import Allocation, Instance, MechanismResult, normalize
from src.core.rational import Number

Bid = Tuple[Fraction, ...]
Mechanism = Callable[[Instance], Union[MechanismResult, Allocation]]


@dataclass(frozen=True)
class TruthfulnessReport:
    """Plus grand gain trouvé (≤ 0 : aucune déviation profitable sur la grille)."""

    max_gain: Number
    bidder: Optional[int]
    bid: Optional[Bid]
    deviations_checked: int

    @property
    def truthful_on_grid(self) -> bool:
        return self.max_gain <= 0


def _allocation_of(output: Union[MechanismResult, Allocation]) -> Allocation:
    return output if isinstance(output, Allocation) else output.allocation


def deviation_bids(row: Sequence[Fraction], factors: Sequence[Fraction] = DEVIATION_FACTORS) -> List[Bid]:
    """
    Grille de fausses offres pour une ligne de valuations.

    - chaque coordonnée multipliée par chaque facteur, puis renormalisation ;
    - la ligne renversée (valeurs des objets en ordre inverse) ;
    - les offres concentrées sur un seul objet.

    Les doublons et l'offre sincère sont retirés ; l'ordre est déterministe.
    """
    m = len(row)
    raw: List[List[Fraction]] = []
    for j in range(m):
        for factor in factors:
            bid = list(row)
            bid[j] = bid[j] * factor
            raw.append(bid)
    raw.append(list(reversed(row)))
    for j in range(m):
        raw.append([Fraction(1) if k == j else Fraction(0) for k in range(m)])

    truthful = tuple(row)
    bids: List[Bid] = []
    seen = {truthful}
    for bid in raw:
        if sum(bid) == 0:
            continue
        normalized = normalize([bid]).row(0)
        if normalized not in seen:
            seen.add(normalized)
            bids.append(normalized)
    return bids


def check_truthfulness(mechanism: Mechanism, inst: Instance,
                       deviations: Optional[Mapping[int, Sequence[Sequence[Fraction]]]] = None) -> TruthfulnessReport:
    """
    Plus grand gain d'utilité (vraie valuation) obtenu par une fausse offre.

    Args:
        mechanism: instance → MechanismResult ou Allocation
        inst: valuations sincères
        deviations: offres à tester par enchérisseur (deviation_bids par défaut)

    Returns:
        TruthfulnessReport: gain maximal, avec l'enchérisseur et l'offre témoins
    """
    truthful = _allocation_of(mechanism(inst))
    best_gain: Number = Fraction(0)
    witness_bidder = witness_bid = None
    checked = 0
    first = True
    for i in range(inst.n):
        baseline = inst.utility(i, truthful.row(i))
        bids = deviations.get(i, []) if deviations is not None else deviation_bids(inst.row(i))
        for bid in bids:
            lied = _allocation_of(mechanism(inst.with_bid(i, bid)))
            gain = inst.utility(i, lied.row(i)) - baseline
            checked += 1
            if first or gain > best_gain:
                best_gain, witness_bidder, witness_bid = gain, i, tuple(bid)
                first = False

    if best_gain > 0:
        logger.warning(f"Déviation profitable : enchérisseur {witness_bidder} gagne {float(best_gain):.3e}")
    return TruthfulnessReport(best_gain, witness_bidder, witness_bid, checked)


def two_item_bids(top_values: Sequence[Fraction]) -> List[Bid]:
    """Offres (v, 1) renormalisées, pour balayer la valeur relative de l'objet 0."""
    return [normalize([[v, 1]]).row(0) for v in top_values if v > 0]
