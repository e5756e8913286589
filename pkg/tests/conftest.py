"""
=============================================================================
FIXTURES PYTEST - INSTANCES DE TEST RÉUTILISABLES
=============================================================================
Ce fichier définit les fixtures partagées entre tous les tests.

Chaque fixture est une petite instance dont les résultats (allocation PF,
utilités, ρ, SW) ont été calculés à la main, en rationnels exacts.
=============================================================================
"""

import pytest
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.core.model import Allocation, normalize


# =============================================================================
# FIXTURES DEUX ENCHÉRISSEURS
# =============================================================================

@pytest.fixture
def symmetric_halves():
    """Deux enchérisseurs, deux objets, valeurs (1/2, 1/2) pour tous."""
    return normalize([[1, 1], [1, 1]])


@pytest.fixture
def frontier_example():
    """A = (0.6, 0.3, 0.1), B = (0.2, 0.3, 0.5) : PF donne l'objet 0 et 1/3 de l'objet 1 à A."""
    return normalize([["0.6", "0.3", "0.1"], ["0.2", "0.3", "0.5"]])


@pytest.fixture
def disjoint_pairs():
    """A n'évalue que {0, 1}, B que {2, 3}."""
    return normalize([[1, 1, 0, 0], [0, 0, 1, 1]])


@pytest.fixture
def epsilon_tight():
    """Exemple serré du dictateur à échange avec ε = 1/1000."""
    eps = Fraction(1, 1000)
    return normalize([[1 - 2 * eps, eps, eps / 2, eps / 2], [eps, 1 - 2 * eps, eps / 2, eps / 2]])


# =============================================================================
# FIXTURES DEUX OBJETS
# =============================================================================

@pytest.fixture
def uniform_three():
    """Trois enchérisseurs (1/2, 1/2) : R_b au milieu avec v = 1."""
    return normalize([[1, 1], [1, 1], [1, 1]])


@pytest.fixture
def scaled_three():
    """Valeurs du haut ramenées au bas : 3, 1, 1/3."""
    return normalize([[3, 1], [1, 1], [1, 3]])


@pytest.fixture
def si_indifferent_four():
    """n = 4, R_b en position 2 avec v = 2/3 : SI atteint exactement n/(n+1)."""
    return normalize([[2, 1], [2, 3], [1, 2], [1, 2]])


@pytest.fixture
def two_bidder_ratio():
    """A n'évalue que le haut, B a v = 5/2 : R_b = B en position 2."""
    return normalize([[1, 0], [5, 2]])


@pytest.fixture
def three_bidder_bottom():
    """Deux enchérisseurs Top purs, R_b en bas avec v = 3."""
    return normalize([[1, 0], [1, 0], [3, 1]])


# =============================================================================
# FIXTURES SDM
# =============================================================================

@pytest.fixture
def single_item_crowd():
    """Trois enchérisseurs qui ne veulent que l'objet 0."""
    return normalize([[1, 0], [1, 0], [1, 0]])


@pytest.fixture
def distinct_favourites():
    """Chacun veut un objet différent : SDM garde tous les prix à 1."""
    return normalize([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


# =============================================================================
# FIXTURES MÉCANISMES
# =============================================================================

@pytest.fixture
def highest_bid_mechanism():
    """
    Mécanisme volontairement manipulable : l'objet 0 va entier à la plus
    forte offre annoncée (plus petit indice en cas d'égalité), les autres
    objets sont partagés à parts égales.
    """
    def mechanism(inst):
        winner = max(range(inst.n), key=lambda i: (inst.row(i)[0], -i))
        rows = []
        for i in range(inst.n):
            first = Fraction(1) if i == winner else Fraction(0)
            rows.append([first] + [Fraction(1, inst.n)] * (inst.m - 1))
        return Allocation.from_rows(rows)

    return mechanism
