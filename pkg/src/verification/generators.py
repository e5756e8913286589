"""
Familles d'instances aléatoires reproductibles.

Les lignes sont tirées sur le simplexe par espacements exponentiels, puis
arrondies à des poids entiers sur GENERATOR_RESOLUTION : les instances sont
donc exactement rationnelles et se relisent à l'identique depuis un fichier.
"""

from fractions import Fraction
from typing import Callable, Dict, List

import numpy as np

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import EPSILON_VALUES, GENERATOR_RESOLUTION
from src.core.errors import ShapeError
from src.core.model import Instance, normalize

Generator = Callable[[np.random.Generator, int, int], Instance]


def _integer_weights(rng: np.random.Generator, size: int, resolution: int = GENERATOR_RESOLUTION) -> List[int]:
    spacings = rng.exponential(size=size)
    weights = np.rint(spacings / spacings.sum() * resolution).astype(int)
    if weights.sum() == 0:
        weights[int(np.argmax(spacings))] = 1
    return [int(w) for w in weights]


def simplex(rng: np.random.Generator, n: int, m: int) -> Instance:
    """Lignes indépendantes, uniformes sur le simplexe."""
    return normalize([_integer_weights(rng, m) for _ in range(n)])


def near_ties(rng: np.random.Generator, n: int, m: int) -> Instance:
    """Une ligne de base, copiée pour chacun avec un bruit de quelques unités."""
    base = np.array(_integer_weights(rng, m)) + 1
    rows = []
    for _ in range(n):
        noise = rng.integers(-3, 4, size=m)
        rows.append([int(w) for w in np.maximum(base + noise, 0)])
    for row in rows:
        if sum(row) == 0:
            row[0] = 1
    return normalize(rows)


def disjoint(rng: np.random.Generator, n: int, m: int) -> Instance:
    """
    Supports disjoints : chaque objet a un seul propriétaire (tiré au hasard).
    Avec n > m, les enchérisseurs sans objet partagent celui d'indice i mod m.
    """
    owners = rng.permutation(np.arange(m) % n) if m >= n else np.arange(m)
    rows = [[0] * m for _ in range(n)]
    for j, owner in enumerate(owners):
        rows[int(owner)][j] = int(rng.integers(1, GENERATOR_RESOLUTION + 1))
    for i in range(n):
        if sum(rows[i]) == 0:
            rows[i][i % m] = int(rng.integers(1, GENERATOR_RESOLUTION + 1))
    return normalize(rows)


def epsilon_instance(eps: Fraction) -> Instance:
    """A = (1−2ε, ε, ε/2, ε/2), B = (ε, 1−2ε, ε/2, ε/2) : cas serré du dictateur à échange."""
    eps = Fraction(eps)
    half = eps / 2
    return normalize([[1 - 2 * eps, eps, half, half], [eps, 1 - 2 * eps, half, half]])


def epsilon(rng: np.random.Generator, n: int, m: int) -> Instance:
    if (n, m) != (2, 4):
        raise ShapeError(f"epsilon family requires n=2 and m=4 (got n={n}, m={m})")
    return epsilon_instance(EPSILON_VALUES[int(rng.integers(len(EPSILON_VALUES)))])


def strong_demand(rng: np.random.Generator, n: int, m: int) -> Instance:
    """
    Régime de forte demande : chaque objet est le favori d'au moins ⌊n/m⌋
    enchérisseurs (favori = i mod m, renforcé), pour des prix PF élevés.
    """
    rows = []
    for i in range(n):
        weights = _integer_weights(rng, m)
        weights[i % m] += GENERATOR_RESOLUTION // 2
        rows.append(weights)
    return normalize(rows)


FAMILIES: Dict[str, Generator] = {
    "simplex": simplex,
    "near-ties": near_ties,
    "disjoint": disjoint,
    "epsilon": epsilon,
    "strong-demand": strong_demand,
}


def family_names() -> List[str]:
    return list(FAMILIES)


def generate(family: str, n: int, m: int, rng: np.random.Generator) -> Instance:
    """
    Tire une instance de la famille demandée.

    Raises:
        KeyError: famille inconnue
        ShapeError: forme incompatible avec la famille
    """
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r} (choose from {', '.join(FAMILIES)})")
    if n < 1 or m < 1:
        raise ShapeError(f"instances need n >= 1 and m >= 1 (got n={n}, m={m})")
    return FAMILIES[family](rng, n, m)


def generate_seeded(family: str, n: int, m: int, seed: int) -> Instance:
    return generate(family, n, m, np.random.default_rng(seed))
