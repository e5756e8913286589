"""
Oracle PF brute-force : maximise Σ_i log v_i(x) sur l'ensemble des allocations.

Sert uniquement de référence indépendante dans les tests. Deux régimes :
- énumération complète de la grille (chaque objet découpé en `grid` parts)
  quand le nombre de points reste sous ORACLE_ENUMERATION_LIMIT ;
- sinon montée par coordonnées : on transfère une quantité s d'un objet
  d'un enchérisseur à un autre tant que l'objectif augmente, s partant d'une
  demi-unité et étant divisé par deux jusqu'à 1/grid.

Dans les deux cas, un affinage sous la résolution de la grille termine le
calcul, pour que les utilités soient à O(1/grid) des utilités PF.
"""

import itertools
import math
from typing import List, Tuple

import numpy as np
from loguru import logger

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from config.settings import ORACLE_ENUMERATION_LIMIT, ORACLE_GRID, ORACLE_MAX_CELLS
from src.core.errors import OracleIntractable
from src.core.model import Allocation, Instance
from src.pf.solution import PFSolution

# Pas minimal de l'affinage, en fraction d'objet
_REFINE_FLOOR = 1e-9


def _objective(values: np.ndarray, shares: np.ndarray) -> float:
    utilities = (values * shares).sum(axis=1)
    if np.any(utilities <= 0):
        return -math.inf
    return float(np.log(utilities).sum())


def _compositions(total: int, parts: int) -> np.ndarray:
    """Toutes les façons d'écrire `total` comme somme de `parts` entiers ≥ 0."""
    rows = []
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        bounds = (-1,) + cuts + (total + parts - 1,)
        rows.append([bounds[k + 1] - bounds[k] - 1 for k in range(parts)])
    return np.array(rows, dtype=float)


def _enumeration_size(n: int, m: int, grid: int) -> int:
    return math.comb(grid + n - 1, n - 1) ** m


def _enumerate(values: np.ndarray, grid: int) -> np.ndarray:
    n, m = values.shape
    splits = _compositions(grid, n) / grid
    best, best_shares = -math.inf, None
    for choice in itertools.product(range(len(splits)), repeat=m):
        shares = np.stack([splits[k] for k in choice], axis=1)
        score = _objective(values, shares)
        if score > best:
            best, best_shares = score, shares
    return best_shares


def _equal_split(values: np.ndarray) -> np.ndarray:
    """Chaque objet partagé à parts égales entre ceux qui lui donnent une valeur."""
    wanted = values > 0
    counts = wanted.sum(axis=0)
    shares = np.zeros_like(values)
    for j in range(values.shape[1]):
        if counts[j]:
            shares[wanted[:, j], j] = 1.0 / counts[j]
        else:
            shares[0, j] = 1.0
    return shares


def _ascend(values: np.ndarray, shares: np.ndarray, step: float, floor: float) -> Tuple[np.ndarray, int]:
    """Transferts (objet j, de a vers b) améliorants, à pas décroissants jusqu'à `floor`."""
    n, m = values.shape
    moves = 0
    current = _objective(values, shares)
    while step >= floor:
        improved = True
        while improved:
            improved = False
            for j in range(m):
                for a in range(n):
                    if shares[a, j] <= 0:
                        continue
                    for b in range(n):
                        if b == a or values[b, j] <= 0:
                            continue
                        amount = min(step, shares[a, j])
                        shares[a, j] -= amount
                        shares[b, j] += amount
                        score = _objective(values, shares)
                        if score > current + 1e-15:
                            current = score
                            moves += 1
                            improved = True
                        else:
                            shares[a, j] += amount
                            shares[b, j] -= amount
        step /= 2
    return shares, moves


def brute_force_pf(inst: Instance, grid: int = ORACLE_GRID) -> PFSolution:
    """
    Approche l'allocation PF par recherche directe, sans théorie de marché.

    Args:
        inst: petite instance (n·m ≤ ORACLE_MAX_CELLS)
        grid: nombre de subdivisions de chaque objet

    Returns:
        PFSolution: allocation flottante, utilités, et prix p_j = max_i v_ij/u_i

    Raises:
        OracleIntractable: si l'instance est trop grande
    """
    if inst.n * inst.m > ORACLE_MAX_CELLS:
        raise OracleIntractable(
            f"oracle handles n*m <= {ORACLE_MAX_CELLS} (got {inst.n}x{inst.m})"
        )
    if grid < 1:
        raise ValueError("grid must be a positive integer")
    values = inst.as_array()

    if _enumeration_size(inst.n, inst.m, grid) <= ORACLE_ENUMERATION_LIMIT:
        shares = _enumerate(values, grid)
        start_step = 1.0 / grid
        mode = "énumération"
    else:
        shares = _equal_split(values)
        start_step = 0.5
        mode = "montée par coordonnées"
    shares, moves = _ascend(values, shares, start_step, _REFINE_FLOOR)

    utilities = (values * shares).sum(axis=1)
    prices = (values / utilities[:, None]).max(axis=0)
    logger.debug(f"Oracle ({mode}) : {moves} transferts, utilités {np.round(utilities, 6).tolist()}")
    clipped: List[List[float]] = np.clip(shares, 0.0, 1.0).tolist()
    return PFSolution(
        allocation=Allocation.from_rows(clipped),
        prices=tuple(float(p) for p in prices),
        utilities=tuple(float(u) for u in utilities),
        exact=False,
        iterations=moves,
    )
