"""
Passage exact d'un itéré flottant à l'équilibre PF rationnel.

Un équilibre du marché de Fisher est déterminé par son graphe de dépense :
sur chaque composante connexe, les rapports de prix se lisent le long des
arêtes (v_ij/p_j est le même pour tous les objets d'un enchérisseur) et la
somme des prix vaut le nombre d'enchérisseurs de la composante. On devine
ce graphe à partir des offres flottantes, on en déduit des prix rationnels,
puis on vérifie exactement les conditions MBB et l'existence d'une dépense
qui solde le marché. Un échec n'est jamais une erreur : le solveur reprend
simplement ses itérations.
"""

from collections import defaultdict, deque
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.core.model import Allocation, Instance
from src.pf.solution import PFSolution

Edge = Tuple[int, int]

# seuils de dépense (part du budget unitaire) au-dessus desquels une arête est retenue
SPEND_THRESHOLDS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
# écarts relatifs au meilleur rapport valeur/prix pour les arêtes quasi serrées
TIGHTNESS_GAPS = (1e-3, 1e-5, 1e-7, 1e-9, 1e-11)
# au-delà, pas de flot maximal exact de secours (seule la forêt est essayée)
FLOW_FALLBACK_CELLS = 2_000
FLOAT_SLACK = 1e-9


# =============================================================================
# CHOIX DU GRAPHE DE DÉPENSE
# =============================================================================

def spending_forest(spend: np.ndarray, allowed: np.ndarray) -> List[Edge]:
    """
    Forêt couvrante de poids maximal (Kruskal) sur les arêtes autorisées,
    pondérées par la dépense. Nœuds : enchérisseurs 0..n-1, objets n..n+m-1.
    """
    n, m = spend.shape
    parent = list(range(n + m))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    forest = []
    for flat in np.argsort(-spend, axis=None, kind="stable"):
        i, j = divmod(int(flat), m)
        if not allowed[i, j]:
            continue
        a, b = find(i), find(n + j)
        if a != b:
            parent[a] = b
            forest.append((i, j))
            if len(forest) == n + m - 1:
                break
    return forest


def candidate_forests(values: np.ndarray, spend: np.ndarray) -> List[List[Edge]]:
    """Forêts à essayer : par seuil de dépense, puis par quasi-égalité des rapports valeur/prix."""
    prices = spend.sum(axis=0)
    bang = np.zeros_like(values)
    sold = prices > 0
    bang[:, sold] = values[:, sold] / prices[sold]
    best = bang.max(axis=1, keepdims=True)
    positive = values > 0

    forests = []
    for threshold in SPEND_THRESHOLDS:
        forests.append(spending_forest(spend, positive & (spend >= threshold)))
    for gap in TIGHTNESS_GAPS:
        forests.append(spending_forest(spend, positive & (bang >= best * (1 - gap))))

    unique = []
    for forest in forests:
        if forest not in unique:
            unique.append(forest)
    return unique


# =============================================================================
# PRIX ET DÉPENSES EXACTS
# =============================================================================

def forest_prices(inst: Instance, forest: Sequence[Edge]) -> Optional[List[Fraction]]:
    """
    Prix rationnels imposés par la forêt, ou None si un objet désiré n'y figure pas.

    Chaque composante reçoit un budget égal à son nombre d'enchérisseurs.
    """
    bidder_items: Dict[int, List[int]] = defaultdict(list)
    item_bidders: Dict[int, List[int]] = defaultdict(list)
    for i, j in forest:
        bidder_items[i].append(j)
        item_bidders[j].append(i)
    if len(bidder_items) != inst.n:
        return None

    prices: List[Optional[Fraction]] = [None] * inst.m
    seen = set()
    for root in range(inst.m):
        if prices[root] is not None:
            continue
        if not item_bidders[root]:
            if any(inst.row(i)[root] > 0 for i in range(inst.n)):
                return None
            prices[root] = Fraction(0)
            continue
        prices[root] = Fraction(1)
        component, bidders = [root], 0
        queue = deque([root])
        while queue:
            j = queue.popleft()
            for i in item_bidders[j]:
                if i in seen:
                    continue
                seen.add(i)
                bidders += 1
                row = inst.row(i)
                ratio = prices[j] / row[j]
                for k in bidder_items[i]:
                    if prices[k] is None:
                        prices[k] = row[k] * ratio
                        component.append(k)
                        queue.append(k)
        scale = Fraction(bidders) / sum(prices[k] for k in component)
        for k in component:
            prices[k] *= scale
    return prices


def mbb_edges(inst: Instance, prices: Sequence[Fraction]) -> Optional[List[List[int]]]:
    """
    Objets de meilleur rapport de chaque enchérisseur, comparés exactement.

    Un filtre flottant écarte d'abord les objets nettement moins bons.
    None si un objet désiré a un prix nul.
    """
    float_prices = np.array([float(p) for p in prices])
    values = inst.as_array()
    if np.any((float_prices <= 0) & (values > 0).any(axis=0)):
        return None
    bang = np.zeros_like(values)
    sold = float_prices > 0
    bang[:, sold] = values[:, sold] / float_prices[sold]
    best = bang.max(axis=1)

    edges = []
    for i in range(inst.n):
        row = inst.row(i)
        candidates = [j for j in range(inst.m) if row[j] > 0 and bang[i, j] >= best[i] * (1 - FLOAT_SLACK)]
        top = max(row[j] / prices[j] for j in candidates)
        edges.append([j for j in candidates if row[j] / prices[j] == top])
    return edges


def forest_spending(n: int, m: int, forest: Sequence[Edge],
                    prices: Sequence[Fraction]) -> Optional[Dict[Edge, Fraction]]:
    """
    Dépenses sur une forêt, déterminées par effeuillage : une feuille
    enchérisseur dépense tout son reste, une feuille objet reçoit tout son prix.
    None si une dépense est négative ou si un reste ne s'annule pas.
    """
    remaining = [Fraction(1)] * n + list(prices)
    neighbours: Dict[int, set] = defaultdict(set)
    for i, j in forest:
        neighbours[i].add(n + j)
        neighbours[n + j].add(i)

    spending = {}
    leaves = deque(node for node in range(n + m) if len(neighbours[node]) == 1)
    while leaves:
        node = leaves.popleft()
        if len(neighbours[node]) != 1:
            continue
        other = neighbours[node].pop()
        neighbours[other].discard(node)
        amount = remaining[node]
        if amount < 0:
            return None
        remaining[node] = Fraction(0)
        remaining[other] -= amount
        edge = (node, other - n) if node < n else (other, node - n)
        spending[edge] = amount
        if len(neighbours[other]) == 1:
            leaves.append(other)
    if any(r != 0 for r in remaining):
        return None
    return spending


def flow_spending(n: int, m: int, edges: Sequence[Sequence[int]],
                  prices: Sequence[Fraction]) -> Optional[Dict[Edge, Fraction]]:
    """
    Dépenses par flot maximal exact (chemins augmentants les plus courts)
    source → enchérisseur (1) → objet MBB → puits (p_j). None si le flot
    n'atteint pas n.
    """
    source, sink = n + m, n + m + 1
    capacity: Dict[Edge, Fraction] = defaultdict(Fraction)
    adjacency: Dict[int, List[int]] = defaultdict(list)

    def link(a: int, b: int, c: Fraction) -> None:
        capacity[(a, b)] += c
        adjacency[a].append(b)
        adjacency[b].append(a)

    for i in range(n):
        link(source, i, Fraction(1))
        for j in edges[i]:
            link(i, n + j, Fraction(1))
    for j in range(m):
        if prices[j] > 0:
            link(n + j, sink, prices[j])

    total = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for b in adjacency[a]:
                if b not in parent and capacity[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            break
        path = []
        node = sink
        while parent[node] is not None:
            path.append((parent[node], node))
            node = parent[node]
        push = min(capacity[e] for e in path)
        for a, b in path:
            capacity[(a, b)] -= push
            capacity[(b, a)] += push
        total += push

    if total != n:
        return None
    return {(i, j): 1 - capacity[(i, n + j)] for i in range(n) for j in edges[i]}


# =============================================================================
# POINT D'ENTRÉE
# =============================================================================

def exact_equilibrium(inst: Instance, spend: np.ndarray, iterations: int = 0) -> Optional[PFSolution]:
    """
    Tente de retrouver l'équilibre exact à partir des offres flottantes `spend`
    (ordre d'origine des objets).

    Returns:
        PFSolution exacte (rationnelle), ou None si aucune forêt candidate
        ne donne un équilibre vérifié
    """
    values = inst.as_array()
    for forest in candidate_forests(values, spend):
        prices = forest_prices(inst, forest)
        if prices is None:
            continue
        edges = mbb_edges(inst, prices)
        if edges is None or any(j not in edges[i] for i, j in forest):
            continue
        spending = forest_spending(inst.n, inst.m, forest, prices)
        if spending is None and inst.n * inst.m <= FLOW_FALLBACK_CELLS:
            spending = flow_spending(inst.n, inst.m, edges, prices)
        if spending is None:
            continue

        rows = [[Fraction(0)] * inst.m for _ in range(inst.n)]
        for (i, j), amount in spending.items():
            rows[i][j] = amount / prices[j]
        allocation = Allocation.from_rows(rows)
        utilities = tuple(inst.utility(i, allocation.row(i)) for i in range(inst.n))
        logger.debug(f"Équilibre exact retrouvé ({len(forest)} arêtes de dépense)")
        return PFSolution(allocation, tuple(prices), utilities, exact=True, residual=0.0, iterations=iterations)
    return None
