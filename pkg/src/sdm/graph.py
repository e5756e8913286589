"""
Graphe de demande D(p), affectations valides et ensemble atteignable R.

Une affectation valide associe chaque enchérisseur à au plus un objet, et
l'objet j à au plus c_j = ⌊p_j⌋ enchérisseurs. Les recherches parcourent les
enchérisseurs et les objets par indice croissant, ce qui rend l'affectation
maximale déterministe.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence

from src.core.errors import DimensionMismatch
from src.core.model import Instance


@dataclass
class DemandGraph:
    """Arêtes enchérisseur → objets MBB (listes triées par indice d'objet)."""

    edges: List[List[int]]
    m: int

    @property
    def n(self) -> int:
        return len(self.edges)

    def has_edge(self, bidder: int, item: int) -> bool:
        return item in self.edges[bidder]

    def add_edge(self, bidder: int, item: int) -> None:
        if item not in self.edges[bidder]:
            self.edges[bidder].append(item)
            self.edges[bidder].sort()

    def drop_items(self, bidder: int, items: FrozenSet[int]) -> None:
        self.edges[bidder] = [j for j in self.edges[bidder] if j not in items]


def mbb_items(row: Sequence[Fraction], prices: Sequence[Fraction]) -> List[int]:
    """Objets de meilleur rapport valeur/prix d'une ligne (comparaison exacte)."""
    best: Optional[Fraction] = None
    chosen: List[int] = []
    for j, (v, p) in enumerate(zip(row, prices)):
        if v <= 0:
            continue
        bang = v / p
        if best is None or bang > best:
            best, chosen = bang, [j]
        elif bang == best:
            chosen.append(j)
    return chosen


def demand_graph(inst: Instance, prices: Sequence[Fraction]) -> DemandGraph:
    """
    Construit D(p) : arête (i, j) ssi v_ij/p_j = max_k v_ik/p_k.

    Raises:
        DimensionMismatch: si le vecteur de prix n'a pas m composantes
        ValueError: si un prix est < 1
    """
    if len(prices) != inst.m:
        raise DimensionMismatch(f"{len(prices)} prices for {inst.m} items")
    if any(p < 1 for p in prices):
        raise ValueError("SDM prices are never below 1")
    return DemandGraph([mbb_items(inst.row(i), prices) for i in range(inst.n)], inst.m)


@dataclass
class Assignment:
    """Affectation partielle : match[i] = objet de i (ou None), holders[j] = ses enchérisseurs."""

    match: List[Optional[int]]
    holders: List[List[int]] = field(default_factory=list)

    @classmethod
    def empty(cls, n: int, m: int) -> "Assignment":
        return cls([None] * n, [[] for _ in range(m)])

    @property
    def matched_count(self) -> int:
        return sum(1 for j in self.match if j is not None)

    def unmatched(self) -> List[int]:
        return [i for i, j in enumerate(self.match) if j is None]

    def load(self, item: int) -> int:
        return len(self.holders[item])

    def is_valid(self, graph: DemandGraph, capacities: Sequence[int]) -> bool:
        for i, j in enumerate(self.match):
            if j is not None and (not graph.has_edge(i, j) or i not in self.holders[j]):
                return False
        return all(len(h) <= c for h, c in zip(self.holders, capacities))


def _augment(graph: DemandGraph, capacities: Sequence[int], assignment: Assignment, source: int) -> bool:
    """Cherche (en largeur) un chemin alternant de `source` vers un objet non saturé et l'applique."""
    item_parent = {}
    seen = {source}
    queue = deque([source])
    while queue:
        bidder = queue.popleft()
        for item in graph.edges[bidder]:
            if item in item_parent:
                continue
            item_parent[item] = bidder
            if assignment.load(item) < capacities[item]:
                # remontée du chemin : chaque enchérisseur passe à l'objet suivant
                while True:
                    mover = item_parent[item]
                    previous = assignment.match[mover]
                    if previous is not None:
                        assignment.holders[previous].remove(mover)
                    assignment.holders[item].append(mover)
                    assignment.match[mover] = item
                    if mover == source:
                        return True
                    item = previous
            for holder in assignment.holders[item]:
                if holder not in seen:
                    seen.add(holder)
                    queue.append(holder)
    return False


def max_valid_assignment(graph: DemandGraph, capacities: Sequence[int],
                         assignment: Optional[Assignment] = None) -> Assignment:
    """
    Affectation valide maximisant le nombre d'enchérisseurs appariés.

    Part de `assignment` (modifiée sur place) s'il est fourni : un seul
    passage sur les enchérisseurs libres suffit, car un sommet sans chemin
    augmentant n'en retrouve jamais après d'autres augmentations.
    """
    if len(capacities) != graph.m:
        raise DimensionMismatch(f"{len(capacities)} capacities for {graph.m} items")
    if assignment is None:
        assignment = Assignment.empty(graph.n, graph.m)
    for bidder in assignment.unmatched():
        _augment(graph, capacities, assignment, bidder)
    return assignment


def reachable_items(graph: DemandGraph, assignment: Assignment,
                    sources: Optional[Iterable[int]] = None) -> FrozenSet[int]:
    """
    Objets atteignables depuis les enchérisseurs libres par chemins alternants :
    enchérisseur → tout objet MBB, objet → ses seuls enchérisseurs appariés.
    """
    starts = assignment.unmatched() if sources is None else list(sources)
    seen = set(starts)
    reached = set()
    queue = deque(starts)
    while queue:
        bidder = queue.popleft()
        for item in graph.edges[bidder]:
            if item in reached:
                continue
            reached.add(item)
            for holder in assignment.holders[item]:
                if holder not in seen:
                    seen.add(holder)
                    queue.append(holder)
    return frozenset(reached)


def bidders_within(graph: DemandGraph, items: FrozenSet[int]) -> List[int]:
    """d(R) : enchérisseurs dont tous les objets MBB sont dans `items`."""
    return [i for i, edges in enumerate(graph.edges) if edges and all(j in items for j in edges)]
