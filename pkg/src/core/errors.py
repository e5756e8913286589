"""Exceptions du projet."""

from typing import Optional


class FairDivisionError(Exception):
    """Erreur de base du projet."""


class DegenerateBidder(FairDivisionError, ValueError):
    """Un enchérisseur n'a aucune valeur positive."""

    def __init__(self, bidder: int):
        self.bidder = bidder
        super().__init__(f"bidder {bidder} has an all-zero valuation row")


class DimensionMismatch(FairDivisionError, ValueError):
    """Dimensions incompatibles entre instance et allocation."""


class InvalidPFSolution(FairDivisionError, ValueError):
    """Solution PF inutilisable (utilité nulle pour un enchérisseur)."""


class ShapeError(FairDivisionError, ValueError):
    """Le mécanisme n'accepte pas la forme (n, m) de l'instance."""


class InstanceParseError(FairDivisionError, ValueError):
    """Fichier d'instance mal formé."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field:
            where.append(f"field {field}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class SolverFailure(FairDivisionError, RuntimeError):
    """Le solveur itératif n'a pas convergé dans son budget."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"PF solver did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class OracleIntractable(FairDivisionError, ValueError):
    """Instance trop grande pour l'oracle brute-force."""


class SDMInvariantError(FairDivisionError, RuntimeError):
    """Erreur interne de SDM (budget d'itérations, hausse de prix nulle)."""
