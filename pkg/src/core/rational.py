"""
Arithmétique rationnelle exacte : lecture, affichage et constantes irrationnelles.

Les mécanismes et SDM détectent des égalités exactes (prix entiers, égalité de
rapports valeur/prix). Toutes les valeurs du modèle sont donc des Fraction ;
les seuls flottants proviennent du solveur PF itératif.

Les bornes des théorèmes sont irrationnelles (√2, √3, √12). Elles sont
représentées par Surd = a + b·√d et comparées aux rationnels en élevant au
carré, sans jamais passer par une approximation flottante.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Number = Union[Fraction, float]
RationalLike = Union[Fraction, int, str, float]


def parse_rational(value: RationalLike) -> Fraction:
    """
    Convertit une entrée en rationnel exact.

    Args:
        value: entier, Fraction, chaîne décimale ("0.6"), chaîne "p/q"
               ou flottant (lu via sa représentation décimale la plus courte)

    Returns:
        Fraction: la valeur exacte ("0.6" donne 3/5)

    Raises:
        ValueError: si la valeur n'est pas un nombre fini
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite number: {value!r}")
        # repr() donne la plus courte décimale qui relit le même flottant
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    raise ValueError(f"unsupported numeric type: {type(value).__name__}")


def format_rational(value: Number) -> str:
    """Affiche un rationnel en "p/q" (ou "p" si entier), un flottant sur 12 chiffres."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def format_decimal(value: Number, digits: int) -> str:
    """Affiche une valeur avec `digits` décimales."""
    return f"{float(value):.{digits}f}"


@dataclass(frozen=True)
class Surd:
    """
    Nombre de la forme a + b·√d avec a, b, d rationnels et d ≥ 0.

    Les comparaisons avec un rationnel sont exactes ; avec un flottant,
    elles se font en flottants.
    """

    a: Fraction
    b: Fraction
    d: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.d < 0:
            raise ValueError("radicand must be nonnegative")

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def compare(self, value: Number) -> int:
        """Signe de (value − self) : -1, 0 ou 1."""
        if isinstance(value, float):
            gap = value - float(self)
            return (gap > 0) - (gap < 0)
        left = Fraction(value) - self.a
        right_sq = self.b * self.b * self.d
        if self.b >= 0:
            if left < 0:
                return -1
            return (left * left > right_sq) - (left * left < right_sq)
        if left >= 0:
            return 0 if left == 0 and right_sq == 0 else 1
        # les deux côtés sont négatifs : le plus grand a le plus petit carré
        return (left * left < right_sq) - (left * left > right_sq)

    def __lt__(self, other):
        return self.compare(other) > 0

    def __le__(self, other):
        return self.compare(other) >= 0

    def __gt__(self, other):
        return self.compare(other) < 0

    def __ge__(self, other):
        return self.compare(other) <= 0

    def rational_approximation(self, precision: int = 10 ** 12) -> Fraction:
        """Approximation rationnelle par défaut de √d à 1/precision près."""
        scaled = self.d.numerator * self.d.denominator * precision * precision
        root = Fraction(math.isqrt(scaled), precision * self.d.denominator)
        return self.a + self.b * root

    def __str__(self) -> str:
        return f"{format_rational(self.a)} + {format_rational(self.b)}*sqrt({format_rational(self.d)})"


# =============================================================================
# BORNES GARANTIES
# =============================================================================

# SW(x_PF)/SW(x*) pour deux enchérisseurs : (2√3+3)/(4√3) = 1/2 + √3/4 ≈ 0.933
PF_SW_BOUND = Surd(Fraction(1, 2), Fraction(1, 4), 3)
# Mécanisme hybride : (2/3)·PF_SW_BOUND ≈ 0.622
HYBRID_SW_BOUND = Surd(Fraction(1, 3), Fraction(1, 6), 3)
# Mécanisme 2 enchérisseurs, 2 objets : 2(√2−1) ≈ 0.828427
TWO_BIDDER_BOUND = Surd(-2, 2, 2)
# Mécanisme 3 enchérisseurs, 2 objets : (12−√12)/11 ≈ 0.77599
THREE_BIDDER_BOUND = Surd(Fraction(12, 11), Fraction(-1, 11), 12)

# Points où ces minima sont atteints
TWO_BIDDER_MINIMIZER = Surd(1, 1, 2)
THREE_BIDDER_MIDDLE_MINIMIZER = Surd(Fraction(2, 5), Fraction(1, 5), 14)
ROOT_TWELVE = Surd(0, 1, 12)
TIGHT_WELFARE_K = Surd(Fraction(1, 2), Fraction(1, 2), 3)
