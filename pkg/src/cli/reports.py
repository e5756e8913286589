"""Rapports JSON des commandes `pf` et `run`, et tableau texte de `bench`."""

from typing import Iterable, List, Optional, Sequence

import pandas as pd
from pydantic import BaseModel

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from src.core.model import Allocation, Instance
from src.core.rational import Number, format_decimal, format_rational
from src.pf.equilibrium import CHECKS, EquilibriumReport
from src.verification.campaign import GuaranteeCheck

BENCH_COLUMNS = ["mechanism", "shape", "trials", "metric", "bound", "measured", "status"]


class Check(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class MechanismReport(BaseModel):
    mechanism: str
    instance: List[List[str]]
    prices: List[str]
    allocation: List[List[str]]
    rho: str
    sw: str
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def render_number(value: Number, digits: Optional[int] = None) -> str:
    """"p/q" exact par défaut, `digits` décimales si demandé (--decimal)."""
    return format_rational(value) if digits is None else format_decimal(value, digits)


def _matrix(rows: Iterable[Sequence[Number]], digits: Optional[int]) -> List[List[str]]:
    return [[render_number(v, digits) for v in row] for row in rows]


def build_report(mechanism: str, inst: Instance, allocation: Allocation, prices: Sequence[Number],
                 rho: Number, sw: Number, checks: Sequence[Check], digits: Optional[int] = None) -> MechanismReport:
    return MechanismReport(
        mechanism=mechanism,
        instance=_matrix(inst.valuations, digits),
        prices=[render_number(p, digits) for p in prices],
        allocation=_matrix(allocation.shares, digits),
        rho=render_number(rho, digits),
        sw=render_number(sw, digits),
        checks=list(checks),
    )


def equilibrium_checks(report: EquilibriumReport) -> List[Check]:
    """Une entrée par condition d'équilibre, avec le détail des violations."""
    return [
        Check(name=name, passed=not report.failed(name),
              detail="; ".join(v.describe() for v in report.failed(name)))
        for name in CHECKS
    ]


def guarantee_checks(checks: Sequence[GuaranteeCheck], digits: Optional[int] = None) -> List[Check]:
    result = []
    for check in checks:
        measured = "n/a" if check.measured is None else render_number(check.measured, digits or 6)
        result.append(Check(
            name=check.name,
            passed=check.passed,
            detail=f"{check.metric} = {measured} (bound {float(check.bound):.6f})",
        ))
    return result


def render_report(report: MechanismReport) -> str:
    return report.model_dump_json(indent=2)


def bench_table(rows: Sequence[dict]) -> str:
    """Tableau texte (pandas) des bornes vérifiées par `bench`."""
    frame = pd.DataFrame(list(rows), columns=BENCH_COLUMNS)
    return frame.to_string(index=False)
