"""
Lecture et écriture des fichiers d'instance (JSON).

Format : {"valuations": [["1/2", "1/2"], ["0.25", 3]]}. Les entrées sont des
entiers, des décimaux ou des chaînes "p/q" ; chaque ligne est renormalisée.
"""

import json
from pathlib import Path
from typing import List, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, StrictFloat, StrictInt, StrictStr, ValidationError, field_validator

import sys
sys.path.insert(0, str(__file__).rsplit("src", 1)[0])

from src.core.errors import InstanceParseError
from src.core.model import Instance, normalize
from src.core.rational import format_rational, parse_rational

Entry = Union[StrictInt, StrictFloat, StrictStr]


class InstanceFile(BaseModel):
    """Schéma du fichier d'instance."""

    model_config = ConfigDict(extra="forbid")

    valuations: List[List[Entry]]

    @field_validator("valuations")
    @classmethod
    def rectangular(cls, rows: List[List[Entry]]) -> List[List[Entry]]:
        if not rows or not rows[0]:
            raise ValueError("at least one bidder and one item are required")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} entries, expected {width}")
        return rows


def _field_path(loc) -> str:
    # les membres de l'Union ("int", "str", ...) apparaissent dans loc : on ne garde que les indices
    if not loc:
        return ""
    return str(loc[0]) + "".join(f"[{part}]" for part in loc[1:] if isinstance(part, int))


def parse_instance_text(text: str) -> Instance:
    """
    Lit une instance depuis un texte JSON.

    Raises:
        InstanceParseError: JSON invalide (ligne/colonne), schéma ou nombre invalide (champ)
        DegenerateBidder: ligne entièrement nulle
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceParseError(f"invalid JSON: {e.msg}", line=e.lineno, column=e.colno) from None

    try:
        document = InstanceFile.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        raise InstanceParseError(error["msg"], field=_field_path(error["loc"])) from None

    rows = []
    for i, row in enumerate(document.valuations):
        parsed = []
        for j, entry in enumerate(row):
            try:
                value = parse_rational(entry)
            except ValueError as e:
                raise InstanceParseError(str(e), field=f"valuations[{i}][{j}]") from None
            if value < 0:
                raise InstanceParseError("valuations must be nonnegative", field=f"valuations[{i}][{j}]")
            parsed.append(value)
        rows.append(parsed)
    return normalize(rows)


def parse_instance(path: Union[str, Path]) -> Instance:
    """Lit, valide et normalise un fichier d'instance."""
    path = Path(path)
    inst = parse_instance_text(path.read_text(encoding="utf-8"))
    logger.debug(f"Instance {path.name} : {inst.n} enchérisseurs, {inst.m} objets")
    return inst


def serialize_instance(inst: Instance) -> str:
    """JSON exact (chaînes "p/q"), relu à l'identique par parse_instance_text."""
    rows = [[format_rational(v) for v in inst.row(i)] for i in range(inst.n)]
    return json.dumps({"valuations": rows}, indent=2)


def write_instance(inst: Instance, path: Union[str, Path]) -> Path:
    """Écrit une instance (les dossiers parents sont créés)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(inst) + "\n", encoding="utf-8")
    logger.info(f"💾 Instance écrite : {path}")
    return path
