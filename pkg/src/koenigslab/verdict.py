"""Verdict records and JSON-ready conversion shared by the decision modules."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT_APPLICABLE"
UNDETERMINED = "UNDETERMINED"
STATUSES = (PASS, FAIL, NOT_APPLICABLE, UNDETERMINED)


def jsonable(obj: Any) -> Any:
    """Convert library values to plain JSON types (complex -> [re, im])."""
    if hasattr(obj, "to_record"):
        return obj.to_record()
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    return obj


@dataclass(frozen=True)
class Verdict:
    status: str
    quantities: dict = field(default_factory=dict)
    witness: Any = None

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_record(self) -> dict:
        rec: dict = {"status": self.status}
        if self.witness is not None:
            rec["witness"] = jsonable(self.witness)
        rec["quantities"] = jsonable(self.quantities)
        return rec
