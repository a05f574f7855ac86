"""Deficit reports and their JSON/CSV serialization.

A report records one inequality evaluation in powered form (both sides
raised to the power that makes them additive), the deficit lhs - rhs, and
enough numerical metadata to decide whether a negative deficit is a real
violation or quadrature noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

from .constants import Params

__all__ = ["DeficitReport", "fmt17", "reports_to_json", "reports_to_csv"]

_EPS = 1e-300


def fmt17(x) -> str:
    """17-significant-digit decimal rendering (round-trips doubles)."""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass(frozen=True)
class DeficitReport:
    """One inequality evaluation.

    lhs and rhs are the powered forms; extras carries the unpowered views
    and any inequality-specific diagnostics (normalization factors,
    equality distances).  flags is drawn from {"divergent",
    "outside-range", "step-profile"}.
    """

    inequality_id: str
    params: Params
    lhs: float
    rhs: float
    quadrature_error: float = 0.0
    flags: frozenset = frozenset()
    label: str = ""
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def deficit(self) -> float:
        return self.lhs - self.rhs

    @property
    def relative_margin(self) -> float:
        return self.deficit / max(self.lhs, self.rhs, _EPS)

    def passes(self, rel_tol: float = 1e-8) -> bool:
        """Tolerance policy: fail only when the deficit is more negative
        than both the relative floor and ten times the quadrature error."""
        if math.isnan(self.deficit):
            return False
        scale = max(abs(self.lhs), abs(self.rhs), 1e-30)
        return self.deficit >= -max(rel_tol * scale, 10.0 * self.quadrature_error)

    def to_dict(self) -> dict:
        p = self.params
        return {
            "inequality_id": self.inequality_id,
            "n": p.n,
            "p": p.p,
            "alpha": p.alpha,
            "label": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "deficit": self.deficit,
            "relative_margin": self.relative_margin,
            "quadrature_error": self.quadrature_error,
            "flags": sorted(self.flags),
            "extras": {k: self.extras[k] for k in sorted(self.extras)},
        }


def _render(obj):
    if isinstance(obj, float):
        return float(fmt17(obj))
    if isinstance(obj, dict):
        return {k: _render(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_render(v) for v in obj]
    return obj


def reports_to_json(reports: Sequence[DeficitReport]) -> str:
    return json.dumps([_render(r.to_dict()) for r in reports], indent=2,
                      sort_keys=False) + "\n"

_CSV_COLUMNS = ("inequality_id", "n", "p", "alpha", "label", "lhs", "rhs",
                "deficit", "relative_margin", "quadrature_error", "flags")


def reports_to_csv(reports: Sequence[DeficitReport]) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for r in reports:
        d = r.to_dict()
        row = []
        for col in _CSV_COLUMNS:
            val = d[col]
            if col == "flags":
                row.append(";".join(val))
            elif val is None:
                row.append("")
            elif isinstance(val, float):
                row.append(fmt17(val))
            else:
                row.append(str(val))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
