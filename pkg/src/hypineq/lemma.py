"""Batch certification of the radial kernel comparison across parameter
grids.

The central scalar fact of the package is that the margin function of
radius t (the gap between the shifted isoperimetric combination and its
two lower-bound terms) is non-negative exactly when the exponent sits at
or above the phase boundary 2n/(n-1).  verify_lemma certifies the
non-negative side on a grid; find_violation hunts for the sign change on
the other side, seeded by the asymptotic onset estimate.

All margins are reported in scaled form, margin / (1 + volume^p), which
stays representable at radii where the raw margin overflows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import geometry
from .constants import boundary_exponent
from .errors import DomainError
from .report import fmt17

__all__ = ["MarginTable", "verify_lemma", "find_violation"]


@dataclass(frozen=True)
class MarginTable:
    """Margin evaluations on a radius grid, plus the verdict.

    margins holds the scaled margin at each radius; f_values the raw
    margin (inf where it overflows a double).  violation, when present,
    is a (t, scaled margin) pair with a certified negative sign.
    """

    n: int
    p: float
    mode: str
    ts: Tuple[float, ...]
    f_values: Tuple[float, ...]
    margins: Tuple[float, ...]
    min_margin: float
    min_margin_t: float
    tolerance: float
    passed: bool
    violation: Optional[Tuple[float, float]] = None
    onset_estimate: Optional[float] = None
    inconclusive: bool = False
    monotone: Optional[bool] = None
    slope_positive: Optional[bool] = None

    def to_csv(self) -> str:
        lines = ["t,F,margin"]
        for t, f, m in zip(self.ts, self.f_values, self.margins):
            lines.append(",".join([fmt17(t), fmt17(f), fmt17(m)]))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        out = {
            "n": self.n,
            "p": self.p,
            "mode": self.mode,
            "points": len(self.ts),
            "t_max": self.ts[-1] if self.ts else 0.0,
            "min_margin": self.min_margin,
            "min_margin_t": self.min_margin_t,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
        }
        if self.violation is not None:
            out["violation_t"] = self.violation[0]
            out["violation_margin"] = self.violation[1]
        if self.onset_estimate is not None:
            out["onset_estimate"] = self.onset_estimate
        if self.monotone is not None:
            out["monotone"] = self.monotone
        if self.slope_positive is not None:
            out["slope_positive"] = self.slope_positive
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _raw_margin(n: int, p: float, t: float) -> float:
    """Raw margin for the table, +inf once it exceeds double range."""
    try:
        return geometry.radial_margin(n, p, t)
    except (OverflowError, DomainError):
        return math.inf


def _log_scale(n: int, p: float, t: float) -> float:
    """log(1 + volume^p), overflow-safe."""
    x = p * geometry._log_phi(n, t)
    return x + math.log1p(math.exp(-x)) if x > 0.0 else math.log1p(math.exp(x))


def verify_lemma(n: int, p: float, t_max: float = 25.0, num: int = 200,
                 tol: float = 1e-9) -> MarginTable:
    """Certify the margin is non-negative on a geometric radius grid.

    Requires (n=2, p>=2) or (n>=3, p>=2n/(n-1)).  Besides the pointwise
    margins, checks the raw margin is non-decreasing along the grid and,
    for n>=3, that the slope factor from its derivative stays
    non-negative.
    """
    bdry = boundary_exponent(n)
    if p < bdry * (1.0 - 1e-12):
        raise DomainError(
            f"lemma range needs p >= {bdry:g} for n={n}, got p={p!r}")
    if not t_max > 0.0:
        raise DomainError(f"t_max must be positive, got {t_max!r}")
    ts = [0.0] + [float(t) for t in np.geomspace(1e-4, t_max, num)]
    margins = [geometry.radial_margin_scaled(n, p, t) for t in ts]
    fvals = [_raw_margin(n, p, t) for t in ts]

    min_i = int(np.argmin(margins))
    min_margin = margins[min_i]
    passed = min_margin >= -tol

    # monotonicity of the raw margin, compared on the log scale so that
    # radii past double overflow still participate
    logf = []
    for t, m in zip(ts, margins):
        # skip radii where the scaled margin is below rounding noise
        # (identically-zero cases are all noise)
        if t == 0.0 or m <= 1e-13:
            logf.append(None)
        else:
            logf.append(math.log(m) + _log_scale(n, p, t))
    seen = [x for x in logf if x is not None]
    monotone = all(b >= a - 1e-9 for a, b in zip(seen, seen[1:]))

    slope_positive = None
    if n >= 3:
        slope_positive = True
        for t in ts[1:]:
            try:
                g = geometry.margin_slope_factor(n, p, t)
            except OverflowError:
                g = geometry.margin_slope_factor(n, p, t, precise=True)
            if not g >= -1e-9 * max(1.0, abs(g)):
                if geometry.margin_slope_factor(n, p, t, precise=True) < 0.0:
                    slope_positive = False
                    break

    return MarginTable(
        n=n, p=p, mode="verify", ts=tuple(ts), f_values=tuple(fvals),
        margins=tuple(margins), min_margin=min_margin,
        min_margin_t=ts[min_i], tolerance=tol,
        passed=passed and monotone and slope_positive is not False,
        monotone=monotone, slope_positive=slope_positive)


def find_violation(n: int, p: float, t_max: float = 150.0, num: int = 240,
                   tol: float = 1e-9) -> MarginTable:
    """Locate a radius with a certified negative margin below the phase
    boundary.

    Scans a geometric grid; any candidate whose double-precision scaled
    margin is negative but tiny is re-certified with the high-precision
    path.  When the grid scan comes up empty, radii just past the
    asymptotic onset estimate are probed directly.  An empty search is
    reported as inconclusive, not as a failure of the reversed estimate.
    """
    bdry = boundary_exponent(n)
    if p >= bdry:
        raise DomainError(
            f"violation search needs p < {bdry:g} for n={n}, got p={p!r}")
    if not t_max > 0.0:
        raise DomainError(f"t_max must be positive, got {t_max!r}")

    onset = None
    if n >= 3:
        onset = geometry.violation_onset(n, p)

    ts = [float(t) for t in np.geomspace(0.5, t_max, num)]
    margins = [geometry.radial_margin_scaled(n, p, t) for t in ts]
    fvals = [_raw_margin(n, p, t) for t in ts]

    def certified_negative(t: float, m: float) -> Optional[float]:
        if not m < 0.0:
            return None
        if m > -1e-12:
            m = geometry.radial_margin_scaled(n, p, t, precise=True)
            if not m < 0.0:
                return None
        return m

    violation = None
    for t, m in zip(ts, margins):
        mc = certified_negative(t, m)
        if mc is not None:
            violation = (t, mc)
            break

    if violation is None and onset is not None:
        for factor in (1.05, 1.2, 1.5, 2.0):
            t = onset * factor
            m = geometry.radial_margin_scaled(n, p, t, precise=True)
            if m < 0.0:
                violation = (t, m)
                break

    min_i = int(np.argmin(margins))
    return MarginTable(
        n=n, p=p, mode="find-violation", ts=tuple(ts),
        f_values=tuple(fvals), margins=tuple(margins),
        min_margin=margins[min_i], min_margin_t=ts[min_i], tolerance=tol,
        passed=violation is not None, violation=violation,
        onset_estimate=onset, inconclusive=violation is None)
