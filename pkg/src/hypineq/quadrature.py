"""Numerical kernels: adaptive Gauss-Kronrod quadrature on finite and
semi-infinite intervals, safeguarded root finding for monotone functions,
and finite-difference differentiation of grid samples.

Everything here is pure; integrand closures supplied by callers must be
safe to call repeatedly.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError

__all__ = [
    "QuadratureConfig",
    "integrate",
    "integrate_with_breakpoints",
    "find_root_increasing",
    "differentiate_grid",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets governing all improper integrals.

    tail_strategy selects how semi-infinite integrals are handled:
    "exponential-substitution" maps [a, inf) through s = a + e^y and sums
    unit panels in y until the tail is negligible; "hard-cutoff" simply
    integrates [a, tail_cutoff].
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 50
    max_panels: int = 4096
    tail_strategy: str = "exponential-substitution"
    tail_cutoff: float = 1e60

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")
        if self.tail_strategy not in ("exponential-substitution", "hard-cutoff"):
            raise DomainError(f"unknown tail strategy {self.tail_strategy!r}")


DEFAULT_CONFIG = QuadratureConfig()

# Gauss-Kronrod 7-15 pair on [-1, 1].  Odd-index nodes are the embedded
# Gauss-7 points.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])


def _gk15(f: Callable[[float], float], a: float, b: float) -> Tuple[float, float]:
    """One Gauss-Kronrod 7-15 panel.  Returns (K15 value, |K15 - G7|)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    resk = _WGK[7] * f(c)
    resg = _WG[3] * f(c)
    for j in range(7):
        x = h * _XGK[j]
        fsum = f(c - x) + f(c + x)
        resk += _WGK[j] * fsum
        if j % 2 == 1:
            resg += _WG[j // 2] * fsum
    return resk * h, abs(resk - resg) * abs(h)


def _integrate_finite(f, a, b, cfg: QuadratureConfig) -> Tuple[float, float]:
    val, err = _gk15(f, a, b)
    if not math.isfinite(val):
        raise EvaluationErrorFromIntegrand(a, b)
    heap = [(-err, 0, a, b, val, err, 0)]
    total, total_err = val, err
    counter = 1
    while total_err > max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        if len(heap) >= cfg.max_panels:
            raise ConvergenceError(
                f"quadrature panel budget exhausted on [{a!r}, {b!r}]",
                partial=total, error_estimate=total_err)
        neg_err, _, pa, pb, pval, perr, depth = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            raise ConvergenceError(
                f"quadrature hit max depth {cfg.max_depth} near [{pa!r}, {pb!r}]",
                partial=total, error_estimate=total_err)
        pm = 0.5 * (pa + pb)
        lval, lerr = _gk15(f, pa, pm)
        rval, rerr = _gk15(f, pm, pb)
        if not (math.isfinite(lval) and math.isfinite(rval)):
            raise EvaluationErrorFromIntegrand(pa, pb)
        total += (lval + rval) - pval
        total_err += (lerr + rerr) - perr
        heapq.heappush(heap, (-lerr, counter, pa, pm, lval, lerr, depth + 1))
        heapq.heappush(heap, (-rerr, counter + 1, pm, pb, rval, rerr, depth + 1))
        counter += 2
    return total, total_err


class EvaluationErrorFromIntegrand(ConvergenceError):
    def __init__(self, a, b):
        super().__init__(f"integrand returned a non-finite value on [{a!r}, {b!r}]")


def _integrate_semi(f, a, cfg: QuadratureConfig) -> Tuple[float, float]:
    """Integrate f over [a, inf) through the substitution s = a + e^y
    (s = e^y when a == 0, which also absorbs integrable singularities at 0).

    Unit panels in y are added outward from y = 0 until two consecutive
    panels on a side fall below the tolerance floor.
    """
    if a == 0.0:
        def g(y):
            s = math.exp(y)
            return f(s) * s
    else:
        def g(y):
            e = math.exp(y)
            return f(a + e) * e

    panel_cfg = cfg
    total = 0.0
    total_err = 0.0

    def panel(y0, y1):
        nonlocal total, total_err
        v, e = _integrate_finite(g, y0, y1, panel_cfg)
        total += v
        total_err += e
        return abs(v)

    floor = lambda: 0.25 * max(cfg.abs_tol, cfg.rel_tol * abs(total))
    # Right expansion: s grows like e^y, so convergent tails die out fast in y.
    # With a > 0 a power-law tail first *rises* in y (until e^y ~ a), so a
    # panel only counts as negligible once the panel sequence is decaying;
    # otherwise a small-magnitude tail would be cut off in its rising phase.
    small = 0
    prev = math.inf
    y = 0.0
    for _ in range(400):
        mag = panel(y, y + 2.0)
        y += 2.0
        small = small + 1 if (mag < floor() and mag <= prev) else 0
        prev = mag
        if small >= 2:
            break
    else:
        raise ConvergenceError("semi-infinite tail did not converge (right)",
                               partial=total, error_estimate=total_err)
    # Left expansion toward s -> a+ (or 0+).
    small = 0
    y = 0.0
    for _ in range(400):
        mag = panel(y - 2.0, y)
        y -= 2.0
        small = small + 1 if mag < floor() else 0
        if small >= 2:
            break
    else:
        raise ConvergenceError("semi-infinite tail did not converge (left)",
                               partial=total, error_estimate=total_err)
    return total, total_err


def integrate(f: Callable[[float], float], a: float, b: float,
              cfg: Optional[QuadratureConfig] = None) -> Tuple[float, float]:
    """Adaptive integral of f over [a, b]; b may be math.inf.

    Returns (value, error_estimate).  Raises ConvergenceError (carrying the
    partial value) when the subdivision budget runs out.
    """
    cfg = cfg or DEFAULT_CONFIG
    if math.isinf(a) or a >= b and not math.isinf(b):
        if a == b:
            return 0.0, 0.0
        raise DomainError(f"bad interval [{a!r}, {b!r}]")
    if math.isinf(b):
        if cfg.tail_strategy == "hard-cutoff":
            return _integrate_finite(f, a, cfg.tail_cutoff, cfg)
        return _integrate_semi(f, a, cfg)
    return _integrate_finite(f, a, b, cfg)


def _integrate_left_edge(f, b: float, cfg: QuadratureConfig) -> Tuple[float, float]:
    """Integrate f over (0, b] through s = b e^y, y in (-inf, 0].

    Same exponential substitution as the semi-infinite path, used here to
    absorb integrable power singularities at the left endpoint 0 that a
    plain dyadic subdivision cannot resolve.
    """
    def g(y):
        s = b * math.exp(y)
        return f(s) * s

    total = 0.0
    total_err = 0.0
    small = 0
    prev = math.inf
    y = 0.0
    for _ in range(400):
        v, e = _integrate_finite(g, y - 2.0, y, cfg)
        total += v
        total_err += e
        y -= 2.0
        mag = abs(v)
        floor = 0.25 * max(cfg.abs_tol, cfg.rel_tol * abs(total))
        small = small + 1 if (mag < floor and mag <= prev) else 0
        prev = mag
        if small >= 2:
            return total, total_err
    raise ConvergenceError("left-edge substitution did not converge",
                           partial=total, error_estimate=total_err)


def integrate_with_breakpoints(f: Callable[[float], float], a: float, b: float,
                               points: Sequence[float],
                               cfg: Optional[QuadratureConfig] = None
                               ) -> Tuple[float, float]:
    """Adaptive integral of f over [a, b] forced to respect interior
    breakpoints (e.g. the grid of a sharply concentrated profile, which a
    global subdivision could step right over).  b may be math.inf; the
    piece beyond the last breakpoint is then handled as a tail.
    """
    cfg = cfg or DEFAULT_CONFIG
    pts = sorted({float(x) for x in points if a < x < b})
    total, total_err = 0.0, 0.0
    lo = a
    for x in pts:
        if lo == 0.0:
            # a profile closure may be singular (but integrable) at the
            # origin; the substitution handles that where bisection cannot
            v, e = _integrate_left_edge(f, x, cfg)
        else:
            v, e = _integrate_finite(f, lo, x, cfg)
        total += v
        total_err += e
        lo = x
    v, e = integrate(f, lo, b, cfg)
    return total + v, total_err + e


def find_root_increasing(f: Callable[[float], float], target: float,
                         bracket: Tuple[float, float],
                         df: Optional[Callable[[float], float]] = None,
                         rel_tol: float = 1e-13,
                         max_iter: int = 200) -> float:
    """Solve f(t) = target for a strictly increasing f on a bracket.

    Newton (or secant when df is None) with a bisection safeguard: every
    iterate stays inside the current sign-change bracket, falling back to
    the midpoint whenever the model step escapes or stalls.
    """
    lo, hi = bracket
    if not lo <= hi:
        raise BracketError(f"empty bracket ({lo!r}, {hi!r})")
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo > 0.0 or fhi < 0.0:
        raise BracketError(
            f"bracket ({lo!r}, {hi!r}) does not straddle target {target!r}")
    t = 0.5 * (lo + hi)
    ft_prev, t_prev = flo, lo
    f_tol = rel_tol * abs(target) if target != 0.0 else rel_tol
    for _ in range(max_iter):
        ft = f(t) - target
        if abs(ft) <= f_tol or hi - lo <= rel_tol * max(abs(t), 1e-300):
            return t
        if ft > 0.0:
            hi = t
        else:
            lo = t
        if df is not None:
            d = df(t)
        else:
            d = (ft - ft_prev) / (t - t_prev) if t != t_prev else 0.0
        ft_prev, t_prev = ft, t
        step_ok = False
        if d > 0.0 and math.isfinite(d):
            cand = t - ft / d
            if lo < cand < hi:
                t = cand
                step_ok = True
        if not step_ok:
            t = 0.5 * (lo + hi)
    return t


def differentiate_grid(xs: Sequence[float], ys: Sequence[float],
                       clamp_nonpositive: bool = False):
    """Second-order finite differences on a strictly increasing grid.

    Central (three-point, non-uniform) formulas in the interior, one-sided
    second-order at the ends.  With clamp_nonpositive, positive derivative
    values are clamped to zero (for samples of a non-increasing function)
    and the clamped l1 mass is returned alongside.

    Returns derivative array, or (derivative, clamped_mass) when clamping.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 3:
        raise DomainError("need matching 1-d grids with at least 3 nodes")
    if np.any(np.diff(xs) <= 0):
        raise DomainError("grid must be strictly increasing")
    d = np.empty_like(ys)
    h1 = xs[1:-1] - xs[:-2]
    h2 = xs[2:] - xs[1:-1]
    d[1:-1] = (-h2 / (h1 * (h1 + h2)) * ys[:-2]
               + (h2 - h1) / (h1 * h2) * ys[1:-1]
               + h1 / (h2 * (h1 + h2)) * ys[2:])
    # one-sided second order at both ends
    for i, (i0, i1, i2) in ((0, (0, 1, 2)), (len(xs) - 1, (-1, -2, -3))):
        a1 = xs[i1] - xs[i0]
        a2 = xs[i2] - xs[i0]
        d[i] = (ys[i1] * a2 * a2 - ys[i2] * a1 * a1
                - ys[i0] * (a2 * a2 - a1 * a1)) / (a1 * a2 * (a2 - a1))
    if not clamp_nonpositive:
        return d
    mask = d > 0.0
    clamped = float(np.sum(d[mask]))
    d[mask] = 0.0
    return d, clamped
