"""Scalar minimization and root-finding kernels used by the risk solvers.

Golden-section search over a bracket, outward bracket expansion that
distinguishes flat plateaus from unbounded descent, flat-minimum edge
detection, and a monotone-root helper wrapping Brent's method.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

from scipy.optimize import brentq

from .errors import NoConvergence

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    max_iter: int = 200,
) -> Tuple[float, float, bool]:
    """Minimize a unimodal f on [lo, hi]; returns (x, f(x), hit_iteration_cap)."""
    a, b = float(lo), float(hi)
    if b < a:
        a, b = b, a
    c1 = b - _INVPHI * (b - a)
    c2 = a + _INVPHI * (b - a)
    f1, f2 = f(c1), f(c2)
    it = 0
    while (b - a) > tol and it < max_iter:
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - _INVPHI * (b - a)
            f1 = f(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + _INVPHI * (b - a)
            f2 = f(c2)
        it += 1
    x = c1 if f1 <= f2 else c2
    fx = min(f1, f2)
    # keep endpoint minima honest for objectives decreasing into a boundary
    fa, fb = f(a), f(b)
    if fa < fx:
        x, fx = a, fa
    if fb < fx:
        x, fx = b, fb
    return x, fx, it >= max_iter


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    max_doublings: int = 60,
    flat_tol: float = 1e-10,
) -> Tuple[float, float, bool, bool]:
    """Widen [lo, hi] until both endpoint values clearly exceed the best value
    seen between them.

    A convex objective either gets bracketed, stays flat toward a side
    (reported via the flat flags; the plateau value is the infimum there), or
    decreases without bound, which raises NoConvergence.
    """
    lo, hi = float(lo), float(hi)
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    f_lo, f_hi = f(lo), f(hi)
    f_mid = f(0.5 * (lo + hi))
    flat_left = flat_right = False

    # convex f that stops decreasing along a ray never decreases again, so one
    # non-decreasing doubling certifies a flat side; stopping there also keeps
    # the bracket small enough that float noise stays below flat_tol
    best = min(f_mid, f_hi)
    step = max(hi - lo, 1.0)
    k = 0
    while f_lo <= best + flat_tol:
        if k >= max_doublings:
            raise NoConvergence("objective keeps decreasing toward -inf on the left")
        best = min(best, f_lo)
        new_lo = lo - step
        step *= 2.0
        f_new = f(new_lo)
        k += 1
        if f_new >= f_lo - flat_tol and f_new <= best + flat_tol:
            lo, f_lo = new_lo, f_new
            flat_left = True
            break
        lo, f_lo = new_lo, f_new

    best = min(f_mid, f_lo)
    step = max(hi - lo, 1.0)
    k = 0
    while f_hi <= best + flat_tol:
        if k >= max_doublings:
            raise NoConvergence("objective keeps decreasing toward -inf on the right")
        best = min(best, f_hi)
        new_hi = hi + step
        step *= 2.0
        f_new = f(new_hi)
        k += 1
        if f_new >= f_hi - flat_tol and f_new <= best + flat_tol:
            hi, f_hi = new_hi, f_new
            flat_right = True
            break
        hi, f_hi = new_hi, f_new
    return lo, hi, flat_left, flat_right


def flat_minimum_edges(
    f: Callable[[float], float],
    x_star: float,
    f_min: float,
    lo: float,
    hi: float,
    value_tol: float = 1e-10,
    resolution: float = 1e-6,
) -> Tuple[float, float]:
    """Edges of the region {x in [lo, hi]: f(x) <= f_min + value_tol} around
    x_star, located to `resolution` by expanding steps plus bisection."""

    def edge(direction: float) -> float:
        limit = hi if direction > 0 else lo
        inside = x_star
        if (limit - inside) * direction <= 0.0:
            return limit
        step = resolution
        outside = None
        for _ in range(400):
            probe = inside + direction * step
            if (probe - limit) * direction >= 0.0:
                probe = limit
            if f(probe) <= f_min + value_tol:
                inside = probe
                if probe == limit:
                    return limit
                step *= 2.0
            else:
                outside = probe
                break
        if outside is None:
            return inside
        for _ in range(400):
            if abs(outside - inside) <= resolution:
                break
            mid = 0.5 * (inside + outside)
            if f(mid) <= f_min + value_tol:
                inside = mid
            else:
                outside = mid
        return inside

    m1 = edge(-1.0)
    m2 = edge(+1.0)
    return min(m1, x_star), max(m2, x_star)


def increasing_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    max_doublings: int = 60,
) -> float:
    """Root of a nondecreasing f, expanding [lo, hi] until it brackets zero."""
    lo, hi = float(lo), float(hi)
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    f_lo, f_hi = f(lo), f(hi)
    step = max(hi - lo, 1.0)
    k = 0
    while f_lo > 0.0:
        if k >= max_doublings:
            raise NoConvergence("no sign change found expanding left")
        lo -= step
        step *= 2.0
        f_lo = f(lo)
        k += 1
    step = max(hi - lo, 1.0)
    k = 0
    while f_hi < 0.0:
        if k >= max_doublings:
            raise NoConvergence("no sign change found expanding right")
        hi += step
        step *= 2.0
        f_hi = f(hi)
        k += 1
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    return float(brentq(f, lo, hi, xtol=1e-14, maxiter=200))
