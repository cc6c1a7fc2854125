"""VaR, expectiles, robust generalized quantiles and the two robust
expectile families.

The linear-penalty robust expectile is the root of the weighted first-order
condition

    -2*A*E[(X-m)^+] + 2*B*E[(X-m)^-] = 0,
    A = alpha*delta/(delta - alpha),   B = (1-alpha)*delta/(delta - (1-alpha)),

which also equals the classical expectile at the adjusted level A/(A+B); the
implementation solves the FOC and the identity is kept as a test property.
The ball-penalty robust expectile minimizes the dual objective in lambda
after profiling out m, whose inner minimizer is again an expectile at a
lambda-dependent level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .distributions import (
    Empirical,
    PriorDistribution,
    partial_moment_minus,
    partial_moment_plus,
    quantile,
    second_moments_exist,
)
from .errors import DeltaTooSmall, MomentUndefined, NoConvergence
from .losses import CostExponent, LossSpec
from .penalizations import Penalization
from .robust_core import RobustValue, SearchOptions, argmin_interval_of_functional
from .solvers import golden_section_min, increasing_root

INF = math.inf


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


@dataclass(frozen=True)
class ExpectileLevel:
    """Level alpha with linear-penalty slope delta and the induced adjusted
    level at which the classical expectile coincides with the robust one."""

    alpha: float
    delta: float
    adjusted_alpha: float = math.nan

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        thr = max(self.alpha, 1.0 - self.alpha)
        if not self.delta > thr:
            raise DeltaTooSmall(
                f"delta must exceed max(alpha, 1-alpha) = {thr!r}, got {self.delta!r}"
            )
        object.__setattr__(self, "adjusted_alpha", adjusted_level(self.alpha, self.delta))

    @property
    def coefficient_plus(self) -> float:
        return self.alpha * self.delta / (self.delta - self.alpha)

    @property
    def coefficient_minus(self) -> float:
        return (1.0 - self.alpha) * self.delta / (self.delta - (1.0 - self.alpha))


def adjusted_level(alpha: float, lam: float) -> float:
    """A/(A+B) in a cancellation-free form, bounded in (0, 1) even as lam
    approaches max(alpha, 1-alpha)."""
    return alpha * (lam - (1.0 - alpha)) / (lam - 2.0 * alpha * (1.0 - alpha))


def var(d: PriorDistribution, alpha: float) -> float:
    """Lower alpha-quantile; satisfies P(X < q) <= alpha <= P(X <= q)."""
    return quantile(d, alpha)


def _require_second_moments(d: PriorDistribution) -> None:
    if not second_moments_exist(d):
        raise MomentUndefined("expectile computations need finite second moments")


def _asymmetric_root_stats(d: PriorDistribution, a: float, b: float) -> tuple[float, int]:
    """(root, FOC evaluation count) of m -> b*E[(X-m)^-] - a*E[(X-m)^+]."""
    count = [0]

    def foc(m: float) -> float:
        count[0] += 1
        return b * partial_moment_minus(d, m, 1) - a * partial_moment_plus(d, m, 1)

    if isinstance(d, Empirical):
        lo, hi = d.support
        if hi == lo:
            return lo, 0
    else:
        lo, hi = quantile(d, 1e-4), quantile(d, 1.0 - 1e-4)
    return increasing_root(foc, lo, hi), count[0]


def _asymmetric_root(d: PriorDistribution, a: float, b: float) -> float:
    """Unique root of m -> b*E[(X-m)^-] - a*E[(X-m)^+] for a, b > 0."""
    root, _ = _asymmetric_root_stats(d, a, b)
    return root


def expectile(d: PriorDistribution, alpha: float) -> float:
    """Unique m with alpha*E[(X-m)^+] = (1-alpha)*E[(X-m)^-]."""
    _check_alpha(alpha)
    _require_second_moments(d)
    return _asymmetric_root(d, alpha, 1.0 - alpha)


def robust_expectile_linear(d: PriorDistribution, alpha: float, delta1: float) -> float:
    """Robust expectile under the linear penalty delta1 * distance."""
    level = ExpectileLevel(alpha, delta1)
    _require_second_moments(d)
    return _asymmetric_root(d, level.coefficient_plus, level.coefficient_minus)


def _ball_stats(
    d: PriorDistribution, alpha: float, delta2: float, options: Optional[SearchOptions] = None
) -> tuple[float, float, int]:
    """(robust expectile, minimizing lambda, inner-solve count) for the ball
    penalty; delta2 must be positive here."""
    opt = options or SearchOptions()
    thr = max(alpha, 1.0 - alpha)
    lam_lo = thr + 1e-8
    evals = [0]

    def inner_m(lam: float) -> float:
        evals[0] += 1
        tau = adjusted_level(alpha, lam)
        return _asymmetric_root(d, tau, 1.0 - tau)

    def g_value(lam: float) -> float:
        m = inner_m(lam)
        big_a = alpha * lam / (lam - alpha)
        big_b = (1.0 - alpha) * lam / (lam - (1.0 - alpha))
        return (
            big_a * partial_moment_plus(d, m, 2)
            + big_b * partial_moment_minus(d, m, 2)
            + delta2 * lam
        )

    def g_slope(lam: float) -> float:
        # envelope derivative: the inner minimizer drops out
        m = inner_m(lam)
        return (
            delta2
            - (alpha / (lam - alpha)) ** 2 * partial_moment_plus(d, m, 2)
            - ((1.0 - alpha) / (lam - (1.0 - alpha))) ** 2 * partial_moment_minus(d, m, 2)
        )

    hi = lam_lo + 1.0
    for _ in range(opt.max_doublings):
        if g_slope(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NoConvergence("no positive-slope upper bracket for the ball dual search")
    lam_star, _, hit_cap = golden_section_min(
        g_value, lam_lo, hi, tol=opt.lambda_tol, max_iter=opt.max_iter
    )
    if hit_cap:
        raise NoConvergence("ball dual search exceeded the iteration budget")
    return inner_m(lam_star), lam_star, evals[0]


def robust_expectile_ball(
    d: PriorDistribution, alpha: float, delta2: float, options: Optional[SearchOptions] = None
) -> float:
    """Robust expectile under the ball penalty of radius delta2.

    Radius zero admits only the baseline law and returns the classical
    expectile.
    """
    _check_alpha(alpha)
    if delta2 < 0.0:
        raise ValueError("ball radius delta2 must be nonnegative")
    _require_second_moments(d)
    if delta2 == 0.0:
        return expectile(d, alpha)
    value, _, _ = _ball_stats(d, alpha, delta2, options)
    return value


def robust_generalized_quantile(
    d: PriorDistribution,
    loss: LossSpec,
    cost: CostExponent,
    phi: Penalization,
    options: Optional[SearchOptions] = None,
) -> tuple[float, float]:
    """Closed argmin interval [m1, m2] of m -> E_phi(h, X, m).

    Flat bottoms (ties) are reported as the full interval, never collapsed
    to a silently chosen point.  Raises Infeasible when the functional is
    +inf everywhere.
    """
    rv = argmin_interval_of_functional(d, loss, cost, phi, options)
    return rv.argmin_m


def robust_generalized_quantile_detail(
    d: PriorDistribution,
    loss: LossSpec,
    cost: CostExponent,
    phi: Penalization,
    options: Optional[SearchOptions] = None,
) -> RobustValue:
    """Full solver result behind robust_generalized_quantile."""
    return argmin_interval_of_functional(d, loss, cost, phi, options)
