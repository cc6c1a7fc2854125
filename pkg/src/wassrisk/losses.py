"""Loss functions and their lambda-c transforms.

The transform of a loss l under cost |x-y|^p at level lam is

    sup_y { l(y) - lam * |x - y|^p },

an extended-real value (+inf is legal).  Closed forms are implemented for the
two canonical asymmetric families when the cost exponent matches the loss
power (pinball with p=1, one-sided quadratics with p=2); every other spec
falls back to a certified numeric supremum whose truncation radius comes
from the loss's polynomial growth bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import UncertifiedGrowth

INF = math.inf

_CERT_GRID = np.concatenate(
    [np.linspace(-50.0, 50.0, 1001), np.array([-1e3, -250.0, 250.0, 1e3])]
)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


@dataclass(frozen=True)
class Pinball:
    """h(x) = alpha*x^+ + (1-alpha)*x^-."""

    alpha: float

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class AsymQuadratic:
    """h(x) = alpha*(x^+)^2 + (1-alpha)*(x^-)^2."""

    alpha: float

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class PowerLoss:
    coefficient: float
    exponent: float

    def __post_init__(self) -> None:
        if self.coefficient < 0.0:
            raise ValueError("power-loss coefficient must be nonnegative")
        if self.exponent < 1.0:
            raise ValueError("power-loss exponent must be >= 1")


@dataclass(frozen=True)
class GeneralizedQuantile:
    """h(x) = alpha*l1(x^+) + (1-alpha)*l2(x^-) for power losses l1, l2."""

    alpha: float
    l1: PowerLoss
    l2: PowerLoss

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class CustomLoss:
    """Convex increasing loss given as a callable plus its growth certificate
    h(x) <= growth_constant * (1 + |x|^growth_power)."""

    evaluator: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    growth_constant: float = 0.0
    growth_power: float = 1.0

    def __post_init__(self) -> None:
        if self.growth_constant < 0.0:
            raise ValueError("growth_constant must be nonnegative")
        if self.growth_power < 1.0:
            raise ValueError("growth_power must be >= 1")


LossSpec = Union[Pinball, AsymQuadratic, GeneralizedQuantile, CustomLoss]


@dataclass(frozen=True)
class CostExponent:
    """Transport cost c(x, y) = |x - y|^p."""

    p: float

    def __post_init__(self) -> None:
        if self.p < 1.0:
            raise ValueError("cost exponent p must be >= 1")


def pinball_coefficients(loss: LossSpec) -> Optional[tuple[float, float]]:
    """(a, b) with h(x) = a*x^+ + b*x^-, or None if not of that shape."""
    if isinstance(loss, Pinball):
        return loss.alpha, 1.0 - loss.alpha
    if isinstance(loss, GeneralizedQuantile) and loss.l1.exponent == 1.0 and loss.l2.exponent == 1.0:
        return loss.alpha * loss.l1.coefficient, (1.0 - loss.alpha) * loss.l2.coefficient
    return None


def quad_coefficients(loss: LossSpec) -> Optional[tuple[float, float]]:
    """(a, b) with h(x) = a*(x^+)^2 + b*(x^-)^2, or None."""
    if isinstance(loss, AsymQuadratic):
        return loss.alpha, 1.0 - loss.alpha
    if isinstance(loss, GeneralizedQuantile) and loss.l1.exponent == 2.0 and loss.l2.exponent == 2.0:
        return loss.alpha * loss.l1.coefficient, (1.0 - loss.alpha) * loss.l2.coefficient
    return None


def closed_form_kind(loss: LossSpec, cost: CostExponent) -> Optional[str]:
    if cost.p == 1.0 and pinball_coefficients(loss) is not None:
        return "pinball"
    if cost.p == 2.0 and quad_coefficients(loss) is not None:
        return "quad"
    return None


def loss_value(loss: LossSpec, x) -> float | np.ndarray:
    """h(x); accepts scalars or numpy arrays."""
    xp = np.maximum(x, 0.0)
    xm = np.maximum(-np.asarray(x, dtype=float), 0.0)
    pin = pinball_coefficients(loss)
    if pin is not None:
        out = pin[0] * xp + pin[1] * xm
    else:
        quad = quad_coefficients(loss)
        if quad is not None:
            out = quad[0] * xp * xp + quad[1] * xm * xm
        elif isinstance(loss, GeneralizedQuantile):
            out = loss.alpha * loss.l1.coefficient * xp**loss.l1.exponent + (
                1.0 - loss.alpha
            ) * loss.l2.coefficient * xm**loss.l2.exponent
        elif isinstance(loss, CustomLoss):
            out = _custom_eval(loss, np.asarray(x, dtype=float))
        else:
            raise TypeError(f"unsupported loss {type(loss).__name__}")
    if np.ndim(x) == 0:
        return float(out)
    return np.asarray(out, dtype=float)


def _custom_eval(loss: CustomLoss, arr: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(loss.evaluator(arr), dtype=float)
        if out.shape == arr.shape:
            return out
    except Exception:
        pass
    return np.array([float(loss.evaluator(float(v))) for v in arr.ravel()]).reshape(arr.shape)


def _growth_certificate(loss: LossSpec, cost: CostExponent) -> float:
    """Constant C such that h(x) <= C*(1 + |x|^p) is certified on a grid.

    Raises UncertifiedGrowth when no bound with the cost's exponent exists
    (loss power above p) or when the stated bound fails numerically.
    """
    pin = pinball_coefficients(loss)
    if pin is not None:
        base_c, base_g = max(pin), 1.0
    else:
        quad = quad_coefficients(loss)
        if quad is not None:
            base_c, base_g = max(quad), 2.0
        elif isinstance(loss, GeneralizedQuantile):
            base_c = max(loss.alpha * loss.l1.coefficient, (1.0 - loss.alpha) * loss.l2.coefficient)
            base_g = max(loss.l1.exponent, loss.l2.exponent)
        elif isinstance(loss, CustomLoss):
            base_c, base_g = loss.growth_constant, loss.growth_power
        else:
            raise TypeError(f"unsupported loss {type(loss).__name__}")
    if base_g > cost.p:
        raise UncertifiedGrowth(
            f"loss grows like |x|^{base_g} but the cost exponent is {cost.p}"
        )
    # |x|^g <= 1 + |x|^p for g <= p, so the bound survives an exponent upgrade
    # at the price of a factor 2 outside the matched case.
    c_eff = base_c if base_g == cost.p else 2.0 * base_c
    if isinstance(loss, CustomLoss):
        vals = _custom_eval(loss, _CERT_GRID)
        bound = loss.growth_constant * (1.0 + np.abs(_CERT_GRID) ** loss.growth_power)
        bad = vals > bound + 1e-9 * (1.0 + np.abs(bound))
        if np.any(bad):
            x_bad = float(_CERT_GRID[np.argmax(bad)])
            raise UncertifiedGrowth(
                f"growth bound h(x) <= C(1+|x|^p) fails at x={x_bad!r}"
            )
    return c_eff


def finiteness_threshold(loss: LossSpec, cost: CostExponent) -> float:
    """Infimal lambda below which the transform is certified to be +inf.

    Closed-form families use the exact switching level max(a, b); everything
    else returns the (possibly conservative) certified growth constant.
    """
    kind = closed_form_kind(loss, cost)
    if kind == "pinball":
        return max(pinball_coefficients(loss))  # type: ignore[arg-type]
    if kind == "quad":
        return max(quad_coefficients(loss))  # type: ignore[arg-type]
    return _growth_certificate(loss, cost)


def _numeric_sup(loss: LossSpec, cost: CostExponent, lam: float, x: float) -> float:
    """Grid-plus-golden maximization of l(y) - lam*|x-y|^p over a certified
    window [x-R, x+R]; outside it the objective sits below l(x) - 1."""
    c_eff = _growth_certificate(loss, cost)
    p = cost.p
    lx = float(loss_value(loss, x))
    radius = 1.0
    for _ in range(200):
        tail = c_eff * (1.0 + (abs(x) + radius) ** p) - lam * radius**p
        if tail <= lx - 1.0:
            break
        radius *= 2.0
    else:
        raise UncertifiedGrowth("could not certify a truncation radius; lambda too close to C")
    step = 1e-3
    n = int(min(2.0 * radius / step, 200_001)) + 1
    grid = np.linspace(x - radius, x + radius, n)
    step = grid[1] - grid[0]
    obj = np.asarray(loss_value(loss, grid)) - lam * np.abs(x - grid) ** p
    k = int(np.argmax(obj))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, n - 1)]

    def neg(y: float) -> float:
        return -(float(loss_value(loss, y)) - lam * abs(x - y) ** p)

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = neg(c1), neg(c2)
    for _ in range(80):
        if b - a <= 1e-12 * max(1.0, abs(a), abs(b)):
            break
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = neg(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = neg(c2)
    best = max(float(obj[k]), -f1, -f2)
    return best


def lambda_c_transform(loss: LossSpec, cost: CostExponent, lam: float, x: float) -> float:
    """sup_y { l(y) - lam*|x-y|^p } as an extended real."""
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    kind = closed_form_kind(loss, cost)
    if kind == "pinball":
        a, b = pinball_coefficients(loss)  # type: ignore[misc]
        if lam >= max(a, b):
            return float(loss_value(loss, x))
        return INF
    if kind == "quad":
        a, b = quad_coefficients(loss)  # type: ignore[misc]
        thr = max(a, b)
        if lam < thr:
            return INF
        if lam == thr:
            if a == b:
                return INF
            if a > b:  # finite only on the left half-line
                if x > 0.0:
                    return INF
                coef = a * b / (a - b)
                return coef * x * x
            if x < 0.0:
                return INF
            coef = a * b / (b - a)
            return coef * x * x
        big_a = a * lam / (lam - a)
        big_b = b * lam / (lam - b)
        xp = max(x, 0.0)
        xm = max(-x, 0.0)
        return big_a * xp * xp + big_b * xm * xm
    if lam <= _growth_certificate(loss, cost):
        return INF
    return _numeric_sup(loss, cost, lam, x)


def check_L_membership(
    loss: LossSpec,
    cost: CostExponent,
    lam: float,
    grid: Sequence[float],
    tol: float = 1e-7,
) -> bool:
    """Numeric certificate for transform(x) >= transform(0) + x on the grid."""
    t0 = lambda_c_transform(loss, cost, lam, 0.0)
    if math.isinf(t0):
        return False
    for x in grid:
        tx = lambda_c_transform(loss, cost, lam, float(x))
        if math.isinf(tx):
            continue
        if tx < t0 + float(x) - tol:
            return False
    return True
