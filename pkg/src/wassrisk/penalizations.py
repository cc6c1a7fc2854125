"""Penalization functions of the transport distance and their conjugates.

A penalization phi maps [0, inf) to [0, inf], is convex, nondecreasing and
lower semicontinuous with phi(0) = 0.  Its conjugate

    phi*(y) = sup_{x >= 0} (x*y - phi(x))

is computed in closed form per family; exactness matters because the dual
minimizer often sits on the conjugate's domain boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

INF = math.inf


@dataclass(frozen=True)
class LinearPenalty:
    """phi(x) = delta * x with delta > 0."""

    delta: float

    def __post_init__(self) -> None:
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError("linear penalty slope delta must be a positive real")


@dataclass(frozen=True)
class BallPenalty:
    """phi(x) = inf * 1{x > delta}: a hard radius constraint.

    delta = 0 is the degenerate point where only the baseline law survives.
    """

    delta: float

    def __post_init__(self) -> None:
        if not (self.delta >= 0.0 and math.isfinite(self.delta)):
            raise ValueError("ball penalty radius delta must be a nonnegative real")


@dataclass(frozen=True)
class PiecewiseLinearPenalty:
    """Convex piecewise-linear phi given as (knot, slope-after-knot) pairs.

    The first knot must be 0 (phi(0) = 0); slopes are nonnegative and
    nondecreasing.  All-zero slopes would make phi constant and are rejected.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        bps = tuple((float(x), float(s)) for x, s in self.breakpoints)
        if not bps or bps[0][0] != 0.0:
            raise ValueError("breakpoints must start at x = 0")
        xs = [x for x, _ in bps]
        slopes = [s for _, s in bps]
        if any(x < 0 for x in xs) or xs != sorted(xs) or len(set(xs)) != len(xs):
            raise ValueError("breakpoint knots must be distinct, sorted and nonnegative")
        if any(s < 0 for s in slopes) or slopes != sorted(slopes):
            raise ValueError("slopes must be nonnegative and nondecreasing (convexity)")
        if slopes[-1] == 0.0:
            raise ValueError("all-zero slopes make the penalty constant; not allowed")
        object.__setattr__(self, "breakpoints", bps)

    def knot_values(self) -> list[tuple[float, float]]:
        """(knot, phi(knot)) for every breakpoint."""
        out = []
        acc = 0.0
        prev_x = 0.0
        prev_s = self.breakpoints[0][1]
        for x, s in self.breakpoints:
            acc += prev_s * (x - prev_x)
            out.append((x, acc))
            prev_x, prev_s = x, s
        return out


Penalization = Union[LinearPenalty, BallPenalty, PiecewiseLinearPenalty]


def evaluate(phi: Penalization, x: float) -> float:
    """phi(x) for x >= 0."""
    if x < 0.0:
        raise ValueError("penalizations are defined on x >= 0")
    if isinstance(phi, LinearPenalty):
        return phi.delta * x
    if isinstance(phi, BallPenalty):
        return 0.0 if x <= phi.delta else INF
    if isinstance(phi, PiecewiseLinearPenalty):
        knots = phi.knot_values()
        val = 0.0
        for (kx, kv), (_, slope) in zip(knots, phi.breakpoints):
            if x >= kx:
                val = kv + slope * (x - kx)
            else:
                break
        return val
    raise TypeError(f"unsupported penalization {type(phi).__name__}")


def conjugate(phi: Penalization, lam: float) -> float:
    """phi*(lam) = sup_{x>=0} (x*lam - phi(x)), exact per family."""
    if lam < 0.0:
        raise ValueError("conjugate is evaluated on lambda >= 0")
    if isinstance(phi, LinearPenalty):
        return 0.0 if lam <= phi.delta else INF
    if isinstance(phi, BallPenalty):
        return phi.delta * lam
    if isinstance(phi, PiecewiseLinearPenalty):
        if lam > phi.breakpoints[-1][1]:
            return INF
        return max(lam * kx - kv for kx, kv in phi.knot_values())
    raise TypeError(f"unsupported penalization {type(phi).__name__}")


def conjugate_domain_sup(phi: Penalization) -> float:
    """Supremum of the set where phi* is finite."""
    if isinstance(phi, LinearPenalty):
        return phi.delta
    if isinstance(phi, BallPenalty):
        return INF
    if isinstance(phi, PiecewiseLinearPenalty):
        return phi.breakpoints[-1][1]
    raise TypeError(f"unsupported penalization {type(phi).__name__}")


def penalty_from_json(spec: Union[str, dict]) -> Penalization:
    """Parse {"penalty":"linear","delta":d} | {"penalty":"ball","delta":d} |
    {"penalty":"piecewise","breakpoints":[[x,slope],...]}."""
    obj = json.loads(spec) if isinstance(spec, str) else spec
    if not isinstance(obj, dict) or "penalty" not in obj:
        raise ValueError("penalty JSON must be an object with a 'penalty' field")
    kind = str(obj["penalty"]).lower()
    try:
        if kind == "linear":
            return LinearPenalty(delta=float(obj["delta"]))
        if kind == "ball":
            return BallPenalty(delta=float(obj["delta"]))
        if kind == "piecewise":
            return PiecewiseLinearPenalty(
                tuple((float(x), float(s)) for x, s in obj["breakpoints"])
            )
    except KeyError as exc:
        raise ValueError(f"penalty JSON missing field {exc.args[0]!r}") from exc
    raise ValueError(f"unknown penalty kind {kind!r}")
