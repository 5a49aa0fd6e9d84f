"""Bookkeeping arithmetic for the global iteration scheme.

Maps a regularity pair (s, r) to admissibility margins, the polynomial
growth exponent of the Sobolev norms, the auxiliary exponents
(alpha0, alpha1, alpha2), the closed-form corner points of the admissible
region, and a concrete iteration schedule (N, delta, M) reaching a target
time T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

__all__ = ["RegularityPoint", "IterationPlan", "EPSILON", "admissible",
           "growth_exponent", "alpha_exponents", "corner_points",
           "iteration_plan"]

# fixed stand-in for the arbitrarily small epsilon in "+"/"-" exponents
EPSILON = 0.01

# largest dyadic frequency threshold the planner will schedule
N_CAP = 2 ** 40


@dataclass(frozen=True)
class RegularityPoint:
    s: float
    r: float


@dataclass(frozen=True)
class IterationPlan:
    N: int
    delta: float
    M: int
    T_reached: float
    exponent: float
    epsilon: float = EPSILON


def admissible(p: RegularityPoint):
    """Signed margins of every constraint; ok iff all are strictly positive.

    Constraints: s < 1, r <= 0, r >= s - 1, (14+8r)s > 9+3r, plus the
    local-theory conditions s > 1/2, r > 1-2s, r > -s/2, -1+2s+rs > 0 and
    -9-3r+14s+8rs > 0 (the latter two are re-checked rather than assumed).
    """
    s, r = p.s, p.r
    margins = {
        "s < 1": 1.0 - s,
        "r <= 0": -r,
        "r >= s - 1": r - (s - 1.0),
        "(14+8r)s > 9+3r": (14.0 + 8.0 * r) * s - (9.0 + 3.0 * r),
        "s > 1/2": s - 0.5,
        "r > 1 - 2s": r - (1.0 - 2.0 * s),
        "r > -s/2": r + s / 2.0,
        "-1+2s+rs > 0": -1.0 + 2.0 * s + r * s,
        "-9-3r+14s+8rs > 0": -9.0 - 3.0 * r + 14.0 * s + 8.0 * r * s,
    }
    # r <= 0 and r >= s-1 are non-strict; the rest strict
    nonstrict = {"r <= 0", "r >= s - 1"}
    ok = all(v >= 0.0 if name in nonstrict else v > 0.0
             for name, v in margins.items())
    return {"ok": ok, "margins": margins}


def _require_admissible(p):
    rep = admissible(p)
    if not rep["ok"]:
        bad = [name for name, v in rep["margins"].items() if v <= 0.0]
        raise ConfigurationError(
            f"point (s={p.s}, r={p.r}) violates: {', '.join(bad)}")
    return rep


def growth_exponent(p: RegularityPoint, with_branch=False):
    """max{(1-s)(1+r)/((2+r)s-1), 4(1-s)(1+r)/((14+8r)s-(9+3r))}."""
    _require_admissible(p)
    s, r = p.s, p.r
    b1 = (1.0 - s) * (1.0 + r) / ((2.0 + r) * s - 1.0)
    b2 = 4.0 * (1.0 - s) * (1.0 + r) / ((14.0 + 8.0 * r) * s - (9.0 + 3.0 * r))
    val = max(b1, b2)
    if with_branch:
        return val, ("low-frequency" if b1 >= b2 else "high-frequency")
    return val


def alpha_exponents(p: RegularityPoint):
    """alpha0, alpha1 (step-count and time exponents) and alpha2 = (1-s)/alpha1."""
    _require_admissible(p)
    s, r = p.s, p.r
    a0 = min((1.0 + r * s) / (1.0 + r),
             (-1.0 - 3.0 * r + 6.0 * s + 8.0 * r * s) / (4.0 * (1.0 + r)))
    a1 = min((-1.0 + 2.0 * s + r * s) / (1.0 + r),
             (-9.0 - 3.0 * r + 14.0 * s + 8.0 * r * s) / (4.0 * (1.0 + r)))
    if a1 <= 0.0:
        raise ConfigurationError("alpha1 nonpositive; point too rough")
    a2 = (1.0 - s) / a1
    return {"alpha0": a0, "alpha1": a1, "alpha2": a2}


def corner_points():
    """Closed-form corner points of the admissible (s, r) region.

    A = ((sqrt(17)-1)/4, (sqrt(17)-5)/4): intersection of s = r+1 with
    s(r + 3/2) = 1.  B = ((sqrt(201)-3)/16, (sqrt(201)-19)/16): intersection
    of s = r+1 with (14+8r)s = 9+3r.
    """
    a_s = (math.sqrt(17.0) - 1.0) / 4.0
    b_s = (math.sqrt(201.0) - 3.0) / 16.0
    return (RegularityPoint(a_s, a_s - 1.0),
            RegularityPoint(b_s, b_s - 1.0))


def iteration_plan(p: RegularityPoint, T: float, data_scale: float = 1.0,
                   delta_constant: float = 0.05) -> IterationPlan:
    """Smallest dyadic N whose schedule covers time T.

    Per threshold N the local step is delta = c * N^{-2(1-s)/(1+r) - eps}
    with c = delta_constant / data_scale^2 (the local existence time scales
    like an inverse square of the data size), and the energy bookkeeping
    allows M = floor(N^{alpha0 - eps}) steps.
    """
    rep = _require_admissible(p)
    del rep
    if T <= 0:
        raise ConfigurationError("target time T must be positive")
    if data_scale <= 0:
        raise ConfigurationError("data scale must be positive")
    a0 = alpha_exponents(p)["alpha0"]
    c = delta_constant / data_scale ** 2
    s, r = p.s, p.r
    N = 2
    while N <= N_CAP:
        delta = c * N ** (-2.0 * (1.0 - s) / (1.0 + r) - EPSILON)
        M = int(math.floor(N ** (a0 - EPSILON)))
        if M >= 1 and M * delta >= T:
            return IterationPlan(N=N, delta=delta, M=M,
                                 T_reached=M * delta,
                                 exponent=growth_exponent(p))
        N *= 2
    raise ConfigurationError(f"required threshold exceeds cap {N_CAP}")
