"""Frequency-truncation multipliers and the resonant bilinear symbols.

The basic multiplier is a plateau-then-power profile

    m_{q,N}(rho) = 1                for rho <= N,
                 = (N / rho)^q      for rho >= N,

radial in the frequency magnitude rho = |k|.  The smoothing operator for the
Schrodinger component uses exponent q = 1 - s; the one for the reduced wave
component uses q = -r (hence the identity when r = 0).

The resonant symbol sigma_+-(xi1, xi2) is the difference quotient of the
quadratic form built from these multipliers.  Away from the near-resonant set
it is the "wave-corrected" quotient sigma^Z; on and near the diagonal it
degenerates to the Schrodinger quotient sigma^S, which is continued across
the diagonal by the derivative of g(rho) = rho * m_{1-s,N}(sqrt(rho))^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import SpectralField, apply_radial_symbol

__all__ = ["IMultiplierSpec", "m_value", "apply_I_schrodinger", "apply_I_wave",
           "sigma_pairs", "sigma", "sigma_bound_audit"]


def m_value(rho, q, N):
    """Plateau-then-power multiplier m_{q,N}(rho)."""
    rho = np.asarray(rho, dtype=float)
    if N <= 0:
        raise ConfigurationError("threshold N must be positive")
    out = np.ones_like(rho)
    high = rho > N
    if np.any(high):
        out = np.where(high, (N / np.where(high, rho, N)) ** q, out)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class IMultiplierSpec:
    """Parameters (s, r, N) of the smoothing pair.

    Requires s < 1 (so the Schrodinger exponent 1 - s is positive), r <= 0,
    and dyadic-ish N >= 1.
    """

    s: float
    r: float
    N: float

    def __post_init__(self):
        if not (self.s < 1.0):
            raise ConfigurationError("need s < 1")
        if self.r > 0:
            raise ConfigurationError("need r <= 0")
        if self.N < 1:
            raise ConfigurationError("need N >= 1")

    @property
    def q_s(self):
        return 1.0 - self.s

    @property
    def q_w(self):
        return -self.r

    def m_s(self, rho):
        """Schrodinger-side multiplier m_{1-s,N}."""
        return m_value(rho, self.q_s, self.N)

    def m_w(self, rho):
        """Wave-side multiplier m_{-r,N}; identity when r = 0."""
        return m_value(rho, self.q_w, self.N)


def apply_I_schrodinger(f: SpectralField, spec: IMultiplierSpec) -> SpectralField:
    return apply_radial_symbol(f, spec.m_s)


def apply_I_wave(f: SpectralField, spec: IMultiplierSpec) -> SpectralField:
    return apply_radial_symbol(f, spec.m_w)


def _g_quotient(rho1, rho2, q, N):
    """(g(rho1) - g(rho2)) / (rho1 - rho2) with g(rho) = rho m_{q,N}(sqrt rho)^2,
    continued by g'(rho) on the diagonal.

    Arguments are the squared magnitudes rho_i = |xi_i|^2.  Written so that
    swapping (rho1, rho2) returns bitwise-identical values.
    """
    N2 = N * N
    g1 = rho1 * m_value(np.sqrt(rho1), q, N) ** 2
    g2 = rho2 * m_value(np.sqrt(rho2), q, N) ** 2
    diff = rho1 - rho2
    # g(rho) = rho for rho <= N^2 and N^{2q} rho^{1-q} above; g' below follows
    rmax = np.maximum(rho1, rho2)
    deriv = np.where(rmax <= N2, 1.0,
                     (1.0 - q) * (N2 / np.where(rmax > 0, rmax, 1.0)) ** q)
    with np.errstate(divide="ignore", invalid="ignore"):
        quot = (g1 - g2) / diff
    return np.where(diff == 0.0, deriv, quot)


def sigma_pairs(xi1, xi2, spec: IMultiplierSpec):
    """Resonant symbols (sigma_+, sigma_-) for stacked frequency pairs.

    ``xi1`` and ``xi2`` are arrays of shape (..., 2).  Returns two arrays of
    shape (...).  Exact symmetries, bitwise in IEEE arithmetic:

        sigma_+-(xi1, xi2) == sigma_-+(xi2, xi1) == sigma_+-(-xi1, -xi2).
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    r1 = xi1[..., 0] ** 2 + xi1[..., 1] ** 2
    r2 = xi2[..., 0] ** 2 + xi2[..., 1] ** 2
    x12 = xi1 + xi2
    a12 = np.sqrt(x12[..., 0] ** 2 + x12[..., 1] ** 2)

    m1sq = m_value(np.sqrt(r1), spec.q_s, spec.N) ** 2
    m2sq = m_value(np.sqrt(r2), spec.q_s, spec.N) ** 2
    mwsq = m_value(a12, spec.q_w, spec.N) ** 2

    schro = _g_quotient(r1, r2, spec.q_s, spec.N)
    nonres = np.abs(r1 - r2) > 2.0 * a12

    out = []
    for sign in (+1.0, -1.0):
        num = r1 * m1sq - r2 * m2sq + sign * a12 * mwsq
        den = r1 - r2 + sign * a12
        with np.errstate(divide="ignore", invalid="ignore"):
            zed = num / den
        out.append(np.where(nonres, zed, schro))
    return out[0], out[1]


def sigma(xi1, xi2, spec: IMultiplierSpec, sign=+1):
    """Scalar-friendly wrapper around :func:`sigma_pairs`."""
    sp, sm = sigma_pairs(np.atleast_2d(xi1), np.atleast_2d(xi2), spec)
    v = sp if sign > 0 else sm
    return float(v[0]) if np.asarray(xi1).ndim == 1 else v


def sigma_bound_audit(spec: IMultiplierSpec, rng, trials=2000):
    """Sample the symbol in the high-low and comparable regimes and report the
    worst observed ratios against the expected envelopes.

    High-low regime (|xi1| >> |xi2|):  |sigma - m(xi1)^2| <= C (|xi2|^2/|xi1|^2
    + 1/|xi1|).  Comparable regime (|xi1| ~ |xi2|): |sigma| <= C.  Returns a
    dict with the two worst constants and the sample counts; deterministic
    for a seeded generator.
    """
    N = spec.N

    def rand_dirs(n):
        th = rng.uniform(0.0, 2 * np.pi, size=n)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)

    # high-low samples: |xi1| in [4N, 64N], |xi2| <= |xi1| / 8
    n = trials
    a1 = rng.uniform(4 * N, 64 * N, size=n)
    a2 = a1 * rng.uniform(0.0, 0.125, size=n)
    xi1 = rand_dirs(n) * a1[:, None]
    xi2 = rand_dirs(n) * a2[:, None]
    sp, sm = sigma_pairs(xi1, xi2, spec)
    m1sq = m_value(a1, spec.q_s, N) ** 2
    envelope = (a2 / a1) ** 2 + 1.0 / a1
    worst_highlow = float(np.max(np.maximum(np.abs(sp - m1sq),
                                            np.abs(sm - m1sq)) / envelope))

    # comparable samples: |xi2| / |xi1| in [1/2, 2]
    a1 = rng.uniform(0.5, 64 * N, size=n)
    a2 = a1 * rng.uniform(0.5, 2.0, size=n)
    xi1 = rand_dirs(n) * a1[:, None]
    xi2 = rand_dirs(n) * a2[:, None]
    sp, sm = sigma_pairs(xi1, xi2, spec)
    worst_comparable = float(np.max(np.maximum(np.abs(sp), np.abs(sm))))

    return {
        "worst_highlow_constant": worst_highlow,
        "worst_comparable_constant": worst_comparable,
        "trials": trials,
    }
