"""Conserved and almost-conserved functionals of the discrete flow.

Alongside the mass and the Hamiltonian this module evaluates the smoothed
(modified) energy H(Iu, In_plus), its resonant correction ~H in which the
trilinear multiplier is replaced by the difference-quotient symbols
sigma_+-, the exact time derivative of ~H along the dealiased spectral flow
(three term families: one trilinear, supported on the near-resonant set by
construction of sigma, and two quartic), and the fixed-time gap ratio
|H(Iu,In+) - ~H| N^{1-eps} / (|Iu|_{H^1}^2 |In+|).

The lattice sums over interaction triples and quadruples cost O(P) where P
is the number of (k1, k2) support pairs; requests whose P exceeds
PAIR_BUDGET raise BudgetError instead of silently subsampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ConfigurationError
from .grid import SpectralField, TorusSpec, exact_product
from .dynamics import ZakharovState, conj_reflect
from .multipliers import IMultiplierSpec, sigma_pairs, m_value

__all__ = ["EnergyBreakdown", "DHdtBreakdown", "PAIR_BUDGET", "mass",
           "hamiltonian", "modified_energy", "resonant_energy",
           "dHdt_resonant", "fixed_time_gap_ratio", "GAP_EPSILON"]

# hard cap on (k1, k2) support pairs for the direct interaction sums
PAIR_BUDGET = 2 ** 26

# fixed penalty standing in for the arbitrarily small loss in exponents
GAP_EPSILON = 0.01

# coefficients this far (relatively) below the spectral peak are treated as
# numerically zero when collecting interaction supports
SUPPORT_RTOL = 1e-14


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    wave: float
    coupling: float

    @property
    def total(self):
        return self.kinetic + self.wave + self.coupling


@dataclass(frozen=True)
class DHdtBreakdown:
    trilinear: float
    quartic_nn: float
    quartic_uu: float

    @property
    def total(self):
        return self.trilinear + self.quartic_nn + self.quartic_uu


def mass(u: SpectralField) -> float:
    """vol * sum_k |u_hat(k)|^2 = integral of |u|^2."""
    return float(u.spec.vol * np.sum(np.abs(u.coeffs) ** 2))


def _real_part(x, what, tol=1e-8):
    x = complex(x)
    scale = max(1.0, abs(x))
    if abs(x.imag) > tol * scale:
        raise ConfigurationError(f"{what} has imaginary residue {x.imag:.3e}")
    return x.real


def _coupling(u_c, np_c, spec: TorusSpec):
    """integral of n |u|^2 by an alias-free lattice sum, n = Re n_plus.

    Equals vol * sum_{k1+k2+k3=0} n_hat(k1) u_hat(k2) conj-u-hat(k3) over the
    retained modes, which is the coupling term the dealiased flow conserves.
    """
    n_c = (np_c + conj_reflect(np_c)) / 2.0
    uu = exact_product(SpectralField(u_c, spec), SpectralField(u_c, spec),
                       conjugate_b=True)
    uu_reflected = np.roll(uu[::-1, ::-1], 1, axis=(0, 1))
    val = spec.vol * np.sum(n_c * uu_reflected)
    # n and |u|^2 are real fields, so the pairing <n, |u|^2> is real
    return _real_part(val, "coupling integral")


def hamiltonian(state: ZakharovState) -> EnergyBreakdown:
    """|grad u|^2 + (1/2)|n_plus|^2 + integral n|u|^2."""
    spec = state.spec
    u_c, np_c = state.u.coeffs, state.nplus.coeffs
    kin = float(spec.vol * np.sum(spec.kk * np.abs(u_c) ** 2))
    wav = float(0.5 * spec.vol * np.sum(np.abs(np_c) ** 2))
    return EnergyBreakdown(kin, wav, _coupling(u_c, np_c, spec))


def modified_energy(state: ZakharovState, ispec: IMultiplierSpec) -> EnergyBreakdown:
    """Hamiltonian of the smoothed pair (I u, I n_plus)."""
    spec = state.spec
    ms = ispec.m_s(spec.kabs)
    mw = ispec.m_w(spec.kabs)
    u_i = ms * state.u.coeffs
    np_i = mw * state.nplus.coeffs
    kin = float(spec.vol * np.sum(spec.kk * np.abs(u_i) ** 2))
    wav = float(0.5 * spec.vol * np.sum(np.abs(np_i) ** 2))
    return EnergyBreakdown(kin, wav, _coupling(u_i, np_i, spec))


# ---------------------------------------------------------------------------
# direct interaction sums


def _support(c, spec: TorusSpec):
    """Indices (n, 2) in signed integer form and values of the numerically
    nonzero retained modes of a coefficient array."""
    mags = np.abs(c)
    peak = mags.max()
    mask = spec.mode_mask & (mags > SUPPORT_RTOL * peak) if peak > 0 else \
        np.zeros_like(spec.mode_mask)
    I1, I2 = spec.int_index()
    idx = np.stack([I1[mask], I2[mask]], axis=-1)
    return idx, c[mask]


def _check_budget(na, nb):
    if na * nb > PAIR_BUDGET:
        raise BudgetError(
            f"interaction sum needs {na * nb} support pairs "
            f"(budget {PAIR_BUDGET}); reduce the active mode count")


def _band_limits(spec: TorusSpec):
    return spec.m1 / 3.0, spec.m2 / 3.0, spec.m1 // 2 - 1, spec.m2 // 2 - 1


def _sigma_triple_sum(spec, ispec, a_idx, a_val, b_idx, b_val, w_arrays,
                      weight_fn):
    """sum over support pairs (a, b) of a_val b_val * weight_fn(...)-combined
    lookups of w_arrays at the lattice point -(a+b).

    weight_fn(xi1, xi2, s1, s2, kabs3) returns one weight array per entry of
    w_arrays; lattice points -(a+b) outside the retained grid contribute 0.
    """
    _check_budget(len(a_idx), len(b_idx))
    if len(a_idx) == 0 or len(b_idx) == 0:
        return 0.0 + 0.0j
    m1, m2 = spec.shape
    g1, g2 = spec.gamma1, spec.gamma2
    xi2 = b_idx / np.array([g1, g2])
    total = 0.0 + 0.0j
    for j in range(len(a_idx)):
        ia1, ia2 = int(a_idx[j, 0]), int(a_idx[j, 1])
        s1 = -(ia1 + b_idx[:, 0])
        s2 = -(ia2 + b_idx[:, 1])
        valid = (np.abs(s1) <= m1 // 2 - 1) & (np.abs(s2) <= m2 // 2 - 1)
        f1 = s1 % m1
        f2 = s2 % m2
        kabs3 = np.hypot(s1 / g1, s2 / g2)
        xi1 = np.array([[ia1 / g1, ia2 / g2]])
        weights = weight_fn(xi1, xi2, s1, s2, kabs3)
        inner = 0.0 + 0.0j
        for w, wt in zip(w_arrays, weights):
            inner += np.sum(np.where(valid, w[f1, f2] * wt, 0.0) * b_val)
        total += a_val[j] * inner
    return total


def resonant_energy(state: ZakharovState, ispec: IMultiplierSpec) -> float:
    """Quadratic smoothed energies plus the sigma-weighted trilinear term."""
    spec = state.spec
    u_c, np_c = state.u.coeffs, state.nplus.coeffs
    ms2 = ispec.m_s(spec.kabs) ** 2
    mw2 = ispec.m_w(spec.kabs) ** 2
    quad = float(spec.vol * np.sum(spec.kk * ms2 * np.abs(u_c) ** 2)
                 + 0.5 * spec.vol * np.sum(mw2 * np.abs(np_c) ** 2))

    v_c = conj_reflect(u_c)
    wp = np_c
    wm = conj_reflect(np_c)
    a_idx, a_val = _support(u_c, spec)
    b_idx, b_val = _support(v_c, spec)

    def weights(xi1, xi2, s1, s2, kabs3):
        sp, sm = sigma_pairs(xi1, xi2, ispec)
        return sp, sm

    tri = _sigma_triple_sum(spec, ispec, a_idx, a_val, b_idx, b_val,
                            (wp, wm), weights)
    tri = _real_part(0.5 * spec.vol * tri, "resonant trilinear term")
    return quad + tri


def dHdt_resonant(state: ZakharovState, ispec: IMultiplierSpec) -> DHdtBreakdown:
    """Exact time derivative of the resonant energy along the dealiased flow.

    Three families: the trilinear one (whose weight cancels off the
    near-resonant set by construction of sigma), the quartic family from the
    nonlinear Schrodinger substitutions into the trilinear term, and the
    quartic family from the wave substitution, which carries the symbol
    difference sigma_+ - sigma_-.
    """
    spec = state.spec
    vol = spec.vol
    u_c, np_c = state.u.coeffs, state.nplus.coeffs
    v_c = conj_reflect(u_c)
    wp = np_c
    wm = conj_reflect(np_c)
    wsum = wp + wm
    m1, m2 = spec.shape
    g1, g2 = spec.gamma1, spec.gamma2
    band1, band2 = m1 / 3.0, m2 / 3.0
    qs, qw, N = ispec.q_s, ispec.q_w, ispec.N

    u_idx, u_val = _support(u_c, spec)
    v_idx, v_val = _support(v_c, spec)

    # --- trilinear family -------------------------------------------------
    def tri_weights(xi1, xi2, s1, s2, kabs3):
        kk1 = xi1[..., 0] ** 2 + xi1[..., 1] ** 2
        kk2 = xi2[..., 0] ** 2 + xi2[..., 1] ** 2
        ms1 = m_value(np.sqrt(kk1), qs, N) ** 2
        ms2_ = m_value(np.sqrt(kk2), qs, N) ** 2
        mw3 = m_value(kabs3, qw, N) ** 2
        # chi_B indicators of the three interacting frequencies
        chi1 = ((np.abs(xi1[..., 0] * g1) <= band1)
                & (np.abs(xi1[..., 1] * g2) <= band2)).astype(float)
        chi2 = ((np.abs(xi2[..., 0] * g1) <= band1)
                & (np.abs(xi2[..., 1] * g2) <= band2)).astype(float)
        chi3 = ((np.abs(s1) <= band1) & (np.abs(s2) <= band2)).astype(float)
        sp, sm = sigma_pairs(xi1, xi2, ispec)
        base = kk1 * ms1 * chi1 - kk2 * ms2_ * chi2
        wplus = base + kabs3 * mw3 * chi3 - (kk1 - kk2 + kabs3) * sp
        wminus = base - kabs3 * mw3 * chi3 - (kk1 - kk2 - kabs3) * sm
        return wplus, wminus

    tri = _sigma_triple_sum(spec, ispec, u_idx, u_val, v_idx, v_val,
                            (wp, wm), tri_weights)
    trilinear = _real_part((0.5j) * vol * tri, "trilinear derivative family",
                           tol=1e-7)

    # --- quartic family from the Schrodinger substitutions -----------------
    u_f = SpectralField(u_c, spec)
    v_f = SpectralField(v_c, spec)
    w_f = SpectralField(wsum, spec)
    chi_grid = spec.dealias_mask
    A = exact_product(u_f, w_f) * chi_grid   # chi_B (u * wsum) at q1 + q3
    Bv = exact_product(v_f, w_f) * chi_grid  # chi_B (v * wsum) at q2 + q3
    A_idx, A_val = _support(A, spec)
    B_idx, B_val = _support(Bv, spec)

    def sig_weights(xi1, xi2, s1, s2, kabs3):
        return sigma_pairs(xi1, xi2, ispec)

    part1 = _sigma_triple_sum(spec, ispec, A_idx, A_val, v_idx, v_val,
                              (wp, wm), sig_weights)
    part2 = _sigma_triple_sum(spec, ispec, u_idx, u_val, B_idx, B_val,
                              (wp, wm), sig_weights)
    quartic_nn = _real_part((-0.25j) * vol * (part1 - part2),
                            "quartic wave-pair family", tol=1e-7)

    # --- quartic family from the wave substitution --------------------------
    C = exact_product(u_f, u_f, conjugate_b=True)  # (u * v) = F(|u|^2)

    def uu_weights(xi1, xi2, s1, s2, kabs3):
        sp, sm = sigma_pairs(xi1, xi2, ispec)
        chi12 = ((np.abs(s1) <= band1) & (np.abs(s2) <= band2)).astype(float)
        # |k12| = |k3| since k12 = -k3 on the constraint surface
        return (kabs3 * chi12 * (sp - sm),)

    part3 = _sigma_triple_sum(spec, ispec, u_idx, u_val, v_idx, v_val,
                              (C,), uu_weights)
    quartic_uu = _real_part((-0.5j) * vol * part3,
                            "quartic density family", tol=1e-7)

    return DHdtBreakdown(trilinear, quartic_nn, quartic_uu)


def fixed_time_gap_ratio(state: ZakharovState, ispec: IMultiplierSpec) -> float:
    """|H(Iu, In+) - ~H| * N^{1 - eps} / (|Iu|_{H^1}^2 |In+|_{L^2}),
    eps = GAP_EPSILON."""
    spec = state.spec
    ms = ispec.m_s(spec.kabs)
    mw = ispec.m_w(spec.kabs)
    h1_sq = float(spec.vol * np.sum((1.0 + spec.kk)
                                    * np.abs(ms * state.u.coeffs) ** 2))
    l2_w = float(np.sqrt(spec.vol * np.sum(np.abs(mw * state.nplus.coeffs) ** 2)))
    if h1_sq == 0.0 or l2_w == 0.0:
        raise ConfigurationError("gap ratio undefined for zero data")
    gap = abs(modified_energy(state, ispec).total
              - resonant_energy(state, ispec))
    return gap * ispec.N ** (1.0 - GAP_EPSILON) / (h1_sq * l2_w)
