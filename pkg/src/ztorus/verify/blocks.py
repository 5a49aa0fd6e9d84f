"""Discrete (tau, k) lattice, dyadic block samples, and the randomized
space-time estimate verifier.

The verifier realizes each bilinear/trilinear inequality as a ratio

    left side / (claimed right side, with a fixed epsilon = 0.01 standing in
    for any "+"-adorned exponent)

evaluated on random Gaussian samples supported on sharp dyadic shells, and
reports the maximum ratio over a parameter sweep.  Finite, sweep-stable
maxima are the testable surrogate of the inequalities; no constant is
claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

from ..errors import ConfigurationError, EmptyShellError, HypothesisViolation
from ..grid import make_grid, dft, idft, PhysicalField
from ..spacetime import DyadicBlock
from ..dynamics import ground_state_mass, ground_state_profile

__all__ = ["ZetaLattice", "BlockSample", "EstimateReport", "lattice_for",
           "sample_block", "trilinear_functional", "verify_estimate",
           "DEFAULT_SWEEPS", "ESTIMATE_IDS", "EPS_PLUS"]

EPS_PLUS = 0.01


@dataclass(frozen=True)
class ZetaLattice:
    """Uniform tau grid times a square lattice of spatial frequencies.

    tau runs over tau_min + dtau * j, j = 0..ntau-1, with tau_min an integer
    multiple of dtau (so that tau differences land back on the grid).
    Spatial frequencies are i / gamma for integers i in [-kres, kres].  The
    measure of a lattice point is dtau / (gamma1 gamma2).
    """

    gamma1: float
    gamma2: float
    tau_min: float
    dtau: float
    ntau: int
    kres: int

    def __post_init__(self):
        if self.dtau <= 0 or self.ntau < 1 or self.kres < 1:
            raise ConfigurationError("invalid lattice dimensions")
        if abs(self.tau_min / self.dtau - round(self.tau_min / self.dtau)) > 1e-9:
            raise ConfigurationError("tau_min must be a multiple of dtau")

    @property
    def taus(self):
        return self.tau_min + self.dtau * np.arange(self.ntau)

    @property
    def k1s(self):
        return np.arange(-self.kres, self.kres + 1) / self.gamma1

    @property
    def k2s(self):
        return np.arange(-self.kres, self.kres + 1) / self.gamma2

    @property
    def shape(self):
        return (self.ntau, 2 * self.kres + 1, 2 * self.kres + 1)

    @property
    def weight(self):
        return self.dtau / (self.gamma1 * self.gamma2)

    def open_grids(self):
        t = self.taus[:, None, None]
        k1 = self.k1s[None, :, None]
        k2 = self.k2s[None, None, :]
        return t, k1, k2


def _shell_indicator(x, M):
    """Sharp half-open dyadic shell: [0, 2) for M = 1, [M, 2M) for M >= 2."""
    x = np.abs(x)
    if M == 1:
        return x < 2.0
    return (M <= x) & (x < 2.0 * M)


@lru_cache(maxsize=128)
def _block_support(lat: ZetaLattice, block: DyadicBlock):
    t, k1, k2 = lat.open_grids()
    kabs = np.sqrt(k1 ** 2 + k2 ** 2)
    spatial = _shell_indicator(kabs, block.N)
    if block.symbol == "S":
        mod = t + kabs ** 2
    elif block.symbol == "W+":
        mod = t + kabs
    else:
        mod = t - kabs
    out = spatial & _shell_indicator(mod, block.L)
    out.setflags(write=False)
    return out


def lattice_for(blocks, dtau=1.0, gamma1=1.0, gamma2=1.0) -> ZetaLattice:
    """Smallest common lattice containing the supports of all blocks."""
    kres = 1
    lo, hi = 0.0, 0.0
    for b in blocks:
        # largest integer index i with |i| / gamma < 2N (shell is half-open)
        kres = max(kres, int(np.ceil(2 * b.N * max(gamma1, gamma2) - 1e-9)) - 1)
        kmax = 2.0 * b.N
        if b.symbol == "S":
            lo = min(lo, -kmax ** 2 - 2.0 * b.L)
            hi = max(hi, 2.0 * b.L)
        else:
            lo = min(lo, -kmax - 2.0 * b.L)
            hi = max(hi, kmax + 2.0 * b.L)
    tau_min = np.floor(lo / dtau) * dtau
    ntau = int(np.ceil((hi - tau_min) / dtau)) + 1
    return ZetaLattice(gamma1, gamma2, float(tau_min), dtau, ntau, kres)


@dataclass
class BlockSample:
    data: np.ndarray
    block: DyadicBlock
    lattice: ZetaLattice
    norm: float = field(init=False)

    def __post_init__(self):
        if self.data.shape != self.lattice.shape:
            raise ConfigurationError("sample does not match its lattice")
        self.norm = float(np.sqrt(self.lattice.weight
                                  * np.sum(np.abs(self.data) ** 2)))


def sample_block(block: DyadicBlock, lattice: ZetaLattice, mode, rng) -> BlockSample:
    """Gaussian sample on the sharp support of a dyadic block.

    mode 'complex': standard complex Gaussians; 'nonnegative': moduli of
    real Gaussians (the class assumed by the trilinear estimates).
    """
    supp = _block_support(lattice, block)
    if not np.any(supp):
        raise EmptyShellError(f"block {block} has empty support on lattice")
    if mode == "complex":
        vals = (rng.standard_normal(lattice.shape)
                + 1j * rng.standard_normal(lattice.shape))
    elif mode == "nonnegative":
        vals = np.abs(rng.standard_normal(lattice.shape))
    else:
        raise ConfigurationError("mode must be 'complex' or 'nonnegative'")
    return BlockSample(np.where(supp, vals, 0.0), block, lattice)


def _extract_window(full, shape, starts):
    """full[start : start + n] per axis, zero-padded where out of range."""
    out = np.zeros(shape, dtype=full.dtype)
    src, dst = [], []
    for m_len, n, start in zip(full.shape, shape, starts):
        s0, s1 = max(start, 0), min(start + n, m_len)
        if s0 >= s1:
            return out
        src.append(slice(s0, s1))
        dst.append(slice(s0 - start, s1 - start))
    out[tuple(dst)] = full[tuple(src)]
    return out


def _difference_convolution(f_data, g2_data, lat: ZetaLattice):
    """h[z1] = sum_{z2} f(z1 - z2) g2(z2) on the lattice coordinates.

    With tau(j) = tau_min + dtau*j and k(i) = (i - kres)/gamma, the
    constraint zeta_f = zeta_1 - zeta_2 reads j_f = j_1 - j_2 - ot (where
    ot = tau_min/dtau) and i_f = i_1 - i_2 + kres, so h is a plain linear
    convolution read off at shifted indices.
    """
    ot = int(round(lat.tau_min / lat.dtau))
    full = fftconvolve(f_data, g2_data, mode="full")
    starts = (-ot, lat.kres, lat.kres)
    return _extract_window(full, lat.shape, starts)


def trilinear_functional(f: BlockSample, g1: BlockSample, g2: BlockSample) -> float:
    """Exact constrained pairing over {zeta0 = zeta1 - zeta2}:

        sum_{zeta1, zeta2} f(zeta1 - zeta2) g1(zeta1) g2(zeta2) * weight^2.
    """
    lat = f.lattice
    if g1.lattice != lat or g2.lattice != lat:
        raise ConfigurationError("samples live on different lattices")
    h = _difference_convolution(f.data, g2.data, lat)
    return float(np.real(np.sum(g1.data * h) * lat.weight ** 2))


def _product_transform(a: BlockSample, b: BlockSample, conjugate_b=False):
    """(tau, k)-transform of the pointwise product a_phys * b_phys (or
    a_phys * conj(b_phys)), as an array on the common lattice window.

    Convention u(t,x) = int_zeta u~ e^{i(t tau + k.x)}, so the product
    transform is weight * (convolution or correlation) of the transforms.
    """
    lat = a.lattice
    if b.lattice != lat:
        raise ConfigurationError("samples live on different lattices")
    if conjugate_b:
        # correlation: p(z0) = w * sum_{z2} a(z0 + z2) conj(b(z2))
        #            = w * sum_{z2} a_rev(-z0 - z2)... use difference form:
        # p(z0) = w * sum_{z1} a(z1) conj(b(z1 - z0)); substitute via the
        # difference convolution of a with conj(b) reversed in index space.
        b_rev = np.conj(b.data[::-1, ::-1, ::-1])
        # reversed array index i' = n-1-i carries coordinate -(c) shifted by
        # the window asymmetry in tau; handle tau by explicit roll-free
        # algebra: coordinate of b_rev index j is -(tau_min + dtau*(n-1-j'))
        # which equals tau'_min + dtau*j' with tau'_min = -tau_max.  The
        # spatial window is symmetric, so only tau needs a shifted origin.
        full = fftconvolve(a.data, b_rev, mode="full")
        # c_a - c_b = c_p: in indices (see _difference_convolution)
        # j_a + j'_b = j_p - ot' where ot' accounts for both origins:
        # c_p = c_a - c_b = (tmin + d ja) - (tmin + d jb)
        #     = d (ja - jb) = d (ja + j'b - (n-1))
        # => index start for tau axis: j_p  with c_p = tmin' + d jp where
        # the product window is chosen symmetric: [-T, T].  We simply return
        # the full array plus its tau coordinate base.
        nt = lat.ntau
        tau_base = -lat.dtau * (nt - 1)
        return lat.weight * full, tau_base
    full = fftconvolve(a.data, b.data, mode="full")
    tau_base = 2.0 * lat.tau_min
    return lat.weight * full, tau_base


def _l2_of_transform(arr, lat: ZetaLattice):
    return float(np.sqrt(lat.weight * np.sum(np.abs(arr) ** 2)))


def _spatial_shell_mask_full(lat: ZetaLattice, N0):
    """Shell indicator of |k| on the doubled (convolution) spatial window."""
    kres2 = 2 * lat.kres
    i = np.arange(-kres2, kres2 + 1)
    k1 = (i / lat.gamma1)[:, None]
    k2 = (i / lat.gamma2)[None, :]
    return _shell_indicator(np.hypot(k1, k2), N0)


# ---------------------------------------------------------------------------
# estimate registry

ESTIMATE_IDS = ("bilinear-S", "tri-highmod", "tri-highlow", "tri-low",
                "tri-hh-mid", "tri-hh-low", "wave-L4", "gn-sharp")


@dataclass
class EstimateReport:
    estimate_id: str
    sweep: list
    trials: int
    seed: int
    max_ratio: float
    argmax_params: dict
    ratios: list  # one dict per (sweep point, trial)
    epsilon: float = EPS_PLUS


def _require(cond, clause):
    if not cond:
        raise HypothesisViolation(clause)


def _tri_ratio(point, rng, hyp_f_lowcut=None):
    """Common machinery of the trilinear estimates: sample f on a W+ block,
    g1, g2 on S blocks, return (value, norms, samples)."""
    N0, L0 = point["N0"], point["L0"]
    N1, L1 = point["N1"], point["L1"]
    N2, L2 = point["N2"], point["L2"]
    bf = DyadicBlock(N0, L0, "W+")
    b1 = DyadicBlock(N1, L1, "S")
    b2 = DyadicBlock(N2, L2, "S")
    lat = lattice_for([bf, b1, b2])
    f = sample_block(bf, lat, "nonnegative", rng)
    if hyp_f_lowcut is not None:
        # restrict f to |k| >= lowcut (the high-frequency wave class)
        t, k1, k2 = lat.open_grids()
        kabs = np.hypot(k1, k2) + 0.0 * t
        f = BlockSample(np.where(kabs >= hyp_f_lowcut, f.data, 0.0),
                        bf, lat)
        if f.norm == 0:
            raise EmptyShellError("low-frequency cut emptied the wave block")
    g1 = sample_block(b1, lat, "nonnegative", rng)
    g2 = sample_block(b2, lat, "nonnegative", rng)
    val = trilinear_functional(f, g1, g2)
    return val, f.norm * g1.norm * g2.norm


def _check_dyadic_point(point, keys):
    for k in keys:
        v = point.get(k)
        _require(v is not None and v >= 1 and (int(v) & (int(v) - 1)) == 0,
                 f"{k} must be a dyadic number >= 1")


def _ratio_bilinear_s(point, rng):
    _check_dyadic_point(point, ("N0", "N1", "L1", "N2", "L2"))
    N0 = point["N0"]
    _require(N0 >= 2, "N0 >= 2")
    b1 = DyadicBlock(point["N1"], point["L1"], "S")
    b2 = DyadicBlock(point["N2"], point["L2"], "S")
    lat = lattice_for([b1, b2, DyadicBlock(N0, 1, "S")])
    u1 = sample_block(b1, lat, "complex", rng)
    u2 = sample_block(b2, lat, "complex", rng)
    prod, _ = _product_transform(u1, u2, conjugate_b=True)
    mask = _spatial_shell_mask_full(lat, N0)[None]
    lhs = _l2_of_transform(prod * mask, lat)
    L_lo = min(point["L1"], point["L2"])
    L_hi = max(point["L1"], point["L2"])
    n_min = min(N0, point["N1"], point["N2"])
    rhs = (np.sqrt(L_lo) * np.sqrt(L_hi / N0 + 1.0) * np.sqrt(n_min)
           * u1.norm * u2.norm)
    return lhs / rhs, {}


def _ratio_tri_highmod(point, rng):
    _check_dyadic_point(point, ("N0", "L0", "N1", "L1", "N2", "L2"))
    Ns = (point["N0"], point["N1"], point["N2"])
    Ls = (point["L0"], point["L1"], point["L2"])
    _require(max(Ls) >= max(Ns) ** 2, "L_max >= N_max^2")
    val, norms = _tri_ratio(point, rng)
    Lmax, Lmed, Lmin = sorted(Ls)[::-1]
    rhs = (Lmax ** 0.5 * Lmed ** 0.25 * Lmin ** 0.25
           * min(Ns) / max(Ns) * norms)
    return val / rhs, {}


def _ratio_tri_highlow(point, rng):
    _check_dyadic_point(point, ("N0", "L0", "N1", "L1", "N2", "L2"))
    N1, N2 = point["N1"], point["N2"]
    _require(max(N1, N2) >= 4 * min(N1, N2), "N1 >> N2 or N2 >> N1")
    val, norms = _tri_ratio(point, rng)
    Ls = (point["L0"], point["L1"], point["L2"])
    Lmax, Lmed, Lmin = sorted(Ls)[::-1]
    rhs = (Lmax ** 0.5 * Lmed ** 0.375 * Lmin ** 0.375
           * min(N1, N2) ** 0.5 / max(N1, N2) * norms)
    return val / rhs, {}


def _ratio_tri_low(point, rng):
    _check_dyadic_point(point, ("N0", "L0", "N1", "L1", "N2", "L2"))
    _require(point["N0"] == 1, "N0 <~ 1")
    val, norms = _tri_ratio(point, rng)
    rhs = (point["L0"] * point["L1"] * point["L2"]) ** (1.0 / 6.0) * norms
    return val / rhs, {}


def _ratio_tri_hh_mid(point, rng):
    _check_dyadic_point(point, ("N0", "L0", "N1", "L1", "N2", "L2"))
    N0, N1, N2 = point["N0"], point["N1"], point["N2"]
    Ls = (point["L0"], point["L1"], point["L2"])
    Lmax = max(Ls)
    _require(N0 >= 4, "1 << N0")
    _require(N0 <= N1, "N0 <~ N1")
    _require(max(N1, N2) <= 2 * min(N1, N2), "N1 ~ N2")
    _require(N1 <= Lmax, "N1 <~ L_max")
    _require(4 * Lmax <= N1 ** 2, "L_max << N1^2")
    val, norms = _tri_ratio(point, rng)
    Lmax_, Lmed, Lmin = sorted(Ls)[::-1]
    rhs = (Lmax_ ** (0.375 + EPS_PLUS) * Lmed ** (0.375 + EPS_PLUS)
           * Lmin ** 0.25 * (N0 / N1) ** EPS_PLUS * norms)
    return val / rhs, {}


def _ratio_tri_hh_low(point, rng):
    _check_dyadic_point(point, ("N0", "L0", "N1", "L1", "N2", "L2"))
    N1, N2 = point["N1"], point["N2"]
    Ls = (point["L0"], point["L1"], point["L2"])
    _require(N1 >= 4 and max(N1, N2) <= 2 * min(N1, N2), "1 << N1 ~ N2")
    _require(4 * max(Ls) <= N1, "L_max << N1")
    val, norms = _tri_ratio(point, rng, hyp_f_lowcut=2.0)
    Lmax, Lmed, _ = sorted(Ls)[::-1]
    rhs = Lmax ** 0.375 * Lmed ** 0.375 * norms
    return val / rhs, {}


def _ratio_wave_l4(point, rng):
    _check_dyadic_point(point, ("N", "L"))
    N, L = point["N"], point["L"]
    b = DyadicBlock(N, L, "W+")
    lat = lattice_for([b])
    u = sample_block(b, lat, "complex", rng)
    v = sample_block(b, lat, "complex", rng)
    prod, _ = _product_transform(u, v)
    lhs = _l2_of_transform(prod, lat)
    rhs = L ** 0.75 * N ** 0.75 * u.norm * v.norm
    return lhs / rhs, {}


_GN_CACHE = {}


def _gn_defect_ratio(point, rng):
    """(|u|_{L4}^4 - (2/|Q|_{L2}^2) |u|_{L2}^2 |grad u|_{L2}^2) / |u|_{L2}^4
    for random smooth fields on the torus; bounded above on the torus."""
    m = point.get("m", 64)
    decay = point.get("decay", 2.0)
    key = ("grid", m)
    if key not in _GN_CACHE:
        _GN_CACHE[key] = make_grid(1.0, 1.0, m, m)
        _GN_CACHE["qmass"] = ground_state_mass(1e-8)
    spec = _GN_CACHE[key]
    qmass = _GN_CACHE["qmass"]
    g = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    coeffs = g * (1.0 + spec.kk) ** (-decay) * spec.dealias_mask
    from ..grid import SpectralField, exact_product
    u = SpectralField(coeffs, spec)
    uu = exact_product(u, u, conjugate_b=True)  # transform of |u|^2
    l2_sq = spec.vol * float(np.sum(np.abs(coeffs) ** 2))
    grad_sq = spec.vol * float(np.sum(spec.kk * np.abs(coeffs) ** 2))
    l4_4 = spec.vol * float(np.sum(np.abs(uu) ** 2))  # ||u|^2|_{L2}^2
    defect = l4_4 - (2.0 / qmass) * l2_sq * grad_sq
    return defect / l2_sq ** 2, {}


_RATIO_FNS = {
    "bilinear-S": _ratio_bilinear_s,
    "tri-highmod": _ratio_tri_highmod,
    "tri-highlow": _ratio_tri_highlow,
    "tri-low": _ratio_tri_low,
    "tri-hh-mid": _ratio_tri_hh_mid,
    "tri-hh-low": _ratio_tri_hh_low,
    "wave-L4": _ratio_wave_l4,
    "gn-sharp": _gn_defect_ratio,
}

DEFAULT_SWEEPS = {
    "bilinear-S": [
        {"N0": N0, "N1": N1, "L1": L1, "N2": N2, "L2": L2}
        for N0 in (2, 4)
        for (N1, L1, N2, L2) in ((2, 1, 2, 1), (4, 4, 2, 1), (4, 1, 4, 4))
    ] + [
        {"N0": 8, "N1": 8, "L1": 8, "N2": 2, "L2": 1}
    ],
    "tri-highmod": [
        {"N0": N0, "L0": L0, "N1": N1, "L1": 1, "N2": N2, "L2": 1}
        for (N0, N1, N2) in ((1, 2, 2), (2, 4, 4), (4, 4, 2))
        for L0 in (max(N0, N1, N2) ** 2, 2 * max(N0, N1, N2) ** 2)
    ],
    # the separated-frequency regime contributes only when the largest
    # modulation reaches the parabolic resonance gap ~ max(N)^2, so the
    # sweep places one large L on each slot in turn
    "tri-highlow": [
        {"N0": 2, "L0": L0, "N1": 4, "L1": L1, "N2": 1, "L2": 1}
        for (L0, L1) in ((16, 1), (32, 1), (1, 16), (4, 32))
    ] + [
        {"N0": 4, "L0": 64, "N1": 8, "L1": 1, "N2": 2, "L2": 1},
        {"N0": 2, "L0": 1, "N1": 1, "L1": 16, "N2": 4, "L2": 1},
    ],
    "tri-low": [
        {"N0": 1, "L0": L0, "N1": N, "L1": L1, "N2": N, "L2": 1}
        for N in (1, 4) for L0 in (1, 8) for L1 in (1, 8)
    ] + [
        {"N0": 1, "L0": 8, "N1": 8, "L1": 1, "N2": 8, "L2": 1},
        {"N0": 1, "L0": 1, "N1": 8, "L1": 8, "N2": 8, "L2": 1},
    ],
    "tri-hh-mid": [
        {"N0": 4, "L0": L0, "N1": 4, "L1": L1, "N2": 4, "L2": 1}
        for L0 in (4,) for L1 in (1, 4)
    ] + [
        {"N0": 4, "L0": 16, "N1": 8, "L1": 1, "N2": 8, "L2": 1},
        {"N0": 8, "L0": 8, "N1": 8, "L1": 8, "N2": 8, "L2": 1},
    ],
    "tri-hh-low": [
        {"N0": 4, "L0": 1, "N1": 4, "L1": 1, "N2": 4, "L2": 1},
        {"N0": 8, "L0": 2, "N1": 8, "L1": 1, "N2": 8, "L2": 1},
        {"N0": 8, "L0": 1, "N1": 8, "L1": 2, "N2": 8, "L2": 1},
        {"N0": 8, "L0": 2, "N1": 8, "L1": 2, "N2": 8, "L2": 1},
    ],
    "wave-L4": [
        {"N": N, "L": L} for N in (1, 2, 4, 8) for L in (1, 4, 16)
    ],
    "gn-sharp": [
        {"m": 64, "decay": d} for d in (1.0, 1.5, 2.0, 3.0)
    ],
}


def verify_estimate(estimate_id, sweep=None, trials=50, seed=0) -> EstimateReport:
    """Max ratio (left side)/(claimed right side) over a sweep of block
    parameters, ``trials`` random samples per sweep point.

    Raises HypothesisViolation when a sweep point breaks the estimate's
    stated hypotheses.  Deterministic for fixed (id, sweep, trials, seed).
    """
    if estimate_id not in _RATIO_FNS:
        raise ConfigurationError(f"unknown estimate id {estimate_id!r}; "
                                 f"choose from {ESTIMATE_IDS}")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    sweep = DEFAULT_SWEEPS[estimate_id] if sweep is None else sweep
    fn = _RATIO_FNS[estimate_id]
    rng = np.random.default_rng(seed)
    best = -np.inf
    best_params = None
    rows = []
    for point in sweep:
        for trial in range(trials):
            ratio, extra = fn(point, rng)
            rows.append({**point, "trial": trial, "ratio": ratio})
            if ratio > best:
                best = ratio
                best_params = {**point, "trial": trial, **extra}
    return EstimateReport(estimate_id=estimate_id, sweep=list(sweep),
                          trials=trials, seed=seed, max_ratio=float(best),
                          argmax_params=best_params, ratios=rows)
