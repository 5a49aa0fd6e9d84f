"""Discrete torus geometry, Fourier transforms, dealiased products and
radial symbol application.

Conventions (fixed once, used everywhere):

* The torus is R^2 / (2 pi gamma1 Z x 2 pi gamma2 Z); its volume is
  ``vol = (2 pi gamma1)(2 pi gamma2)``.
* Frequencies are ``k = (i1/gamma1, i2/gamma2)`` with integers
  ``-m_j/2 <= i_j < m_j/2`` stored in numpy FFT layout.  The Nyquist rows
  ``i_j = -m_j/2`` are permanently zero-masked so the lattice is symmetric
  under negation and real fields stay real.
* Coefficients are averages: ``uhat(k) = (1/vol) int u e^{-ik.x} dx``, so
  ``u(x) = sum_k uhat(k) e^{ik.x}`` and Plancherel reads
  ``||u||_{L^2}^2 = vol * sum_k |uhat(k)|^2``.
* Dealiasing follows the 2/3 rule: modes with ``|i_j| >= m_j/3`` are zeroed
  inside every quadratic product, so products of retained modes never alias
  back onto the retained band.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "TorusSpec",
    "PhysicalField",
    "SpectralField",
    "make_grid",
    "dft",
    "idft",
    "dealiased_product",
    "exact_product",
    "apply_radial_symbol",
    "eta_bump",
    "eta_shell",
    "dyadic_range",
    "save_field",
    "load_field",
]


def eta_bump(x):
    """Even bump: 1 on [-1,1], 0 outside (-2,2), C^1 smoothstep in between."""
    t = np.clip(np.abs(np.asarray(x, dtype=float)) - 1.0, 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def eta_shell(x, N):
    """Dyadic partition member eta_N: eta_1 = eta, eta_N(r) = eta(r/N) - eta(2r/N).

    Telescoping gives sum_{N <= Nmax} eta_N(r) = eta(r/Nmax), which equals 1
    for |r| <= Nmax.
    """
    if N < 1:
        raise ValueError("dyadic index must be >= 1")
    if N == 1:
        return eta_bump(x)
    return eta_bump(np.asarray(x) / N) - eta_bump(2.0 * np.asarray(x) / N)


def dyadic_range(extent):
    """Dyadic numbers 1, 2, 4, ... up to the first one >= extent."""
    out = [1]
    while out[-1] < extent:
        out.append(2 * out[-1])
    return out


@dataclass(frozen=True)
class TorusSpec:
    """Periods and truncated frequency lattice of the discrete torus."""

    gamma1: float
    gamma2: float
    m1: int
    m2: int
    # derived arrays, filled in __post_init__
    k1: np.ndarray = field(init=False, repr=False, compare=False)
    k2: np.ndarray = field(init=False, repr=False, compare=False)
    kk: np.ndarray = field(init=False, repr=False, compare=False)
    kabs: np.ndarray = field(init=False, repr=False, compare=False)
    mode_mask: np.ndarray = field(init=False, repr=False, compare=False)
    dealias_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g1, g2, m1, m2 = self.gamma1, self.gamma2, self.m1, self.m2
        if g1 <= 0 or g2 <= 0:
            raise ConfigurationError("periods gamma1, gamma2 must be positive")
        if m1 % 2 or m2 % 2 or m1 < 4 or m2 < 4:
            raise ConfigurationError("mode counts m1, m2 must be even and >= 4")
        i1 = np.fft.fftfreq(m1, d=1.0 / m1).astype(int)
        i2 = np.fft.fftfreq(m2, d=1.0 / m2).astype(int)
        I1, I2 = np.meshgrid(i1, i2, indexing="ij")
        k1 = I1 / g1
        k2 = I2 / g2
        mode = (I1 != -m1 // 2) & (I2 != -m2 // 2)
        # strict bound: with |i| <= K and 3K < m, an aliased product index
        # 2K - m stays below -K, so the retained band is contamination-free
        dealias = mode & (3 * np.abs(I1) < m1) & (3 * np.abs(I2) < m2)
        kk = k1 * k1 + k2 * k2
        for name, arr in (
            ("k1", k1), ("k2", k2), ("kk", kk), ("kabs", np.sqrt(kk)),
            ("mode_mask", mode), ("dealias_mask", dealias),
        ):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def vol(self):
        return (2 * np.pi * self.gamma1) * (2 * np.pi * self.gamma2)

    @property
    def shape(self):
        return (self.m1, self.m2)

    @property
    def nmodes(self):
        return self.m1 * self.m2

    @property
    def kmax(self):
        """Largest |k| on the retained (non-Nyquist) lattice."""
        return float(np.max(self.kabs[self.mode_mask]))

    @property
    def extent(self):
        """Per-axis lattice extent max(m1/2/gamma1, m2/2/gamma2)."""
        return max(self.m1 / 2 / self.gamma1, self.m2 / 2 / self.gamma2)

    def grid_points(self):
        """Physical grid (x1, x2) as broadcastable arrays."""
        x1 = 2 * np.pi * self.gamma1 * np.arange(self.m1) / self.m1
        x2 = 2 * np.pi * self.gamma2 * np.arange(self.m2) / self.m2
        return x1[:, None], x2[None, :]

    def int_index(self):
        """Integer mode indices (I1, I2) in FFT layout."""
        i1 = np.fft.fftfreq(self.m1, d=1.0 / self.m1).astype(int)
        i2 = np.fft.fftfreq(self.m2, d=1.0 / self.m2).astype(int)
        return np.meshgrid(i1, i2, indexing="ij")


def make_grid(gamma1, gamma2, m1, m2) -> TorusSpec:
    """Validated TorusSpec constructor."""
    return TorusSpec(float(gamma1), float(gamma2), int(m1), int(m2))


@dataclass
class PhysicalField:
    """Complex samples of a function at the uniform m1 x m2 grid."""

    values: np.ndarray
    spec: TorusSpec

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.spec.shape:
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match grid {self.spec.shape}")

    def norm_l2(self):
        return float(np.sqrt(self.spec.vol * np.mean(np.abs(self.values) ** 2)))


@dataclass
class SpectralField:
    """Fourier coefficients over the truncated lattice (FFT layout).

    Nyquist rows are zeroed on construction.
    """

    coeffs: np.ndarray
    spec: TorusSpec

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != self.spec.shape:
            raise ConfigurationError(
                f"coefficient shape {c.shape} does not match grid {self.spec.shape}")
        c[~self.spec.mode_mask] = 0.0
        self.coeffs = c

    def copy(self):
        return SpectralField(self.coeffs.copy(), self.spec)

    def norm_l2(self):
        return float(np.sqrt(self.spec.vol * np.sum(np.abs(self.coeffs) ** 2)))

    @classmethod
    def zeros(cls, spec):
        return cls(np.zeros(spec.shape, dtype=complex), spec)


def dft(f: PhysicalField) -> SpectralField:
    """Forward transform: coefficients as averages (see module docstring)."""
    c = np.fft.fft2(f.values) / (f.spec.m1 * f.spec.m2)
    return SpectralField(c, f.spec)


def idft(f: SpectralField) -> PhysicalField:
    """Inverse transform back to grid samples."""
    v = np.fft.ifft2(f.coeffs) * (f.spec.m1 * f.spec.m2)
    return PhysicalField(v, f.spec)


def _phys(coeffs, spec):
    return np.fft.ifft2(coeffs) * (spec.m1 * spec.m2)


def dealiased_product(a: SpectralField, b: SpectralField,
                      conjugate_b: bool = False) -> SpectralField:
    """Pointwise product a * b (or a * conj(b)), 2/3-rule dealiased.

    Inputs are truncated to the 2/3 band, multiplied on the grid, and the
    output band-limited again; on the retained band this equals the exact
    truncated convolution of the band-limited inputs.
    """
    if a.spec is not b.spec and a.spec != b.spec:
        raise ConfigurationError("operands live on different grids")
    spec = a.spec
    pa = _phys(a.coeffs * spec.dealias_mask, spec)
    pb = _phys(b.coeffs * spec.dealias_mask, spec)
    if conjugate_b:
        pb = np.conj(pb)
    c = np.fft.fft2(pa * pb) / (spec.m1 * spec.m2)
    return SpectralField(c * spec.dealias_mask, spec)


def exact_product(a: SpectralField, b: SpectralField,
                  conjugate_b: bool = False) -> np.ndarray:
    """Alias-free convolution of two lattice fields, restricted to the lattice.

    Computed on a zero-padded 2x grid so that no wraparound occurs for any
    retained input modes.  Returns raw coefficients in FFT layout (the result
    of the full convolution can exceed the lattice; those modes are dropped).
    """
    if a.spec != b.spec:
        raise ConfigurationError("operands live on different grids")
    spec = a.spec
    M1, M2 = 2 * spec.m1, 2 * spec.m2
    pa = np.zeros((M1, M2), dtype=complex)
    pb = np.zeros((M1, M2), dtype=complex)
    i1 = np.fft.fftfreq(spec.m1, d=1.0 / spec.m1).astype(int)
    i2 = np.fft.fftfreq(spec.m2, d=1.0 / spec.m2).astype(int)
    pa[np.ix_(i1, i2)] = a.coeffs
    pb[np.ix_(i1, i2)] = b.coeffs
    ua = np.fft.ifft2(pa) * (M1 * M2)
    ub = np.fft.ifft2(pb) * (M1 * M2)
    if conjugate_b:
        ub = np.conj(ub)
    big = np.fft.fft2(ua * ub) / (M1 * M2)
    out = big[np.ix_(i1, i2)]
    out[~spec.mode_mask] = 0.0
    return out


def quadrature_triple(a: SpectralField, b: SpectralField, c: SpectralField,
                      conj_b: bool = False, conj_c: bool = False) -> complex:
    """Alias-free integral of a triple product over the torus.

    Evaluated on a zero-padded 2x grid so that no frequency triad wraps
    around; exact for retained-lattice fields.
    """
    spec = a.spec
    M1, M2 = 2 * spec.m1, 2 * spec.m2
    i1 = np.fft.fftfreq(spec.m1, d=1.0 / spec.m1).astype(int)
    i2 = np.fft.fftfreq(spec.m2, d=1.0 / spec.m2).astype(int)

    def up(f):
        p = np.zeros((M1, M2), dtype=complex)
        p[np.ix_(i1, i2)] = f.coeffs
        return np.fft.ifft2(p) * (M1 * M2)

    ua, ub, uc = up(a), up(b), up(c)
    if conj_b:
        ub = np.conj(ub)
    if conj_c:
        uc = np.conj(uc)
    return complex(spec.vol * np.mean(ua * ub * uc))


def apply_radial_symbol(f: SpectralField, symbol) -> SpectralField:
    """Multiply coefficients by symbol(|k|) on the retained lattice.

    ``symbol`` is a callable acting on arrays of |k|.  It must evaluate
    finite at every retained mode (|nabla|^{-1}-type symbols handle k=0 via
    their own convention, e.g. returning 0 there).
    """
    spec = f.spec
    vals = np.asarray(symbol(spec.kabs), dtype=complex)
    bad = ~np.isfinite(vals) & spec.mode_mask
    if np.any(bad):
        raise ConfigurationError("symbol evaluates non-finite at a retained mode")
    return SpectralField(f.coeffs * np.where(spec.mode_mask, vals, 0.0), spec)


_HEADER = struct.Struct("<IIdd")


def save_field(path, f: SpectralField) -> None:
    """Flat binary layout: (m1, m2) uint32 + (gamma1, gamma2) float64 header,
    then row-major little-endian complex128 coefficients."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.spec.m1, f.spec.m2, f.spec.gamma1, f.spec.gamma2))
        fh.write(np.ascontiguousarray(f.coeffs).astype("<c16").tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        m1, m2, g1, g2 = _HEADER.unpack(fh.read(_HEADER.size))
        raw = np.frombuffer(fh.read(), dtype="<c16").reshape(m1, m2)
    return SpectralField(raw.astype(complex), make_grid(g1, g2, m1, m2))
