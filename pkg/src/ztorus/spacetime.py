"""Windowed space-time fields, dyadic block projections and Bourgain-type
norms.

A SpaceTimeField holds T_n uniformly spaced spectral snapshots on a window
[0, T_win].  The temporal Fourier variable is tau = (2 pi / T_win) * j with
integer j in [-T_n/2, T_n/2), FFT layout.  Block projections localize
|k| ~ N and |tau + |k|^2| ~ L (Schrodinger) or |tau +- |k|| ~ L (wave)
with the smooth dyadic partition eta_N, eta_L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .grid import TorusSpec, eta_shell, dyadic_range

__all__ = ["DyadicBlock", "SpaceTimeField", "hann_taper", "lp_block_project",
           "xsbp_norm", "modulation_phase"]

_SYMBOLS = ("S", "W+", "W-")


def _is_dyadic(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class DyadicBlock:
    """Spatial shell N, modulation shell L, dispersion symbol S / W+ / W-."""

    N: int
    L: int
    symbol: str

    def __post_init__(self):
        if not (_is_dyadic(self.N) and _is_dyadic(self.L)):
            raise ConfigurationError("N and L must be dyadic numbers >= 1")
        if self.symbol not in _SYMBOLS:
            raise ConfigurationError(f"symbol must be one of {_SYMBOLS}")


def modulation_phase(symbol, tau, kabs, kk):
    """The modulation variable tau + |k|^2 (S) or tau +- |k| (W+-)."""
    if symbol == "S":
        return tau + kk
    if symbol == "W+":
        return tau + kabs
    if symbol == "W-":
        return tau - kabs
    raise ConfigurationError(f"unknown symbol {symbol!r}")


def hann_taper(tn):
    """Hann window on tn samples (periodic form)."""
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(tn) / tn)


@dataclass
class SpaceTimeField:
    """Spectral snapshots over a time window, with the taper that produced
    them recorded.

    ``snapshots`` has shape (T_n, m1, m2); snapshot n sits at
    t = n * T_win / T_n.  The taper weights must already be applied.
    """

    snapshots: np.ndarray
    spec: TorusSpec
    t_window: float
    taper: np.ndarray = field(default=None)

    def __post_init__(self):
        self.snapshots = np.asarray(self.snapshots, dtype=complex)
        tn = self.snapshots.shape[0]
        if tn % 2 or self.snapshots.shape[1:] != self.spec.shape:
            raise ConfigurationError("snapshots must be (even T_n, m1, m2)")
        if self.t_window <= 0:
            raise ConfigurationError("window length must be positive")
        if self.taper is None:
            self.taper = np.ones(tn)
        self.taper = np.asarray(self.taper, dtype=float)
        if self.taper.shape != (tn,) or np.any(self.taper < 0) or np.any(self.taper > 1):
            raise ConfigurationError("taper must be T_n weights in [0, 1]")

    @property
    def tn(self):
        return self.snapshots.shape[0]

    @property
    def dt(self):
        return self.t_window / self.tn

    @property
    def times(self):
        return np.arange(self.tn) * self.dt

    def tau(self):
        """Temporal frequencies in FFT layout."""
        j = np.fft.fftfreq(self.tn, d=1.0 / self.tn).astype(int)
        return (2 * np.pi / self.t_window) * j

    def time_transform(self):
        """F(tau, k) = dt * sum_n snapshots[n] e^{-i tau t_n}."""
        return np.fft.fft(self.snapshots, axis=0) * self.dt

    @classmethod
    def from_time_transform(cls, F, spec, t_window, taper=None):
        tn = F.shape[0]
        snaps = np.fft.ifft(F, axis=0) * (tn / t_window)
        return cls(snaps, spec, t_window, taper)

    def norm_l2(self):
        """Discrete L^2_{t,x} norm: sqrt(dt sum_n vol sum_k |.|^2)."""
        return float(np.sqrt(self.dt * self.spec.vol *
                             np.sum(np.abs(self.snapshots) ** 2)))

    @classmethod
    def sample(cls, states, spec, t_window, taper=None):
        """Build from a list of SpectralField snapshots, applying a taper."""
        snaps = np.stack([s.coeffs for s in states])
        if taper is not None:
            snaps = snaps * np.asarray(taper)[:, None, None]
        return cls(snaps, spec, t_window, taper)


def _block_multiplier(F: SpaceTimeField, block: DyadicBlock):
    spec = F.spec
    tau = F.tau()[:, None, None]
    mod = modulation_phase(block.symbol, tau, spec.kabs[None], spec.kk[None])
    return eta_shell(spec.kabs, block.N)[None] * eta_shell(mod, block.L)


def lp_block_project(F: SpaceTimeField, block: DyadicBlock) -> SpaceTimeField:
    """Littlewood-Paley projection P_N Q_L^{symbol} of a tapered field."""
    G = F.time_transform() * _block_multiplier(F, block)
    return SpaceTimeField.from_time_transform(G, F.spec, F.t_window, F.taper)


def _shell_norms(F: SpaceTimeField, symbol):
    """L^2 norms of all (N, L) blocks, plus the dyadic shell lists."""
    spec = F.spec
    G = F.time_transform()
    tau = F.tau()[:, None, None]
    mod = modulation_phase(symbol, tau, spec.kabs[None], spec.kk[None])
    Ns = dyadic_range(spec.kmax + 1)
    Ls = dyadic_range(float(np.max(np.abs(mod))) + 1)
    # weight turning a tau-space l2 sum into the L^2_{t,x} norm: with
    # G = dt * fft(snapshots), sum_n |snap|^2 = sum_j |G|^2 / (tn dt^2)
    w = spec.vol / (F.dt * F.tn)
    out = np.zeros((len(Ns), len(Ls)))
    for a, N in enumerate(Ns):
        en = eta_shell(spec.kabs, N)[None]
        if not np.any(en):
            continue
        GN = G * en
        for b, L in enumerate(Ls):
            el = eta_shell(mod, L)
            out[a, b] = np.sqrt(w * np.sum(np.abs(GN * el) ** 2))
    return Ns, Ls, out


def xsbp_norm(F: SpaceTimeField, s, b, p, symbol) -> float:
    """Iterated dyadic norm || || N^s L^b ||P_{N,L} F||_{L^2} ||_{l^p_L} ||_{l^2_N}."""
    if p not in (1, 2):
        raise ConfigurationError("p must be 1 or 2")
    Ns, Ls, vals = _shell_norms(F, symbol)
    total = 0.0
    for a, N in enumerate(Ns):
        inner = [(N ** s) * (L ** b) * vals[a, iL] for iL, L in enumerate(Ls)]
        if p == 1:
            block = sum(inner)
        else:
            block = np.sqrt(sum(v * v for v in inner))
        total += block * block
    return float(np.sqrt(total))
