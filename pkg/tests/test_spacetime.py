"""Windowed space-time fields, dyadic block projections, Bourgain norms."""

import numpy as np
import pytest

from ztorus.errors import ConfigurationError
from ztorus.grid import make_grid, eta_shell, dyadic_range
from ztorus.spacetime import (DyadicBlock, SpaceTimeField, hann_taper,
                              lp_block_project, xsbp_norm, modulation_phase)


def random_field(spec, tn=16, t_window=2.0, seed=0, taper=None):
    rng = np.random.default_rng(seed)
    snaps = (rng.standard_normal((tn, *spec.shape))
             + 1j * rng.standard_normal((tn, *spec.shape)))
    snaps *= spec.mode_mask
    if taper is not None:
        snaps = snaps * taper[:, None, None]
    return SpaceTimeField(snaps, spec, t_window, taper)


class TestBlocks:
    def test_rejects_non_dyadic(self):
        with pytest.raises(ConfigurationError):
            DyadicBlock(3, 1, "S")
        with pytest.raises(ConfigurationError):
            DyadicBlock(4, 0, "S")
        with pytest.raises(ConfigurationError):
            DyadicBlock(4, 1, "X")

    def test_modulation_phase_symbols(self):
        tau, kabs, kk = 2.0, 3.0, 9.0
        assert modulation_phase("S", tau, kabs, kk) == 11.0
        assert modulation_phase("W+", tau, kabs, kk) == 5.0
        assert modulation_phase("W-", tau, kabs, kk) == -1.0
        with pytest.raises(ConfigurationError):
            modulation_phase("Z", tau, kabs, kk)


class TestSpaceTimeField:
    def test_time_transform_round_trip(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=1)
        G = F.time_transform()
        back = SpaceTimeField.from_time_transform(G, spec, F.t_window)
        assert np.allclose(back.snapshots, F.snapshots, atol=1e-12)

    def test_time_transform_single_harmonic(self):
        # snapshot_n = e^{i tau_j t_n} concentrates on temporal frequency j
        spec = make_grid(1.0, 1.0, 8, 8)
        tn, t_window = 16, 2.0
        j = 3
        tau_j = 2 * np.pi * j / t_window
        t = np.arange(tn) * t_window / tn
        snaps = np.zeros((tn, *spec.shape), dtype=complex)
        snaps[:, 1, 0] = np.exp(1j * tau_j * t)
        F = SpaceTimeField(snaps, spec, t_window)
        G = F.time_transform()
        taus = F.tau()
        idx = int(np.argmin(np.abs(taus - tau_j)))
        assert abs(G[idx, 1, 0] - t_window) < 1e-12
        off = np.delete(np.abs(G[:, 1, 0]), idx)
        assert np.max(off) < 1e-12

    def test_parseval_between_time_domains(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=2)
        G = F.time_transform()
        lhs = F.norm_l2() ** 2
        rhs = spec.vol / (F.dt * F.tn) * np.sum(np.abs(G) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_taper_validation(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        snaps = np.zeros((16, 8, 8), dtype=complex)
        with pytest.raises(ConfigurationError):
            SpaceTimeField(snaps, spec, 1.0, taper=np.full(16, 2.0))
        with pytest.raises(ConfigurationError):
            SpaceTimeField(snaps[:15], spec, 1.0)

    def test_hann_taper_endpoints_and_range(self):
        w = hann_taper(32)
        assert w[0] == 0.0
        assert np.all((w >= 0) & (w <= 1))
        assert w[16] == pytest.approx(1.0)


class TestProjections:
    def test_block_projection_is_idempotent_on_sharp_part(self):
        # eta shells form a partition of unity; summing projections over all
        # (N, L) recovers the field
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=3)
        tau = F.tau()[:, None, None]
        mod = np.abs(tau + spec.kk[None])
        Ns = dyadic_range(spec.kmax + 1)
        Ls = dyadic_range(float(np.max(mod)) + 1)
        total = np.zeros_like(F.snapshots)
        for N in Ns:
            for L in Ls:
                total += lp_block_project(F, DyadicBlock(N, L, "S")).snapshots
        assert np.allclose(total, F.snapshots, atol=1e-10)

    def test_projection_localizes_modulation(self):
        # data concentrated at tau = -|k|^2 lands in small-L Schrodinger
        # blocks and is killed by large-L ones
        spec = make_grid(1.0, 1.0, 8, 8)
        tn, t_window = 32, 2 * np.pi
        t = np.arange(tn) * t_window / tn
        kk = spec.kk[2, 0]
        snaps = np.zeros((tn, *spec.shape), dtype=complex)
        snaps[:, 2, 0] = np.exp(-1j * kk * t)
        F = SpaceTimeField(snaps, spec, t_window)
        low = lp_block_project(F, DyadicBlock(2, 1, "S"))
        assert low.norm_l2() == pytest.approx(F.norm_l2(), rel=1e-10)
        hi = lp_block_project(F, DyadicBlock(2, 64, "S"))
        assert hi.norm_l2() < 1e-10

    def test_wave_symbols_distinguish_propagation_direction(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        tn, t_window = 32, 2 * np.pi
        t = np.arange(tn) * t_window / tn
        kabs = spec.kabs[3, 0]
        snaps = np.zeros((tn, *spec.shape), dtype=complex)
        snaps[:, 3, 0] = np.exp(-1j * kabs * t)  # tau = -|k|: W+ modulation 0
        F = SpaceTimeField(snaps, spec, t_window)
        plus = lp_block_project(F, DyadicBlock(2, 1, "W+"))
        minus = lp_block_project(F, DyadicBlock(2, 1, "W-"))
        # |k| = 3 sits in the overlap of the smooth shells N = 2 and N = 4,
        # so a single shell captures a definite fraction of the norm
        assert plus.norm_l2() > 0.4 * F.norm_l2()
        assert minus.norm_l2() < 1e-10 * F.norm_l2()


class TestNorms:
    def test_xsbp_with_zero_exponents_is_l2(self):
        # s = b = 0, p = 2: the iterated norm collapses to the plain
        # L^2_{t,x} norm by partition of unity (squares sum telescopically)
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=4)
        val = xsbp_norm(F, 0.0, 0.0, 2, "S")
        # the smooth shells sum to 1, so their squares sum to a value in
        # [1/2, 1] in each of the two directions: val in [||F||/2, ||F||]
        assert 0.5 * F.norm_l2() <= val <= F.norm_l2() * (1 + 1e-12)

    def test_xsbp_monotone_in_exponents(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=5)
        assert xsbp_norm(F, 1.0, 0.0, 2, "S") >= xsbp_norm(F, 0.0, 0.0, 2, "S")
        assert xsbp_norm(F, 0.0, 0.5, 2, "S") >= xsbp_norm(F, 0.0, 0.0, 2, "S")
        # l1 over L dominates l2 over L
        assert xsbp_norm(F, 0.0, 0.0, 1, "S") >= xsbp_norm(F, 0.0, 0.0, 2, "S")

    def test_xsbp_homogeneous(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=6)
        G = SpaceTimeField(3.0 * F.snapshots, spec, F.t_window)
        assert xsbp_norm(G, 0.7, 0.5, 1, "W+") == pytest.approx(
            3.0 * xsbp_norm(F, 0.7, 0.5, 1, "W+"), rel=1e-12)

    def test_xsbp_rejects_bad_p(self):
        spec = make_grid(1.0, 1.0, 8, 8)
        F = random_field(spec, seed=7)
        with pytest.raises(ConfigurationError):
            xsbp_norm(F, 0.0, 0.0, 3, "S")
