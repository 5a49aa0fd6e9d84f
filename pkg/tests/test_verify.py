"""Randomized estimate verifier, covering counts, ellipse separation, and
the almost-conservation exponent experiment."""

import numpy as np
import pytest

from ztorus.dynamics import ZakharovState, conj_reflect
from ztorus.errors import (ConfigurationError, EmptyShellError,
                           HypothesisViolation)
from ztorus.grid import make_grid, SpectralField
from ztorus.spacetime import DyadicBlock
from ztorus.verify import (ZetaLattice, lattice_for, sample_block,
                           trilinear_functional, verify_estimate,
                           covering_count, ellipse_gap_check,
                           almost_conservation_sweep)


class TestLattice:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            ZetaLattice(1.0, 1.0, 0.0, -1.0, 4, 1)
        with pytest.raises(ConfigurationError):
            ZetaLattice(1.0, 1.0, 0.3, 1.0, 4, 1)  # tau_min off the grid

    def test_lattice_covers_block_supports(self):
        blocks = [DyadicBlock(1, 1, "W+"), DyadicBlock(2, 4, "S"),
                  DyadicBlock(4, 2, "W-")]
        lat = lattice_for(blocks)
        rng = np.random.default_rng(0)
        for b in blocks:
            s = sample_block(b, lat, "complex", rng)
            assert s.norm > 0

    def test_empty_shell_raises(self):
        lat = ZetaLattice(1.0, 1.0, -4.0, 1.0, 9, 1)  # |k| <= sqrt(2)
        rng = np.random.default_rng(0)
        with pytest.raises(EmptyShellError):
            sample_block(DyadicBlock(8, 1, "S"), lat, "complex", rng)

    def test_nonnegative_mode(self):
        lat = lattice_for([DyadicBlock(2, 2, "S")])
        rng = np.random.default_rng(1)
        s = sample_block(DyadicBlock(2, 2, "S"), lat, "nonnegative", rng)
        assert np.all(np.real(s.data) >= 0)
        assert np.all(np.imag(s.data) == 0)


class TestTrilinearFunctional:
    def test_matches_brute_force_pairing(self):
        blocks = [DyadicBlock(1, 1, "W+"), DyadicBlock(1, 1, "S"),
                  DyadicBlock(1, 2, "S")]
        lat = lattice_for(blocks)
        rng = np.random.default_rng(2)
        f = sample_block(blocks[0], lat, "nonnegative", rng)
        g1 = sample_block(blocks[1], lat, "nonnegative", rng)
        g2 = sample_block(blocks[2], lat, "nonnegative", rng)

        taus = lat.taus
        k1s, k2s = lat.k1s, lat.k2s
        ntau, nk = lat.ntau, 2 * lat.kres + 1
        total = 0.0
        coords = [(jt, i1, i2) for jt in range(ntau)
                  for i1 in range(nk) for i2 in range(nk)]
        index = {(round(taus[jt] / lat.dtau), i1 - lat.kres, i2 - lat.kres):
                 (jt, i1, i2) for jt, i1, i2 in coords}
        for jt1, i11, i12 in coords:
            v1 = g1.data[jt1, i11, i12]
            if v1 == 0:
                continue
            for jt2, i21, i22 in coords:
                v2 = g2.data[jt2, i21, i22]
                if v2 == 0:
                    continue
                key = (round((taus[jt1] - taus[jt2]) / lat.dtau),
                       (i11 - lat.kres) - (i21 - lat.kres),
                       (i12 - lat.kres) - (i22 - lat.kres))
                hit = index.get(key)
                if hit is None:
                    continue
                total += float(np.real(f.data[hit] * v1 * v2))
        total *= lat.weight ** 2
        got = trilinear_functional(f, g1, g2)
        assert got == pytest.approx(total, rel=1e-10, abs=1e-12)

    def test_rejects_mismatched_lattices(self):
        lat1 = lattice_for([DyadicBlock(1, 1, "S")])
        lat2 = lattice_for([DyadicBlock(2, 1, "S")])
        rng = np.random.default_rng(3)
        f = sample_block(DyadicBlock(1, 1, "W+"), lat1, "nonnegative", rng)
        g1 = sample_block(DyadicBlock(1, 1, "S"), lat1, "nonnegative", rng)
        g2 = sample_block(DyadicBlock(2, 1, "S"), lat2, "nonnegative", rng)
        with pytest.raises(ConfigurationError):
            trilinear_functional(f, g1, g2)


class TestVerifyEstimate:
    def test_deterministic_for_fixed_seed(self):
        a = verify_estimate("wave-L4", trials=3, seed=7)
        b = verify_estimate("wave-L4", trials=3, seed=7)
        assert a.max_ratio == b.max_ratio
        assert [r["ratio"] for r in a.ratios] == [r["ratio"] for r in b.ratios]

    def test_report_consistency(self):
        rep = verify_estimate("wave-L4", trials=2, seed=0)
        assert len(rep.ratios) == 2 * len(rep.sweep)
        assert rep.max_ratio == max(r["ratio"] for r in rep.ratios)
        assert np.isfinite(rep.max_ratio) and rep.max_ratio > 0

    def test_unknown_id_and_bad_trials(self):
        with pytest.raises(ConfigurationError):
            verify_estimate("no-such-estimate")
        with pytest.raises(ConfigurationError):
            verify_estimate("wave-L4", trials=0)

    def test_hypothesis_violations(self):
        bad_highmod = [{"N0": 4, "L0": 1, "N1": 4, "L1": 1, "N2": 4, "L2": 1}]
        with pytest.raises(HypothesisViolation):
            verify_estimate("tri-highmod", sweep=bad_highmod, trials=1)
        bad_highlow = [{"N0": 2, "L0": 1, "N1": 2, "L1": 1, "N2": 2, "L2": 1}]
        with pytest.raises(HypothesisViolation):
            verify_estimate("tri-highlow", sweep=bad_highlow, trials=1)
        non_dyadic = [{"N": 3, "L": 1}]
        with pytest.raises(HypothesisViolation):
            verify_estimate("wave-L4", sweep=non_dyadic, trials=1)

    def test_gn_defect_finite(self):
        rep = verify_estimate("gn-sharp", trials=3, seed=0)
        assert np.isfinite(rep.max_ratio)


class TestCoveringCount:
    def exact_circle(self, A, L, N):
        # for k = 0 the annulus is A <= 2|k'| <= A + L, |k'| <= N: a unit
        # square meets it iff its min/max distances to the origin straddle it
        r_in = A / 2.0
        r_out = min((A + L) / 2.0, N)
        if r_out < r_in:
            return 0
        cnt = 0
        rng_i = range(int(np.floor(-r_out)) - 2, int(np.ceil(r_out)) + 2)
        for i in rng_i:
            for j in rng_i:
                cx = np.clip(0.0, i, i + 1.0)
                cy = np.clip(0.0, j, j + 1.0)
                dmin = np.hypot(cx, cy)
                dmax = max(np.hypot(i + dx, j + dy)
                           for dx in (0, 1) for dy in (0, 1))
                if dmin <= r_out and dmax >= r_in:
                    cnt += 1
        return cnt

    def test_matches_exact_circular_oracle(self):
        for (A, L, N) in ((8, 1, 8), (8, 2, 8), (4, 4, 16), (12, 1, 8)):
            assert covering_count((0.0, 0.0), A, L, N) == \
                self.exact_circle(A, L, N)

    def test_monotone_in_shell_width(self):
        vals = [covering_count((8.0, 0.0), 10.0, L, 8) for L in (1, 2, 4, 8)]
        assert vals == sorted(vals)
        assert vals[0] > 0

    def test_empty_beyond_sum_bound(self):
        # |k'| + |k - k'| <= 2N always, so A > 2N gives the empty set
        assert covering_count((1.0, 0.0), 17.0, 1, 8) == 0

    def test_rejects_non_finite(self):
        with pytest.raises(ConfigurationError):
            covering_count((np.nan, 0.0), 1.0, 1, 8)


class TestEllipseGap:
    def test_no_unit_square_in_the_inflated_gap(self):
        rep = ellipse_gap_check(100.0, 100.0, trials=10 ** 4, seed=0)
        assert rep["hits"] == 0
        assert rep["plain_min_gap"] > 0
        assert rep["primed_min_gap"] > 0

    def test_unit_inflation_control_finds_squares(self):
        rep = ellipse_gap_check(100.0, 100.0, trials=10 ** 4, seed=0,
                                inflation=1.0)
        assert rep["hits"] >= 1

    def test_deterministic(self):
        a = ellipse_gap_check(128.0, 64.0, trials=10 ** 3, seed=3)
        b = ellipse_gap_check(128.0, 64.0, trials=10 ** 3, seed=3)
        assert a == b

    def test_rejects_small_axes(self):
        with pytest.raises(ConfigurationError):
            ellipse_gap_check(100.0, 32.0, trials=10)


class TestAlmostConservation:
    def make_state(self, spec, seed=0):
        rng = np.random.default_rng(seed)
        c = (rng.standard_normal(spec.shape)
             + 1j * rng.standard_normal(spec.shape))
        d = (rng.standard_normal(spec.shape)
             + 1j * rng.standard_normal(spec.shape))
        damp = (1.0 + spec.kk) ** -0.85
        cu = c * damp * spec.dealias_mask
        cn = d * (1.0 + spec.kk) ** -0.5 * spec.dealias_mask
        cn = (cn + conj_reflect(cn)) / 2.0
        return ZakharovState(0.0, SpectralField(cu, spec),
                             SpectralField(cn, spec))

    def test_validation(self):
        spec = make_grid(1.0, 1.0, 16, 16)
        st = self.make_state(spec)
        with pytest.raises(ConfigurationError):
            almost_conservation_sweep(st, 0.8, [4], 0.1)
        with pytest.raises(ConfigurationError):
            almost_conservation_sweep(st, 0.8, [2, 4], -0.1)
        with pytest.raises(ConfigurationError):
            almost_conservation_sweep(st, 0.8, [4, 64], 0.1)

    def test_small_sweep_produces_signal(self):
        spec = make_grid(1.0, 1.0, 32, 32)
        st = self.make_state(spec, seed=4)
        rep = almost_conservation_sweep(st, 0.8, [2, 4, 8], 0.05)
        assert not rep.degenerate
        assert all(v > 0 for v in rep.normalized)
        assert np.isfinite(rep.slope) and np.isfinite(rep.r_squared)
        # smoothing gets better as the threshold grows
        assert rep.slope < 0
