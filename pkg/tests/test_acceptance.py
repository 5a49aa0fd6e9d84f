"""End-to-end acceptance suite.

Each test prints a single pass/fail line naming the property it certifies,
with the measured values, and enforces the pinned tolerances.
"""

import time

import numpy as np

from ztorus.dynamics import (ZakharovState, SolverConfig, conj_reflect,
                             default_dt, evolve, ground_state_mass,
                             make_profile, rk4_step)
from ztorus.energies import (dHdt_resonant, fixed_time_gap_ratio, hamiltonian,
                             mass, resonant_energy)
from ztorus.grid import make_grid, SpectralField
from ztorus.multipliers import IMultiplierSpec
from ztorus.verify import (almost_conservation_sweep, covering_count,
                           ellipse_gap_check, verify_estimate)
from ztorus.planner import (RegularityPoint, alpha_exponents, corner_points,
                            growth_exponent, admissible)


def _report(name, ok, detail):
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _random_state(spec, seed, decay=1.5):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    d = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    damp = (1.0 + spec.kk) ** -decay
    cu = c * damp * spec.dealias_mask
    cn = d * damp * spec.dealias_mask
    cn = (cn + conj_reflect(cn)) / 2.0
    return ZakharovState(0.0, SpectralField(cu, spec),
                         SpectralField(cn, spec))


def test_derivative_identity():
    """Centered finite differences of the resonant energy along the flow
    converge at second order to its exact algebraic derivative."""
    spec = make_grid(1.0, 1.0, 16, 16)
    st = _random_state(spec, seed=1)
    ispec = IMultiplierSpec(s=0.7, r=-0.2, N=4)
    der = dHdt_resonant(st, ispec).total
    errs = []
    for h in (1e-3, 5e-4, 2.5e-4):
        fd = (resonant_energy(rk4_step(st, h), ispec)
              - resonant_energy(rk4_step(st, -h), ispec)) / (2.0 * h)
        errs.append(abs(fd - der))
    r1, r2 = errs[0] / errs[1], errs[1] / errs[2]
    _report("derivative-identity", r1 >= 3.5 and r2 >= 3.5,
            f"error ratios per dt halving {r1:.2f}, {r2:.2f} >= 3.5")


def test_conservation_suite():
    """Mass, the wave zero mode, and the identity-multiplier resonant energy
    are conserved to the scheme's accuracy."""
    spec = make_grid(1.0, 1.0, 32, 32)
    st = make_profile("gaussian", spec, amplitude=1.0, width=1.0)
    dt = default_dt(spec)
    traj = evolve(st, 1000 * dt, SolverConfig(dt=dt, scheme="strang",
                                              stride=1000),
                  observers=[("mass", lambda s: mass(s.u))])
    m0, mf = traj.records[0]["mass"], traj.records[-1]["mass"]
    mass_drift = abs(mf - m0) / m0

    st2 = _random_state(spec, seed=2)
    big = IMultiplierSpec(s=0.7, r=-0.2, N=1024)  # above the lattice extent
    traj2 = evolve(st2, 50 * dt, SolverConfig(dt=dt, scheme="rk4", stride=50),
                   observers=[("H", lambda s: hamiltonian(s).total),
                              ("Hres", lambda s: resonant_energy(s, big)),
                              ("z", lambda s: s.nplus.coeffs[0, 0])])
    first, last = traj2.records[0], traj2.records[-1]
    zero_mode_drift = abs(last["z"] - first["z"])
    h_drift = abs(last["H"] - first["H"])
    hres_drift = abs(last["Hres"] - first["Hres"])
    ok = (mass_drift < 1e-10 and zero_mode_drift == 0.0
          and hres_drift <= 10.0 * max(h_drift, 1e-300))
    _report("conservation-suite", ok,
            f"mass drift {mass_drift:.2e} < 1e-10, zero-mode drift "
            f"{zero_mode_drift:.1e} == 0, smoothed-energy drift "
            f"{hres_drift:.2e} <= 10x reference drift {h_drift:.2e}")


def test_fixed_time_gap_boundedness():
    """The fixed-time gap ratio stays within a factor 4 across thresholds
    N = 4..32 for fixed rough random data."""
    spec = make_grid(0.5, 0.5, 64, 64)
    rng = np.random.default_rng(0)
    ph = np.exp(2j * np.pi * rng.random(spec.shape))
    u_c = ph * (1.0 + spec.kk) ** -0.7 * spec.mode_mask
    ph2 = np.exp(2j * np.pi * rng.random(spec.shape))
    n_c = ph2 * (1.0 + spec.kk) ** -0.25 * spec.mode_mask
    st = ZakharovState(0.0, SpectralField(u_c, spec),
                       SpectralField(n_c, spec))
    ratios = np.array([fixed_time_gap_ratio(st, IMultiplierSpec(0.7, 0.0, N))
                       for N in (4, 8, 16, 32)])
    var = float(ratios.max() / ratios.min())
    _report("fixed-time-gap-boundedness", var < 4.0,
            f"gap-ratio variation {var:.2f} < 4 over N in 4..32")


def test_almost_conservation_exponent():
    """Normalized resonant-energy increments decay in the threshold N with
    a clean power law at least as fast as N^-0.8."""
    spec = make_grid(1.0, 1.0, 128, 128)
    rng = np.random.default_rng(5)
    st = make_profile("random-hs", spec, rng=rng, amplitude=1.0, sobolev=0.8)
    rep = almost_conservation_sweep(st, s=0.8, N_values=(4, 8, 16, 32),
                                    delta=0.1)
    ok = (not rep.degenerate and rep.slope <= -0.8 and rep.r_squared >= 0.9)
    _report("almost-conservation-exponent", ok,
            f"slope {rep.slope:.3f} <= -0.8, R^2 {rep.r_squared:.3f} >= 0.9")


def test_covering_bound():
    """Unit-square covering counts of elliptic annuli stay below a single
    multiple of N^(3/2) L^(1/2) with no growth trend in N."""
    per_n = {}
    for N in (16, 32, 64, 128):
        best = 0.0
        for L in (1, 2, 4, 8):
            for kmag in (0.0, N / 2.0, float(N), 1.5 * N, 2.0 * N):
                for A in (kmag, (kmag + 2.0 * N) / 2.0, 2.0 * N - L):
                    A = max(A, kmag)
                    cnt = covering_count((kmag, 0.0), A, L, N)
                    best = max(best, cnt / (N ** 1.5 * L ** 0.5))
        per_n[N] = best
    vals = np.array(list(per_n.values()))
    var = float(vals.max() / vals.min())
    trend = vals[-1] <= vals[0]  # no growth from N=16 to N=128
    _report("covering-bound", var < 3.0 and trend,
            f"per-N max ratios {dict((k, round(v, 3)) for k, v in per_n.items())}, "
            f"variation {var:.2f} < 3, non-increasing")


def test_ellipse_separation():
    """No axis-aligned unit square fits in the inflated gap between the
    nested ellipses, while the unit-inflation control does find squares."""
    cases = ((1e2, 1e2), (1e4, 1e2), (1e6, 1e2), (1e4, 1e4))
    hits = {}
    for a, b in cases:
        rep = ellipse_gap_check(a, b, trials=10 ** 6, seed=0)
        hits[(a, b)] = rep["hits"]
    control = sum(ellipse_gap_check(a, b, trials=10 ** 5, seed=0,
                                    inflation=1.0)["hits"]
                  for (a, b) in ((1e2, 1e2), (1e4, 1e4)))
    ok = all(h == 0 for h in hits.values()) and control >= 1
    _report("ellipse-separation", ok,
            f"gap hits {list(hits.values())} all zero over 1e6 candidates, "
            f"unit-inflation control hits {control} >= 1")


def test_estimate_sweeps_bounded_and_stable():
    """Each dyadic-block estimate has a finite max ratio over its sweep,
    stable under doubling the per-point sample count."""
    ids = ("bilinear-S", "tri-highmod", "tri-highlow", "tri-low",
           "tri-hh-mid", "tri-hh-low", "wave-L4")
    t0 = time.time()
    summary = []
    ok = True
    for eid in ids:
        m50 = verify_estimate(eid, trials=50, seed=0).max_ratio
        m100 = verify_estimate(eid, trials=100, seed=0).max_ratio
        change = abs(m100 - m50) / m50
        summary.append(f"{eid} {m50:.3g}->{m100:.3g} ({100 * change:.0f}%)")
        ok = ok and np.isfinite(m50) and m50 > 0 and change < 0.5
    elapsed = time.time() - t0
    ok = ok and elapsed < 1200.0
    _report("estimate-sweeps", ok,
            "; ".join(summary) + f"; all changes < 50%, {elapsed:.0f}s < 1200s")


def test_planner_exactness():
    """The admissible-region corners, growth exponents, and iteration
    exponents match their closed forms."""
    a, b = corner_points()
    ok = (abs(a.s - 0.781) < 5e-4 and abs(a.r - (-0.219)) < 5e-4
          and abs(b.s - 0.699) < 5e-4 and abs(b.r - (-0.301)) < 5e-4)
    g1 = growth_exponent(RegularityPoint(0.9, 0.0))
    g2 = growth_exponent(RegularityPoint(0.7, 0.0))
    ok = ok and abs(g1 - 0.125) < 1e-12 and abs(g2 - 1.5) < 1e-12
    rng = np.random.default_rng(0)
    agree = True
    count = 0
    while count < 10 ** 4:
        s = rng.uniform(9.0 / 14.0, 1.0)
        r = rng.uniform(s - 1.0, 0.0)
        p = RegularityPoint(s, r)
        if not admissible(p)["ok"]:
            continue
        count += 1
        al = alpha_exponents(p)
        g = growth_exponent(p)
        agree = agree and abs(al["alpha2"] - g) <= 1e-12 * max(1.0, abs(g))
    ok = ok and agree
    _report("planner-exactness",
            ok,
            f"corners ({a.s:.3f}, {a.r:.3f}), ({b.s:.3f}, {b.r:.3f}); "
            f"growth {g1}, {g2}; alpha2 == growth on 10^4 admissible points")


def test_ground_state_oracle():
    """The radial-profile mass oracle is stable under ODE-step refinement
    and the interpolation-defect sweep has a finite sup."""
    m1 = ground_state_mass(1e-8, drho=1e-3)
    m2 = ground_state_mass(1e-8, drho=5e-4)
    rel = abs(m1 - m2) / m1
    rep = verify_estimate("gn-sharp", trials=10, seed=0)
    ok = rel < 1e-5 and np.isfinite(rep.max_ratio)
    _report("ground-state-oracle", ok,
            f"mass {m1:.6f}, step-halving change {rel:.2e} < 1e-5, "
            f"defect sup {rep.max_ratio:.3f} finite")
