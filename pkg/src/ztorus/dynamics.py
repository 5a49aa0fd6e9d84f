"""Time evolution of the first-order Zakharov system on the discrete torus.

State variables are the Schrodinger envelope u and the reduced wave variable
n_plus = n + i |grad|^{-1} n_t, both as spectral fields.  The evolved system is

    i u_t + Lap u = n u,          n = Re n_plus,
    i (n_plus)_t - |grad| n_plus = |grad| F(|u|^2),

with the quadratic products dealiased by the 2/3 rule.  Two integrators are
provided: a Strang splitting whose nonlinear u-substep is an exact pointwise
phase rotation (preserving |u| and hence the mass), and a classical RK4 step
on the full spectral right-hand side used as the reference scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, IntegratorError
from .grid import TorusSpec, SpectralField, dft, idft, PhysicalField

__all__ = ["ZakharovState", "SolverConfig", "Trajectory", "conj_reflect",
           "to_first_order", "from_first_order", "rhs", "strang_step",
           "rk4_step", "evolve", "default_dt", "ground_state_mass",
           "ground_state_profile", "make_profile"]


def conj_reflect(coeffs):
    """coeffs(k) -> conj(coeffs(-k)) on the FFT lattice."""
    return np.conj(np.roll(coeffs[::-1, ::-1], 1, axis=(0, 1)))


@dataclass
class ZakharovState:
    """Time t plus the spectral pair (u, n_plus) of the first-order system."""

    t: float
    u: SpectralField
    nplus: SpectralField

    def __post_init__(self):
        if self.u.spec != self.nplus.spec:
            raise ConfigurationError("u and n_plus must share a lattice")

    @property
    def spec(self) -> TorusSpec:
        return self.u.spec

    def copy(self):
        return ZakharovState(self.t, self.u.copy(), self.nplus.copy())

    def nsum_coeffs(self):
        """Coefficients of n_plus + n_minus = 2n (a real field)."""
        return self.nplus.coeffs + conj_reflect(self.nplus.coeffs)


@dataclass
class SolverConfig:
    dt: float
    scheme: str = "strang"
    dealias: bool = True
    stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.scheme not in ("strang", "rk4"):
            raise ConfigurationError("scheme must be 'strang' or 'rk4'")
        if self.stride < 1:
            raise ConfigurationError("observer stride must be >= 1")


@dataclass
class Trajectory:
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)

    def append(self, state: ZakharovState, record=None):
        if self.states and state.t <= self.states[-1].t:
            raise ConfigurationError("trajectory times must increase")
        self.states.append(state)
        if record is not None:
            self.records.append(record)

    @property
    def times(self):
        return np.array([s.t for s in self.states])


def default_dt(spec: TorusSpec) -> float:
    """0.25 * min(1/|k|^2_max, 1/|k|_max): resolves the fastest linear phase."""
    kmax = spec.kmax
    return 0.25 * min(1.0 / kmax ** 2, 1.0 / kmax)


# ---------------------------------------------------------------------------
# first-order change of variables


def _require_real(f: SpectralField, name):
    if np.max(np.abs(f.coeffs - conj_reflect(f.coeffs))) > 1e-12:
        raise ConfigurationError(f"{name} must be the transform of a real field")


def to_first_order(u0: SpectralField, n0: SpectralField,
                   n1: SpectralField) -> ZakharovState:
    """Combine wave data (n, n_t) = (n0, n1) into n_plus = n0 + i|grad|^{-1}n1.

    n1 must be mean-free (the inverse gradient magnitude is undefined on the
    zero mode); the zero mode of n_plus is taken from n0.
    """
    _require_real(n0, "n0")
    _require_real(n1, "n1")
    if abs(n1.coeffs[0, 0]) > 1e-14:
        raise ConfigurationError("n1 must have zero mean")
    spec = u0.spec
    kabs = np.where(spec.kabs > 0, spec.kabs, 1.0)
    coeffs = n0.coeffs + 1j * n1.coeffs / kabs
    coeffs[0, 0] = n0.coeffs[0, 0]
    return ZakharovState(0.0, u0.copy(), SpectralField(coeffs, spec))


def from_first_order(state: ZakharovState):
    """Recover (n, n_t) as spectral fields: n = Re n_plus, n_t = |grad| Im n_plus."""
    np_c = state.nplus.coeffs
    nm_c = conj_reflect(np_c)
    n0 = SpectralField((np_c + nm_c) / 2.0, state.spec)
    n1 = SpectralField(state.spec.kabs * (np_c - nm_c) / 2j, state.spec)
    return n0, n1


# ---------------------------------------------------------------------------
# right-hand side and integrators


def _product_mask(spec: TorusSpec, dealias: bool):
    return spec.dealias_mask if dealias else spec.mode_mask


def rhs(u_c, np_c, spec: TorusSpec, dealias=True):
    """Spectral right-hand side (du/dt, dn_plus/dt) as coefficient arrays."""
    mask = _product_mask(spec, dealias)
    u_m = np.where(mask, u_c, 0.0)
    nsum = np_c + conj_reflect(np_c)
    nsum = np.where(mask, nsum, 0.0)
    m1, m2 = spec.shape
    u_g = np.fft.ifft2(u_m) * (m1 * m2)
    n_g = np.fft.ifft2(nsum) * (m1 * m2)
    nu = np.fft.fft2(n_g * u_g) / (m1 * m2)
    uu = np.fft.fft2(np.abs(u_g) ** 2) / (m1 * m2)
    du = -1j * spec.kk * u_c - 0.5j * np.where(mask, nu, 0.0)
    dnp = -1j * spec.kabs * np_c - 1j * spec.kabs * np.where(mask, uu, 0.0)
    return du, dnp


def _check_finite(u_c, np_c, t):
    if not (np.all(np.isfinite(u_c)) and np.all(np.isfinite(np_c))):
        raise IntegratorError("non-finite values in state", t=t)


def _half_kick(u_c, np_c, spec, h, dealias):
    """Nonlinear substep over time h: exact phase rotation of u by the frozen
    density n, then the wave forcing with |u|^2 frozen."""
    mask = _product_mask(spec, dealias)
    m1, m2 = spec.shape
    nsum = np_c + conj_reflect(np_c)
    n_g = np.real(np.fft.ifft2(np.where(mask, nsum, 0.0))) * (m1 * m2) / 2.0
    u_g = np.fft.ifft2(np.where(mask, u_c, 0.0)) * (m1 * m2)
    u_rot = np.fft.fft2(u_g * np.exp(-1j * h * n_g)) / (m1 * m2)
    # band modes get the rotated product, out-of-band modes pass through so
    # the generator matches the projected right-hand side exactly
    u_new = np.where(mask, u_rot, u_c)
    uu = np.fft.fft2(np.abs(u_g) ** 2) / (m1 * m2)
    np_new = np_c - 1j * h * spec.kabs * np.where(mask, uu, 0.0)
    return u_new, np_new


def strang_step(state: ZakharovState, dt: float) -> ZakharovState:
    """Symmetric kick - linear flow - kick step of size dt."""
    spec = state.spec
    dealias = getattr(state, "_dealias", True)
    u_c, np_c = state.u.coeffs, state.nplus.coeffs
    u_c, np_c = _half_kick(u_c, np_c, spec, dt / 2.0, dealias)
    u_c = u_c * np.exp(-1j * spec.kk * dt)
    np_c = np_c * np.exp(-1j * spec.kabs * dt)
    u_c, np_c = _half_kick(u_c, np_c, spec, dt / 2.0, dealias)
    _check_finite(u_c, np_c, state.t + dt)
    return ZakharovState(state.t + dt, SpectralField(u_c, spec),
                         SpectralField(np_c, spec))


def rk4_step(state: ZakharovState, dt: float) -> ZakharovState:
    """Classical explicit 4-stage step on the full spectral right-hand side."""
    spec = state.spec
    dealias = getattr(state, "_dealias", True)
    u, n = state.u.coeffs, state.nplus.coeffs
    k1u, k1n = rhs(u, n, spec, dealias)
    k2u, k2n = rhs(u + dt / 2 * k1u, n + dt / 2 * k1n, spec, dealias)
    k3u, k3n = rhs(u + dt / 2 * k2u, n + dt / 2 * k2n, spec, dealias)
    k4u, k4n = rhs(u + dt * k3u, n + dt * k3n, spec, dealias)
    u_c = u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    np_c = n + dt / 6 * (k1n + 2 * k2n + 2 * k3n + k4n)
    _check_finite(u_c, np_c, state.t + dt)
    return ZakharovState(state.t + dt, SpectralField(u_c, spec),
                         SpectralField(np_c, spec))


_STEPPERS = {"strang": strang_step, "rk4": rk4_step}


def evolve(state: ZakharovState, T: float, config: SolverConfig,
           observers=None) -> Trajectory:
    """Integrate to time state.t + T, recording observers every stride steps.

    ``observers`` is a list of (name, callable(state) -> value) pairs; a
    record dict {"t": ..., name: value, ...} is stored at each observed
    snapshot (including the initial and final states).
    """
    if T < 0:
        raise ConfigurationError("T must be nonnegative")
    observers = observers or []
    stepper = _STEPPERS[config.scheme]

    def record(s):
        rec = {"t": s.t}
        for name, fn in observers:
            rec[name] = fn(s)
        return rec

    traj = Trajectory()
    cur = state.copy()
    object.__setattr__(cur, "_dealias", config.dealias)
    traj.states.append(cur.copy())
    traj.records.append(record(cur))
    if T == 0:
        return traj

    t_end = state.t + T
    nstep = 0
    while cur.t < t_end - 1e-15 * max(1.0, abs(t_end)):
        dt = min(config.dt, t_end - cur.t)
        try:
            nxt = stepper(cur, dt)
        except IntegratorError as exc:
            exc.state = cur
            raise
        object.__setattr__(nxt, "_dealias", config.dealias)
        cur = nxt
        nstep += 1
        if nstep % config.stride == 0 or cur.t >= t_end - 1e-15:
            traj.append(cur.copy(), record(cur))
    return traj


# ---------------------------------------------------------------------------
# ground state of the cubic focusing NLS on the plane


def _shoot(c, drho, rho_max):
    """Integrate Q'' + Q'/rho - Q + Q^3 = 0 from Q(0)=c by fixed-step RK4.

    Returns (flag, mass_integral) where flag is +1 if Q turns back upward
    while positive (undershoot), -1 if Q crosses zero (overshoot), 0 if Q
    decays below 1e-12 without either event.  mass_integral accumulates
    2 pi int Q^2 rho drho along the way (trapezoid).
    """
    rho0 = drho
    q = c + (c - c ** 3) * rho0 ** 2 / 4.0
    p = (c - c ** 3) * rho0 / 2.0

    def f(rho, q, p):
        return p, -p / rho + q - q ** 3

    mass = 0.5 * rho0 * (c ** 2 * 0.0 + q * q * rho0)  # [0, rho0] triangle
    rho = rho0
    prev = q * q * rho
    nsteps = int(np.ceil((rho_max - rho0) / drho))
    for _ in range(nsteps):
        h = drho
        k1q, k1p = f(rho, q, p)
        k2q, k2p = f(rho + h / 2, q + h / 2 * k1q, p + h / 2 * k1p)
        k3q, k3p = f(rho + h / 2, q + h / 2 * k2q, p + h / 2 * k2p)
        k4q, k4p = f(rho + h, q + h * k3q, p + h * k3p)
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        rho += h
        cur = q * q * rho
        mass += 0.5 * h * (prev + cur)
        prev = cur
        if q < 0:
            return -1, 2 * np.pi * mass
        if p > 0 and q > 1e-12:
            return +1, 2 * np.pi * mass
        if abs(q) < 1e-12 and abs(p) < 1e-12:
            break
    return 0, 2 * np.pi * mass


def _shoot_root(tol, drho, rho_max):
    lo, hi = 1.5, 3.0
    flo, _ = _shoot(lo, drho, rho_max)
    fhi, _ = _shoot(hi, drho, rho_max)
    if not (flo > 0 and fhi < 0):
        raise IntegratorError("shooting bracket [1.5, 3.0] does not straddle "
                              "the ground state")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm, _ = _shoot(mid, drho, rho_max)
        if fm < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def ground_state_mass(tol: float, drho=1e-3, rho_max=14.0) -> float:
    """Squared L^2(R^2) norm of the positive radial ground state of
    Q'' + Q'/rho - Q + Q^3 = 0, by bisection shooting on Q(0) to tolerance
    tol, then 2 pi int_0^inf Q^2 rho drho along the converged profile."""
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    c = _shoot_root(tol, drho, rho_max)
    _, mass = _shoot(c, drho, rho_max)
    return mass


def ground_state_profile(tol=1e-10, drho=1e-3, rho_max=14.0):
    """(rho, Q(rho)) samples of the converged shooting profile."""
    c = _shoot_root(tol, drho, rho_max)
    rho0 = drho
    q = c + (c - c ** 3) * rho0 ** 2 / 4.0
    p = (c - c ** 3) * rho0 / 2.0
    rhos = [0.0, rho0]
    qs = [c, q]

    def f(rho, q, p):
        return p, -p / rho + q - q ** 3

    rho = rho0
    while rho < rho_max and q > 1e-13:
        h = drho
        k1q, k1p = f(rho, q, p)
        k2q, k2p = f(rho + h / 2, q + h / 2 * k1q, p + h / 2 * k1p)
        k3q, k3p = f(rho + h / 2, q + h / 2 * k2q, p + h / 2 * k2p)
        k4q, k4p = f(rho + h, q + h * k3q, p + h * k3p)
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        rho += h
        if q < 0:
            break
        rhos.append(rho)
        qs.append(q)
    return np.array(rhos), np.array(qs)


# ---------------------------------------------------------------------------
# named initial-data profiles


def _hermitize(c):
    return (c + conj_reflect(c)) / 2.0


def make_profile(name, spec: TorusSpec, rng=None, amplitude=1.0, width=1.0,
                 mode=(1, 0), sobolev=0.7):
    """Initial ZakharovState from a named profile.

    gaussian:   u = amplitude * exp(-(x-pi*gamma)^2 / (2 width^2)), n data 0.
    plane-wave: u = amplitude * e^{i k.x} at integer mode index ``mode``, n 0.
    random-hs:  u with complex Gaussian modes damped by <k>^{-sobolev-1},
                n0 a real random L^2 field, n1 = 0; needs ``rng``.
    """
    if name == "gaussian":
        x1, x2 = spec.grid_points()
        c1 = np.pi * spec.gamma1
        c2 = np.pi * spec.gamma2
        vals = amplitude * np.exp(-((x1 - c1) ** 2 + (x2 - c2) ** 2)
                                  / (2.0 * width ** 2))
        u0 = dft(PhysicalField(vals.astype(complex), spec))
        z = SpectralField.zeros(spec)
        return ZakharovState(0.0, u0, z)
    if name == "plane-wave":
        c = np.zeros(spec.shape, dtype=complex)
        c[mode[0] % spec.m1, mode[1] % spec.m2] = amplitude
        return ZakharovState(0.0, SpectralField(c, spec),
                             SpectralField.zeros(spec))
    if name == "random-hs":
        if rng is None:
            raise ConfigurationError("random-hs profile needs a generator")
        shape = spec.shape
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        damp = (1.0 + spec.kk) ** (-(sobolev + 1.0) / 2.0)
        u_c = amplitude * g * damp * spec.dealias_mask
        g2 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        n_c = _hermitize(amplitude * g2 * (1.0 + spec.kk) ** -0.5
                         * spec.dealias_mask)
        u0 = SpectralField(u_c, spec)
        n0 = SpectralField(n_c, spec)
        return to_first_order(u0, n0, SpectralField.zeros(spec))
    raise ConfigurationError(f"unknown profile {name!r}")
