"""Time integrators for the coupled photon-exciton system, its linear
approximations, and the NLS equation, plus trajectory diagnostics.

The full system couples a dispersive photon field phi to an exciton
field psi carrying the only nonlinearity:

    i phi_t = -Laplace phi + gamma psi
    i psi_t = (omega0 + g |psi|^(p-1)) psi + gamma phi

The nonlinear solvers use Strang splitting built from two exactly
unitary substeps: a pointwise phase rotation for the nonlinear term
(|psi| is invariant) and a per-Fourier-mode 2x2 matrix exponential of
the Hermitian symbol H_k = [[|k|^2, gamma], [gamma, omega0]] for the
linear part.  Mass is therefore conserved to rounding error at any dt,
and the scheme is globally second order.

Two linear comparators are evaluated in closed form with no stepping
error: the fully linear coupling (g = 0, "system B") and the early-time
decoupled approximation in which the photon propagates freely and
drives the exciton linearly ("system A").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    Field,
    PHYSICAL,
    default_sobolev_index,
    hs_norm_from_fft,
)

DEFAULT_DT = 1e-3
DEFAULT_SAMPLES_PER_UNIT_TIME = 100

FULL = "full"
NORMS = "norms"


class SolverBlowupError(RuntimeError):
    """A field stopped being finite mid-run."""

    def __init__(self, time, step_index):
        super().__init__(
            f"non-finite field values at t = {time:.6g} (step {step_index})"
        )
        self.time = time
        self.step_index = step_index


@dataclass
class ModelParams:
    """Physical constants of the model.

    ``s`` is the Sobolev degree used for norm diagnostics; None selects
    the dimension default floor(n/2 + 1) of the grid at hand.
    """

    g: float = 1.0
    gamma: float = 1.0
    omega0: float = 1.0
    p: float = 3.0
    s: float | None = None

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"nonlinearity power p must exceed 1, got {self.p}")
        if self.gamma < 0:
            raise ValueError(f"coupling gamma must be nonnegative, got {self.gamma}")
        if self.s is not None and self.s < 0:
            raise ValueError("Sobolev index s must be nonnegative")

    def resolve_s(self, grid):
        return default_sobolev_index(grid.n) if self.s is None else float(self.s)


@dataclass
class EPState:
    """Photon and exciton fields at one instant."""

    phi: Field
    psi: Field
    time: float = 0.0

    def __post_init__(self):
        if self.phi.grid is not self.psi.grid and (
            self.phi.grid.n != self.psi.grid.n
            or self.phi.grid.N != self.psi.grid.N
            or self.phi.grid.L != self.psi.grid.L
        ):
            raise ValueError("phi and psi must share one grid")
        if self.time < 0:
            raise ValueError("time must be nonnegative")


def zero_state(phi0):
    """EPState with the given photon field and an absent exciton field."""
    grid = phi0.grid
    psi = Field(grid, np.zeros(grid.shape, dtype=np.complex128), PHYSICAL)
    return EPState(phi=phi0, psi=psi, time=0.0)


@dataclass
class StepSpec:
    """Step size and output cadence for the split-step integrators.

    ``dt`` may be negative to integrate the system backward in time
    (used by the time-reversal check); its magnitude must divide the
    sampling interval 1/samples_per_unit_time exactly.
    """

    dt: float = DEFAULT_DT
    samples_per_unit_time: int = DEFAULT_SAMPLES_PER_UNIT_TIME

    def __post_init__(self):
        if self.dt == 0:
            raise ValueError("dt must be nonzero")
        if self.samples_per_unit_time < 1:
            raise ValueError("samples_per_unit_time must be a positive integer")
        interval = 1.0 / self.samples_per_unit_time
        ratio = interval / abs(self.dt)
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError(
                f"dt = {self.dt} does not divide the sampling interval {interval}"
            )

    @property
    def sample_interval(self):
        return 1.0 / self.samples_per_unit_time

    @property
    def steps_per_sample(self):
        return int(round(self.sample_interval / abs(self.dt)))


@dataclass
class Trajectory:
    """Sampled evolution: times plus recorded states and/or norms.

    ``policy`` is 'full' (states kept, norms too) or 'norms' (norms
    only).  ``psi``/``norm_psi`` are None for single-field runs.
    """

    times: np.ndarray
    policy: str
    s: float
    phi: list | None = None
    psi: list | None = None
    norm_phi: np.ndarray | None = None
    norm_psi: np.ndarray | None = None
    mass: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 1:
            raise ValueError("times must be a nonempty 1D array")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        self.times = t

    def final_state(self):
        if self.phi is None:
            raise ValueError("trajectory was recorded norms-only")
        if self.psi is None:
            return self.phi[-1]
        return EPState(self.phi[-1], self.psi[-1], time=float(self.times[-1]))


@dataclass
class ErrorCurve:
    """Relative photon error rho(t) between a comparator and the truth."""

    delta: float | None
    times: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.times.shape != self.rho.shape:
            raise ValueError("times and rho must have matching shapes")
        if not np.all(np.isfinite(self.rho)):
            raise ValueError("rho contains non-finite samples")


# --------------------------------------------------------------------------
# building blocks


def linear_pair_propagator(grid, gamma, omega0, t):
    """Per-mode entries (U11, U12, U22) of exp(-i t H_k) for the Hermitian
    symbol H_k = [[|k|^2, gamma], [gamma, omega0]]; U21 = U12."""
    a = grid.k_squared
    mu = 0.5 * (a + omega0)
    d = 0.5 * (a - omega0)
    big_omega = np.sqrt(d * d + gamma * gamma)
    phase = np.exp(-1j * mu * t)
    angle = big_omega * t
    cos_t = np.cos(angle)
    # sin(Omega t)/Omega, continuous through Omega = 0; evaluating sin and
    # cos at the same rounded angle keeps the 2x2 exactly unitary in fp
    denom = np.where(big_omega == 0.0, 1.0, big_omega)
    sinc_t = np.where(big_omega == 0.0, t, np.sin(angle) / denom)
    u11 = phase * (cos_t - 1j * d * sinc_t)
    u12 = phase * (-1j * gamma * sinc_t)
    u22 = phase * (cos_t + 1j * d * sinc_t)
    return u11, u12, u22


def _nl_magnitude(values, p):
    a = np.abs(values)
    if p == 3.0:
        return a * a
    return a ** (p - 1.0)


def nonlinear_phase(values, g, p, dt):
    """Exact flow of i u_t = g |u|^(p-1) u over dt: a pointwise rotation
    that leaves |u| unchanged."""
    return values * np.exp(-1j * (g * dt) * _nl_magnitude(values, p))


def _check_finite(*arrays, time, step_index):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise SolverBlowupError(time, step_index)


def _hs(values, grid, s):
    return hs_norm_from_fft(np.fft.fftn(values), grid, s)


def _mass(grid, *value_arrays):
    total = 0.0
    for arr in value_arrays:
        total += np.sum(arr.real**2 + arr.imag**2)
    return float(total * grid.cell_volume)


class _Recorder:
    def __init__(self, grid, s, policy, pair):
        self.grid = grid
        self.s = s
        self.policy = policy
        self.pair = pair
        self.times = []
        self.phi = [] if policy == FULL else None
        self.psi = [] if (policy == FULL and pair) else None
        self.norm_phi = []
        self.norm_psi = [] if pair else None
        self.mass = []

    def record(self, t, phi_vals, psi_vals=None):
        self.times.append(t)
        self.norm_phi.append(_hs(phi_vals, self.grid, self.s))
        if self.pair:
            self.norm_psi.append(_hs(psi_vals, self.grid, self.s))
            self.mass.append(_mass(self.grid, phi_vals, psi_vals))
        else:
            self.mass.append(_mass(self.grid, phi_vals))
        if self.policy == FULL:
            self.phi.append(Field(self.grid, phi_vals.copy(), PHYSICAL))
            if self.pair:
                self.psi.append(Field(self.grid, psi_vals.copy(), PHYSICAL))

    def trajectory(self):
        return Trajectory(
            times=np.asarray(self.times),
            policy=self.policy,
            s=self.s,
            phi=self.phi,
            psi=self.psi,
            norm_phi=np.asarray(self.norm_phi),
            norm_psi=None if self.norm_psi is None else np.asarray(self.norm_psi),
            mass=np.asarray(self.mass),
        )


def _sample_count(T, spec):
    n = round(T / spec.sample_interval)
    if n < 1 or abs(n * spec.sample_interval - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(
            f"horizon T = {T} is not a positive multiple of the sampling "
            f"interval {spec.sample_interval}"
        )
    return int(n)


def _default_sample_times(T, cadence=DEFAULT_SAMPLES_PER_UNIT_TIME):
    n = max(1, round(T * cadence))
    return np.linspace(0.0, T, n + 1)


# --------------------------------------------------------------------------
# nonlinear evolutions (Strang splitting)


def evolve_ep(initial, params, step, T, record=FULL):
    """Integrate the full photon-exciton system from t = 0 to T.

    Strang splitting: half nonlinear rotation of psi, exact per-mode 2x2
    linear step for (phi_hat, psi_hat), half rotation again.  Aborts with
    SolverBlowupError if any field stops being finite.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if initial.time != 0:
        raise ValueError("evolve_ep expects the initial state at time 0")
    grid = initial.phi.grid
    s = params.resolve_s(grid)
    n_samples = _sample_count(T, step)
    per_block = step.steps_per_sample
    dt = step.dt
    g, p = params.g, params.p

    u11, u12, u22 = linear_pair_propagator(grid, params.gamma, params.omega0, dt)
    phi = initial.phi.values.copy()
    psi = initial.psi.values.copy()

    rec = _Recorder(grid, s, record, pair=True)
    rec.record(0.0, phi, psi)
    for block in range(n_samples):
        psi = nonlinear_phase(psi, g, p, 0.5 * dt)
        for j in range(per_block):
            if j:
                psi = nonlinear_phase(psi, g, p, dt)
            phi_hat = np.fft.fftn(phi)
            psi_hat = np.fft.fftn(psi)
            phi = np.fft.ifftn(u11 * phi_hat + u12 * psi_hat)
            psi = np.fft.ifftn(u12 * phi_hat + u22 * psi_hat)
        psi = nonlinear_phase(psi, g, p, 0.5 * dt)
        t = (block + 1) * step.sample_interval
        _check_finite(phi, psi, time=t, step_index=(block + 1) * per_block)
        rec.record(t, phi, psi)
    return rec.trajectory()


def evolve_nls(phi0, params, step, T, record=FULL):
    """Integrate i phi_t = -Laplace phi + g |phi|^(p-1) phi by Strang
    splitting (half rotation, exact spectral free step, half rotation)."""
    if T <= 0:
        raise ValueError("T must be positive")
    grid = phi0.grid
    s = params.resolve_s(grid)
    n_samples = _sample_count(T, step)
    per_block = step.steps_per_sample
    dt = step.dt
    g, p = params.g, params.p

    kinetic = np.exp(-1j * grid.k_squared * dt)
    phi = phi0.values.copy()

    rec = _Recorder(grid, s, record, pair=False)
    rec.record(0.0, phi)
    for block in range(n_samples):
        phi = nonlinear_phase(phi, g, p, 0.5 * dt)
        for j in range(per_block):
            if j:
                phi = nonlinear_phase(phi, g, p, dt)
            phi = np.fft.ifftn(kinetic * np.fft.fftn(phi))
        phi = nonlinear_phase(phi, g, p, 0.5 * dt)
        t = (block + 1) * step.sample_interval
        _check_finite(phi, time=t, step_index=(block + 1) * per_block)
        rec.record(t, phi)
    return rec.trajectory()


# --------------------------------------------------------------------------
# linear comparators (closed form, no stepping error)


def evolve_linear_b(initial, params, T=None, sample_times=None, record=FULL):
    """Exact solution of the fully linear coupled system (g = 0).

    Evaluates the per-mode 2x2 matrix exponential at each requested time,
    measured from ``initial.time``; times may be arbitrary.
    """
    if sample_times is None:
        if T is None:
            raise ValueError("provide either T or explicit sample_times")
        sample_times = initial.time + _default_sample_times(T - initial.time)
    times = np.asarray(sample_times, dtype=float)
    if np.any(times < initial.time - 1e-12):
        raise ValueError("sample times precede the initial time")

    grid = initial.phi.grid
    s = params.resolve_s(grid)
    phi0_hat = np.fft.fftn(initial.phi.values)
    psi0_hat = np.fft.fftn(initial.psi.values)

    rec = _Recorder(grid, s, record, pair=True)
    for t in times:
        u11, u12, u22 = linear_pair_propagator(
            grid, params.gamma, params.omega0, t - initial.time
        )
        phi = np.fft.ifftn(u11 * phi0_hat + u12 * psi0_hat)
        psi = np.fft.ifftn(u12 * phi0_hat + u22 * psi0_hat)
        rec.record(t, phi, psi)
    return rec.trajectory()


_RESONANCE_GAP = 1e-8


def evolve_system_a(phi0, params, T=None, sample_times=None, record=FULL):
    """Exact solution of the early-time approximation: phi propagates
    freely, the exciton starts at zero and is driven linearly,

        psi_hat_k(t) = -i gamma e^{-i omega0 t}
                       (e^{i (omega0 - |k|^2) t} - 1) / (i (omega0 - |k|^2))
                       phi_hat_k(0),

    with a 3-term series in (omega0 - |k|^2) t through each resonant mode
    |k|^2 = omega0.
    """
    if sample_times is None:
        if T is None:
            raise ValueError("provide either T or explicit sample_times")
        sample_times = _default_sample_times(T)
    times = np.asarray(sample_times, dtype=float)
    if np.any(times < 0):
        raise ValueError("sample times must be nonnegative")

    grid = phi0.grid
    s = params.resolve_s(grid)
    gamma, omega0 = params.gamma, params.omega0
    phi0_hat = np.fft.fftn(phi0.values)
    gap = omega0 - grid.k_squared
    resonant = np.abs(gap) < _RESONANCE_GAP
    gap_safe = np.where(resonant, 1.0, gap)

    rec = _Recorder(grid, s, record, pair=True)
    for t in times:
        theta = gap * t
        ramp = np.where(
            resonant,
            t * (1.0 + 0.5j * theta - theta**2 / 6.0),
            (np.exp(1j * gap_safe * t) - 1.0) / (1j * gap_safe),
        )
        phi = np.fft.ifftn(np.exp(-1j * grid.k_squared * t) * phi0_hat)
        psi = np.fft.ifftn(-1j * gamma * np.exp(-1j * omega0 * t) * ramp * phi0_hat)
        rec.record(t, phi, psi)
    return rec.trajectory()


def evolve_composite_tilde(phi0, params, C1, epsilon, T, sample_times=None, record=FULL):
    """Comparator that follows system A on [0, t1] and system B after,
    with t1 = C1 * sqrt(epsilon) and the A-state at t1 handed to B
    exactly (the fields are continuous across t1 by construction).
    C1 = 0 degenerates to pure system B from (phi0, 0)."""
    if C1 < 0 or epsilon < 0:
        raise ValueError("C1 and epsilon must be nonnegative")
    t1 = C1 * np.sqrt(epsilon)
    if t1 > T:
        raise ValueError(f"A-phase end t1 = {t1:.6g} exceeds the horizon T = {T}")
    if sample_times is None:
        sample_times = _default_sample_times(T)
    times = np.asarray(sample_times, dtype=float)

    early = times[times <= t1]
    late = times[times > t1]
    recs = []
    if len(early):
        recs.append(evolve_system_a(phi0, params, sample_times=early, record=record))
    handoff_time = t1 if len(late) else None
    if handoff_time is not None:
        if t1 > 0:
            at_t1 = evolve_system_a(phi0, params, sample_times=[t1], record=FULL)
            state = EPState(at_t1.phi[0], at_t1.psi[0], time=t1)
        else:
            state = zero_state(phi0)
        recs.append(
            evolve_linear_b(state, params, sample_times=late, record=record)
        )
    return _concat_trajectories(recs)


def _concat_trajectories(parts):
    if len(parts) == 1:
        return parts[0]
    head = parts[0]
    times = np.concatenate([p.times for p in parts])
    cat = lambda attr: (
        None
        if getattr(head, attr) is None
        else np.concatenate([getattr(p, attr) for p in parts])
    )
    fields = lambda attr: (
        None
        if getattr(head, attr) is None
        else [f for p in parts for f in getattr(p, attr)]
    )
    return Trajectory(
        times=times,
        policy=head.policy,
        s=head.s,
        phi=fields("phi"),
        psi=fields("psi"),
        norm_phi=cat("norm_phi"),
        norm_psi=cat("norm_psi"),
        mass=cat("mass"),
    )


# --------------------------------------------------------------------------
# diagnostics


def relative_error_curve(reference, truth, s, delta=None):
    """rho(t) = ||phi_ref(t) - phi(t)||_Hs / ||phi(t)||_Hs per sample.

    Both trajectories must be full-state recordings over identical times;
    the denominator must stay above 1e-300.
    """
    if reference.phi is None or truth.phi is None:
        raise ValueError("relative_error_curve needs full-state trajectories")
    if len(reference.times) != len(truth.times) or np.any(
        reference.times != truth.times
    ):
        raise ValueError("trajectories must share identical sample times")
    grid = truth.phi[0].grid
    rho = np.empty(len(truth.times))
    for i, (ref_f, tru_f) in enumerate(zip(reference.phi, truth.phi)):
        den = _hs(tru_f.values, grid, s)
        if den < 1e-300:
            raise ZeroDivisionError(
                f"truth norm underflow at t = {truth.times[i]:.6g}"
            )
        rho[i] = _hs(ref_f.values - tru_f.values, grid, s) / den
    return ErrorCurve(delta=delta, times=truth.times.copy(), rho=rho)


def total_mass(state):
    """Combined squared L2 mass of both fields, sum (|phi|^2+|psi|^2) dx^n."""
    return _mass(state.phi.grid, state.phi.values, state.psi.values)
