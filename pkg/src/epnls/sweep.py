"""End-to-end crossing-time sweep: simulate the nonlinear system against
its linear comparator over a ladder of initial amplitudes, locate the
times where the relative error reaches each tolerance, and regress the
scaling exponent beta per alpha.

The procedure follows the two-loop structure: error curves rho(t; delta)
are simulated once per distinct amplitude delta and reused across every
alpha (delta = eps^alpha ties amplitude to tolerance; alpha = 0 pins
delta = 1 and sweeps eps directly off that single curve).  Crossing
times t(alpha, eps) then obey t = C eps^beta with beta = 1 - (p-1) alpha
for NLS and beta = (1 - (p-1) alpha)/(p+2) for the coupled system.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .evolution import (
    FULL,
    ErrorCurve,
    ModelParams,
    StepSpec,
    Trajectory,
    evolve_composite_tilde,
    evolve_ep,
    evolve_linear_b,
    evolve_nls,
    relative_error_curve,
    zero_state,
)
from .grid import DEFAULT_MAX_POINTS, free_propagate, gaussian_initial, make_grid
from .runio import atomic_write_text, fmt, read_curve_csv, sha256_hex
from .theory import EXACT, beta_predict

EP = "ep"
NLS = "nls"
COMPARATOR_SYSTEM_B = "systemB"
COMPARATOR_COMPOSITE = "composite"
COMPARATOR_LINEAR_NLS = "linear-nls"

# per-model solver defaults: EP crossings land at t ~ 0.3-1.5, NLS
# crossings at t ~ 1e-3 - 1e-1, so NLS needs a much denser clock
_MODEL_DEFAULTS = {
    EP: {"T": 2.0, "dt": 1e-3, "samples_per_unit_time": 100},
    NLS: {"T": 0.2, "dt": 2e-5, "samples_per_unit_time": 10000},
}

DEFAULT_ALPHAS = (0.0, 0.1, 0.2, 0.3)
DEFAULT_EPSILONS = tuple(np.logspace(-2.0, -3.0, 6))


class NoCrossingError(RuntimeError):
    """The error curve never reaches the requested tolerance (or reaches
    it before the first positive sample, i.e. the cadence is too coarse)."""


@dataclass(frozen=True)
class SweepConfig:
    """Declarative description of one full sweep."""

    model: str = EP
    n: int = 1
    N: int = 256
    L: float = 10.0
    p: float = 3.0
    g: float = 1.0
    gamma: float = 1.0
    omega0: float = 1.0
    s: float | None = None
    alpha_set: tuple = DEFAULT_ALPHAS
    epsilon_set: tuple = DEFAULT_EPSILONS
    T: float | None = None
    dt: float | None = None
    samples_per_unit_time: int | None = None
    comparator: str | None = None
    c1: float = 0.0
    epsilon_floor: float = 1e-6
    workers: int = 1
    cache_dir: str | None = None
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if self.model not in (EP, NLS):
            raise ValueError(f"model must be '{EP}' or '{NLS}', got {self.model!r}")
        eps = tuple(float(e) for e in self.epsilon_set)
        if not eps or any(not 0 < e <= 1 for e in eps):
            raise ValueError("epsilon_set values must lie in (0, 1]")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilon_set must be strictly decreasing")
        alphas = tuple(float(a) for a in self.alpha_set)
        if not alphas or any(a < 0 for a in alphas):
            raise ValueError("alpha_set must be nonempty with alpha >= 0")
        if self.comparator is not None:
            valid = (
                (COMPARATOR_SYSTEM_B, COMPARATOR_COMPOSITE)
                if self.model == EP
                else (COMPARATOR_LINEAR_NLS,)
            )
            if self.comparator not in valid:
                raise ValueError(
                    f"comparator {self.comparator!r} is not valid for model "
                    f"{self.model!r} (expected one of {valid})"
                )
        if self.epsilon_floor < 0:
            raise ValueError("epsilon_floor must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "epsilon_set", eps)
        object.__setattr__(self, "alpha_set", alphas)

    def resolved(self):
        """Fill model-dependent defaults for T, dt, cadence, comparator, s."""
        d = _MODEL_DEFAULTS[self.model]
        comparator = self.comparator or (
            COMPARATOR_SYSTEM_B if self.model == EP else COMPARATOR_LINEAR_NLS
        )
        s = self.s if self.s is not None else float(self.n // 2 + 1)
        return replace(
            self,
            T=self.T if self.T is not None else d["T"],
            dt=self.dt if self.dt is not None else d["dt"],
            samples_per_unit_time=(
                self.samples_per_unit_time
                if self.samples_per_unit_time is not None
                else d["samples_per_unit_time"]
            ),
            comparator=comparator,
            s=s,
        )

    def delta_for(self, alpha, epsilon):
        """Initial amplitude tied to the tolerance: delta = epsilon^alpha,
        with the alpha = 0 degeneracy pinned to delta = 1."""
        return 1.0 if alpha == 0.0 else float(epsilon**alpha)


def physics_signature(config):
    """Canonical string of every field that affects a single error curve
    (grid, physics, solver clock, comparator); cosmetic and sweep-ladder
    fields are excluded so equivalent runs share cached curves."""
    c = config.resolved()
    parts = [
        f"model={c.model}",
        f"n={c.n}",
        f"N={c.N}",
        f"L={fmt(c.L)}",
        f"p={fmt(c.p)}",
        f"g={fmt(c.g)}",
        f"gamma={fmt(c.gamma)}",
        f"omega0={fmt(c.omega0)}",
        f"s={fmt(c.s)}",
        f"T={fmt(c.T)}",
        f"dt={fmt(c.dt)}",
        f"spu={c.samples_per_unit_time}",
        f"comparator={c.comparator}",
    ]
    if c.comparator == COMPARATOR_COMPOSITE:
        parts.append(f"c1={fmt(c.c1)}")
    return ";".join(parts)


def config_hash(config):
    return sha256_hex(physics_signature(config))[:16]


@dataclass(frozen=True)
class CrossingRecord:
    alpha: float
    delta: float
    epsilon: float
    t_cross: float


@dataclass(frozen=True)
class RegressionResult:
    alpha: float
    beta: float
    intercept: float
    r_squared: float
    npoints: int


@dataclass
class AlgorithmAResult:
    """Everything the sweep produced: curves, crossings, per-alpha fits,
    the beta-vs-alpha meta fit, and per-record failures (which never
    abort the remaining work)."""

    config: SweepConfig
    curves: list
    crossings: list
    betas: list
    meta_slope: float | None
    meta_intercept: float | None
    theory_slope: float
    theory_intercept: float
    failures: list = field(default_factory=list)


# --------------------------------------------------------------------------
# curve simulation


def _linear_nls_trajectory(phi0, sample_times, s):
    phis = [free_propagate(phi0, t) for t in sample_times]
    return Trajectory(times=np.asarray(sample_times), policy=FULL, s=s, phi=phis)


def compute_error_curve(config, delta, epsilon_comp=None):
    """Simulate one nonlinear/comparator pair from phi(0) = delta * phi0
    (phi0 the unit Gaussian) and return rho(t; delta)."""
    c = config.resolved()
    grid = make_grid(c.n, c.N, c.L, max_points=c.max_points)
    params = ModelParams(g=c.g, gamma=c.gamma, omega0=c.omega0, p=c.p, s=c.s)
    step = StepSpec(dt=c.dt, samples_per_unit_time=c.samples_per_unit_time)
    phi0 = gaussian_initial(grid, delta)

    if c.model == EP:
        truth = evolve_ep(zero_state(phi0), params, step, c.T)
        if c.comparator == COMPARATOR_COMPOSITE:
            comp = evolve_composite_tilde(
                phi0, params, c.c1, epsilon_comp, c.T, sample_times=truth.times
            )
        else:
            comp = evolve_linear_b(
                zero_state(phi0), params, sample_times=truth.times
            )
    else:
        truth = evolve_nls(phi0, params, step, c.T)
        comp = _linear_nls_trajectory(phi0, truth.times, c.s)
    return relative_error_curve(comp, truth, c.s, delta=delta)


def _curve_cache_path(config, delta, epsilon_comp):
    name = f"delta={fmt(delta)}"
    if epsilon_comp is not None:
        name += f"__eps={fmt(epsilon_comp)}"
    return os.path.join(
        config.cache_dir, "curves", config_hash(config), name + ".csv"
    )


def _curve_to_csv(curve):
    lines = ["t,rho"]
    for t, r in zip(curve.times, curve.rho):
        lines.append(f"{fmt(t)},{fmt(r)}")
    return "\n".join(lines) + "\n"


def _curve_job(config, delta, epsilon_comp):
    if config.cache_dir:
        path = _curve_cache_path(config, delta, epsilon_comp)
        if os.path.exists(path):
            times, rho = read_curve_csv(path)
            return ErrorCurve(delta=delta, times=times, rho=rho)
        curve = compute_error_curve(config, delta, epsilon_comp)
        atomic_write_text(path, _curve_to_csv(curve))
        return curve
    return compute_error_curve(config, delta, epsilon_comp)


def curve_specs(config):
    """Distinct (delta, comparator-epsilon) pairs the sweep needs, in
    descending delta order."""
    c = config.resolved()
    specs = []
    seen = set()
    for alpha in c.alpha_set:
        for eps in c.epsilon_set:
            delta = c.delta_for(alpha, eps)
            eps_comp = eps if c.comparator == COMPARATOR_COMPOSITE else None
            key = (delta, eps_comp)
            if key not in seen:
                seen.add(key)
                specs.append(key)
    specs.sort(key=lambda k: (-k[0], -(k[1] if k[1] is not None else 0.0)))
    return specs


def run_error_curves(config):
    """All error curves the sweep needs, one per distinct amplitude,
    computed in a worker pool when config.workers > 1 and aggregated in
    deterministic (descending delta) order."""
    specs = curve_specs(config)
    if config.workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_curve_job, config, d, e) for d, e in specs
            ]
            curves = [f.result() for f in futures]
    else:
        curves = [_curve_job(config, d, e) for d, e in specs]
    return curves


# --------------------------------------------------------------------------
# crossing extraction and regression


def find_crossing(curve, epsilon, epsilon_floor=0.0):
    """First time rho(t) reaches epsilon, interpolated linearly in
    (log t, log rho) between the bracketing samples."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if epsilon < epsilon_floor:
        raise ValueError(
            f"epsilon = {epsilon:.6g} is below the floor {epsilon_floor:.6g}"
        )
    t = np.asarray(curve.times, dtype=float)
    rho = np.asarray(curve.rho, dtype=float)
    above = np.nonzero(rho >= epsilon)[0]
    if len(above) == 0:
        raise NoCrossingError(
            f"rho never reaches epsilon = {epsilon:.6g} within t <= {t[-1]:.6g}"
            + (f" (delta = {curve.delta:.6g})" if curve.delta is not None else "")
        )
    i = int(above[0])
    if i == 0:
        raise NoCrossingError(
            f"curve already exceeds epsilon = {epsilon:.6g} at its first sample"
        )
    tl, tr, rl, rr = t[i - 1], t[i], rho[i - 1], rho[i]
    if rr == epsilon:
        return float(tr)
    if rl <= 0.0 or tl <= 0.0:
        raise NoCrossingError(
            f"crossing of epsilon = {epsilon:.6g} falls before the first "
            "positive sample; increase the sampling cadence"
        )
    frac = (np.log(epsilon) - np.log(rl)) / (np.log(rr) - np.log(rl))
    return float(np.exp(np.log(tl) + frac * (np.log(tr) - np.log(tl))))


def regress_loglog(records):
    """OLS fit of log t_cross against log epsilon for one alpha; the slope
    is the measured beta, the intercept is log C of t = C eps^beta."""
    records = [r for r in records if np.isfinite(r.t_cross)]
    if len(records) < 3:
        raise ValueError(
            f"need at least 3 crossing records for a regression, got {len(records)}"
        )
    alphas = {r.alpha for r in records}
    if len(alphas) != 1:
        raise ValueError("all records in one regression must share alpha")
    x = np.log([r.epsilon for r in records])
    y = np.log([r.t_cross for r in records])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # residuals at the rounding floor of the data count as a perfect fit
    floor = (1e-12 * max(1.0, float(np.max(np.abs(y))))) ** 2 * len(y)
    if ss_res <= floor:
        r2 = 1.0
    elif ss_tot == 0.0:
        r2 = 0.0
    else:
        r2 = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return RegressionResult(
        alpha=records[0].alpha,
        beta=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        npoints=len(records),
    )


def run_algorithm_a(config):
    """The full two-loop procedure: cached curves per delta, crossings per
    (alpha, epsilon), a beta fit per alpha, and the final beta-vs-alpha
    line compared against the theoretical slope and intercept."""
    c = config.resolved()
    specs = curve_specs(c)
    curves = run_error_curves(c)
    by_key = dict(zip(specs, curves))

    crossings, betas, failures = [], [], []
    for alpha in c.alpha_set:
        records = []
        for eps in c.epsilon_set:
            delta = c.delta_for(alpha, eps)
            eps_comp = eps if c.comparator == COMPARATOR_COMPOSITE else None
            try:
                t_cross = find_crossing(by_key[(delta, eps_comp)], eps, c.epsilon_floor)
            except (NoCrossingError, ValueError) as err:
                failures.append(
                    {"alpha": alpha, "delta": delta, "epsilon": eps, "error": str(err)}
                )
                continue
            records.append(
                CrossingRecord(alpha=alpha, delta=delta, epsilon=eps, t_cross=t_cross)
            )
        crossings.extend(records)
        try:
            betas.append(regress_loglog(records))
        except ValueError as err:
            failures.append({"alpha": alpha, "error": str(err)})

    pred = beta_predict(0.0, c.p, c.model)
    theory_slope = -(c.p - 1.0) * (1.0 if c.model == NLS else 1.0 / (c.p + 2.0))
    theory_intercept = pred.beta
    fit_pts = [
        (b.alpha, b.beta)
        for b in betas
        if beta_predict(b.alpha, c.p, c.model).regime == EXACT
    ]
    if len(fit_pts) >= 2:
        xs, ys = zip(*fit_pts)
        meta_slope, meta_intercept = (float(v) for v in np.polyfit(xs, ys, 1))
    else:
        meta_slope = meta_intercept = None

    return AlgorithmAResult(
        config=c,
        curves=curves,
        crossings=crossings,
        betas=betas,
        meta_slope=meta_slope,
        meta_intercept=meta_intercept,
        theory_slope=theory_slope,
        theory_intercept=theory_intercept,
        failures=failures,
    )
