"""Command-line surface: simulate, sweep, verify, lemma, predict.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
4 incomplete sweep (some crossings or fits failed; partial outputs are
retained).  Results land under the configured output directory together
with a manifest.json inventory.  Environment overrides: EPNLS_OUTDIR for
the output directory, EPNLS_WORKERS for the sweep worker count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, cache_key, parse_config, serialize_config
from .evolution import (
    EPState,
    ModelParams,
    SolverBlowupError,
    StepSpec,
    evolve_ep,
    evolve_linear_b,
    evolve_nls,
    zero_state,
)
from .grid import (
    Field,
    free_propagate,
    gaussian_initial,
    l2_norm,
    make_grid,
    sobolev_norm,
    spectral_transform,
)
from .runio import (
    ManifestBuilder,
    OutputLock,
    atomic_write_text,
    fmt,
    sha256_hex,
    write_csv,
)
from .sweep import config_hash, run_algorithm_a
from .theory import (
    LemmaQInput,
    NoRealRootsError,
    beta_predict,
    bound_constants,
    existence_horizon,
    lemma_roots,
    q_eval,
    y1_pow_p_series,
    y1_series,
    y_star,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INCOMPLETE = 4


def _resolve_outdir(args_out, cfg_outdir):
    return os.environ.get("EPNLS_OUTDIR") or args_out or cfg_outdir


def _resolve_workers(cfg_workers):
    env = os.environ.get("EPNLS_WORKERS")
    return int(env) if env else cfg_workers


# --------------------------------------------------------------------------
# simulate


def cmd_simulate(args):
    cfg = parse_config(args.config)
    if args.delta is not None and args.delta < 0:
        raise ConfigError("delta must be nonnegative")
    delta = 1.0 if args.delta is None else args.delta
    outdir = _resolve_outdir(args.out, cfg.outdir)

    grid = make_grid(cfg.n, cfg.N, cfg.L, max_points=cfg.max_points)
    params = ModelParams(g=cfg.g, gamma=cfg.gamma, omega0=cfg.omega0, p=cfg.p, s=cfg.s)
    step = StepSpec(dt=cfg.dt, samples_per_unit_time=cfg.samples_per_unit_time)
    phi0 = gaussian_initial(grid, delta)

    # advisory only: the contraction argument guarantees existence up to
    # this horizon (r = 1/2, field cap at twice the initial norm)
    cap = 2.0 * sobolev_norm(phi0, cfg.s)
    horizon = existence_horizon(cap, 0.5, gamma=cfg.gamma, g=cfg.g) if cap > 0 else 0.0
    if cfg.T > horizon:
        print(
            f"advisory: horizon T = {fmt(cfg.T)} exceeds the guaranteed "
            f"existence time {horizon:.4g} (Ktilde = 1); results past it "
            "rely on the solver, not the theory"
        )

    with OutputLock(outdir):
        manifest = ManifestBuilder(outdir, cache_key(cfg, delta), __version__)
        atomic_write_text(os.path.join(outdir, "config.ini"), serialize_config(cfg))
        try:
            if cfg.model == "ep":
                traj = evolve_ep(zero_state(phi0), params, step, cfg.T, record="norms")
                rows = zip(traj.times, traj.norm_phi, traj.norm_psi, traj.mass)
                header = ["t", "norm_phi", "norm_psi", "mass"]
            else:
                traj = evolve_nls(phi0, params, step, cfg.T, record="norms")
                rows = zip(traj.times, traj.norm_phi, traj.mass)
                header = ["t", "norm_phi", "mass"]
        except SolverBlowupError as err:
            manifest.add_job("simulate", "failed", str(err))
            manifest.write()
            print(f"numerical failure: {err}", file=sys.stderr)
            return EXIT_NUMERICAL
        write_csv(os.path.join(outdir, "trajectory.csv"), header,
                  [tuple(float(v) for v in row) for row in rows])
        drift = float(np.max(np.abs(traj.mass - traj.mass[0])) / traj.mass[0])
        manifest.add_job("simulate", "ok", f"mass drift {drift:.3e}")
        manifest.write()
    print(f"trajectory written to {outdir}/trajectory.csv (mass drift {drift:.3e})")
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep


def cmd_sweep(args):
    cfg = parse_config(args.config)
    outdir = _resolve_outdir(args.out, cfg.outdir)
    workers = args.workers or _resolve_workers(cfg.workers)
    sweep_cfg = cfg.to_sweep_config()
    if workers != sweep_cfg.workers:
        from dataclasses import replace

        sweep_cfg = replace(sweep_cfg, workers=workers)

    with OutputLock(outdir):
        manifest = ManifestBuilder(outdir, config_hash(sweep_cfg), __version__)
        atomic_write_text(os.path.join(outdir, "config.ini"), serialize_config(cfg))
        try:
            result = run_algorithm_a(sweep_cfg)
        except SolverBlowupError as err:
            manifest.add_job("sweep", "failed", str(err))
            manifest.write()
            print(f"numerical failure: {err}", file=sys.stderr)
            return EXIT_NUMERICAL

        hash_dir = os.path.join(outdir, "curves", config_hash(sweep_cfg))
        for curve in result.curves:
            write_csv(
                os.path.join(hash_dir, f"delta={fmt(curve.delta)}.csv"),
                ["t", "rho"],
                [(float(t), float(r)) for t, r in zip(curve.times, curve.rho)],
            )
        write_csv(
            os.path.join(outdir, "crossings.csv"),
            ["alpha", "delta", "epsilon", "t_cross"],
            [(r.alpha, r.delta, r.epsilon, r.t_cross) for r in result.crossings],
        )
        write_csv(
            os.path.join(outdir, "betas.csv"),
            ["alpha", "beta", "intercept", "r2", "npoints"],
            [(b.alpha, b.beta, b.intercept, b.r_squared, b.npoints)
             for b in result.betas],
        )
        summary = {
            "config_hash": config_hash(sweep_cfg),
            "config": serialize_config(cfg),
            "tool_version": __version__,
            "meta_fit": {
                "slope": result.meta_slope,
                "intercept": result.meta_intercept,
            },
            "theory": {
                "slope": result.theory_slope,
                "intercept": result.theory_intercept,
            },
            "betas": [
                {"alpha": b.alpha, "beta": b.beta, "intercept": b.intercept,
                 "r_squared": b.r_squared, "npoints": b.npoints}
                for b in result.betas
            ],
            "solver": {"T": sweep_cfg.resolved().T, "dt": sweep_cfg.resolved().dt,
                       "samples_per_unit_time":
                           sweep_cfg.resolved().samples_per_unit_time,
                       "comparator": sweep_cfg.resolved().comparator},
            "failures": result.failures,
        }
        atomic_write_text(
            os.path.join(outdir, "summary.json"), json.dumps(summary, indent=2)
        )
        status = "ok" if not result.failures else "incomplete"
        manifest.add_job("sweep", status, f"{len(result.failures)} failures")
        manifest.write()

    for b in result.betas:
        pred = beta_predict(b.alpha, cfg.p, cfg.model)
        print(
            f"alpha={fmt(b.alpha)}  beta={b.beta:.5f}  "
            f"theory={pred.beta:.5f} ({pred.regime})  r2={b.r_squared:.6f}"
        )
    if result.meta_slope is not None:
        print(
            f"meta-fit: slope {result.meta_slope:.5f} (theory "
            f"{result.theory_slope:.5f}), intercept {result.meta_intercept:.5f} "
            f"(theory {result.theory_intercept:.5f})"
        )
    if result.failures:
        print(f"{len(result.failures)} records failed; see summary.json",
              file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def _verify_checks():
    """Fast invariant battery; yields (name, passed/None, detail).
    A None verdict means the check is reported, not asserted."""
    rng = np.random.default_rng(2024)
    grid = make_grid(1, 256, 10.0)
    params = ModelParams()
    rand = Field(grid, rng.standard_normal(grid.shape)
                 + 1j * rng.standard_normal(grid.shape))

    back = spectral_transform(spectral_transform(rand, "forward"), "inverse")
    err = np.max(np.abs(back.values - rand.values)) / np.max(np.abs(rand.values))
    yield "transform roundtrip", err < 1e-13, f"rel err {err:.2e}"

    parseval = abs(sobolev_norm(rand, 0.0) - l2_norm(rand)) / l2_norm(rand)
    yield "Parseval identity", parseval < 1e-12, f"rel err {parseval:.2e}"

    iso = abs(
        sobolev_norm(free_propagate(rand, 0.37), 1.0) - sobolev_norm(rand, 1.0)
    ) / sobolev_norm(rand, 1.0)
    yield "free propagator isometry", iso < 1e-12, f"rel err {iso:.2e}"

    once = free_propagate(rand, 0.75)
    twice = free_propagate(free_propagate(rand, 0.3), 0.45)
    semi = np.max(np.abs(once.values - twice.values)) / np.max(np.abs(once.values))
    yield "propagator semigroup", semi < 1e-12, f"rel err {semi:.2e}"

    from scipy.linalg import expm

    small = make_grid(1, 16, 5.0)
    sp = Field(small, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    ss = Field(small, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    traj = evolve_linear_b(EPState(sp, ss), params, sample_times=[0.9])
    ph, psh = np.fft.fft(sp.values), np.fft.fft(ss.values)
    po = np.empty(16, complex)
    so = np.empty(16, complex)
    for m in range(16):
        h = np.array([[small.k_squared[m], params.gamma],
                      [params.gamma, params.omega0]])
        po[m], so[m] = expm(-1j * 0.9 * h) @ np.array([ph[m], psh[m]])
    po, so = np.fft.ifft(po), np.fft.ifft(so)
    scale = np.max(np.abs(po))
    expm_err = max(np.max(np.abs(traj.phi[0].values - po)),
                   np.max(np.abs(traj.psi[0].values - so))) / scale
    yield "linear system vs expm oracle", expm_err < 1e-10, f"rel err {expm_err:.2e}"

    phi0 = gaussian_initial(grid, 1.0)
    traj = evolve_ep(zero_state(phi0), params, StepSpec(dt=1e-3), 1.0,
                     record="norms")
    drift = float(np.max(np.abs(traj.mass - traj.mass[0])) / traj.mass[0])
    yield "EP mass conservation", drift <= 1e-10, f"rel drift {drift:.2e}"

    fwd = evolve_ep(zero_state(phi0), params, StepSpec(dt=1e-3), 1.0)
    fin = fwd.final_state()
    rev = evolve_ep(EPState(fin.phi, fin.psi, 0.0), params,
                    StepSpec(dt=-1e-3), 1.0).final_state()
    rev_err = sobolev_norm(Field(grid, rev.phi.values - phi0.values), 1.0)
    yield "time reversal", rev_err < 1e-8, f"Hs err {rev_err:.2e}"

    inp = LemmaQInput(eta=0.1, delta=0.5, p=3.0)
    y1, y2 = lemma_roots(inp)
    resid = max(abs(q_eval(y1, inp)), abs(q_eval(y2, inp)))
    yield "lemma root residuals", resid <= 1e-12, f"max |Q| {resid:.2e}"

    # exciton-norm bound: diagnostic ratio only (the Sobolev algebra
    # constant is taken as 1, so violations are reported, not asserted)
    m_norm = sobolev_norm(phi0, 1.0)
    short = evolve_ep(zero_state(phi0), params, StepSpec(dt=1e-3), 0.1,
                      record="norms")
    ratios = [
        short.norm_psi[i] / y_star(t, 1.0, params, M=m_norm, Kp=1.0, alpha=0.0)
        for i, t in enumerate(short.times) if t > 0
    ]
    yield "exciton bound ratio (Kp=1)", None, (
        f"max ||psi||/y_star = {max(ratios):.4f} over t <= 0.1"
    )


def cmd_verify(args):
    results = []
    failed = 0
    for name, ok, detail in _verify_checks():
        verdict = "REPORT" if ok is None else ("PASS" if ok else "FAIL")
        if ok is False:
            failed += 1
        results.append({"check": name, "verdict": verdict, "detail": detail})
        print(f"[{verdict}] {name}: {detail}")
    if args.out:
        manifest = ManifestBuilder(args.out, sha256_hex("verify"), __version__)
        atomic_write_text(
            os.path.join(args.out, "verify_report.json"),
            json.dumps({"tool_version": __version__, "checks": results}, indent=2),
        )
        for entry in results:
            manifest.add_job(entry["check"], entry["verdict"].lower(),
                             entry["detail"])
        manifest.write()
    if failed:
        print(f"{failed} checks failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


# --------------------------------------------------------------------------
# lemma and predict tables


def cmd_lemma(args):
    inp = LemmaQInput(eta=args.eta, delta=args.delta, p=args.p)
    try:
        y1, y2 = lemma_roots(inp)
    except NoRealRootsError as err:
        print(f"no real roots: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = {
        "eta": inp.eta,
        "delta": inp.delta,
        "p": inp.p,
        "z": inp.z,
        "y1": y1,
        "y2": y2,
        "y1_series_order3": y1_series(inp, 3),
        "y1_pow_p_series_order2": y1_pow_p_series(inp, 2),
        "residual_y1": q_eval(y1, inp),
        "residual_y2": q_eval(y2, inp),
    }
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(",".join(rows))
        print(",".join(fmt(v) for v in rows.values()))
    return EXIT_OK


def cmd_predict(args):
    params = ModelParams(g=args.g, gamma=args.gamma, p=args.p)
    rows = []
    for alpha in args.alpha:
        pred = beta_predict(alpha, args.p, args.model)
        bc = bound_constants(params, M=args.M, Kp=args.Kp, C=args.C,
                             C1=args.C1, C2=args.C2, alpha=alpha)
        rows.append({
            "alpha": alpha,
            "beta": pred.beta,
            "regime": pred.regime,
            "B": bc.B,
            "B1": bc.B1,
            "B2": bc.B2,
            "q": bc.q,
        })
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print("alpha,beta,regime,B,B1,B2,q")
        for r in rows:
            print(",".join(
                r["regime"] if k == "regime" else fmt(r[k])
                for k in ("alpha", "beta", "regime", "B", "B1", "B2", "q")
            ))
    return EXIT_OK


# --------------------------------------------------------------------------
# dispatch


def build_parser():
    parser = argparse.ArgumentParser(
        prog="epnls",
        description="Short-time nonlinear-onset scaling for the "
                    "photon-exciton system and NLS",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="single trajectory with diagnostics")
    sim.add_argument("--config", default=None, help="INI config path")
    sim.add_argument("--out", default=None, help="output directory")
    sim.add_argument("--delta", type=float, default=None,
                     help="initial amplitude (default 1)")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="full crossing-time sweep")
    sw.add_argument("--config", default=None)
    sw.add_argument("--out", default=None)
    sw.add_argument("--workers", type=int, default=None)
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="solver invariant self-test")
    ver.add_argument("--out", default=None)
    ver.set_defaults(func=cmd_verify)

    lem = sub.add_parser("lemma", help="roots and series of eta y^p - y + delta")
    lem.add_argument("--eta", type=float, required=True)
    lem.add_argument("--delta", type=float, required=True)
    lem.add_argument("--p", type=float, default=3.0)
    lem.add_argument("--json", action="store_true")
    lem.set_defaults(func=cmd_lemma)

    pre = sub.add_parser("predict", help="beta(alpha) and bound constants")
    pre.add_argument("--alpha", type=float, action="append", required=True)
    pre.add_argument("--p", type=float, default=3.0)
    pre.add_argument("--model", choices=("ep", "nls"), default="ep")
    pre.add_argument("--g", type=float, default=1.0)
    pre.add_argument("--gamma", type=float, default=1.0)
    pre.add_argument("--M", type=float, default=1.0)
    pre.add_argument("--Kp", type=float, default=1.0)
    pre.add_argument("--C", type=float, default=1.0)
    pre.add_argument("--C1", type=float, default=1.0)
    pre.add_argument("--C2", type=float, default=1.0)
    pre.add_argument("--json", action="store_true")
    pre.set_defaults(func=cmd_predict)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
