import numpy as np
import pytest

from epnls.evolution import ErrorCurve
from epnls.sweep import (
    AlgorithmAResult,
    CrossingRecord,
    NoCrossingError,
    SweepConfig,
    compute_error_curve,
    config_hash,
    curve_specs,
    find_crossing,
    physics_signature,
    regress_loglog,
    run_algorithm_a,
    run_error_curves,
    _curve_to_csv,
)

# small, fast sweep used by most machinery tests
FAST_EP = dict(model="ep", N=64, T=1.0, alpha_set=(0.0,), epsilon_set=(1e-2, 3e-3, 1e-3))


def synthetic_curve(times, rho, delta=1.0):
    return ErrorCurve(delta=delta, times=np.asarray(times), rho=np.asarray(rho))


# ---------------------------------------------------------------- config


def test_config_validation():
    with pytest.raises(ValueError, match="model"):
        SweepConfig(model="kdv")
    with pytest.raises(ValueError, match="decreasing"):
        SweepConfig(epsilon_set=(1e-3, 1e-2))
    with pytest.raises(ValueError, match="0, 1"):
        SweepConfig(epsilon_set=(2.0, 1e-2))
    with pytest.raises(ValueError, match="alpha"):
        SweepConfig(alpha_set=(-0.1,))
    with pytest.raises(ValueError, match="comparator"):
        SweepConfig(model="nls", comparator="systemB")
    with pytest.raises(ValueError, match="comparator"):
        SweepConfig(model="ep", comparator="linear-nls")


def test_config_resolution_defaults():
    ep = SweepConfig(model="ep").resolved()
    assert (ep.T, ep.dt, ep.comparator, ep.s) == (2.0, 1e-3, "systemB", 1.0)
    nls = SweepConfig(model="nls", n=2, N=32).resolved()
    assert nls.comparator == "linear-nls"
    assert nls.s == 2.0


def test_delta_for_alpha_zero_degeneracy():
    cfg = SweepConfig()
    assert cfg.delta_for(0.0, 1e-3) == 1.0
    assert cfg.delta_for(0.5, 1e-2) == pytest.approx(0.1)


def test_signature_excludes_cosmetic_fields():
    a = SweepConfig(**FAST_EP)
    b = SweepConfig(**{**FAST_EP, "workers": 4, "cache_dir": "/tmp/x",
                       "epsilon_floor": 1e-9})
    assert physics_signature(a) == physics_signature(b)
    assert config_hash(a) == config_hash(b)
    c = SweepConfig(**{**FAST_EP, "p": 5.0})
    assert config_hash(a) != config_hash(c)


def test_curve_specs_dedup_alpha_zero():
    cfg = SweepConfig(model="ep", alpha_set=(0.0,), epsilon_set=(1e-2, 1e-3))
    assert curve_specs(cfg) == [(1.0, None)]


# ---------------------------------------------------------------- crossings


def test_find_crossing_identity_curve():
    t = np.linspace(0.0, 1.0, 2001)
    curve = synthetic_curve(t, t)
    assert find_crossing(curve, 0.1) == pytest.approx(0.1, abs=1e-6)


def test_find_crossing_quintic_curve():
    t = np.linspace(0.0, 0.3, 3001)
    curve = synthetic_curve(t, t**5)
    assert find_crossing(curve, 1e-5) == pytest.approx(0.1, rel=1e-4)


def test_find_crossing_loglog_exact_on_power_laws():
    # coarse sampling, but the interpolation is linear in (log t, log rho)
    t = np.logspace(-2, 0, 9)
    curve = synthetic_curve(np.concatenate([[0.0], t]),
                            np.concatenate([[0.0], t**3]))
    assert find_crossing(curve, 1e-3) == pytest.approx(0.1, rel=1e-12)


def test_find_crossing_returns_first_upcrossing():
    t = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    rho = np.array([0.0, 0.05, 0.2, 0.05, 0.3, 0.4])
    first = find_crossing(synthetic_curve(t, rho), 0.15)
    assert 1.0 < first < 2.0


def test_find_crossing_no_crossing():
    t = np.linspace(0, 1, 11)
    with pytest.raises(NoCrossingError, match="never reaches"):
        find_crossing(synthetic_curve(t, 1e-4 * t), 0.5)


def test_find_crossing_below_floor():
    t = np.linspace(0, 1, 11)
    with pytest.raises(ValueError, match="floor"):
        find_crossing(synthetic_curve(t, t), 1e-8, epsilon_floor=1e-6)


def test_find_crossing_too_coarse():
    curve = synthetic_curve([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(NoCrossingError, match="cadence"):
        find_crossing(curve, 0.5)


# ---------------------------------------------------------------- regression


def test_regress_exact_power_law():
    eps = np.logspace(-3, -2, 6)
    records = [
        CrossingRecord(alpha=0.1, delta=e**0.1, epsilon=e, t_cross=0.7 * e**0.2)
        for e in eps
    ]
    fit = regress_loglog(records)
    assert fit.beta == pytest.approx(0.2, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(0.7), abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.npoints == 6


def test_regress_constant_crossing_time():
    eps = np.logspace(-3, -2, 5)
    records = [
        CrossingRecord(alpha=0.0, delta=1.0, epsilon=e, t_cross=0.42) for e in eps
    ]
    fit = regress_loglog(records)
    assert fit.beta == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == 1.0


def test_regress_needs_three_points():
    records = [
        CrossingRecord(alpha=0.0, delta=1.0, epsilon=1e-2, t_cross=0.1),
        CrossingRecord(alpha=0.0, delta=1.0, epsilon=1e-3, t_cross=0.2),
    ]
    with pytest.raises(ValueError, match="3"):
        regress_loglog(records)


def test_regress_rejects_mixed_alpha():
    records = [
        CrossingRecord(alpha=0.0, delta=1.0, epsilon=e, t_cross=t)
        for e, t in [(1e-2, 0.1), (3e-3, 0.08), (1e-3, 0.06)]
    ]
    records.append(CrossingRecord(alpha=0.1, delta=0.5, epsilon=1e-2, t_cross=0.1))
    with pytest.raises(ValueError, match="alpha"):
        regress_loglog(records)


# ---------------------------------------------------------------- curves


def test_error_curves_vanish_when_g_zero():
    cfg = SweepConfig(**{**FAST_EP, "g": 0.0})
    (curve,) = run_error_curves(cfg)
    assert np.max(curve.rho) < 1e-12


def test_single_curve_serves_all_epsilons():
    cfg = SweepConfig(**FAST_EP)
    curves = run_error_curves(cfg)
    assert len(curves) == 1
    assert curves[0].delta == 1.0


def test_curve_early_time_slope_is_p_plus_2():
    cfg = SweepConfig(model="ep", T=1.0, alpha_set=(0.0,), epsilon_set=(1e-2,))
    curve = compute_error_curve(cfg, 1.0)
    m = (curve.times >= 0.05) & (curve.times <= 0.5)
    slope = np.polyfit(np.log(curve.times[m]), np.log(curve.rho[m]), 1)[0]
    assert slope == pytest.approx(5.0, rel=0.05)


def test_crossing_monotone_in_epsilon():
    cfg = SweepConfig(model="ep", T=1.5, alpha_set=(0.0,),
                      epsilon_set=tuple(np.logspace(-2, -3, 6)))
    res = run_algorithm_a(cfg)
    recs = sorted(res.crossings, key=lambda r: r.epsilon)
    ts = [r.t_cross for r in recs]
    assert all(a <= b for a, b in zip(ts, ts[1:]))


def test_crossing_stable_under_cadence_halving():
    base = SweepConfig(model="ep", N=64, T=1.5, alpha_set=(0.0,),
                       epsilon_set=(1e-2,), samples_per_unit_time=100)
    halved = SweepConfig(model="ep", N=64, T=1.5, alpha_set=(0.0,),
                         epsilon_set=(1e-2,), samples_per_unit_time=50)
    t_base = run_algorithm_a(base).crossings[0].t_cross
    t_halved = run_algorithm_a(halved).crossings[0].t_cross
    assert abs(t_base - t_halved) < 1.0 / 50  # local sample spacing


def test_cache_cold_vs_warm_identical(tmp_path):
    cfg = SweepConfig(**FAST_EP, cache_dir=str(tmp_path))
    cold = run_algorithm_a(cfg)
    cache_files = sorted(tmp_path.rglob("*.csv"))
    assert len(cache_files) == 1
    blob = cache_files[0].read_bytes()
    warm = run_algorithm_a(cfg)
    assert cache_files[0].read_bytes() == blob
    assert [r.t_cross for r in cold.crossings] == [r.t_cross for r in warm.crossings]
    assert [b.beta for b in cold.betas] == [b.beta for b in warm.betas]


def test_repeat_runs_bitwise_identical():
    cfg = SweepConfig(**FAST_EP)
    a = run_algorithm_a(cfg)
    b = run_algorithm_a(cfg)
    assert _curve_to_csv(a.curves[0]) == _curve_to_csv(b.curves[0])
    assert [r.t_cross for r in a.crossings] == [r.t_cross for r in b.crossings]


def test_worker_pool_matches_sequential():
    kw = dict(model="ep", N=64, T=1.0, alpha_set=(0.0, 0.2),
              epsilon_set=(1e-2, 3e-3, 1e-3))
    seq = run_algorithm_a(SweepConfig(**kw, workers=1))
    par = run_algorithm_a(SweepConfig(**kw, workers=3))
    assert [r.t_cross for r in seq.crossings] == [r.t_cross for r in par.crossings]


def test_horizon_too_short_reported_not_fatal():
    # T = 0.2 never lets rho reach 1e-2 at delta = 1 (crossing ~ 0.73),
    # so every record fails but the sweep still returns a result
    cfg = SweepConfig(model="ep", N=64, T=0.2, alpha_set=(0.0,),
                      epsilon_set=(1e-2, 5e-3, 2e-3))
    res = run_algorithm_a(cfg)
    assert res.crossings == []
    assert len(res.failures) == 4  # 3 crossings + 1 regression
    assert all("never reaches" in f["error"] for f in res.failures[:3])
    assert res.meta_slope is None


def test_composite_comparator_runs():
    cfg = SweepConfig(model="ep", N=64, T=1.0, alpha_set=(0.0,),
                      epsilon_set=(1e-2, 3e-3, 1e-3),
                      comparator="composite", c1=0.5)
    res = run_algorithm_a(cfg)
    assert len(res.curves) == 3  # one per epsilon: t1 depends on epsilon
    assert len(res.crossings) == 3


def test_nls_meta_fit_small():
    cfg = SweepConfig(model="nls", N=128, T=0.05, dt=5e-5,
                      samples_per_unit_time=2000,
                      alpha_set=(0.0, 0.1), epsilon_set=(1e-2, 3e-3, 1e-3))
    res = run_algorithm_a(cfg)
    assert isinstance(res, AlgorithmAResult)
    for b in res.betas:
        assert b.beta == pytest.approx(1.0 - 2.0 * b.alpha, abs=0.02)
    assert res.theory_slope == -2.0
    assert res.theory_intercept == 1.0
