import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgg_spectra import ModelParams, RegimeSpec
from rgg_spectra.errors import InvalidParams, TauVectorShape, TorusDeltaTooLarge, WrongRegime, ZeroLengthEdge
from rgg_spectra.rgg_sim import (
    ANALYTIC,
    HARD_WINDOW,
    SHARED,
    TORUS,
    EdgeList,
    ExperimentConfig,
    PointCloud,
    Schedule,
    WindowSpec,
    analytic_mean,
    check_difference_convergence,
    check_noise_decomposition,
    cloud_functionals,
    compare_band,
    enumerate_edges,
    jackknife_cov_se,
    length_power,
    noise_target_variance,
    normalizer,
    run_experiment,
    sample_covariance,
    sample_poisson,
    thread_count,
    torus_covariance,
)
from rgg_spectra.rgg_sim.kernels import cells_per_axis, half_shell_offsets


def brute_edges(points, side, delta, torus):
    diff = np.abs(points[:, None, :] - points[None, :, :])
    if torus:
        diff = np.minimum(diff, side - diff)
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    i, j = np.nonzero(np.triu(dist <= delta, k=1))
    return set(zip(i.tolist(), j.tolist())), dist


def cloud_from(points, side=1.0, mode=TORUS):
    pts = np.asarray(points, dtype=float)
    return PointCloud(pts, t=1.0, window=WindowSpec(pts.shape[1], side, mode))


@given(
    st.integers(1, 3),
    st.sampled_from([TORUS, HARD_WINDOW]),
    st.floats(0.02, 0.33),
    st.integers(0, 2**31),
)
@settings(max_examples=60, deadline=None)
def test_cell_list_matches_brute_force(d, mode, delta, seed):
    cloud = sample_poisson(150.0 / d, WindowSpec(d, 1.0, mode), seed=seed)
    edges = enumerate_edges(cloud, delta)
    ref, dist = brute_edges(cloud.points, 1.0, delta, mode == TORUS)
    assert edges.pairs() == ref
    assert len(edges) == len(ref)
    assert np.all(edges.i < edges.j)
    assert np.allclose(edges.length, dist[edges.i, edges.j], rtol=1e-14)


def test_distance_equal_to_radius_is_an_edge():
    cloud = cloud_from([[0.0], [0.25], [0.5 + 1e-9]], side=1.0)
    assert enumerate_edges(cloud, 0.25).pairs() == {(0, 1)}
    # wraps through the boundary
    cloud = cloud_from([[0.0625, 0.5], [0.9375, 0.5]])
    assert enumerate_edges(cloud, 0.125).pairs() == {(0, 1)}
    assert len(enumerate_edges(cloud, 0.125, mode=HARD_WINDOW)) == 0


def test_tiny_clouds():
    for pts in ([[0.5, 0.5]], np.empty((0, 2))):
        cloud = cloud_from(pts) if len(pts) else PointCloud(np.empty((0, 2)), 1.0, WindowSpec(2))
        assert len(enumerate_edges(cloud, 0.1)) == 0
        assert np.all(cloud_functionals(cloud, 0.1, [0.0, 1.0]) == 0.0)


def test_torus_delta_limit():
    cloud = cloud_from([[0.1, 0.1], [0.2, 0.2]])
    with pytest.raises(TorusDeltaTooLarge):
        enumerate_edges(cloud, 0.34)
    assert len(enumerate_edges(cloud, 0.5, mode=HARD_WINDOW)) == 1
    with pytest.raises(InvalidParams):
        enumerate_edges(cloud, 0.0)


@given(st.integers(0, 2**31), st.sampled_from([1, 2, 3]))
@settings(max_examples=30, deadline=None)
def test_length_power_matches_double_sum(seed, d):
    cloud = sample_poisson(120.0, WindowSpec(d), seed=seed)
    delta = 0.3
    taus = np.array([-0.4, 0.0, 0.5, 1.0, 2.0, 3.7]) if d > 1 else np.array([0.0, 1.0, 2.5])
    _, dist = brute_edges(cloud.points, 1.0, delta, True)
    n = cloud.count
    naive = np.zeros(taus.size)
    for k, tau in enumerate(taus):
        acc = 0.0
        for i in range(n):
            for j in range(n):
                if i != j and dist[i, j] <= delta:
                    acc += dist[i, j] ** tau
        naive[k] = 0.5 * acc
    edges = enumerate_edges(cloud, delta)
    assert np.allclose(length_power(edges, taus), naive, rtol=1e-12, atol=0)
    assert np.allclose(cloud_functionals(cloud, delta, taus), naive, rtol=1e-12, atol=0)


def test_zero_length_edge_with_negative_power():
    cloud = cloud_from([[0.3, 0.3], [0.3, 0.3]])
    assert np.allclose(cloud_functionals(cloud, 0.1, [0.0, 1.0]), [1.0, 0.0])
    with pytest.raises(ZeroLengthEdge):
        cloud_functionals(cloud, 0.1, [-0.5, 0.0])
    with pytest.raises(ZeroLengthEdge):
        length_power(EdgeList(np.array([0]), np.array([1]), np.array([0.0])), [-0.5])
    with pytest.raises(InvalidParams):
        length_power(np.array([0.1]), [])


def test_poisson_count_moments():
    window = WindowSpec(2, 1.0)
    t = 50.0
    counts = np.array([sample_poisson(t, window, seed=[5, k]).count for k in range(10_000)])
    se_mean = np.sqrt(t / counts.size)
    # variance of the sample variance for a Poisson law: (mu + 2 mu^2 (n/(n-1))) / n
    se_var = np.sqrt((t + 2 * t**2) / counts.size)
    assert abs(counts.mean() - t) <= 3 * se_mean
    assert abs(counts.var(ddof=1) - t) <= 3 * se_var


def test_poisson_points_in_window_and_replayable():
    w = WindowSpec(3, 2.0, HARD_WINDOW)
    a = sample_poisson(30.0, w, seed=9)
    b = sample_poisson(30.0, w, seed=9)
    assert np.array_equal(a.points, b.points)
    assert np.all((a.points >= 0) & (a.points < 2.0))
    with pytest.raises(InvalidParams):
        sample_poisson(-1.0, w)


def test_grid_helpers():
    assert len(half_shell_offsets(2)) == 4
    assert len(half_shell_offsets(3)) == 13
    assert cells_per_axis(1.0, 0.3, 1000, 2, True) == 3
    assert cells_per_axis(1.0, 1e-4, 50, 2, True) >= 3
    assert cells_per_axis(1.0, 1e-4, 50, 2, True) ** 2 <= max(2 * 50, 9)


def _config(regime, taus=(0.0, 1.0), ts=(400.0,), alpha=0.5, R=20, seed=3, **kw):
    params = ModelParams(d=2, taus=taus, regime=regime)
    return ExperimentConfig(params, WindowSpec(2), Schedule.parametric(1.0, alpha, ts), R, seed, **kw)


def test_experiment_deterministic_across_workers():
    cfg = _config(RegimeSpec.critical(1.0))
    one = run_experiment(cfg, workers=1)[0]
    many = run_experiment(cfg, workers=4)[0]
    assert np.array_equal(one.raw, many.raw)
    assert np.array_equal(one.cov, many.cov)
    other = run_experiment(cfg.with_seed(4), workers=1)[0]
    assert not np.array_equal(one.raw, other.raw)


def test_shared_seed_gives_zero_covariance():
    cfg = _config(RegimeSpec.critical(1.0), R=2, seed_policy=SHARED)
    est = run_experiment(cfg, workers=1)[0]
    assert np.all(est.cov == 0.0)
    assert np.all(np.isnan(est.se))


def test_sample_covariance_and_jackknife_brute_force():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(25, 3))
    mean, cov = sample_covariance(X)
    assert np.allclose(cov, np.cov(X, rowvar=False))
    loo = np.array([np.cov(np.delete(X, k, axis=0), rowvar=False) for k in range(25)])
    ref = np.sqrt(24 / 25 * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    assert np.allclose(jackknife_cov_se(X), ref, rtol=1e-10)


def test_analytic_mean_matches_simulation():
    cfg = _config(RegimeSpec.critical(1.0), taus=(0.0, 1.0, 2.0), R=200, seed=1)
    est = run_experiment(cfg, workers=1)[0]
    t, dl = cfg.schedule.pairs[0]
    m = analytic_mean(t, dl, cfg.params)
    sd = np.sqrt(np.diag(np.cov(est.raw, rowvar=False)) / est.R)
    assert np.all(np.abs(est.raw.mean(axis=0) - m) <= 4 * sd)


def test_analytic_centering_requires_torus():
    params = ModelParams(d=2, taus=(0.0,), regime=RegimeSpec.critical(1.0))
    with pytest.raises(InvalidParams):
        ExperimentConfig(params, WindowSpec(2, 1.0, HARD_WINDOW), Schedule.explicit([(100, 0.1)]), 5, centering=ANALYTIC)
    with pytest.raises(InvalidParams):
        ExperimentConfig(params, WindowSpec(3), Schedule.explicit([(100, 0.1)]), 5)
    with pytest.raises(InvalidParams):
        ExperimentConfig(params, WindowSpec(2), Schedule.explicit([(100, 0.1)]), 1)
    with pytest.raises(TorusDeltaTooLarge):
        ExperimentConfig(params, WindowSpec(2), Schedule.explicit([(100, 0.4)]), 5)


def test_config_round_trip():
    cfg = _config(RegimeSpec.critical(2.0), ts=(100.0, 200.0))
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(InvalidParams):
        ExperimentConfig.from_dict({"params": cfg.params.to_dict()})


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("RGG_SPECTRA_THREADS", "3")
    assert thread_count() == 3
    assert thread_count(2) == 2
    monkeypatch.setenv("RGG_SPECTRA_THREADS", "zero")
    with pytest.raises(InvalidParams):
        thread_count()


def test_torus_covariance_critical_is_exact_limit():
    p = ModelParams(d=2, taus=(0.0, 1.0, 2.5), regime=RegimeSpec.critical(1.0))
    from rgg_spectra.closed_forms import build_sigma

    for t in (100.0, 1e4):
        assert np.allclose(torus_covariance(p, t, t**-0.5), build_sigma(p).sigma, rtol=1e-12)
    sub = p.with_regime(RegimeSpec.subcritical())
    assert np.allclose(torus_covariance(sub, 1e8, 1e-8), build_sigma(sub).sigma, rtol=1e-6)


def test_normalizer_switches_branch():
    p = ModelParams(d=2, taus=(0.0,))
    assert normalizer(100.0, 0.01, p)[0] == pytest.approx(100 * 0.01)
    assert normalizer(100.0, 0.3, p)[0] == pytest.approx(100**1.5 * 0.09)


def test_band_comparison():
    cfg = _config(RegimeSpec.critical(1.0), R=60)
    est = run_experiment(cfg, workers=1)[0]
    band = compare_band(est, est.cov * 1.05)
    assert band.all_inside
    assert not compare_band(est, est.cov * 3.0, k_se=0.0).all_inside


def test_diagnostic_preconditions():
    with pytest.raises(WrongRegime):
        check_difference_convergence(_config(RegimeSpec.critical(1.0)), (0.0, 1.0))
    sup = _config(RegimeSpec.supercritical(), ts=(400.0, 300.0), alpha=0.25)
    with pytest.raises(WrongRegime):
        check_difference_convergence(sup, (0.0, 1.0))
    with pytest.raises(WrongRegime):
        check_noise_decomposition(sup, 1.0)
    with pytest.raises(TauVectorShape):
        check_noise_decomposition(_config(RegimeSpec.critical(1.0), taus=(0.5, 1.0)), 1.0)
    with pytest.raises(TauVectorShape):
        check_noise_decomposition(_config(RegimeSpec.critical(1.0)), 2.0)


def test_noise_residual_of_count_is_zero():
    cfg = _config(RegimeSpec.critical(1.0), R=10)
    diag = check_noise_decomposition(cfg, 0.0, workers=1)[0]
    assert diag.variance == pytest.approx(0.0, abs=1e-28)
    assert diag.target_variance == 0.0
    assert diag.correlation == 0.0


def test_noise_target_value():
    p = ModelParams(d=2, taus=(0.0, 1.0), regime=RegimeSpec.critical(1.0))
    assert noise_target_variance(p, 1.0) == pytest.approx(np.pi / 36)
    assert noise_target_variance(p.with_regime(RegimeSpec.critical(2.0)), 1.0) == pytest.approx(np.pi / 72)


def test_difference_series_small():
    cfg = _config(RegimeSpec.supercritical(), ts=(200.0, 400.0), alpha=0.25, R=30)
    series = check_difference_convergence(cfg, (0.0, 1.0), workers=1)
    assert len(series.variance) == 2 and len(series.theory) == 2
    assert all(v > 0 for v in series.variance)
