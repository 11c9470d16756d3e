import json

import numpy as np
import pytest

import airls


def noiseless(N=500, seed=1):
    noise = airls.NoiseConfig.off()
    noise.seed = seed
    return airls.generate_trajectory(airls.LinearSystem.benchmark(), np.zeros(2), 0.1, N, noise)


def test_benchmark_system_shapes():
    sys = airls.LinearSystem.benchmark()
    assert sys.theta().shape == (2, 4)
    assert sys.n == 2 and sys.n_u == 2


def test_noiseless_trace_has_clean_measurements():
    trace = noiseless(50)
    assert len(trace) == 50
    for s in trace:
        np.testing.assert_array_equal(s.stacked(True), s.stacked(False))


@pytest.mark.parametrize("kind", ["rtls", "rls"])
def test_baselines_recover_noiseless_parameters(kind):
    est = airls.estimator(kind)
    est.run(noiseless())
    truth = airls.LinearSystem.benchmark().theta()
    assert airls.rel_frobenius_error(truth, est.theta()) < 1e-4


def test_airls_runs_and_reports_residual():
    est = airls.estimator("airls", beta=0.99, psi=1e-2)
    est.run(noiseless(100))
    assert np.isfinite(est.theta()).all()
    assert est.residual_sq() >= 0.0
    p = est.point_estimate(noiseless(1)[0])
    assert p.x_next_hat.shape == (2,)


def test_snapshot_round_trip():
    trace = noiseless(200)
    est = airls.estimator("rls")
    est.run(trace[:100])
    resumed = airls.restore_estimator(est.snapshot())
    est.run(trace[100:])
    resumed.run(trace[100:])
    assert resumed.kind == "rls"
    np.testing.assert_array_equal(est.theta(), resumed.theta())
    assert json.loads(est.snapshot())["estimator"] == "rls"


def test_weighted_pseudo_inverse_identity():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(6, 3))
    w = rng.uniform(0.5, 2.0, size=6)
    P = airls.weighted_pseudo_inverse(X, w)
    np.testing.assert_allclose(X @ P @ X, X, atol=1e-10)
    np.testing.assert_allclose(airls.weighted_pseudo_inverse(X, np.ones(6)), np.linalg.pinv(X), atol=1e-10)


def test_projector_lands_on_the_constraint():
    rng = np.random.default_rng(1)
    theta = rng.normal(size=(2, 4))
    P = airls.make_projector(theta, rng.uniform(0.5, 2.0, size=6))
    G = np.hstack([-np.eye(2), theta])
    np.testing.assert_allclose(G @ P, np.zeros((2, 6)), atol=1e-12)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)


def test_beta_bound():
    assert airls.check_beta_bound(1.0, 0.5, 0.9)
    assert not airls.check_beta_bound(1.0, 0.1, 0.9)
    with pytest.raises(ValueError):
        airls.check_beta_bound(1.0, 0.0, 0.9)


def test_config_and_sweep_are_deterministic():
    cfg = airls.parse_config(
        """
[sweep]
fast_N = 200
trials = 2
ratios = [0.0, 0.02]
estimators = ["rtls", "rls"]
"""
    )
    assert cfg.estimators == ["rtls", "rls"]
    rows = airls.run_sweep(cfg, fast=True, threads=1)
    assert [r["estimator"] for r in rows] == ["rls", "rls", "rtls", "rtls"]
    assert all(r["trials"] == 2 for r in rows)
    assert airls.sweep_csv(cfg, True, 1) == airls.sweep_csv(cfg, True, 2)


def test_bad_config_raises():
    with pytest.raises(airls.ConfigError):
        airls.parse_config("[sweep]\ntrials = 0\n")
    with pytest.raises(ValueError):
        airls.estimator("kalman")
