import logging

import numpy as np
import pytest

from fgmto import LAMBDA_A, LAMBDA_B, MU_A, MU_B
from fgmto.errors import DomainError
from fgmto.gp import (
    INPUT_HI, INPUT_LO, DoeSpec, GpModel, LameSurrogate, MaterialDataset, build_dataset,
    correlation, deduplicate, denormalize_inputs, fit_gp, generate_doe, normalize_inputs, rrmse,
)


def cosine(S):
    return np.cos(2.0 * S[:, 0]) + 0.5 * np.cos(3.0 * S[:, 1]) + 0.25 * np.cos(S[:, 2])


@pytest.fixture(scope="module")
def synthetic():
    rng = np.random.default_rng(4)
    S = rng.random((60, 3))
    T = rng.random((200, 3))
    return S, cosine(S), T, fit_gp(S, cosine(S), seed=1)


@pytest.fixture(scope="module")
def moderate():
    """Well-conditioned model for properties that finite precision would otherwise blur."""
    S = np.random.default_rng(6).random((30, 3))
    return GpModel(S=S, q=cosine(S), w=np.array([0.8, 0.6, 0.4]))


# ------------------------------------------------------------------- DoE

def test_single_level_doe_is_full_grid():
    rows = generate_doe(DoeSpec(n_rho=1))
    assert rows.shape == (286, 3)
    assert len(np.unique(rows[:, 1:], axis=0)) == 286
    assert np.all(rows[:, 1] == np.round(rows[:, 1]))


def test_doe_bounds_count_and_determinism():
    rows = generate_doe(DoeSpec(n_rho=4, seed=3))
    assert rows.shape == (4 * 286, 3)
    assert np.all(rows >= INPUT_LO) and np.all(rows <= INPUT_HI)
    sub = generate_doe(DoeSpec(n_rho=4, seed=3, count=250))
    assert sub.shape == (250, 3)
    assert np.array_equal(sub, generate_doe(DoeSpec(n_rho=4, seed=3, count=250)))
    assert len(np.unique(sub, axis=0)) == 250


def test_doe_rejects_empty_range():
    with pytest.raises(DomainError):
        DoeSpec(rho_range=(0.7, 0.3))
    with pytest.raises(DomainError):
        DoeSpec(n_rho=0)


def test_normalization_round_trip():
    raw = generate_doe(DoeSpec(n_rho=2))
    s = normalize_inputs(raw)
    assert s.min() >= 0 and s.max() <= 1
    assert np.allclose(denormalize_inputs(s), raw)


# --------------------------------------------------------------- dataset

def test_empty_doe_gives_empty_dataset():
    ds = build_dataset(np.zeros((0, 3)))
    assert len(ds) == 0


def test_duplicates_dropped_with_warning(caplog):
    raw = np.array([[0.5, 15, 3], [0.4, 16, 2], [0.5, 15, 3]])
    with caplog.at_level(logging.WARNING):
        out = deduplicate(raw)
    assert out.tolist() == [[0.5, 15, 3], [0.4, 16, 2]]
    assert "duplicate" in caplog.text


def test_dataset_rows_inside_bounds_and_csv_round_trip(tmp_path):
    raw = np.array([[0.35, 15, 4], [0.6, 20, 10], [0.5, 18, 0]])
    ds = build_dataset(raw, n=64, seed=2, n_test=1)
    assert (ds.split == "test").sum() == 1
    for rho, mu, lam in zip(ds.raw[:, 0], ds.mu, ds.lam):
        # rigorous plane-strain Voigt/Reuss envelopes for the Lamé pair
        assert MU_B < mu < rho * MU_A + (1 - rho) * MU_B
        assert 0 < lam < rho * LAMBDA_A + (1 - rho) * LAMBDA_B + 2 * MU_A
    again = build_dataset(raw, n=64, seed=2, n_test=1)
    assert np.array_equal(again.mu, ds.mu)
    path = ds.to_csv(tmp_path / "data.csv")
    back = MaterialDataset.from_csv(path)
    assert np.array_equal(back.raw, ds.raw)
    assert np.array_equal(back.mu, ds.mu) and np.array_equal(back.lam, ds.lam)
    assert list(back.split) == list(ds.split)
    assert back.meta["n"] == 64
    header = path.read_text().splitlines()[0]
    assert header == "rho_m,r_out,d_r,s1,s2,s3,mu_m,lambda_m,split"


# ------------------------------------------------------------------ model

def test_constant_outputs_predict_constant():
    rng = np.random.default_rng(0)
    S = rng.random((15, 3))
    m = fit_gp(S, np.full(15, 7.5e8), n_restarts=2)
    T = rng.random((10, 3))
    assert np.allclose(m.predict(T), 7.5e8, rtol=1e-12)
    assert m.sigma2_hat == pytest.approx(0.0, abs=1e-6)
    assert np.allclose(m.predict_gradient(T), 0.0)


def test_synthetic_cosine_rrmse(synthetic):
    S, q, T, m = synthetic
    assert rrmse(m.predict(T), cosine(T)) < 0.02


def test_restart_monotonicity(synthetic):
    lls = synthetic[3].restart_logliks
    best = np.maximum.accumulate(lls)
    assert np.all(np.diff(best) >= 0)
    assert best[-1] == pytest.approx(synthetic[3].loglik)


def test_interpolates_training_points(synthetic):
    S, q, _, m = synthetic
    pred = m.predict(S)
    # the nugget turns exact interpolation into a residual of -nugget * alpha
    assert np.allclose(pred, q - m.nugget * m.y_scale * m._alpha, rtol=0, atol=1e-9 * np.abs(q).max())
    assert np.max(np.abs(pred - q)) < 1e-3 * np.abs(q).max()


def test_far_point_returns_beta():
    S = np.array([[0.1, 0.1, 0.1], [0.2, 0.3, 0.1], [0.3, 0.1, 0.2]])
    m = GpModel(S=S, q=np.array([1.0, 2.0, 4.0]), w=np.array([3.0, 3.0, 3.0]))
    far = np.array([[0.95, 0.95, 0.95]])
    assert np.all(correlation(far, S, m.w) < 1e-12)
    assert m.predict(far)[0] == pytest.approx(m.beta_hat, rel=1e-12)


def test_beta_is_generalized_least_squares_mean(moderate):
    m = moderate
    R = correlation(m.S, m.S, m.w) + m.nugget * np.eye(len(m.S))
    one = np.ones(len(m.S))
    gls = (one @ np.linalg.solve(R, m.q)) / (one @ np.linalg.solve(R, one))
    assert m.beta_hat == pytest.approx(gls, rel=1e-9)


def test_permutation_invariance(moderate):
    m = moderate
    S, q, T = m.S, m.q, np.random.default_rng(2).random((50, 3))
    perm = np.random.default_rng(9).permutation(len(S))
    m2 = GpModel(S=S[perm], q=q[perm], w=m.w, nugget=m.nugget, y_mean=m.y_mean, y_scale=m.y_scale)
    assert np.allclose(m2.predict(T), m.predict(T), atol=1e-10, rtol=0)


def test_gradient_matches_finite_differences(moderate):
    m = moderate
    P = np.random.default_rng(5).uniform(0.05, 0.95, (20, 3))
    G = m.predict_gradient(P)
    h = 1e-5
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (m.predict(P + e) - m.predict(P - e)) / (2 * h)
        assert np.allclose(G[:, k], fd, rtol=1e-6, atol=1e-6 * np.abs(G).max())


def test_single_point_gradient_is_odd():
    c = np.array([[0.5, 0.5, 0.5]])
    m = GpModel(S=np.vstack([c, [[0.9, 0.1, 0.2]]]), q=np.array([1.0, 0.0]), w=np.array([1.0, 1.0, 1.0]))
    one = GpModel(S=c, q=np.array([3.0]), w=np.array([1.0, 1.0, 1.0]), y_scale=1.0)
    for k in range(3):
        d = np.zeros(3)
        d[k] = 0.13
        g_plus = one.predict_gradient(c[0] + d)
        g_minus = one.predict_gradient(c[0] - d)
        assert np.allclose(g_plus, -g_minus, atol=1e-14)
    assert m.predict_gradient(c[0]).shape == (3,)


def test_extrapolation_warns(synthetic):
    m = synthetic[3]
    with pytest.warns(UserWarning):
        m.predict(np.array([1.2, 0.5, 0.5]))


def test_fit_needs_two_rows():
    with pytest.raises(DomainError):
        fit_gp(np.zeros((3, 3)), np.ones(3))


def test_model_json_round_trip(synthetic, tmp_path):
    _, _, T, m = synthetic
    m.save(tmp_path / "m.json")
    back = GpModel.load(tmp_path / "m.json")
    assert np.allclose(back.predict(T), m.predict(T), rtol=1e-12)


def test_surrogate_chain_rule(tmp_path):
    rng = np.random.default_rng(1)
    raw = denormalize_inputs(rng.random((40, 3)))
    s = normalize_inputs(raw)
    mu = MU_B + (MU_A - MU_B) * s[:, 0] ** 2 + 1e6 * s[:, 1]
    lam = LAMBDA_B + (LAMBDA_A - LAMBDA_B) * s[:, 0] ** 2 - 1e6 * s[:, 2]
    ds = MaterialDataset(raw=raw, mu=mu, lam=lam, split=np.full(40, "train"))
    fitted = LameSurrogate.fit(ds, n_restarts=2)
    assert rrmse(fitted.evaluate(raw)[0], mu) < 1e-6
    S = ds.subset("train")[0]
    w = np.array([0.8, 0.6, 0.4])
    sur = LameSurrogate(GpModel(S=S, q=mu, w=w), GpModel(S=S, q=lam, w=w))
    x = np.array([[0.5, 20.0, 12.0]])
    m0, l0, dm, dl = sur.evaluate(x)
    h = np.array([1e-5, 1e-3, 1e-3])
    for k in range(3):
        e = np.zeros(3)
        e[k] = h[k]
        mp, lp, *_ = sur.evaluate(x + e)
        mm, lm, *_ = sur.evaluate(x - e)
        assert dm[0, k] == pytest.approx((mp - mm)[0] / (2 * h[k]), rel=1e-6, abs=1e-6 * abs(dm).max())
        assert dl[0, k] == pytest.approx((lp - lm)[0] / (2 * h[k]), rel=1e-6, abs=1e-6 * abs(dl).max())
    sur.save(tmp_path / "s.json")
    back = LameSurrogate.load(tmp_path / "s.json")
    assert np.allclose(back.evaluate(x)[0], m0)


# ------------------------------------------------------------------ rrmse

def test_rrmse_examples():
    t = np.array([1.0, -2.0, 3.0])
    assert rrmse(t, t) == 0.0
    assert rrmse(2 * t, t) == pytest.approx(1.0)
    assert rrmse(np.full(4, 5.0 + 0.5), np.full(4, 5.0)) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        rrmse(np.zeros(3), np.zeros(3))
