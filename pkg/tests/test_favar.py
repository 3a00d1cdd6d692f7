import numpy as np
import pytest

from hdlp.errors import RankError
from hdlp.favar import (
    FavarConfig,
    bootstrap_bands,
    extract_factors,
    map_to_observables,
    rotate_factors,
    run_favar,
    standardize,
    var_irf_unit_shock,
)


def test_extract_rank_one_panel():
    rng = np.random.default_rng(1)
    u = rng.standard_normal(50)
    v = rng.standard_normal(6)
    X = np.outer(u, v)
    X = X - X.mean(axis=0)
    scores = extract_factors(X, 1)
    # one component carries all variance
    resid = X - np.outer(scores[:, 0], scores[:, 0] @ X / (scores[:, 0] @ scores[:, 0]))
    assert np.linalg.norm(resid) < 1e-8 * np.linalg.norm(X)
    with pytest.raises(RankError):
        extract_factors(X, 2)


def test_extract_scores_orthogonal_and_sign_pinned():
    rng = np.random.default_rng(2)
    X = standardize(rng.standard_normal((120, 10)))
    scores = extract_factors(X, 4)
    gram = scores.T @ scores
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) < 1e-10
    # sign convention: largest-magnitude loading positive
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    for i in range(4):
        v = vt[i]
        lead = np.argmax(np.abs(v))
        expected = v if v[lead] > 0 else -v
        assert X @ expected == pytest.approx(scores[:, i], abs=1e-8)


def test_extract_recovers_synthetic_factors():
    rng = np.random.default_rng(3)
    t, p, k = 400, 40, 3
    factors = rng.standard_normal((t, k))
    loadings = rng.standard_normal((k, p))
    noise = rng.standard_normal((t, p)) * np.sqrt(np.var(factors @ loadings) / 10)
    X = standardize(factors @ loadings + noise)
    scores = extract_factors(X, k)
    for i in range(k):
        coef, _, _, _ = np.linalg.lstsq(scores, factors[:, i], rcond=None)
        fitted = scores @ coef
        corr = np.corrcoef(fitted, factors[:, i])[0, 1]
        assert corr > 0.95


def test_extract_permutation_invariant_scores():
    rng = np.random.default_rng(4)
    X = standardize(rng.standard_normal((80, 9)))
    perm = rng.permutation(9)
    a = extract_factors(X, 3)
    b = extract_factors(X[:, perm], 3)
    assert np.allclose(np.abs(a), np.abs(b), atol=1e-8)


def test_rotate_orthogonal_policy_is_noop():
    rng = np.random.default_rng(5)
    t = 300
    c = rng.standard_normal((t, 2))
    c_star = rng.standard_normal((t, 2))
    r = rng.standard_normal(t)
    r = (r - r.mean()) / r.std()
    # project r out of c and c_star for exact orthogonality
    for m in (c, c_star):
        m -= np.outer(r, r @ m) / (r @ r)
    out = rotate_factors(c, c_star, r)
    assert np.allclose(out, c, atol=1e-10)


def test_rotate_full_removal():
    rng = np.random.default_rng(6)
    t = 200
    r = rng.standard_normal(t)
    r = (r - r.mean()) / r.std()
    c = np.outer(r, np.ones(3))
    c_star = rng.standard_normal((t, 2))
    c_star -= np.outer(r, r @ c_star) / (r @ r)
    out = rotate_factors(c, c_star, r)
    assert np.max(np.abs(out)) < 1e-8


def test_rotate_matches_normal_equations():
    rng = np.random.default_rng(7)
    t = 5
    c = rng.standard_normal((t, 2))
    c_star = rng.standard_normal((t, 1))
    r = rng.standard_normal(t)
    r = (r - r.mean()) / r.std()
    z = np.column_stack([c_star, r])
    coef = np.linalg.solve(z.T @ z, z.T @ c)
    expected = c - np.outer(r, coef[-1])
    assert np.allclose(rotate_factors(c, c_star, r), expected, atol=1e-10)


def test_var_irf_ar1_closed_form():
    rng = np.random.default_rng(8)
    t = 400
    x = np.zeros(t)
    for i in range(1, t):
        x[i] = 0.6 * x[i - 1] + rng.standard_normal()
    irf = var_irf_unit_shock(x[:, None], 1, 8)
    # scaled response equals rho_hat^h exactly for the fitted rho
    z = np.column_stack([np.ones(t - 1), x[:-1]])
    rho_hat = np.linalg.lstsq(z, x[1:], rcond=None)[0][1]
    assert np.allclose(irf[:, 0], rho_hat ** np.arange(9), atol=1e-10)
    assert irf[0, 0] == 1.0


def test_var_irf_unit_impact_and_decoupling():
    rng = np.random.default_rng(9)
    t = 500
    a = np.zeros((t, 2))
    for i in range(1, t):
        a[i, 0] = 0.5 * a[i - 1, 0] + rng.standard_normal()
        a[i, 1] = -0.3 * a[i - 1, 1] + rng.standard_normal()
    irf = var_irf_unit_shock(a, 1, 6)
    assert irf[0, 1] == 1.0  # policy (last) impact exactly one
    # uncorrelated diagonal system: non-policy response stays near zero
    assert np.max(np.abs(irf[:, 0])) < 0.15


def test_map_to_observables_zero_and_identity():
    irf_fac = np.arange(12, dtype=float).reshape(4, 3)  # 2 factors + policy
    zero = map_to_observables(irf_fac, np.zeros((2, 5)))
    assert np.array_equal(zero, np.zeros((4, 5)))
    single = map_to_observables(irf_fac[:, [0, 2]], np.array([[1.0]]))
    assert np.array_equal(single[:, 0], irf_fac[:, 0])


def test_map_to_observables_linear_and_cumulates():
    rng = np.random.default_rng(10)
    irf_a = rng.standard_normal((5, 4))
    irf_b = rng.standard_normal((5, 4))
    lam = rng.standard_normal((3, 6))
    out = map_to_observables(irf_a + 2 * irf_b, lam)
    parts = map_to_observables(irf_a, lam) + 2 * map_to_observables(irf_b, lam)
    assert np.allclose(out, parts, atol=1e-12)
    flat = map_to_observables(np.ones((4, 2)), np.ones((1, 1)),
                              cum_flags=[True])
    assert np.array_equal(flat[:, 0], [1.0, 2.0, 3.0, 4.0])


def _small_var_panel(seed=11, t=250):
    rng = np.random.default_rng(seed)
    data = np.zeros((t, 3))
    coef = np.array([[0.5, 0.1, 0.0], [0.0, 0.4, 0.1], [0.1, 0.0, 0.3]])
    for i in range(1, t):
        data[i] = coef @ data[i - 1] + rng.standard_normal(3)
    return data


def test_bootstrap_single_draw_collapses_bands():
    data = _small_var_panel()
    cfg = FavarConfig(n_factors=2, var_lags=1, h_max=4, n_boot=1, seed=0,
                      policy="p", alpha=0.05)
    loadings = np.array([[1.0, 0.5], [0.2, -0.3]])
    lo, hi, failures = bootstrap_bands(data, loadings, None, cfg)
    assert failures == 0
    assert np.allclose(lo, hi, atol=1e-12)


def test_bootstrap_near_zero_residuals_collapse_onto_point():
    """Exact VAR path with noise-floor innovations: every draw reproduces
    the estimate."""
    rng = np.random.default_rng(12)
    t = 120
    coef = np.array([[0.5, 0.1], [0.0, 0.4]])
    data = np.zeros((t, 2))
    data[0] = rng.standard_normal(2)
    for i in range(1, t):
        data[i] = coef @ data[i - 1] + 1e-10 * rng.standard_normal(2)
    cfg = FavarConfig(n_factors=1, var_lags=1, h_max=5, n_boot=25, seed=1,
                      policy="p", alpha=0.05)
    loadings = np.array([[0.7, -0.2]])
    point = map_to_observables(var_irf_unit_shock(data, 1, 5), loadings)
    lo, hi, failures = bootstrap_bands(data, loadings, None, cfg)
    assert failures == 0
    assert np.max(np.abs(lo - point)) < 1e-6
    assert np.max(np.abs(hi - point)) < 1e-6


def test_run_favar_end_to_end():
    from hdlp.simulation import synthetic_panel
    from hdlp.data import transform_dataset

    panel = transform_dataset(synthetic_panel(n_series=25, n_obs=240,
                                              n_slow=10, seed=6))
    cfg = FavarConfig(n_factors=2, var_lags=3, h_max=6, n_boot=19, seed=2,
                      policy="policy")
    result = run_favar(panel, cfg)
    assert result.irf_factors[0, -1] == 1.0
    assert result.irf.shape == (7, 25)
    assert result.band_low.shape == (7, 25)
    assert np.all(result.band_low <= result.band_high + 1e-12)
    rows_estimated = result.irf_factors.shape[0]
    assert rows_estimated == 7
