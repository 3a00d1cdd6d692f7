"""Factor-augmented VAR baseline with unit-shock scaling.

Principal-component factors are rotated to remove the contemporaneous
policy component, a VAR in [factors, policy] (policy ordered last) is
identified recursively by Cholesky, and every impulse response is scaled
by the policy variable's own impact so the policy shock raises it by one
at horizon 0. Observable responses come from OLS loadings; bands from a
fixed-initial-block residual bootstrap with percentile (type-7) quantiles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from hdlp.data import Dataset
from hdlp.errors import DataError, RankError
from hdlp.numutil import philox_stream

__all__ = [
    "FavarConfig",
    "FavarResult",
    "extract_factors",
    "rotate_factors",
    "var_irf_unit_shock",
    "map_to_observables",
    "bootstrap_bands",
    "run_favar",
]

TAG_BOOT = 707


@dataclass
class FavarConfig:
    n_factors: int = 3
    var_lags: int = 13
    h_max: int = 48
    n_boot: int = 499
    seed: int = 0
    policy: str = ""
    alpha: float = 0.05

    def __post_init__(self):
        if self.n_factors < 1:
            raise ValueError("need at least one factor")
        if self.n_boot < 1:
            raise ValueError("need at least one bootstrap draw")
        if self.var_lags < 1:
            raise ValueError("need at least one VAR lag")


def standardize(X):
    """Column-standardize to mean 0, variance 1."""
    X = np.asarray(X, dtype=float)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    if np.any(sd <= 0):
        raise DataError("zero-variance column cannot be standardized")
    return (X - mu) / sd


def extract_factors(X, k: int) -> np.ndarray:
    """First k principal-component score series of a standardized panel.

    Signs are normalized so each component's largest-magnitude loading is
    positive; scores are mutually orthogonal.
    """
    X = np.asarray(X, dtype=float)
    if k < 1:
        raise ValueError("k must be positive")
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > s[0] * max(X.shape) * np.finfo(float).eps)) if s.size else 0
    if k > rank:
        raise RankError(f"requested {k} components from a rank-{rank} panel")
    v = vt[:k].T.copy()
    for i in range(k):
        lead = np.argmax(np.abs(v[:, i]))
        if v[lead, i] < 0:
            v[:, i] = -v[:, i]
    return X @ v


def rotate_factors(c, c_star, r_s) -> np.ndarray:
    """Remove the policy component: F = C - R_s * b_R, with b_R the last
    coefficient row of the regression of C on [C_star, R_s]."""
    c = np.asarray(c, dtype=float)
    c_star = np.asarray(c_star, dtype=float)
    r_s = np.asarray(r_s, dtype=float)
    z = np.column_stack([c_star, r_s])
    coef, _, rank, _ = np.linalg.lstsq(z, c, rcond=None)
    if rank < z.shape[1]:
        raise RankError("[C_star, R_s] is rank deficient")
    b_r = coef[-1]
    return c - np.outer(r_s, b_r)


def _fit_var(data, p):
    """OLS VAR(p) with intercept: returns (intercept, coefs list, residuals,
    fitted-sample data)."""
    data = np.asarray(data, dtype=float)
    t, k = data.shape
    if t - p <= k * p + 1:
        raise DataError(f"too few observations ({t}) for a VAR({p}) in {k} variables")
    rows = [np.ones(t - p)]
    for lag in range(1, p + 1):
        rows.append(data[p - lag : t - lag].T)
    z = np.vstack(rows).T  # (t-p) x (1 + k*p)
    y = data[p:]
    coef, _, _, _ = np.linalg.lstsq(z, y, rcond=None)
    resid = y - z @ coef
    intercept = coef[0]
    mats = [coef[1 + (lag - 1) * k : 1 + lag * k].T for lag in range(1, p + 1)]
    return intercept, mats, resid


def _ma_coefficients(mats, h_max):
    k = mats[0].shape[0]
    phis = [np.eye(k)]
    for h in range(1, h_max + 1):
        acc = np.zeros((k, k))
        for j, a in enumerate(mats, start=1):
            if j > h:
                break
            acc += a @ phis[h - j]
        phis.append(acc)
    return phis


def _companion_radius(mats):
    from hdlp.simulation import companion_matrix, spectral_radius

    comp = companion_matrix(mats) if len(mats) > 1 else mats[0]
    return spectral_radius(comp)


def _unit_irf_from_fit(mats, resid, h_max):
    sigma = resid.T @ resid / resid.shape[0]
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise RankError("singular VAR residual covariance") from None
    impact = chol[:, -1]  # policy shock column
    if impact[-1] == 0.0:
        raise RankError("policy shock has zero impact variance, cannot scale")
    phis = _ma_coefficients(mats, h_max)
    irf = np.array([phi @ impact for phi in phis])
    return irf / impact[-1]


def var_irf_unit_shock(data, p: int, h_max: int, warn_unstable: bool = True):
    """Orthogonalized responses to the last (policy) variable's shock,
    scaled so the policy response is exactly 1 on impact.

    Returns an (h_max+1) x k matrix (k = number of VAR variables).
    """
    import warnings

    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    _, mats, resid = _fit_var(data, p)
    if warn_unstable and _companion_radius(mats) >= 1.0:
        warnings.warn("estimated VAR is unstable (companion radius >= 1)",
                      stacklevel=2)
    return _unit_irf_from_fit(mats, resid, h_max)


def map_to_observables(irf_fac, loadings, cum_flags=None) -> np.ndarray:
    """Map factor-space responses to observables through [Lambda; 0].

    The zero row is the policy variable's direct loading. Series flagged
    in cum_flags are cumulated over horizons (responses of differenced
    variables mapped back to levels). Linear in irf_fac.
    """
    irf_fac = np.asarray(irf_fac, dtype=float)
    loadings = np.asarray(loadings, dtype=float)
    if irf_fac.shape[1] != loadings.shape[0] + 1:
        raise ValueError("irf_fac must have one more column than loadings has rows")
    stacked = np.vstack([loadings, np.zeros((1, loadings.shape[1]))])
    irf = irf_fac @ stacked
    if cum_flags is not None:
        cum_flags = np.asarray(cum_flags, dtype=bool)
        if cum_flags.shape[0] != irf.shape[1]:
            raise ValueError("one cumulation flag per series required")
        irf[:, cum_flags] = np.cumsum(irf[:, cum_flags], axis=0)
    return irf


@dataclass
class FavarResult:
    names: list[str]
    horizons: list[int]
    irf_factors: np.ndarray  # (h+1) x (k+1), policy last, unit impact
    irf: np.ndarray  # (h+1) x P observable responses
    band_low: np.ndarray | None = None
    band_high: np.ndarray | None = None
    n_boot_failures: int = 0
    config: FavarConfig | None = None
    meta: dict = field(default_factory=dict)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["estimator", "horizon", "series", "estimate",
                             "ci_low", "ci_high"])
            for j, name in enumerate(self.names):
                for i, h in enumerate(self.horizons):
                    lo = self.band_low[i, j] if self.band_low is not None else ""
                    hi = self.band_high[i, j] if self.band_high is not None else ""
                    writer.writerow(
                        ["favar", h, name, repr(float(self.irf[i, j])),
                         repr(float(lo)) if lo != "" else "",
                         repr(float(hi)) if hi != "" else ""]
                    )


def _rebuild_series(intercept, mats, initial, shocks):
    """Recursively rebuild a VAR path from fixed initial rows and shocks."""
    p = len(mats)
    t = shocks.shape[0]
    k = initial.shape[1]
    out = np.zeros((p + t, k))
    out[:p] = initial
    for t_i in range(t):
        row = intercept + shocks[t_i]
        for j, a in enumerate(mats, start=1):
            row = row + a @ out[p + t_i - j]
        out[p + t_i] = row
    return out


def bootstrap_bands(var_data, loadings, cum_flags, cfg: FavarConfig):
    """Residual-bootstrap pointwise bands for the observable responses.

    Residual rows are drawn i.i.d. with replacement, the VAR path is
    rebuilt from the estimated coefficients with the first p observations
    fixed, and the full estimate-scale-map pipeline reruns per draw.
    Unstable draws are redrawn up to 10 times, then counted as failures.
    Returns (lo, hi, failures).
    """
    var_data = np.asarray(var_data, dtype=float)
    p = cfg.var_lags
    intercept, mats, resid = _fit_var(var_data, p)
    t_eff = resid.shape[0]
    draws = []
    failures = 0
    for b in range(cfg.n_boot):
        rng = philox_stream(cfg.seed, TAG_BOOT, b)
        ok = False
        for _ in range(10):
            idx = rng.integers(0, t_eff, size=t_eff)
            path = _rebuild_series(intercept, mats, var_data[:p], resid[idx])
            if np.abs(path).max() > 1e8:
                continue
            try:
                _, mats_b, resid_b = _fit_var(path, p)
                if _companion_radius(mats_b) >= 1.0:
                    continue
                irf_fac = _unit_irf_from_fit(mats_b, resid_b, cfg.h_max)
            except (RankError, DataError):
                continue
            draws.append(map_to_observables(irf_fac, loadings, cum_flags))
            ok = True
            break
        if not ok:
            failures += 1
    if not draws:
        raise DataError("all bootstrap draws failed")
    stack = np.stack(draws)
    lo = np.quantile(stack, cfg.alpha / 2.0, axis=0)
    hi = np.quantile(stack, 1.0 - cfg.alpha / 2.0, axis=0)
    return lo, hi, failures


def run_favar(data: Dataset, cfg: FavarConfig) -> FavarResult:
    """End-to-end FAVAR on a transformed panel.

    Factors come from all series; the rotation removes the standardized
    policy rate from them; the VAR runs on [factors, policy] with the
    policy ordered last. Differenced series (transform codes 2, 3, 5, 6)
    are cumulated back to levels in the observable responses.
    """
    if not cfg.policy:
        raise DataError("a policy series id is required")
    if cfg.policy not in data.names:
        raise DataError(f"unknown series id {cfg.policy!r}")

    # Complete sample only: drop leading rows lost to transforms.
    finite = np.isfinite(data.values).all(axis=1)
    first = int(np.argmax(finite))
    values = data.values[first:]
    if values.shape[0] <= cfg.var_lags + 10:
        raise DataError("too few complete observations for the FAVAR")

    x_all = standardize(values)
    slow_idx = [i for i, c in enumerate(data.speed_class) if c == "slow"]
    if not slow_idx:
        raise DataError("no slow series to pin down the rotation")
    policy_idx = data.names.index(cfg.policy)
    r_raw = values[:, policy_idx]
    r_s = x_all[:, policy_idx]

    c_all = extract_factors(x_all, cfg.n_factors)
    c_slow = extract_factors(x_all[:, slow_idx], cfg.n_factors)
    factors = rotate_factors(c_all, c_slow, r_s)

    loadings, _, _, _ = np.linalg.lstsq(factors, x_all, rcond=None)
    var_data = np.column_stack([factors, r_raw])
    irf_fac = var_irf_unit_shock(var_data, cfg.var_lags, cfg.h_max)
    cum_flags = np.array([code in (2, 3, 5, 6) for code in data.transform_codes])
    irf = map_to_observables(irf_fac, loadings, cum_flags)
    lo, hi, failures = bootstrap_bands(var_data, loadings, cum_flags, cfg)
    return FavarResult(
        names=list(data.names),
        horizons=list(range(cfg.h_max + 1)),
        irf_factors=irf_fac,
        irf=irf,
        band_low=lo,
        band_high=hi,
        n_boot_failures=failures,
        config=cfg,
        meta={"first_complete_row": first, "n_slow": len(slow_idx)},
    )
