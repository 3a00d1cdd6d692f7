"""Penalty-level selection and the Andrews bandwidth.

The penalty is chosen so that it dominates the empirical process
max_j |sum_t x_jt u_t / T|: we simulate that maximum with a block
multiplier bootstrap (standard normal multipliers, constant within blocks
whose length defaults to the Andrews bandwidth of x_jt * r_t), take the
1 - alpha_lambda quantile, and scale by 4/T to match the lambda/4
threshold the oracle inequality needs. The procedure is iterated: fit at
the current lambda, recompute residuals, re-tune.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from hdlp.numutil import philox_stream

__all__ = ["TuningConfig", "plugin_lambda", "tune_lambda", "andrews_bandwidth"]

# Philox stream tag: keeps tuning draws disjoint from other consumers of
# the same base seed.
TAG_TUNING = 101


@dataclass
class TuningConfig:
    """Knobs for the plug-in penalty selection.

    quantile is 1 - alpha_lambda; draws is the number of multiplier
    replications; block_length None means "use the Andrews bandwidth of
    the multiplier process". fixed_lambda_scale, when set, bypasses the
    simulation entirely with lambda = c * sqrt(log N / T) for bitwise
    reproducible pipelines.
    """

    quantile: float = 0.95
    draws: int = 1000
    block_length: int | None = None
    iterations: int = 2
    seed: int = 0
    fixed_lambda_scale: float | None = None

    def __post_init__(self):
        if not 0.0 < self.quantile < 1.0:
            raise ValueError("quantile must be in (0, 1)")
        if self.draws < 100:
            raise ValueError("at least 100 multiplier draws required")
        if self.block_length is not None and self.block_length < 1:
            raise ValueError("block length must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


def plugin_lambda(X, resid, cfg: TuningConfig, rng=None, stream=(0,)) -> float:
    """One-shot plug-in penalty for a given residual proxy.

    lambda = (4/T) * Quantile_{cfg.quantile} over cfg.draws multiplier
    replications of max_j |sum_t xi_t x_jt r_t|, with xi blockwise-constant
    standard normals. The initial pass uses r = y itself. stream
    identifies the caller's context so distinct fits draw from distinct
    Philox substreams.
    """
    X = np.asarray(X, dtype=float)
    resid = np.asarray(resid, dtype=float)
    t, n = X.shape
    if not np.any(X):
        warnings.warn("all-zero design, returning lambda = 0", stacklevel=2)
        return 0.0
    if cfg.fixed_lambda_scale is not None:
        return cfg.fixed_lambda_scale * math.sqrt(math.log(n) / t)

    scores = X * resid[:, None]
    block = cfg.block_length or andrews_bandwidth(scores)
    n_blocks = -(-t // block)
    if rng is None:
        rng = philox_stream(cfg.seed, TAG_TUNING, *stream)
    # Row b of xi is multiplier draw b; one stream per tuning call keeps
    # serial and parallel schedules identical because a call is atomic.
    xi = rng.standard_normal((cfg.draws, n_blocks))
    xi = np.repeat(xi, block, axis=1)[:, :t]
    stat = np.max(np.abs(xi @ scores), axis=1)
    return 4.0 * float(np.quantile(stat, cfg.quantile)) / t


def tune_lambda(X, y, cfg: TuningConfig, solver, stream=(0,)):
    """Iterate the plug-in rule: tune on y, then refit and re-tune on
    residuals cfg.iterations times.

    solver(lam, beta0) -> (beta, residuals) runs whatever lasso the caller
    wants tuned (plain or residualized); beta0 carries the warm start
    along the iteration. Returns the final lambda.
    """
    lam = plugin_lambda(X, y, cfg, stream=(*stream, 0))
    if cfg.fixed_lambda_scale is not None:
        return lam
    beta = None
    for it in range(cfg.iterations):
        beta, resid = solver(lam, beta)
        lam = plugin_lambda(X, resid, cfg, stream=(*stream, it + 1))
    return lam


def _bandwidth_from_ar1(rho, sigma2, t) -> int:
    """Map per-column AR(1) fits to the Bartlett-kernel bandwidth."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    sigma2 = np.atleast_1d(np.asarray(sigma2, dtype=float))
    num_a = np.sum(4.0 * rho**2 * sigma2**2 / ((1.0 - rho) ** 6 * (1.0 + rho) ** 2))
    den_a = np.sum(sigma2**2 / (1.0 - rho) ** 4)
    alpha1 = num_a / den_a if den_a > 0.0 else 0.0
    q = math.ceil(1.1447 * (alpha1 * t) ** (1.0 / 3.0))
    return int(min(max(q, 1), t - 1))


def andrews_bandwidth(w) -> int:
    """AR(1) plug-in bandwidth for the Bartlett kernel.

    Per column: rho and the innovation variance from a no-intercept AR(1)
    fit; alpha(1) pools columns as in Andrews (1991); the bandwidth is
    ceil(1.1447 * (alpha(1) * T)^(1/3)), floored at 1 and capped at T-1.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    t = w.shape[0]
    if t < 10:
        raise ValueError("need at least 10 observations for the bandwidth")
    lagged, lead = w[:-1], w[1:]
    denom = np.einsum("ij,ij->j", lagged, lagged)
    num = np.einsum("ij,ij->j", lagged, lead)
    ok = denom > 1e-300
    rho = np.zeros(w.shape[1])
    rho[ok] = num[ok] / denom[ok]
    big = np.abs(rho) > 0.97
    if np.any(big):
        warnings.warn("AR(1) coefficient near unity, clamped to +/-0.97", stacklevel=2)
        rho[big] = np.sign(rho[big]) * 0.97
    innov = lead - rho * lagged
    sigma2 = np.einsum("ij,ij->j", innov, innov) / (t - 1)
    return _bandwidth_from_ar1(rho, sigma2, t)
