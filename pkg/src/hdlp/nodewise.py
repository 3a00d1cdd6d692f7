"""Nodewise lasso regressions and the relaxed inverse covariance rows.

For each target column j, a fully penalized lasso of x_j on all other
columns yields gamma_j and residuals v_j. Stacking (1, -gamma_j) rows
gives Gamma; tau_j^2 = ||v_j||^2/T + lambda_j * ||gamma_j||_1 scales the
rows into Theta = diag(1/tau^2) Gamma, the approximate inverse of X'X/T
restricted to the target rows. Theta and the residual matrix are computed
once (on the largest sample) and reused across horizons.
"""

from __future__ import annotations

import numpy as np

from hdlp.errors import InferenceError
from hdlp.kernels import solve_gram
from hdlp.lasso import COEF_TOL, MAX_SWEEPS
from hdlp.tuning import TuningConfig, tune_lambda

__all__ = ["NodewiseFit", "fit_nodewise"]

# Philox stream tag for nodewise tuning draws.
TAG_NODEWISE = 202

TAU_MIN = 1e-12


class NodewiseFit:
    """Immutable bundle of nodewise regression output.

    Attributes
    ----------
    indices : (S,) target column indices (sorted)
    gamma : (S, N-1) nodewise coefficients, column j removed per row
    gamma_mat : (S, N) rows of Gamma: one at the target position,
        -gamma elsewhere
    tau_sq : (S,) penalized residual variances
    theta : (S, N) Gamma rows divided by tau_sq
    v_hat : (T, S) nodewise residuals
    lambdas : (S,) per-node penalty levels
    """

    def __init__(self, indices, gamma, gamma_mat, tau_sq, theta, v_hat, lambdas):
        self.indices = indices
        self.gamma = gamma
        self.gamma_mat = gamma_mat
        self.tau_sq = tau_sq
        self.theta = theta
        self.v_hat = v_hat
        self.lambdas = lambdas
        for arr in (indices, gamma, gamma_mat, tau_sq, theta, v_hat, lambdas):
            arr.setflags(write=False)

    @property
    def n_targets(self) -> int:
        return len(self.indices)

    @property
    def n_obs(self) -> int:
        return self.v_hat.shape[0]


def fit_nodewise(X, target_indices, tuning: TuningConfig) -> NodewiseFit:
    """Run one nodewise lasso per target column of a demeaned design.

    Each node's penalty comes from the iterative plug-in rule applied to
    (X_{-j}, x_j). Raises InferenceError when a target column is
    numerically in the span of the others (tau^2 below 1e-12), since the
    inverse row is undefined there.
    """
    X = np.asarray(X, dtype=float)
    t, n = X.shape
    targets = np.asarray(sorted(int(i) for i in set(target_indices)), dtype=int)
    if targets.size < 1:
        raise ValueError("at least one target column required")
    if targets[0] < 0 or targets[-1] >= n:
        raise ValueError("target index out of range")

    gram_full = X.T @ X / t
    s = targets.size
    gamma = np.zeros((s, n - 1))
    gamma_mat = np.zeros((s, n))
    tau_sq = np.zeros(s)
    theta = np.zeros((s, n))
    v_hat = np.zeros((t, s))
    lambdas = np.zeros(s)

    for row, j in enumerate(targets):
        keep = np.delete(np.arange(n), j)
        x_j = X[:, j]
        x_rest = X[:, keep]
        gram = np.ascontiguousarray(gram_full[np.ix_(keep, keep)])
        q = np.ascontiguousarray(gram_full[keep, j])
        weights = np.ones(n - 1)

        def solver(lam, beta0, _gram=gram, _q=q, _w=weights, _xr=x_rest, _xj=x_j):
            beta, sweeps, _ = solve_gram(
                _gram, _q, _w, lam, beta0=beta0, max_sweeps=MAX_SWEEPS, tol=COEF_TOL
            )
            return beta, _xj - _xr @ beta

        lam_j = tune_lambda(x_rest, x_j, tuning, solver, stream=(TAG_NODEWISE, int(j)))
        g, _, _ = solve_gram(gram, q, weights, lam_j, max_sweeps=MAX_SWEEPS, tol=COEF_TOL)
        v = x_j - x_rest @ g
        tau = v @ v / t + lam_j * np.abs(g).sum()
        if tau < TAU_MIN:
            raise InferenceError(
                f"nodewise residual variance {tau:.2e} for column {j}: the column "
                "is numerically in the span of the others, inference undefined"
            )
        gamma[row] = g
        gamma_mat[row, keep] = -g
        gamma_mat[row, j] = 1.0
        tau_sq[row] = tau
        theta[row] = gamma_mat[row] / tau
        v_hat[:, row] = v
        lambdas[row] = lam_j

    return NodewiseFit(targets, gamma, gamma_mat, tau_sq, theta, v_hat, lambdas)
