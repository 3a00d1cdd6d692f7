"""Weighted lasso with an unpenalized leading block.

The objective is

    ||y - X b||_2^2 / T  +  2 * lam * sum_j w_j |b_j|

with w_j = 0 on the unpenalized index set and (by default) 1 elsewhere.
Two routes solve it: a direct cyclic coordinate descent on the full
problem, and the production path that residualizes on the unpenalized
block first (Frisch-Waugh-Lovell), runs a plain lasso on the residualized
problem, and backs out the unpenalized coefficients. Both satisfy the same
KKT system and are tested against each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from hdlp.design import PenalizedProblem
from hdlp.errors import ConvergenceError, RankError
from hdlp.kernels import solve_gram

__all__ = [
    "LassoFit",
    "soft_threshold",
    "fit_weighted_lasso",
    "fwl_split_solve",
    "kkt_gap",
]

MAX_SWEEPS = 10_000
COEF_TOL = 1e-8
KKT_TOL = 1e-6


def soft_threshold(z: float, t: float) -> float:
    """sign(z) * max(|z| - t, 0) for t >= 0."""
    if t < 0:
        raise ValueError("threshold must be non-negative")
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@dataclass
class LassoFit:
    """Solution of the weighted-lasso problem.

    beta_S holds the unpenalized coefficients, beta_minus_S the penalized
    ones; active_set contains global column indices of nonzero penalized
    coefficients. kkt_gap is the largest stationarity violation of the
    returned point (certified <= 1e-6 on convergence).
    """

    beta_S: np.ndarray
    beta_minus_S: np.ndarray
    lam: float
    residuals: np.ndarray
    active_set: np.ndarray
    objective: float
    sweeps: int = 0
    kkt_gap: float = 0.0
    converged: bool = True
    penalty_weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def coef(self) -> np.ndarray:
        return np.concatenate([self.beta_S, self.beta_minus_S])


def _weight_vector(problem: PenalizedProblem, penalty_weights) -> np.ndarray:
    s = problem.n_unpenalized
    w = np.ones(problem.n_cols)
    if penalty_weights is not None:
        penalty_weights = np.asarray(penalty_weights, dtype=float)
        if penalty_weights.shape != (problem.n_cols - s,):
            raise ValueError("one penalty weight per penalized column required")
        if np.any(penalty_weights < 0):
            raise ValueError("penalty weights must be non-negative")
        w[s:] = penalty_weights
    w[:s] = 0.0
    return w


def _warn_degenerate(gram_diag, labels, offset=0):
    dead = np.where(gram_diag <= 1e-14)[0]
    if dead.size:
        names = [labels[offset + j] for j in dead[:5]]
        warnings.warn(
            f"{dead.size} zero-variance column(s) frozen at 0 (e.g. {names})",
            stacklevel=3,
        )


def kkt_gap(X, y, beta, lam, weights) -> float:
    """Largest violation of the stationarity conditions at beta.

    For column j the score g_j = x_j'(y - X beta)/T must satisfy
    |g_j| <= lam*w_j, with equality (g_j = lam*w_j*sign(beta_j)) on active
    coordinates; unpenalized columns (w_j = 0) need g_j = 0.
    """
    X = np.asarray(X)
    t = X.shape[0]
    g = X.T @ (y - X @ beta) / t
    bound = lam * np.asarray(weights)
    inactive = beta == 0.0
    viol_inactive = np.maximum(np.abs(g) - bound, 0.0)
    viol_active = np.abs(g - bound * np.sign(beta))
    return float(np.max(np.where(inactive, viol_inactive, viol_active), initial=0.0))


def _objective(y, X, beta, lam, weights) -> float:
    r = y - X @ beta
    return float(r @ r / X.shape[0] + 2.0 * lam * np.abs(beta) @ weights)


def _run_kernel(gram, q, weights, lam, beta0, max_sweeps, tol):
    beta, sweeps, max_delta = solve_gram(
        gram, q, weights, lam, beta0=beta0, max_sweeps=max_sweeps, tol=tol
    )
    return beta, sweeps, max_delta


def fit_weighted_lasso(
    problem: PenalizedProblem,
    lam: float,
    penalty_weights=None,
    beta0=None,
    max_sweeps: int = MAX_SWEEPS,
    tol: float = COEF_TOL,
) -> LassoFit:
    """Direct coordinate-descent solve of the weighted-lasso problem.

    Parameters
    ----------
    problem : PenalizedProblem
        Demeaned design; the leading block is unpenalized.
    lam : float
        Penalty level, >= 0. At 0 on a full-rank design this is least
        squares.
    penalty_weights : array, optional
        Non-negative weight per penalized column (default all ones).
    beta0 : array, optional
        Warm start for the full coefficient vector.

    Raises
    ------
    ConvergenceError
        If the sweep budget is exhausted; carries the last iterate and its
        KKT gap.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    X, y = problem.X, problem.y
    t = X.shape[0]
    w = _weight_vector(problem, penalty_weights)
    gram = X.T @ X / t
    q = X.T @ y / t
    s = problem.n_unpenalized
    if np.any(np.diag(gram)[:s] <= 1e-14):
        raise RankError("zero-variance column in the unpenalized block")
    _warn_degenerate(np.diag(gram)[s:], problem.labels, offset=s)

    beta, sweeps, max_delta = _run_kernel(gram, q, w, lam, beta0, max_sweeps, tol)
    gap = kkt_gap(X, y, beta, lam, w)
    if sweeps >= max_sweeps and max_delta >= tol:
        raise ConvergenceError(
            f"no convergence after {max_sweeps} sweeps (last change {max_delta:.2e}, "
            f"KKT gap {gap:.2e})",
            last_beta=beta,
            kkt_gap=gap,
            sweeps=sweeps,
        )
    return _package_fit(problem, beta, lam, w, sweeps, gap)


def _package_fit(problem, beta, lam, w, sweeps, gap) -> LassoFit:
    s = problem.n_unpenalized
    resid = problem.y - problem.X @ beta
    active = np.where(beta[s:] != 0.0)[0] + s
    return LassoFit(
        beta_S=beta[:s].copy(),
        beta_minus_S=beta[s:].copy(),
        lam=float(lam),
        residuals=resid,
        active_set=active,
        objective=_objective(problem.y, problem.X, beta, lam, w),
        sweeps=int(sweeps),
        kkt_gap=float(gap),
        converged=True,
        penalty_weights=w[s:].copy(),
    )


def residualize_unpenalized(problem: PenalizedProblem):
    """Project the unpenalized block out of y and the penalized columns.

    Returns (X_tilde, y_tilde, cho_factor of X_S'X_S/T). Raises RankError
    if the unpenalized block is rank deficient.
    """
    s = problem.n_unpenalized
    X, y = problem.X, problem.y
    t = X.shape[0]
    xs = X[:, :s]
    sigma_s = xs.T @ xs / t
    try:
        cho = scipy.linalg.cho_factor(sigma_s)
    except scipy.linalg.LinAlgError:
        raise RankError("unpenalized block is rank deficient") from None
    coef_x = scipy.linalg.cho_solve(cho, xs.T @ X[:, s:] / t)
    coef_y = scipy.linalg.cho_solve(cho, xs.T @ y / t)
    return X[:, s:] - xs @ coef_x, y - xs @ coef_y, cho


def fwl_split_solve(
    problem: PenalizedProblem,
    lam: float,
    penalty_weights=None,
    beta0=None,
    max_sweeps: int = MAX_SWEEPS,
    tol: float = COEF_TOL,
) -> LassoFit:
    """Two-step solve: lasso on the residualized problem, then back out
    the unpenalized coefficients by least squares.

    Equivalent to fit_weighted_lasso (same KKT system); this is the
    production path. With an empty unpenalized set it reduces to a
    standard lasso.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    s = problem.n_unpenalized
    if s == 0:
        return fit_weighted_lasso(
            problem, lam, penalty_weights=penalty_weights, beta0=beta0,
            max_sweeps=max_sweeps, tol=tol,
        )
    X, y = problem.X, problem.y
    t = X.shape[0]
    x_tilde, y_tilde, cho = residualize_unpenalized(problem)

    w_pen = np.ones(problem.n_cols - s)
    if penalty_weights is not None:
        w_pen = np.asarray(penalty_weights, dtype=float)
    gram = x_tilde.T @ x_tilde / t
    q = x_tilde.T @ y_tilde / t
    _warn_degenerate(np.diag(gram), problem.labels, offset=s)

    b0 = None if beta0 is None else np.asarray(beta0, dtype=float)[s:]
    beta_pen, sweeps, max_delta = _run_kernel(gram, q, w_pen, lam, b0, max_sweeps, tol)

    beta_s = scipy.linalg.cho_solve(cho, X[:, :s].T @ (y - X[:, s:] @ beta_pen) / t)
    beta = np.concatenate([beta_s, beta_pen])
    w = _weight_vector(problem, penalty_weights)
    gap = kkt_gap(X, y, beta, lam, w)
    if sweeps >= max_sweeps and max_delta >= tol:
        raise ConvergenceError(
            f"no convergence after {max_sweeps} sweeps (last change {max_delta:.2e}, "
            f"KKT gap {gap:.2e})",
            last_beta=beta,
            kkt_gap=gap,
            sweeps=sweeps,
        )
    return _package_fit(problem, beta, lam, w, sweeps, gap)
