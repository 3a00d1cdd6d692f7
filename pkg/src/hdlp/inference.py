"""Desparsified estimates, long-run covariance and confidence intervals.

The initial (weighted) lasso estimate of the target coefficients is
corrected by Theta X'(y - X b)/T, which removes the shrinkage bias and
restores asymptotic normality. Standard errors come from a Bartlett-kernel
long-run covariance of the score process w_t = v_t * u_t (nodewise
residuals times regression residuals), with the Andrews AR(1) plug-in
bandwidth, giving per-coefficient intervals

    phi_hat +/- z_{alpha/2} * sqrt((omega / tau^4) / T).

Linear combinations r'phi use the sandwich r' diag(1/tau^2) Omega
diag(1/tau^2) r.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from hdlp.design import PenalizedProblem
from hdlp.lasso import LassoFit, fit_weighted_lasso, fwl_split_solve, residualize_unpenalized
from hdlp.kernels import solve_gram
from hdlp.lasso import COEF_TOL, MAX_SWEEPS
from hdlp.nodewise import NodewiseFit, fit_nodewise
from hdlp.numutil import norm_ppf
from hdlp.tuning import TuningConfig, andrews_bandwidth, tune_lambda

__all__ = [
    "HorizonEstimate",
    "ContrastEstimate",
    "desparsify",
    "hac_covariance",
    "confidence_interval",
    "infer",
]

TAG_MAIN = 303

OMEGA_MIN = 1e-14


@dataclass
class ContrastEstimate:
    """Inference on a linear combination r'phi."""

    r: np.ndarray
    estimate: float
    se: float
    ci_low: float
    ci_high: float


@dataclass
class HorizonEstimate:
    """Desparsified coefficients and intervals for one horizon."""

    h: int
    labels: list[str]
    phi: np.ndarray
    omega: np.ndarray
    tau_sq: np.ndarray
    se: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    q_bandwidth: int
    lam: float
    alpha: float = 0.05
    fixed: bool = False
    degenerate: bool = False
    contrasts: list[ContrastEstimate] = field(default_factory=list)

    def rows(self):
        """Long-format rows: one dict per coefficient."""
        out = []
        for i, lab in enumerate(self.labels):
            out.append(
                {
                    "horizon": self.h,
                    "label": lab,
                    "estimate": float(self.phi[i]),
                    "se": float(self.se[i]),
                    "ci_low": float(self.ci_low[i]),
                    "ci_high": float(self.ci_high[i]),
                    "q_bandwidth": self.q_bandwidth,
                    "lambda": self.lam,
                }
            )
        return out

    def to_dict(self):
        d = {
            "horizon": self.h,
            "labels": list(self.labels),
            "estimate": [float(v) for v in self.phi],
            "se": [float(v) for v in self.se],
            "ci_low": [float(v) for v in self.ci_low],
            "ci_high": [float(v) for v in self.ci_high],
            "q_bandwidth": self.q_bandwidth,
            "lambda": self.lam,
            "alpha": self.alpha,
            "fixed": self.fixed,
        }
        if self.contrasts:
            d["contrasts"] = [
                {
                    "r": [float(v) for v in c.r],
                    "estimate": c.estimate,
                    "se": c.se,
                    "ci_low": c.ci_low,
                    "ci_high": c.ci_high,
                }
                for c in self.contrasts
            ]
        return d


def desparsify(fit: LassoFit, nodewise: NodewiseFit, problem: PenalizedProblem) -> np.ndarray:
    """Bias-corrected target coefficients.

    phi = beta_targets + Theta X'(y - X beta)/T, where beta is the initial
    lasso iterate and Theta the nodewise inverse rows. The nodewise fit
    may come from a longer sample (its residual matrix is sliced by the
    caller for covariance work; Theta itself is sample-length free).
    """
    coef = fit.coef
    if coef.shape[0] != problem.n_cols or nodewise.theta.shape[1] != problem.n_cols:
        raise ValueError("column count mismatch between fit, nodewise and problem")
    correction = nodewise.theta @ (problem.X.T @ fit.residuals) / problem.n_obs
    return coef[nodewise.indices] + correction


def hac_covariance(v_hat, u_hat, q_bandwidth: int) -> np.ndarray:
    """Bartlett-kernel long-run covariance of w_t = v_t * u_t.

    Xi(l) = sum_{t=l+1..T} w_t w_{t-l}' / T; the estimate is
    sum_{|l| < Q} (1 - |l|/Q) Xi(l), symmetrized to machine precision.
    The 1/T normalization (rather than 1/(T-l)) keeps the Bartlett PSD
    guarantee exact up to rounding.
    """
    v_hat = np.asarray(v_hat, dtype=float)
    if v_hat.ndim == 1:
        v_hat = v_hat[:, None]
    u_hat = np.asarray(u_hat, dtype=float)
    t = v_hat.shape[0]
    if u_hat.shape[0] != t:
        raise ValueError("v_hat and u_hat lengths differ")
    q = int(q_bandwidth)
    if not 1 <= q <= t - 1:
        raise ValueError(f"bandwidth {q} outside 1..{t - 1}")
    w = v_hat * u_hat[:, None]
    omega = w.T @ w / t
    for lag in range(1, q):
        xi = w[lag:].T @ w[:-lag] / t
        omega = omega + (1.0 - lag / q) * (xi + xi.T)
    return (omega + omega.T) / 2.0


def confidence_interval(phi: float, omega: float, tau_sq: float, t: int, alpha: float):
    """Pointwise interval phi +/- z_{alpha/2} sqrt((omega/tau^4)/T)."""
    if omega <= 0 or tau_sq <= 0:
        raise ValueError("omega and tau_sq must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    z = norm_ppf(1.0 - alpha / 2.0)
    half = z * np.sqrt(omega / tau_sq**2 / t)
    return float(phi - half), float(phi + half)


def infer(
    problem: PenalizedProblem,
    tuning: TuningConfig,
    nodewise: NodewiseFit | None = None,
    target_indices=None,
    alpha: float = 0.05,
    contrasts=None,
    stream=(0,),
) -> HorizonEstimate:
    """Full pipeline on one problem: tuned lasso, desparsify, HAC, CIs.

    nodewise may be precomputed on a longer (earlier-horizon) sample with
    the same column ordering; its residuals are sliced to this problem's
    rows. target_indices defaults to the problem's unpenalized set; pass
    them explicitly when nothing is left unpenalized (the fully penalized
    comparator). contrasts is an optional list of weight vectors r for
    inference on r'phi.
    """
    t = problem.n_obs
    targets = problem.unpenalized if target_indices is None else np.asarray(
        sorted(set(int(i) for i in target_indices)), dtype=int
    )
    if len(targets) == 0:
        raise ValueError("no inference targets")

    if nodewise is None:
        nodewise = fit_nodewise(problem.X, targets, tuning)
    if not np.array_equal(nodewise.indices, targets):
        raise ValueError("nodewise fit computed for different target columns")
    if nodewise.n_obs < t:
        raise ValueError("nodewise sample shorter than the problem sample")

    s = problem.n_unpenalized
    if s > 0:
        x_t, y_t, _ = residualize_unpenalized(problem)
        gram_t = x_t.T @ x_t / t
        q_t = x_t.T @ y_t / t
        ones = np.ones(x_t.shape[1])

        def solver(lam, beta0):
            beta, _, _ = solve_gram(
                gram_t, q_t, ones, lam, beta0=beta0,
                max_sweeps=MAX_SWEEPS, tol=COEF_TOL,
            )
            return beta, y_t - x_t @ beta

        lam = tune_lambda(x_t, y_t, tuning, solver, stream=(TAG_MAIN, *stream))
        fit = fwl_split_solve(problem, lam)
    else:

        def solver(lam, beta0):
            f = fit_weighted_lasso(problem, lam, beta0=beta0)
            return f.coef, f.residuals

        lam = tune_lambda(problem.X, problem.y, tuning, solver, stream=(TAG_MAIN, *stream))
        fit = fit_weighted_lasso(problem, lam)

    phi = desparsify(fit, nodewise, problem)
    v = nodewise.v_hat[:t]
    scores = v * fit.residuals[:, None]
    q_bw = andrews_bandwidth(scores)
    omega = hac_covariance(v, fit.residuals, q_bw)

    tau_sq = nodewise.tau_sq
    diag = np.diag(omega)
    n_t = len(targets)
    se = np.empty(n_t)
    lo = np.empty(n_t)
    hi = np.empty(n_t)
    degenerate = bool(np.any(diag <= OMEGA_MIN))
    if degenerate:
        warnings.warn("degenerate long-run variance, reporting infinite interval",
                      stacklevel=2)
    for i in range(n_t):
        if diag[i] <= OMEGA_MIN:
            se[i] = np.inf
            lo[i], hi[i] = -np.inf, np.inf
        else:
            se[i] = np.sqrt(diag[i] / tau_sq[i] ** 2 / t)
            lo[i], hi[i] = confidence_interval(phi[i], diag[i], tau_sq[i], t, alpha)

    contrast_out = []
    if contrasts is not None:
        z = norm_ppf(1.0 - alpha / 2.0)
        sandwich = omega / np.outer(tau_sq, tau_sq)
        for r in contrasts:
            r = np.asarray(r, dtype=float)
            if r.shape != (n_t,):
                raise ValueError("contrast length must match the target count")
            est = float(r @ phi)
            var = float(r @ sandwich @ r) / t
            c_se = float(np.sqrt(var)) if var > 0 else np.inf
            contrast_out.append(
                ContrastEstimate(r, est, c_se, est - z * c_se, est + z * c_se)
            )

    return HorizonEstimate(
        h=int(problem.meta.get("horizon", 0)),
        labels=[problem.labels[i] for i in targets],
        phi=phi,
        omega=omega,
        tau_sq=tau_sq,
        se=se,
        ci_low=lo,
        ci_high=hi,
        q_bandwidth=q_bw,
        lam=float(fit.lam),
        alpha=alpha,
        degenerate=degenerate,
        contrasts=contrast_out,
    )
