"""Backend selection for the coordinate-descent kernel.

The compiled extension is preferred; the pure-Python kernel is a drop-in
replacement (same arithmetic, same iteration order). Set HDLP_PURE_PYTHON=1
to force the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("HDLP_PURE_PYTHON"):
    from hdlp._cd_py import lasso_cd_gram

    BACKEND = "python"
else:
    try:
        from hdlp._cd_fast import lasso_cd_gram  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # extension not built
        from hdlp._cd_py import lasso_cd_gram  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["BACKEND", "lasso_cd_gram", "solve_gram"]


def solve_gram(gram, q, weight, lam, beta0=None, max_sweeps=10_000, tol=1e-8):
    """Run the CD kernel on precomputed gram = X'X/T and q = X'y/T.

    Returns (beta, sweeps, max_delta). Convergence is max absolute
    coefficient change per sweep < tol; the caller decides whether
    hitting max_sweeps is an error.
    """
    gram = np.ascontiguousarray(gram, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    n = q.shape[0]
    if beta0 is None:
        beta = np.zeros(n)
        gb = np.zeros(n)
    else:
        beta = np.array(beta0, dtype=np.float64)
        gb = gram @ beta
    sweeps, max_delta = lasso_cd_gram(
        gram, q, weight, float(lam), beta, gb, int(max_sweeps), float(tol)
    )
    return beta, sweeps, max_delta
