import numpy as np
import pytest

from hdlp.design import PenalizedProblem


def make_problem(rng, t=80, n=12, s=1, snr=2.0, rho=0.3):
    """Random demeaned problem with an AR-ish correlated design."""
    base = rng.standard_normal((t, n))
    X = base.copy()
    for j in range(1, n):
        X[:, j] = rho * X[:, j - 1] + np.sqrt(1 - rho**2) * base[:, j]
    beta = np.zeros(n)
    k = min(n, 4)
    beta[:k] = rng.standard_normal(k) * snr / np.sqrt(k)
    y = X @ beta + rng.standard_normal(t)
    X = X - X.mean(axis=0)
    y = y - y.mean()
    return PenalizedProblem(
        X=X, y=y, unpenalized=np.arange(s), labels=[f"c{i}" for i in range(n)]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
