"""Per-horizon design matrices for local projections.

The regression at horizon h puts the h-step lead of the response on the
left and [shock_t, slow controls_t, K lags of the full variable block] on
the right, with the shock coefficient left unpenalized. Rows are trimmed
to the maximal common complete sample (no imputation) and everything is
demeaned in place of an intercept. State-dependent designs interact every
column with lagged regime dummies and add one unpenalized intercept dummy
per state instead of the global demeaning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from hdlp.data import Dataset
from hdlp.errors import DataError
from hdlp.numutil import demean

__all__ = ["LpSpec", "PenalizedProblem", "build_lp_design", "interact_states"]

MIN_EFFECTIVE_ROWS = 10
MIN_STATE_OBS = 5


@dataclass
class LpSpec:
    """What to project on what.

    slow_controls enter contemporaneously and lagged; fast_controls and the
    response enter only with a lag; the shock enters contemporaneously
    unpenalized. The response/shock are dropped from the control lists
    automatically. state_dummies name {0,1} series that partition unity;
    they enter lagged one period.
    """

    response: str
    shock: str
    slow_controls: list[str] = field(default_factory=list)
    fast_controls: list[str] = field(default_factory=list)
    lags: int = 4
    h_max: int = 10
    state_dummies: list[str] = field(default_factory=list)
    cumulate: bool = False
    alpha: float = 0.05
    normalize_impact: bool = False

    def __post_init__(self):
        if self.lags < 1:
            raise DataError("lags must be a positive integer")
        if self.h_max < 0:
            raise DataError("h_max must be non-negative")
        if not 0.0 < self.alpha < 1.0:
            raise DataError("alpha must be in (0, 1)")
        # Normalize: the shock and response never enter as controls, so
        # class-wide lists ("all slow series") can be passed as-is.
        drop = {self.shock, self.response}
        self.slow_controls = [n for n in self.slow_controls if n not in drop]
        self.fast_controls = [n for n in self.fast_controls if n not in drop]


@dataclass
class PenalizedProblem:
    """Design matrix, response and the index set left unpenalized.

    Unpenalized columns come first; after preparation every non-dummy
    column (and y, in the linear case) has sample mean zero.
    """

    X: np.ndarray  # T x N
    y: np.ndarray  # T
    unpenalized: np.ndarray  # sorted indices, a leading block
    labels: list[str]
    col_means: np.ndarray | None = None
    y_mean: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.ascontiguousarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.unpenalized = np.asarray(sorted(self.unpenalized), dtype=int)
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError("X and y row counts differ")
        if len(self.labels) != self.X.shape[1]:
            raise DataError("one label per column required")
        s = len(self.unpenalized)
        if s and not np.array_equal(self.unpenalized, np.arange(s)):
            raise DataError("unpenalized columns must be the leading block")

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def n_cols(self) -> int:
        return self.X.shape[1]

    @property
    def n_unpenalized(self) -> int:
        return len(self.unpenalized)


def _first_complete_row(columns: list[np.ndarray]) -> int:
    """First index from which every column is finite."""
    bad = 0
    for col in columns:
        finite = np.isfinite(col)
        if not finite.all():
            last_bad = np.where(~finite)[0][-1]
            bad = max(bad, last_bad + 1)
    return bad


def build_lp_design(data: Dataset, spec: LpSpec, h: int) -> PenalizedProblem:
    """Assemble the horizon-h projection problem from transformed series.

    The regressor block is [shock_t, slow_t, z_{t-1}, ..., z_{t-K}] with
    z = (slow', shock, response, fast')'; the lead (or cumulated lead) of
    the response is the left-hand side. Series must already be
    stationarity-transformed (leading NaNs are fine and get trimmed).
    """
    if not 0 <= h <= spec.h_max:
        raise DataError(f"horizon {h} outside 0..{spec.h_max}")
    order = {name: i for i, name in enumerate(data.names)}
    for name in (
        [spec.response, spec.shock]
        + spec.slow_controls
        + spec.fast_controls
        + spec.state_dummies
    ):
        if name not in order:
            raise DataError(f"unknown series id {name!r}")

    # Dataset column order makes the layout deterministic regardless of
    # how the control lists were written.
    slow = sorted(set(spec.slow_controls), key=order.__getitem__)
    fast = sorted(set(spec.fast_controls), key=order.__getitem__)
    z_names = slow + [spec.shock]
    if spec.response != spec.shock:
        z_names.append(spec.response)
    z_names += fast

    y_full = data.column(spec.response)
    x_full = data.column(spec.shock)
    k = spec.lags
    t_raw = data.n_obs

    all_cols = [y_full, x_full] + [data.column(n) for n in slow + fast + spec.state_dummies]
    start = _first_complete_row(all_cols) + k
    stop = t_raw - h  # rows t = start .. stop-1
    t_eff = stop - start
    if t_eff < MIN_EFFECTIVE_ROWS:
        raise DataError(
            f"only {max(t_eff, 0)} effective rows at horizon {h} with {k} lags; "
            f"need at least {MIN_EFFECTIVE_ROWS}"
        )
    rows = np.arange(start, stop)

    if spec.cumulate:
        y = np.add.reduce([y_full[rows + lead] for lead in range(h + 1)])
    else:
        y = y_full[rows + h]

    cols = [x_full[rows]] + [data.column(n)[rows] for n in slow]
    labels = [spec.shock] + list(slow)
    for lag in range(1, k + 1):
        for name in z_names:
            cols.append(data.column(name)[rows - lag])
            labels.append(f"{name}.L{lag}")

    X, col_means = demean(np.column_stack(cols))
    y, y_mean = demean(y)
    problem = PenalizedProblem(
        X=X,
        y=y,
        unpenalized=np.array([0]),
        labels=labels,
        col_means=col_means,
        y_mean=float(y_mean),
        meta={"horizon": h, "rows": (start, stop), "lags": k},
    )

    if spec.state_dummies:
        dummies = [data.column(n)[rows - 1] for n in spec.state_dummies]
        problem = interact_states(problem, dummies, names=list(spec.state_dummies))
    return problem


def interact_states(
    problem: PenalizedProblem,
    dummies: list[np.ndarray],
    names: list[str] | None = None,
) -> PenalizedProblem:
    """Interact every regressor with regime dummies that partition unity.

    Each column x becomes {I_i * x}; one unpenalized intercept dummy per
    state replaces the global mean (the dummy columns are not demeaned).
    States active in fewer than MIN_STATE_OBS rows are dropped with a
    warning and recorded in problem.meta["dropped_states"].
    """
    t = problem.n_obs
    if not dummies:
        raise DataError("at least one state dummy required")
    dummies = [np.asarray(d, dtype=float) for d in dummies]
    names = names or [f"state{i + 1}" for i in range(len(dummies))]
    for name, d in zip(names, dummies):
        if d.shape != (t,):
            raise DataError(f"state dummy {name!r} has wrong length")
        if not np.all((d == 0.0) | (d == 1.0)):
            raise DataError(f"state dummy {name!r} is not {{0,1}}-valued")
    total = np.sum(dummies, axis=0)
    if not np.all(total == 1.0):
        raise DataError("state dummies do not partition unity at every row")

    active = [int(d.sum()) for d in dummies]
    kept, dropped = [], []
    for i, n_active in enumerate(active):
        (kept if n_active >= MIN_STATE_OBS else dropped).append(i)
    if dropped:
        warnings.warn(
            "dropping states with fewer than %d active observations: %s"
            % (MIN_STATE_OBS, [names[i] for i in dropped]),
            stacklevel=2,
        )
    if not kept:
        raise DataError("no state has enough active observations")

    s_old = problem.n_unpenalized
    pen_slice = slice(s_old, problem.n_cols)
    unpen_cols, unpen_labels = [], []
    for i in kept:
        for j in range(s_old):
            unpen_cols.append(dummies[i] * problem.X[:, j])
            unpen_labels.append(f"{names[i]}*{problem.labels[j]}")
    for i in kept:
        unpen_cols.append(dummies[i])
        unpen_labels.append(names[i])

    pen_cols, pen_labels = [], []
    for i in kept:
        pen_cols.append(dummies[i][:, None] * problem.X[:, pen_slice])
        pen_labels.extend(f"{names[i]}*{lab}" for lab in problem.labels[pen_slice])

    X = np.column_stack(unpen_cols + pen_cols)
    meta = dict(problem.meta)
    meta["dropped_states"] = [names[i] for i in dropped]
    meta["states"] = [names[i] for i in kept]
    return PenalizedProblem(
        X=X,
        y=problem.y,
        unpenalized=np.arange(len(unpen_cols)),
        labels=unpen_labels + pen_labels,
        col_means=None,
        y_mean=problem.y_mean,
        meta=meta,
    )
