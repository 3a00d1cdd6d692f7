"""Impulse response estimation across horizons.

One nodewise fit (on the horizon-0 sample, where the most observations
are available) is shared by all horizons; the lasso itself and the
long-run covariance are re-estimated per horizon because the projection
residuals change with the lead. Per-horizon failures are recorded and the
run continues.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from hdlp.data import Dataset
from hdlp.design import LpSpec, PenalizedProblem, build_lp_design
from hdlp.inference import HorizonEstimate, infer
from hdlp.nodewise import NodewiseFit, fit_nodewise
from hdlp.tuning import TuningConfig

__all__ = ["ImpulseResponse", "LpGridResult", "estimate_lp", "estimate_lp_grid"]

CSV_FIELDS = ["horizon", "label", "estimate", "se", "ci_low", "ci_high",
              "q_bandwidth", "lambda"]


@dataclass
class ImpulseResponse:
    """Per-horizon estimates for one projection spec.

    estimates[h] is None when horizon h failed; the error message is in
    errors[h]. Horizons are contiguous from 0.
    """

    spec: LpSpec
    horizons: list[int]
    estimates: list[HorizonEstimate | None]
    errors: dict[int, str] = field(default_factory=dict)
    nodewise_lambdas: np.ndarray | None = None
    tuning: TuningConfig | None = None

    @property
    def labels(self) -> list[str]:
        for est in self.estimates:
            if est is not None:
                return est.labels
        return []

    def rows(self):
        out = []
        for est in self.estimates:
            if est is not None:
                out.extend(est.rows())
        return out

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for row in self.rows():
                writer.writerow({k: _fmt(v) for k, v in row.items()})

    def to_dict(self):
        return {
            "response": self.spec.response,
            "shock": self.spec.shock,
            "cumulate": self.spec.cumulate,
            "alpha": self.spec.alpha,
            "lags": self.spec.lags,
            "nodewise_lambdas": None
            if self.nodewise_lambdas is None
            else [float(v) for v in self.nodewise_lambdas],
            "horizons": [
                est.to_dict() if est is not None else {"horizon": h, "error": self.errors[h]}
                for h, est in zip(self.horizons, self.estimates)
            ],
        }

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


@dataclass
class LpGridResult:
    """Batch result: per-spec responses with isolated failures."""

    responses: list[ImpulseResponse | None]
    errors: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> list[ImpulseResponse]:
        return [r for r in self.responses if r is not None]


def _fixed_impact_estimate(spec: LpSpec, labels: list[str]) -> HorizonEstimate:
    one = np.ones(len(labels))
    return HorizonEstimate(
        h=0,
        labels=labels,
        phi=one.copy(),
        omega=np.zeros((len(labels), len(labels))),
        tau_sq=one.copy(),
        se=np.zeros(len(labels)),
        ci_low=one.copy(),
        ci_high=one.copy(),
        q_bandwidth=0,
        lam=0.0,
        alpha=spec.alpha,
        fixed=True,
    )


def estimate_lp(data: Dataset, spec: LpSpec, tuning: TuningConfig | None = None,
                nodewise: NodewiseFit | None = None) -> ImpulseResponse:
    """Estimate the impulse response of spec.response to spec.shock.

    data must already be stationarity-transformed (transform_dataset).
    The targets are the shock coefficient (linear case) or the per-state
    shock coefficients. With normalize_impact set and response == shock,
    horizon 0 is reported as the fixed unit impact without estimation.
    """
    tuning = tuning or TuningConfig()
    problem0 = build_lp_design(data, spec, 0)
    targets = _target_columns(problem0)
    if nodewise is None:
        nodewise = fit_nodewise(problem0.X, targets, tuning)

    horizons = list(range(spec.h_max + 1))
    estimates: list[HorizonEstimate | None] = []
    errors: dict[int, str] = {}
    target_labels = [problem0.labels[i] for i in targets]
    for h in horizons:
        if h == 0 and spec.normalize_impact and spec.response == spec.shock:
            estimates.append(_fixed_impact_estimate(spec, target_labels))
            continue
        try:
            problem = problem0 if h == 0 else build_lp_design(data, spec, h)
            estimates.append(
                infer(problem, tuning, nodewise=nodewise, target_indices=targets,
                      alpha=spec.alpha, stream=(h,))
            )
        except Exception as exc:  # isolate horizon failures
            estimates.append(None)
            errors[h] = f"{type(exc).__name__}: {exc}"
    return ImpulseResponse(
        spec=spec,
        horizons=horizons,
        estimates=estimates,
        errors=errors,
        nodewise_lambdas=nodewise.lambdas,
        tuning=tuning,
    )


def _target_columns(problem: PenalizedProblem) -> list[int]:
    """Shock columns: the unpenalized block minus state intercept dummies."""
    states = problem.meta.get("states")
    if not states:
        return list(problem.unpenalized)
    dummy_labels = set(states)
    return [i for i in problem.unpenalized if problem.labels[i] not in dummy_labels]


def estimate_lp_grid(data: Dataset, specs: list[LpSpec],
                     tuning: TuningConfig | None = None) -> LpGridResult:
    """Run several specs over the same data; failures stay isolated."""
    responses: list[ImpulseResponse | None] = []
    errors: dict[int, str] = {}
    for i, spec in enumerate(specs):
        try:
            responses.append(estimate_lp(data, spec, tuning))
        except Exception as exc:
            responses.append(None)
            errors[i] = f"{type(exc).__name__}: {exc}"
    return LpGridResult(responses=responses, errors=errors)
