"""High-dimensional local projections.

Impulse responses estimated by weighted-lasso local projections with the
target coefficients left unpenalized, desparsified for honest pointwise
confidence intervals under serial correlation. Ships a Monte Carlo
coverage laboratory and a FAVAR baseline for comparison.

The coordinate-descent kernel runs compiled (hdlp._cd_fast) when the
extension is built, otherwise a bit-identical pure-Python fallback;
`hdlp.kernels.BACKEND` reports which one is active.
"""

from hdlp.data import Dataset, apply_transform, demean, load_csv, load_metadata, transform_dataset
from hdlp.design import LpSpec, PenalizedProblem, build_lp_design, interact_states
from hdlp.errors import ConvergenceError, DataError, HdlpError, InferenceError, RankError
from hdlp.favar import FavarConfig, FavarResult, run_favar
from hdlp.inference import (
    HorizonEstimate,
    confidence_interval,
    desparsify,
    hac_covariance,
    infer,
)
from hdlp.kernels import BACKEND
from hdlp.lasso import LassoFit, fit_weighted_lasso, fwl_split_solve, soft_threshold
from hdlp.nodewise import NodewiseFit, fit_nodewise
from hdlp.projections import ImpulseResponse, estimate_lp, estimate_lp_grid
from hdlp.simulation import CoverageReport, DgpSpec, generate, run_coverage, true_irf
from hdlp.tuning import TuningConfig, andrews_bandwidth, plugin_lambda, tune_lambda

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "CoverageReport",
    "DataError",
    "Dataset",
    "DgpSpec",
    "FavarConfig",
    "FavarResult",
    "HdlpError",
    "HorizonEstimate",
    "ImpulseResponse",
    "InferenceError",
    "LassoFit",
    "LpSpec",
    "NodewiseFit",
    "PenalizedProblem",
    "RankError",
    "TuningConfig",
    "andrews_bandwidth",
    "apply_transform",
    "build_lp_design",
    "confidence_interval",
    "demean",
    "desparsify",
    "estimate_lp",
    "estimate_lp_grid",
    "fit_nodewise",
    "fit_weighted_lasso",
    "fwl_split_solve",
    "generate",
    "hac_covariance",
    "infer",
    "interact_states",
    "load_csv",
    "load_metadata",
    "plugin_lambda",
    "run_coverage",
    "run_favar",
    "soft_threshold",
    "transform_dataset",
    "true_irf",
    "tune_lambda",
]
