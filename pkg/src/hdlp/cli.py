"""Batch command line: simulate | lp | favar.

Configuration is an INI file (key/value with nested sections); the
--seed/--threads/--out flags override file values. Every run writes the
results CSV, an SVG figure, and a JSON manifest echoing the fully
resolved configuration (the manifest alone suffices to re-run the job).

Exit codes: 0 ok, 2 configuration/validation error, 3 numeric failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time

import numpy as np

from hdlp import __version__
from hdlp.data import attach_metadata, load_csv, load_metadata, transform_dataset
from hdlp.design import LpSpec
from hdlp.errors import DataError, HdlpError
from hdlp.favar import FavarConfig, run_favar
from hdlp.projections import estimate_lp
from hdlp.simulation import DgpSpec, run_coverage
from hdlp.svgplot import coverage_svg, favar_svg, irf_svg
from hdlp.tuning import TuningConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

OUT_ENV = "HDLP_OUT"


class ConfigError(Exception):
    pass


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="hdlp",
        description="High-dimensional local projection toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, text in (
        ("simulate", "run the Monte Carlo coverage experiment"),
        ("lp", "estimate impulse responses on a panel CSV"),
        ("favar", "run the FAVAR baseline on a panel CSV"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", help="INI configuration file")
        cmd.add_argument("--seed", type=int, help="base seed (required here or in the file)")
        cmd.add_argument("--threads", type=int, help="worker count (default 1)")
        cmd.add_argument("--out", help=f"output directory (default ${OUT_ENV} or '.')")
    return parser.parse_args(argv)


def _load_ini(path) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path is not None:
        read = cfg.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path!r}")
    return cfg


class _Section:
    """Typed access to one INI section with 'key = value' entries."""

    def __init__(self, cfg, name):
        self.name = name
        self.data = dict(cfg[name]) if cfg.has_section(name) else {}

    def get(self, key, cast, default=None, required=False):
        if key not in self.data:
            if required:
                raise ConfigError(f"[{self.name}] {key} is required")
            return default
        raw = self.data[key].strip()
        try:
            if cast is bool:
                if raw.lower() in ("1", "true", "yes", "on"):
                    return True
                if raw.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(raw)
            return cast(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: cannot parse {raw!r}") from None

    def get_list(self, key, default=None):
        if key not in self.data:
            return default if default is not None else []
        raw = self.data[key].strip()
        if not raw:
            return []
        return [item.strip() for item in raw.split(",") if item.strip()]


def _tuning_from(cfg, seed) -> tuple[TuningConfig, dict]:
    sec = _Section(cfg, "tuning")
    tuning = TuningConfig(
        quantile=sec.get("quantile", float, 0.95),
        draws=sec.get("draws", int, 1000),
        block_length=sec.get("block_length", int, None),
        iterations=sec.get("iterations", int, 2),
        seed=seed,
        fixed_lambda_scale=sec.get("fixed_lambda_scale", float, None),
    )
    echo = {
        "quantile": tuning.quantile,
        "draws": tuning.draws,
        "iterations": tuning.iterations,
    }
    if tuning.block_length is not None:
        echo["block_length"] = tuning.block_length
    if tuning.fixed_lambda_scale is not None:
        echo["fixed_lambda_scale"] = tuning.fixed_lambda_scale
    return tuning, echo


def _load_panel(sec: _Section):
    data_path = sec.get("data", str, required=True)
    meta_path = sec.get("metadata", str, None)
    data = load_csv(data_path)
    if meta_path:
        data = attach_metadata(data, load_metadata(meta_path))
    return transform_dataset(data), {"data": data_path, "metadata": meta_path or ""}


def _resolve_controls(sec, data, key):
    names = sec.get_list(key, ["auto"])
    if names == ["auto"]:
        return data.names_by_class("slow" if key == "slow" else "fast")
    return names


def _run_simulate(cfg, seed, threads, outdir, manifest):
    sec = _Section(cfg, "simulate")
    spec = DgpSpec(
        p=sec.get("p", int, 20),
        t_obs=sec.get("t", int, 200),
        rho=tuple(float(v) for v in sec.get_list("rho", ["0.2", "0.15", "0.1", "0.05"])),
        sign_switch=sec.get("sign_switch", bool, False),
        burn_in=sec.get("burn_in", int, 200),
        seed=seed,
    )
    reps = sec.get("reps", int, 500)
    h_max = sec.get("h_max", int, 10)
    lags = sec.get("lags", int, 4)
    alpha = sec.get("alpha", float, 0.05)
    estimators = sec.get_list("estimators", ["proposed", "standard"])
    tuning, tuning_echo = _tuning_from(cfg, seed)

    report = run_coverage(
        spec, reps, h_max=h_max, lags=lags, estimators=estimators,
        tuning=tuning, alpha=alpha, threads=threads,
    )
    csv_path = os.path.join(outdir, "coverage.csv")
    svg_path = os.path.join(outdir, "coverage.svg")
    report.save_csv(csv_path)
    with open(svg_path, "w") as fh:
        fh.write(coverage_svg(report))
    manifest["config"]["simulate"] = {
        "p": spec.p, "t": spec.t_obs, "rho": list(spec.rho),
        "sign_switch": spec.sign_switch, "burn_in": spec.burn_in,
        "reps": reps, "h_max": h_max, "lags": lags, "alpha": alpha,
        "estimators": estimators,
    }
    manifest["config"]["tuning"] = tuning_echo
    return [csv_path, svg_path]


def _run_lp(cfg, seed, threads, outdir, manifest):
    sec = _Section(cfg, "lp")
    data, paths = _load_panel(sec)
    spec = LpSpec(
        response=sec.get("response", str, required=True),
        shock=sec.get("shock", str, required=True),
        slow_controls=_resolve_controls(sec, data, "slow"),
        fast_controls=_resolve_controls(sec, data, "fast"),
        lags=sec.get("lags", int, 4),
        h_max=sec.get("h_max", int, 10),
        state_dummies=sec.get_list("states", []),
        cumulate=sec.get("cumulate", bool, False),
        alpha=sec.get("alpha", float, 0.05),
        normalize_impact=sec.get("normalize_impact", bool, False),
    )
    tuning, tuning_echo = _tuning_from(cfg, seed)
    result = estimate_lp(data, spec, tuning)
    if result.errors and not any(est is not None for est in result.estimates):
        raise HdlpError(f"every horizon failed: {result.errors}")

    csv_path = os.path.join(outdir, "irf.csv")
    json_path = os.path.join(outdir, "irf.json")
    svg_path = os.path.join(outdir, "irf.svg")
    result.save_csv(csv_path)
    result.save_json(json_path)
    with open(svg_path, "w") as fh:
        fh.write(irf_svg(result))
    manifest["config"]["lp"] = {
        **paths,
        "response": spec.response, "shock": spec.shock,
        "slow": spec.slow_controls, "fast": spec.fast_controls,
        "lags": spec.lags, "h_max": spec.h_max, "states": spec.state_dummies,
        "cumulate": spec.cumulate, "alpha": spec.alpha,
        "normalize_impact": spec.normalize_impact,
    }
    manifest["config"]["tuning"] = tuning_echo
    if result.errors:
        manifest["horizon_errors"] = {str(k): v for k, v in result.errors.items()}
    return [csv_path, json_path, svg_path]


def _run_favar(cfg, seed, threads, outdir, manifest):
    sec = _Section(cfg, "favar")
    data, paths = _load_panel(sec)
    fcfg = FavarConfig(
        n_factors=sec.get("factors", int, 3),
        var_lags=sec.get("var_lags", int, 13),
        h_max=sec.get("h_max", int, 48),
        n_boot=sec.get("bootstrap", int, 499),
        seed=seed,
        policy=sec.get("policy", str, required=True),
        alpha=sec.get("alpha", float, 0.05),
    )
    plot_series = sec.get_list("plot", [fcfg.policy])
    result = run_favar(data, fcfg)

    csv_path = os.path.join(outdir, "favar.csv")
    svg_path = os.path.join(outdir, "favar.svg")
    result.save_csv(csv_path)
    with open(svg_path, "w") as fh:
        fh.write(favar_svg(result, plot_series))
    manifest["config"]["favar"] = {
        **paths,
        "policy": fcfg.policy, "factors": fcfg.n_factors,
        "var_lags": fcfg.var_lags, "h_max": fcfg.h_max,
        "bootstrap": fcfg.n_boot, "alpha": fcfg.alpha,
        "plot": plot_series,
    }
    manifest["boot_failures"] = result.n_boot_failures
    return [csv_path, svg_path]


_RUNNERS = {"simulate": _run_simulate, "lp": _run_lp, "favar": _run_favar}


def run(args) -> int:
    cfg = _load_ini(args.config)
    run_sec = _Section(cfg, "run")
    seed = args.seed if args.seed is not None else run_sec.get("seed", int, None)
    if seed is None:
        raise ConfigError("a seed is required (--seed or [run] seed); wall-clock seeding is not supported")
    threads = args.threads if args.threads is not None else run_sec.get("threads", int, 1)
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    outdir = args.out or run_sec.get("out", str, None) or os.environ.get(OUT_ENV) or "."
    os.makedirs(outdir, exist_ok=True)

    manifest = {
        "subcommand": args.subcommand,
        "config": {"run": {"seed": seed, "threads": threads, "out": outdir}},
        "versions": {
            "hdlp": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
    }
    start = time.perf_counter()
    outputs = _RUNNERS[args.subcommand](cfg, seed, threads, outdir, manifest)
    manifest["outputs"] = [os.path.basename(p) for p in outputs]
    manifest["timings"] = {"total_seconds": round(time.perf_counter() - start, 3)}
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _report_error(code, exc) -> int:
    report = {"error": {"code": code, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(report, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _parse_args(argv if argv is not None else sys.argv[1:])
    try:
        return run(args)
    except (ConfigError, DataError, ValueError) as exc:
        return _report_error(EXIT_CONFIG, exc)
    except (HdlpError, np.linalg.LinAlgError, ArithmeticError) as exc:
        return _report_error(EXIT_NUMERIC, exc)
    except OSError as exc:
        return _report_error(EXIT_IO, exc)


if __name__ == "__main__":
    sys.exit(main())
