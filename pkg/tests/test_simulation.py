import numpy as np
import pytest

from hdlp.errors import HdlpError
from hdlp.simulation import (
    CoverageReport,
    DgpSpec,
    build_coefficients,
    companion_matrix,
    generate,
    run_coverage,
    spectral_radius,
    synthetic_panel,
    true_irf,
)
from hdlp.tuning import TuningConfig

FAST_TUNING = TuningConfig(fixed_lambda_scale=1.0, seed=0)


def test_coefficient_entries():
    spec = DgpSpec(p=20, t_obs=100)
    mats = build_coefficients(spec)
    assert mats[0][0, 0] == pytest.approx(0.2)
    assert mats[1][0, 0] == pytest.approx(0.15)
    # zero beyond the band |i-j| >= P/2
    for j in range(10, 20):
        assert mats[0][0, j] == 0.0
    assert mats[0][0, 9] == pytest.approx(0.2**10)


def test_sign_switch_negates_even_matrices():
    base = build_coefficients(DgpSpec(p=8, t_obs=100))
    flipped = build_coefficients(DgpSpec(p=8, t_obs=100, sign_switch=True))
    assert np.array_equal(flipped[0], base[0])
    assert np.array_equal(flipped[1], -base[1])
    assert np.array_equal(flipped[2], base[2])
    assert np.array_equal(flipped[3], -base[3])


def test_default_spec_is_stable():
    for p in (20, 40):
        spec = DgpSpec(p=p, t_obs=100)
        radius = spectral_radius(companion_matrix(build_coefficients(spec)))
        assert radius < 1.0


def test_unstable_spec_rejected():
    with pytest.raises(ValueError, match="unstable"):
        DgpSpec(p=10, t_obs=100, rho=(0.9, 0.8, 0.7, 0.6))


def test_generate_white_noise_reduction():
    spec = DgpSpec(p=5, t_obs=4000, rho=(0.0, 0.0, 0.0, 0.0), seed=1)
    x = generate(spec)
    assert x.shape == (4000, 5)
    col = x[:, 0]
    r1 = np.corrcoef(col[1:], col[:-1])[0, 1]
    assert abs(r1) <= 3.0 / np.sqrt(4000)
    assert col.std() == pytest.approx(1.0, abs=0.06)


def test_generate_deterministic_and_replication_keyed():
    spec = DgpSpec(p=6, t_obs=150, seed=42)
    a = generate(spec, replication=3)
    b = generate(spec, replication=3)
    c = generate(spec, replication=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_true_irf_examples():
    spec = DgpSpec(p=20, t_obs=100)
    irf = true_irf(spec, 3)
    assert irf[0] == 1.0
    assert irf[1] == pytest.approx(0.2)
    zero = DgpSpec(p=4, t_obs=100, rho=(0.0, 0.0, 0.0, 0.0))
    assert np.array_equal(true_irf(zero, 5)[1:], np.zeros(5))


def test_true_irf_matches_companion_powers():
    """Independent oracle: (B_h)_{11} equals the top-left entry of the
    companion matrix's h-th power."""
    for kwargs in (
        dict(p=20, t_obs=100),
        dict(p=7, t_obs=100),
        dict(p=20, t_obs=100, sign_switch=True),
        dict(p=40, t_obs=100),
    ):
        spec = DgpSpec(**kwargs)
        comp = companion_matrix(build_coefficients(spec))
        irf = true_irf(spec, 20)
        power = np.eye(comp.shape[0])
        for h in range(21):
            assert abs(irf[h] - power[0, 0]) < 1e-12
            power = power @ comp


def test_run_coverage_single_rep_degenerate():
    spec = DgpSpec(p=5, t_obs=120, seed=3)
    report = run_coverage(spec, reps=1, h_max=3, lags=2, tuning=FAST_TUNING)
    assert set(np.unique(report.coverage)) <= {0.0, 1.0}
    assert np.all(np.isfinite(report.mean_width))
    assert report.horizons == [1, 2, 3]


def test_run_coverage_deterministic_across_threads():
    spec = DgpSpec(p=5, t_obs=100, seed=7)
    kwargs = dict(reps=6, h_max=2, lags=2, tuning=FAST_TUNING)
    serial = run_coverage(spec, threads=1, **kwargs)
    parallel = run_coverage(spec, threads=3, **kwargs)
    assert np.array_equal(serial.coverage, parallel.coverage)
    assert np.array_equal(serial.mean_width, parallel.mean_width)
    assert np.array_equal(serial.failures, parallel.failures)


def test_run_coverage_csv_round(tmp_path):
    spec = DgpSpec(p=4, t_obs=100, seed=5)
    report = run_coverage(spec, reps=2, h_max=2, lags=1, tuning=FAST_TUNING)
    path = tmp_path / "cov.csv"
    report.save_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "estimator,horizon,coverage,mean_width,effective_reps,failures"
    assert len(lines) == 1 + 2 * 2
    assert report.row("proposed", 1)["failures"] == 0


def test_run_coverage_validates_estimators():
    spec = DgpSpec(p=4, t_obs=100, seed=5)
    with pytest.raises(ValueError, match="unknown estimator"):
        run_coverage(spec, reps=1, estimators=("proposed", "ridge"),
                     tuning=FAST_TUNING)


def test_explosion_guard():
    spec = DgpSpec(p=4, t_obs=100, rho=(0.0, 0.0, 0.0, 0.0), seed=1)
    spec.rho = (0.99, 0.9, 0.8, 0.9)  # bypass the constructor check
    with pytest.raises(HdlpError, match="exploded"):
        generate(spec)


def test_synthetic_panel_shape_and_metadata():
    panel = synthetic_panel(n_series=30, n_obs=200, n_slow=12, seed=4)
    assert panel.values.shape == (200, 30)
    assert panel.names[12] == "policy"
    assert panel.speed_class.count("slow") == 12
    assert set(panel.transform_codes) <= set(range(1, 7))
    again = synthetic_panel(n_series=30, n_obs=200, n_slow=12, seed=4)
    assert np.array_equal(panel.values, again.values)
    from hdlp.data import transform_dataset

    transformed = transform_dataset(panel)  # no domain errors on log codes
    assert np.isfinite(transformed.values[2:]).all()
