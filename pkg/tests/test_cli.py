import json

from hdlp.cli import main
from hdlp.data import write_matrix_csv
from hdlp.simulation import synthetic_panel


def _write_panel(tmp_path, n_series=16, n_obs=160, n_slow=6, seed=3):
    panel = synthetic_panel(n_series=n_series, n_obs=n_obs, n_slow=n_slow,
                            seed=seed)
    data_path = tmp_path / "panel.csv"
    write_matrix_csv(data_path, panel.values, panel.names, index=panel.time_index)
    meta_path = tmp_path / "meta.csv"
    lines = ["series,transform,class"]
    for name, code, cls in zip(panel.names, panel.transform_codes,
                               panel.speed_class):
        lines.append(f"{name},{code},{cls}")
    meta_path.write_text("\n".join(lines) + "\n")
    return data_path, meta_path


def _simulate_config(tmp_path, reps=3, **extra):
    cfg = tmp_path / "sim.ini"
    lines = [
        "[simulate]",
        "p = 4",
        "t = 100",
        f"reps = {reps}",
        "h_max = 2",
        "lags = 1",
        "[tuning]",
        "fixed_lambda_scale = 1.0",
    ]
    for key, value in extra.items():
        lines.append(f"{key} = {value}")
    cfg.write_text("\n".join(lines) + "\n")
    return cfg


def test_simulate_writes_outputs(tmp_path):
    cfg = _simulate_config(tmp_path)
    out = tmp_path / "out"
    code = main(["simulate", "--config", str(cfg), "--seed", "11",
                 "--out", str(out)])
    assert code == 0
    cov = (out / "coverage.csv").read_text().splitlines()
    assert len(cov) == 1 + 2 * 2  # 2 estimators x h_max=2
    assert (out / "coverage.svg").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "simulate"
    assert manifest["config"]["run"]["seed"] == 11
    assert "timings" in manifest


def test_simulate_default_horizon_row_count(tmp_path):
    cfg = tmp_path / "sim.ini"
    cfg.write_text(
        "[simulate]\np = 4\nt = 100\nreps = 2\nlags = 1\n"
        "[tuning]\nfixed_lambda_scale = 1.0\n"
    )
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--seed", "1",
                 "--out", str(out)]) == 0
    rows = (out / "coverage.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 2 * 10  # default h_max=10: 2 estimators x 10 horizons


def test_seed_required(tmp_path, capsys):
    cfg = _simulate_config(tmp_path)
    code = main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == 2
    assert "seed" in err["error"]["message"]


def test_simulate_byte_identical_across_threads(tmp_path):
    cfg = _simulate_config(tmp_path, reps=4)
    out1, out2 = tmp_path / "t1", tmp_path / "t8"
    assert main(["simulate", "--config", str(cfg), "--seed", "9",
                 "--threads", "1", "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg), "--seed", "9",
                 "--threads", "8", "--out", str(out2)]) == 0
    assert (out1 / "coverage.csv").read_bytes() == (out2 / "coverage.csv").read_bytes()
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    m1.pop("timings"), m2.pop("timings")
    m1["config"]["run"].pop("threads"), m2["config"]["run"].pop("threads")
    m1["config"]["run"].pop("out"), m2["config"]["run"].pop("out")
    assert m1 == m2


def test_lp_on_toy_panel(tmp_path):
    data_path, meta_path = _write_panel(tmp_path)
    cfg = tmp_path / "lp.ini"
    cfg.write_text(
        f"""[lp]
data = {data_path}
metadata = {meta_path}
response = slow001
shock = policy
slow = auto
fast = auto
lags = 3
h_max = 2
cumulate = true
[tuning]
fixed_lambda_scale = 1.0
"""
    )
    out = tmp_path / "out"
    code = main(["lp", "--config", str(cfg), "--seed", "5", "--out", str(out)])
    assert code == 0
    rows = (out / "irf.csv").read_text().strip().splitlines()
    assert len(rows) == 1 + 3
    assert (out / "irf.svg").exists()
    blob = json.loads((out / "irf.json").read_text())
    assert blob["response"] == "slow001"
    assert blob["cumulate"] is True


def test_lp_invalid_transform_code_names_series(tmp_path, capsys):
    data_path, meta_path = _write_panel(tmp_path)
    text = meta_path.read_text().replace("policy,1,fast", "policy,7,fast")
    meta_path.write_text(text)
    cfg = tmp_path / "lp.ini"
    cfg.write_text(
        f"[lp]\ndata = {data_path}\nmetadata = {meta_path}\n"
        "response = slow001\nshock = policy\n"
    )
    code = main(["lp", "--config", str(cfg), "--seed", "5",
                 "--out", str(tmp_path / "o")])
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert "policy" in err["error"]["message"]
    assert "7" in err["error"]["message"]


def test_favar_subcommand(tmp_path):
    data_path, meta_path = _write_panel(tmp_path, n_series=14, n_obs=200,
                                        n_slow=6)
    cfg = tmp_path / "favar.ini"
    cfg.write_text(
        f"""[favar]
data = {data_path}
metadata = {meta_path}
policy = policy
factors = 2
var_lags = 2
h_max = 4
bootstrap = 9
plot = policy, slow001
"""
    )
    out = tmp_path / "out"
    code = main(["favar", "--config", str(cfg), "--seed", "3", "--out", str(out)])
    assert code == 0
    rows = (out / "favar.csv").read_text().strip().splitlines()
    assert rows[0] == "estimator,horizon,series,estimate,ci_low,ci_high"
    assert len(rows) == 1 + 14 * 5
    assert rows[1].startswith("favar,")
    assert (out / "favar.svg").exists()


def test_manifest_round_trip_reruns_identically(tmp_path):
    cfg = _simulate_config(tmp_path, reps=3)
    out1 = tmp_path / "a"
    assert main(["simulate", "--config", str(cfg), "--seed", "21",
                 "--out", str(out1)]) == 0
    manifest = json.loads((out1 / "manifest.json").read_text())
    # rebuild an INI from the manifest's config echo alone
    sim = manifest["config"]["simulate"]
    tun = manifest["config"]["tuning"]
    rebuilt = tmp_path / "rebuilt.ini"
    lines = ["[simulate]"]
    for key in ("p", "t", "reps", "h_max", "lags", "burn_in"):
        lines.append(f"{key} = {sim[key]}")
    lines.append(f"sign_switch = {str(sim['sign_switch']).lower()}")
    lines.append(f"alpha = {sim['alpha']}")
    lines.append(f"rho = {', '.join(str(v) for v in sim['rho'])}")
    lines.append(f"estimators = {', '.join(sim['estimators'])}")
    lines.append("[tuning]")
    for key, value in tun.items():
        lines.append(f"{key} = {value}")
    rebuilt.write_text("\n".join(lines) + "\n")
    out2 = tmp_path / "b"
    assert main(["simulate", "--config", str(rebuilt),
                 "--seed", str(manifest["config"]["run"]["seed"]),
                 "--out", str(out2)]) == 0
    assert (out1 / "coverage.csv").read_bytes() == (out2 / "coverage.csv").read_bytes()


def test_out_env_var(tmp_path, monkeypatch):
    cfg = _simulate_config(tmp_path, reps=2)
    env_out = tmp_path / "env_out"
    monkeypatch.setenv("HDLP_OUT", str(env_out))
    assert main(["simulate", "--config", str(cfg), "--seed", "2"]) == 0
    assert (env_out / "coverage.csv").exists()


def test_missing_config_file(tmp_path, capsys):
    code = main(["simulate", "--config", str(tmp_path / "nope.ini"),
                 "--seed", "1", "--out", str(tmp_path)])
    assert code == 2


def test_io_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "lp.ini"
    cfg.write_text("[lp]\ndata = /nonexistent/panel.csv\nresponse = a\nshock = b\n")
    code = main(["lp", "--config", str(cfg), "--seed", "1",
                 "--out", str(tmp_path)])
    assert code == 4
