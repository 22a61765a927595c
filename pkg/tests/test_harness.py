import os
import shutil

import pytest

from stlmon.harness import ExperimentConfig, parse_config_text, run_experiment
from stlmon.harness.cli import main
from stlmon.harness.pipeline import Paths, run_sequential
from stlmon.processes import get_model

TINY = dict(
    model="mrh2", n_train=30, n_cal=20, n_test=12, m_train=5, m_test=20,
    epochs=5, seed=3, n_plot_states=6,
)


# --- config ---


def test_config_defaults_follow_size_rules():
    cfg = ExperimentConfig(model="mrh2")
    assert cfg.resolved_sizes(get_model("mrh2")) == (2000, 1000, 200)
    assert cfg.resolved_sizes(get_model("aad")) == (3000, 1500, 300)
    tc = cfg.train_config()
    assert (tc.learning_rate, tc.epochs, tc.batch_size, tc.dropout_rate) == (
        5e-4, 500, 512, 0.1)


def test_config_parsing():
    cfg = parse_config_text(
        "# comment\nmodel = grn2\nalpha = 0.2\nn_train = 100  # trailing\nseed = 9\n"
    )
    assert cfg.model == "grn2"
    assert cfg.alpha == 0.2
    assert cfg.n_train == 100
    assert cfg.seed == 9


def test_config_rejects_unknown_key_and_bad_values():
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("modle = mrh2\n")
    with pytest.raises(ValueError, match="key = value"):
        parse_config_text("just words\n")
    with pytest.raises(ValueError):
        ExperimentConfig(alpha=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(compose_op="xor")


# --- pipeline ---


@pytest.fixture(scope="module")
def tiny_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = ExperimentConfig(**TINY)
    metrics = run_experiment(cfg, str(out))
    return cfg, str(out), metrics


def test_run_experiment_artifacts(tiny_run):
    _, out, metrics = tiny_run
    paths = Paths(out)
    for p in (paths.train, paths.cal, paths.test, paths.model,
              paths.calibration, paths.metrics, paths.plot_data, paths.figure):
        assert os.path.exists(p), p
    assert metrics.correct + metrics.uncertain + metrics.wrong == pytest.approx(100)
    header, row = open(paths.metrics).read().splitlines()
    assert header == "correct,uncertain,wrong,false_positive,coverage,efficiency,eqr_width"
    assert len(row.split(",")) == 7


def test_rerun_is_byte_identical(tiny_run, tmp_path):
    cfg, out, _ = tiny_run
    rerun = tmp_path / "rerun"
    run_experiment(cfg, str(rerun))
    for name in sorted(os.listdir(out)):
        a = open(os.path.join(out, name), "rb").read()
        b = open(rerun / name, "rb").read()
        assert a == b, f"{name} differs between identical runs"


def test_plot_data_has_requested_states(tiny_run):
    _, out, _ = tiny_run
    lines = open(Paths(out).plot_data).read().splitlines()
    assert lines[0].startswith("state_index,label,eqr_lo")
    assert len(lines) == 1 + TINY["n_plot_states"]


def test_mismatched_artifacts_refused(tiny_run, tmp_path):
    cfg, out, _ = tiny_run
    other = tmp_path / "other"
    cfg2 = ExperimentConfig(**{**TINY, "seed": 4})
    run_experiment(cfg2, str(other))
    mixed = tmp_path / "mixed"
    shutil.copytree(out, mixed)
    shutil.copy(other / "model.txt", mixed / "model.txt")
    from stlmon.harness.pipeline import stage_evaluate
    with pytest.raises(ValueError, match="does not match"):
        stage_evaluate(cfg, Paths(str(mixed)))


def test_composition_pipeline(tmp_path):
    m = get_model("mrh2")
    cfg = ExperimentConfig(**{**TINY, "property": m.room_property(1),
                              "property2": m.room_property(2)})
    run_experiment(cfg, str(tmp_path))
    lines = open(Paths(str(tmp_path)).compose_metrics).read().splitlines()
    assert lines[0].startswith("strategy,")
    assert {l.split(",")[0] for l in lines[1:]} == {"min", "union"}


def test_sequential_deterministic_and_sized(tmp_path):
    cfg = ExperimentConfig(**{**TINY, "sequential_length": 3, "m_test": 10})
    rows = run_sequential(cfg, str(tmp_path / "a"))
    assert len(rows) == 3
    assert all(r["cpi_lo"] <= r["cpi_hi"] for r in rows)
    run_sequential(cfg, str(tmp_path / "b"))
    a = open(tmp_path / "a" / "sequential.csv").read()
    b = open(tmp_path / "b" / "sequential.csv").read()
    assert a == b


def test_sequential_length_one(tmp_path):
    cfg = ExperimentConfig(**{**TINY, "sequential_length": 1, "m_test": 10})
    rows = run_sequential(cfg, str(tmp_path))
    assert len(rows) == 1


# --- cli ---


def write_cfg(path):
    with open(path, "w") as f:
        for k, v in TINY.items():
            f.write(f"{k} = {v}\n")


def test_cli_run_all_and_stage_rerun(tmp_path, capsys):
    cfg_path = tmp_path / "exp.cfg"
    write_cfg(cfg_path)
    out = tmp_path / "results"
    assert main(["run-all", "--config", str(cfg_path), "--out", str(out)]) == 0
    assert os.path.exists(out / "metrics.csv")
    assert main(["evaluate", "--config", str(cfg_path), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "metrics written" in printed


def test_cli_stage_failure_is_tagged(tmp_path, capsys):
    cfg_path = tmp_path / "exp.cfg"
    write_cfg(cfg_path)
    code = main(["train", "--config", str(cfg_path), "--out", str(tmp_path / "none")])
    assert code == 1
    assert "stage train:" in capsys.readouterr().err


def test_cli_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    assert main(["run-all", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "stage config" in capsys.readouterr().err


def test_cli_seed_override(tmp_path):
    cfg_path = tmp_path / "exp.cfg"
    write_cfg(cfg_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", "--config", str(cfg_path), "--out", str(a)]) == 0
    assert main(["generate", "--config", str(cfg_path), "--seed", "99",
                 "--out", str(b)]) == 0
    assert open(a / "train.csv").read() != open(b / "train.csv").read()
