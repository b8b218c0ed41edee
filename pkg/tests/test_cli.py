import json

import pytest

from rig_lab import cli
from rig_lab.cli import ConfigError, main, resolve_config, run_experiment


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_defaults_and_overrides():
    cfg = resolve_config("degree", overrides={"t": 250, "seed": None})
    assert cfg.t == 250 and cfg.seed == cli.DEFAULT_SEED and cfg.a == 1.0


def test_ini_layers(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[model]\na = 0.5\nb = 2\n[degree]\nt = 77\n[clustering]\nu = 999\n[run]\nseed = 4\n")
    cfg = resolve_config("degree", ini, {"b": 3.0})
    assert (cfg.a, cfg.b, cfg.t, cfg.seed) == (0.5, 3.0, 77, 4)
    # sections of other subcommands are ignored
    assert cfg.u == 450


@pytest.mark.parametrize("text,msg", [
    ("[model]\nalpha = 1\n", "unknown key"),
    ("[nonsense]\na = 1\n", "unknown section"),
    ("[model]\na = 4\nb = 1\n", "requires a < b"),
    ("[degree]\nt = 1.5\n", "cannot read"),
    ("[run]\nformat = xml\n", "format"),
])
def test_ini_errors(tmp_path, text, msg):
    ini = tmp_path / "c.ini"
    ini.write_text(text)
    with pytest.raises(ConfigError, match=msg):
        resolve_config("degree", ini)


def test_triple_and_pair_conditions():
    with pytest.raises(ConfigError, match=r"ceil\(a\*u\) <= floor\(b\*s\)"):
        resolve_config("clustering", overrides={"s": 100, "t": 200, "u": 401})
    with pytest.raises(ConfigError, match="0 < s < t < u"):
        resolve_config("clustering", overrides={"s": 300, "t": 300})
    with pytest.raises(ConfigError, match="overlap"):
        resolve_config("assort", overrides={"s": 100, "t": 401})


def test_theory_report(tmp_path):
    rep = run_experiment(resolve_config("theory"), tmp_path)
    assert rep.get("gamma1").estimate == 2.0 and rep.get("gamma2").estimate == 1.0
    assert rep.get("r_st").estimate == 0.2
    d = json.loads((tmp_path / "report.json").read_text())
    assert d["theory"]["degree_limit"]["pmf"][0] == pytest.approx(0.2824535638505403, abs=1e-14)
    assert d["theory"]["triangle"]["p_delta"] == pytest.approx(5.242280515560438e-06, rel=1e-12)
    assert (tmp_path / "theory.csv").read_text().startswith("# config=")


def test_simulate_is_byte_identical(tmp_path):
    over = {"t_max": 400, "seed": 42}
    run_experiment(resolve_config("simulate", overrides=over), tmp_path / "a", threads=1)
    run_experiment(resolve_config("simulate", overrides=over), tmp_path / "b", threads=4)
    assert _files(tmp_path / "a") == _files(tmp_path / "b")
    assert "edges.tsv" in _files(tmp_path / "a")


def test_rerun_from_report(tmp_path):
    run_experiment(resolve_config("degree", overrides={"t": 120, "n_rep": 5000, "seed": 3}), tmp_path / "a")
    cfg = resolve_config("degree", tmp_path / "a" / "report.json")
    run_experiment(cfg, tmp_path / "b", threads=2)
    assert _files(tmp_path / "a") == _files(tmp_path / "b")
    with pytest.raises(ConfigError, match="written by"):
        resolve_config("assort", tmp_path / "a" / "report.json")


def test_degree_sweep_decreasing(tmp_path):
    rep = run_experiment(resolve_config("sweep", overrides={"scales": "100,200,400"}), tmp_path)
    tvs = [r["value"] for r in rep.extra["convergence"]]
    assert all(b < a for a, b in zip(tvs, tvs[1:]))
    assert (tmp_path / "sweep.csv").exists()


def test_clustering_sweep(tmp_path):
    rep = run_experiment(resolve_config("sweep", overrides={"experiment": "clustering", "scales": "1,2"}), tmp_path)
    rows = [r for r in rep.extra["convergence"] if r["statistic"] == "p_delta_relative_error"]
    assert rows[1]["value"] < rows[0]["value"]


def test_failed_run_leaves_nothing(tmp_path, monkeypatch):
    def boom(self):
        raise RuntimeError("late failure")

    # the json file is written first, then the csv writer fails
    monkeypatch.setattr(cli.ExperimentReport, "to_csv", boom)
    with pytest.raises(RuntimeError):
        run_experiment(resolve_config("theory"), tmp_path)
    assert list(tmp_path.iterdir()) == []


def test_budget_truncates(tmp_path):
    cfg = resolve_config("degree", overrides={"t": 300, "n_rep": 200_000, "budget_seconds": 1e-9})
    rep = run_experiment(cfg, tmp_path)
    assert rep.truncated and rep.n_rep < 200_000
    assert json.loads((tmp_path / "report.json").read_text())["truncated"] is True


def test_main_exit_codes(tmp_path, monkeypatch):
    assert main(["theory", "--out", str(tmp_path), "--format", "json"]) == 0
    assert main(["theory", "--a", "5", "--b", "2", "--out", str(tmp_path)]) == 2
    assert main(["degree", "--threads", "0", "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("RIG_LAB_THREADS", "nope")
    assert main(["theory", "--out", str(tmp_path)]) == 2
    monkeypatch.setenv("RIG_LAB_THREADS", "2")
    assert cli._threads(None) == 2


def test_threads_not_in_config(tmp_path):
    run_experiment(resolve_config("theory"), tmp_path, threads=3)
    cfg = json.loads((tmp_path / "report.json").read_text())["config"]
    assert "threads" not in cfg and "out" not in cfg
