import json

import pytest

from bosonic_converse import __version__
from bosonic_converse.cli import ConfigError, RunConfig, main
from bosonic_converse.io import read_table, render
from bosonic_converse.verify import SUITES


def _run(tmp_path, *args, name="out", fmt="csv"):
    path = tmp_path / f"{name}.{fmt}"
    code = main([*args, "-o", str(path), "--format", fmt])
    text = path.read_text() if path.exists() else ""
    return code, text


def test_bounds_single_point(tmp_path):
    code, text = _run(tmp_path, "bounds")
    assert code == 0
    meta, columns, rows = read_table(text, "csv")
    assert columns == ["eta", "n_s", "n_b", "lower", "upper_gio", "upper_ks", "gap_gio", "gap_ks"]
    assert len(rows) == 1
    row = dict(zip(columns, rows[0]))
    assert row["gap_gio"] <= 1.45 and row["gap_ks"] <= 1.45
    assert meta["version"] == __version__
    assert meta["config"]["params"]["eta"] == 0.5


def test_bounds_without_noise_has_equal_upper_bounds(tmp_path):
    code, text = _run(tmp_path, "bounds", "--set", "n_b=0")
    _, columns, rows = read_table(text, "csv")
    row = dict(zip(columns, rows[0]))
    assert row["upper_gio"] == pytest.approx(row["upper_ks"], abs=1e-15)


def test_bounds_log_grid_is_ordered(tmp_path):
    code, text = _run(tmp_path, "bounds", "--set", "grid=log")
    meta, columns, rows = read_table(text, "csv")
    assert code == 0 and len(rows) == 8000
    assert meta["diagnostics"]["ordered"]
    lo, gio, ks = (columns.index(c) for c in ("lower", "upper_gio", "upper_ks"))
    assert all(r[lo] <= min(r[gio], r[ks]) + 1e-12 for r in rows)


def test_additive_bounds_columns(tmp_path):
    _, text = _run(tmp_path, "bounds", "--set", "channel=additive", "--set", "n_s=1", "--set", "n_bar=1")
    _, columns, rows = read_table(text, "csv")
    assert columns[:2] == ["n_s", "n_bar"]
    assert rows[0][columns.index("upper_gio")] == pytest.approx(1.1699250014423124, rel=1e-14)


def test_envelope_curves(tmp_path):
    code, text = _run(tmp_path, "envelope", "--set", "n_max=2000", "--set", "step=10")
    meta, columns, rows = read_table(text, "csv")
    assert code == 0 and columns == ["n", "bound", "vacuous"]
    assert rows[-1][1] < rows[0][1]
    assert meta["diagnostics"]["monotone_tail"]
    code, text = _run(tmp_path, "envelope", "--set", "rate=0.5", "--set", "n_max=50", name="below")
    _, _, rows = read_table(text, "csv")
    assert all(r[1] == 1.0 for r in rows)


def test_json_round_trip_is_exact(tmp_path):
    _, text = _run(tmp_path, "envelope", "--set", "theorem=2", "--set", "n_max=300", fmt="json")
    _, csv_text = _run(tmp_path, "envelope", "--set", "theorem=2", "--set", "n_max=300")
    meta, columns, rows = read_table(text, "json")
    _, _, csv_rows = read_table(csv_text, "csv")
    assert rows == csv_rows
    again = render(columns, rows, meta, "json")
    assert again == text


def test_dist_command(tmp_path):
    _, text = _run(tmp_path, "dist", "--set", "k=2", "--set", "dim=80")
    meta, columns, rows = read_table(text, "csv")
    assert columns == ["k", "l", "prob", "mean"]
    assert rows[0][3] == pytest.approx(0.5 * 2 + 0.5 * 1.0, abs=1e-12)
    _, text = _run(tmp_path, "dist", "--set", "channel=additive", "--set", "n_bar=0", "--set", "k=3",
                   "--set", "dim=6", name="point")
    _, _, rows = read_table(text, "csv")
    assert [r[2] for r in rows] == [0, 0, 0, 1, 0, 0]


def test_dist_thermal_vacuum_geometric(tmp_path):
    _, text = _run(tmp_path, "dist", "--set", "k=0", "--set", "dim=30")
    _, _, rows = read_table(text, "csv")
    for l, row in enumerate(rows):
        assert row[2] == pytest.approx(0.5**l / 1.5 ** (l + 1), rel=1e-13)


@pytest.mark.parametrize("suite, extra", [
    ("decompositions", []),
    ("rank", ["--set", "n_max=40"]),
    ("gentle", ["--set", "instances=40"]),
    ("smoothing", ["--set", "instances=300"]),
    ("qubit", ["--set", "instances=32", "--set", "n_max=4"]),
])
def test_verify_suites_pass(tmp_path, suite, extra):
    code, text = _run(tmp_path, "verify", suite, *extra)
    meta, _, rows = read_table(text, "csv")
    assert code == 0
    assert meta["diagnostics"]["passed"]
    assert all(r[-1] is True for r in rows)


def test_verify_failure_exit_code(tmp_path):
    code, _ = _run(tmp_path, "verify", "decompositions", "--set", "tolerance=-1")
    assert code == 2


def test_demo_mean_constraint(tmp_path):
    code, text = _run(tmp_path, "demo", "mean-constraint")
    _, columns, rows = read_table(text, "csv")
    assert code == 0
    row = dict(zip(columns, rows[0]))
    assert row["inequality_holds"] is True
    assert row["purified_mean_formula"] == pytest.approx(0.75)


def test_demo_truncation_exit_code(tmp_path):
    code, _ = _run(tmp_path, "demo", "mean-constraint", "--set", "power=9", "--set", "dim=8")
    assert code == 3


def test_demo_concentration(tmp_path):
    code, text = _run(tmp_path, "demo", "concentration", "--set", "n_values=50,100", "--set", "trials=2000")
    meta, columns, rows = read_table(text, "csv")
    assert code == 0 and len(rows) == 2
    assert meta["config"]["params"]["n_values"] == [50, 100]


def test_unknown_key_and_bad_value_exit_one(tmp_path, capsys):
    assert main(["bounds", "--set", "bogus=1"]) == 1
    assert main(["bounds", "--set", "eta=abc"]) == 1
    assert main(["bounds", "--set", "eta=2"]) == 1
    assert main(["envelope", "--set", "theorem=3"]) == 1
    assert "unknown keys" in capsys.readouterr().err


def test_config_file_and_override_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"eta": 0.25, "n_s": 2.0}))
    _, text = _run(tmp_path, "bounds", "--config", str(cfg), "--set", "n_s=3")
    meta, _, rows = read_table(text, "csv")
    assert meta["config"]["params"]["eta"] == 0.25
    assert meta["config"]["params"]["n_s"] == 3.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert main(["bounds", "--config", str(bad)]) == 1


def test_table_schedule_from_config(tmp_path):
    cfg = tmp_path / "deltas.json"
    cfg.write_text(json.dumps({"d1": {"10": 0.01, "20": 0.001}, "n_min": 10, "n_max": 20, "step": 10}))
    code, text = _run(tmp_path, "envelope", "--config", str(cfg))
    assert code == 0
    cfg.write_text(json.dumps({"d1": {"10": 0.01}, "n_min": 10, "n_max": 20, "step": 10}))
    code, _ = _run(tmp_path, "envelope", "--config", str(cfg), name="missing")
    assert code == 1


def test_runconfig_resolution():
    cfg = RunConfig.resolve("verify", "rank", {}, ["n_max=5"])
    assert cfg.params == {"n_max": 5, "densities": [0.5, 1.0, 5.0]}
    with pytest.raises(ConfigError):
        RunConfig.resolve("verify", "rank", {}, ["n_max"])
    with pytest.raises(ConfigError):
        RunConfig.resolve("verify", "rank", {}, ["n_max=2.5"])


def test_stdout_output(capsys):
    assert main(["bounds", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"meta", "rows"}


@pytest.mark.parametrize("args", [
    ["demo", "concentration", "--set", "n_values=50", "--set", "trials=1000", "--seed", "5"],
    ["verify", "smoothing", "--set", "instances=200", "--seed", "3"],
    ["demo", "mean-constraint", "--seed", "4"],
])
def test_same_seed_gives_identical_bytes(tmp_path, args):
    _, first = _run(tmp_path, *args, name="a")
    _, second = _run(tmp_path, *args, name="b")
    assert first == second and first


def test_suites_registry():
    assert set(SUITES) == {"decompositions", "smoothing", "gentle", "rank", "qubit"}
