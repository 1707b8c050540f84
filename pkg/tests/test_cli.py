import json

import numpy as np
import pytest

from prcircuits import cli


def _run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_presets_list(capsys):
    code, out = _run(["presets", "list"], capsys)
    assert code == 0
    for name in ("fig2", "fig9", "appA"):
        assert name in out.out


def test_run_preset_writes_csv_and_record(tmp_path, capsys):
    code, _ = _run(["run", "--preset", "appA", "--out", str(tmp_path)], capsys)
    assert code == 0
    text = (tmp_path / "cost.csv").read_bytes().decode()
    first, header, row1, row2 = text.splitlines()
    assert first.startswith("# config_sha256=") and "seed=0" in first
    assert header == "p,rate,iterations,attempts_per_Cn"
    assert row1.endswith(",1.96") and row2.endswith(",2.82")
    assert "\r" not in text
    record = json.loads((tmp_path / "run.json").read_text())
    assert record["experiments"][0]["config"]["experiment"] == "cluster-cost"


def test_rerun_is_byte_identical(tmp_path, capsys):
    args = ["run", "--preset", "fig1", "--n", "3", "--samples", "20", "--iterations", "4", "--seed", "3"]
    assert _run(args + ["--out", str(tmp_path / "a")], capsys)[0] == 0
    assert _run(args + ["--out", str(tmp_path / "b")], capsys)[0] == 0
    for name in ("cz-hz.csv", "xy-haar.csv", "cz-haar.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "gap-sweep", "name": "g", "n": 3, "c": [0.0, 0.5], "p": 1.0}))
    code, _ = _run(["run", "--config", str(cfg), "--c", "0.25", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert len(lines) == 3 and lines[2].startswith("open,CZ,3,0.25,1.0,")


@pytest.mark.parametrize("experiment", ["spectrum", "trajectory", "scaling", "twirl"])
def test_each_experiment_runs(experiment, tmp_path, capsys):
    extra = {"scaling": ["--topology", "aa", "--n", "4,6,8", "--c", "0.1", "--p", "0.3"]}.get(
        experiment, ["--n", "3", "--c", "0.2"]
    )
    code, _ = _run(["run", "--config", _write(tmp_path, {"experiment": experiment}), "--out", str(tmp_path)] + extra, capsys)
    assert code == 0
    assert (tmp_path / f"{experiment}.csv").exists()


def _write(tmp_path, obj):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(obj))
    return str(p)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert _run(["run", "--preset", "nope"], capsys)[0] == 2
    assert _run(["run", "--config", _write(tmp_path, {"experiment": "gap-sweep", "bogus": 1})], capsys)[0] == 2
    assert _run(["run", "--config", _write(tmp_path, {"experiment": "gap-sweep", "topology": "ring"})], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_module_error_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path, {"experiment": "gap-sweep", "topology": "star", "gate": "XY", "n": 4})
    code, out = _run(["run", "--config", cfg, "--out", str(tmp_path / "o")], capsys)
    assert code == 1
    err = json.loads(out.err.strip().splitlines()[-1])
    assert err["status"] == "error" and err["error_type"] == "ValueError"
    assert (tmp_path / "o" / "error.json").exists()


def test_verify_subset_exit_codes(capsys):
    code, out = _run(["verify", "--only", "14"], capsys)
    assert code == 0 and "[PASS] criterion 14" in out.out
    code, out = _run(["verify", "--fast", "--only", "11,14"], capsys)
    assert "[SKIP] criterion 11" in out.out


def test_verify_names_tampered_rbar(monkeypatch, capsys):
    from prcircuits import markov

    def tampered(c):
        # (1 - c) / 3 instead of (1 - c) / 2, still column-stochastic
        return np.array([[1, 0, 0], [0, c, (1 - c) / 3], [0, 1 - c, 1 - (1 - c) / 3]])

    monkeypatch.setattr(markov, "rbar", tampered)
    code, out = _run(["verify", "--only", "2"], capsys)
    assert code == 1 and "[FAIL] criterion  2" in out.out
