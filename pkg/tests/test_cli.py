import json
import os

import pytest

import rmtlab
from rmtlab.cli import main


def _run(tmp, *argv):
    return main([*argv, "--out-dir", str(tmp)])


# ---------------------------------------------------------------------------
# happy paths


def test_fredholm_table_first_row(tmp_path):
    assert _run(tmp_path, "fredholm", "--smax", "4", "--step", "0.05") == 0
    lines = (tmp_path / "fredholm.csv").read_text().splitlines()
    assert lines[0] == "s,H,Hprime,p,cdf"
    first = lines[1].split(",")
    assert first[0] == "0.0" and first[1] == "1.0"
    assert len(lines) == 1 + 81


def test_replay_is_byte_identical(tmp_path):
    d1 = tmp_path / "one"
    d2 = tmp_path / "two"
    args = ["kernel-scan", "--N", "24", "--set", "tau.max=1.0", "--set", "tau.step=0.5"]
    assert main([*args, "--out-dir", str(d1)]) == 0
    assert main(["kernel-scan", "--replay", str(d1 / "kernel-scan.json"),
                 "--out-dir", str(d2)]) == 0
    for name in ("kernel-scan.csv", "kernel-scan.svg", "kernel-scan.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_summary_metadata(tmp_path):
    assert _run(tmp_path, "sample", "--N", "6") == 0
    summary = json.loads((tmp_path / "sample.json").read_text())
    assert summary["version"] == rmtlab.__version__
    assert len(summary["config_sha256"]) == 64
    assert summary["seed"] == 20260301
    assert summary["params"]["N"] == 6
    for name in summary["outputs"]:
        assert (tmp_path / name).exists()


def test_sample_csv_switch(tmp_path):
    assert _run(tmp_path, "sample", "--N", "5", "--csv") == 0
    rows = (tmp_path / "sample.csv").read_text().splitlines()
    assert len(rows) == 5  # one line per matrix row, no header


def test_out_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("RMTLAB_OUT_DIR", str(tmp_path))
    assert main(["sample", "--N", "4"]) == 0
    assert (tmp_path / "sample.json").exists()


def test_flag_beats_set_beats_config(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text("# comment line\nN = 30\n")
    assert _run(tmp_path / "a", "sample", "--config", str(cfgfile)) == 0
    assert json.loads((tmp_path / "a" / "sample.json").read_text())["params"]["N"] == 30
    assert _run(tmp_path / "b", "sample", "--config", str(cfgfile), "--set", "N=40") == 0
    assert json.loads((tmp_path / "b" / "sample.json").read_text())["params"]["N"] == 40
    assert _run(tmp_path / "c", "sample", "--config", str(cfgfile), "--set", "N=40",
                "--N", "50") == 0
    assert json.loads((tmp_path / "c" / "sample.json").read_text())["params"]["N"] == 50


def test_stdout_carries_results(tmp_path, capsys):
    assert _run(tmp_path, "sample", "--N", "4") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["command"] == "sample"
    assert out["results"]["hermitian"] is True


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == rmtlab.__version__


def test_threads_cap_accepted(tmp_path):
    assert _run(tmp_path, "sample", "--N", "4", "--threads", "1") == 0


# ---------------------------------------------------------------------------
# failure modes


def test_unknown_key_exits_2(tmp_path, capsys):
    assert _run(tmp_path, "sample", "--set", "bogus=1") == 2
    assert "configuration error" in capsys.readouterr().err


def test_bad_value_exits_2(tmp_path, capsys):
    assert _run(tmp_path, "sample", "--N", "-5") == 2
    assert "configuration error" in capsys.readouterr().err
    assert _run(tmp_path, "sample", "--set", "N") == 2


def test_threads_zero_exits_2(tmp_path):
    assert _run(tmp_path, "sample", "--N", "4", "--threads", "0") == 2


def test_replay_validation(tmp_path, capsys):
    assert _run(tmp_path, "sample", "--replay", str(tmp_path / "nope.json")) == 2
    assert _run(tmp_path, "sample", "--N", "4") == 0
    capsys.readouterr()
    # replaying under a different command is refused
    assert _run(tmp_path, "spectrum", "--replay", str(tmp_path / "sample.json")) == 2
    assert "records command" in capsys.readouterr().err


def test_numerical_failure_exits_3_with_json(tmp_path, capsys):
    rc = _run(tmp_path, "km-check", "--set", "y=0,1e-14", "--set", "T.grid=10,100")
    assert rc == 3
    err = json.loads(capsys.readouterr().err)
    assert err["type"] == "ConditioningError"
    assert "error" in err
