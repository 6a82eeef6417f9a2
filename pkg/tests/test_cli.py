import json

import pytest

from wasserlab.cli import main
from wasserlab.scenario import ConfigError, apply_overrides, load_config, validate_config


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_run_bundled_scenario(tmp_path, capsys):
    assert main(["run", "gaussian-dilation", "--out-dir", str(tmp_path)]) == 0
    out = tmp_path / "gaussian-dilation"
    report = read_json(out / "report.json")
    assert report["status"] == "pass"
    assert report["checks"]["edi"]["verdict"] == "equality"
    assert (out / "series-closed_form.csv").exists() or list(out.glob("series-*.csv"))
    assert list(out.glob("margins-*.csv"))
    assert "gaussian-dilation" in capsys.readouterr().out


def test_run_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["run", "translation", "--out-dir", str(tmp_path / d)]) == 0
    a = sorted((tmp_path / "a" / "translation").glob("*.csv"))
    assert a
    for f in a:
        assert f.read_bytes() == (tmp_path / "b" / "translation" / f.name).read_bytes()


def test_time_samples_and_grid_size_overrides(tmp_path):
    args = ["run", "translation", "--out-dir", str(tmp_path), "--time-samples", "17",
            "--grid-size", "1024"]
    assert main(args) == 0
    series = next((tmp_path / "translation").glob("series-*.csv"))
    assert len(series.read_text().strip().splitlines()) == 18


def test_malformed_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "bad", "model": {"kind": "torus"}}')
    assert main(["run", str(bad), "--out-dir", str(tmp_path / "out")]) != 0
    report = read_json(tmp_path / "out" / "bad" / "report.json")
    assert report["status"] == "error"


def test_missing_config(tmp_path):
    assert main(["run", str(tmp_path / "none.json"), "--out-dir", str(tmp_path)]) == 2


def test_validate_config_messages():
    with pytest.raises(ConfigError):
        validate_config({"name": "x"})
    cfg = load_config("gaussian-dilation")
    with pytest.raises(ConfigError):
        validate_config({**cfg, "checks": ["edi", "nonsense"]})
    with pytest.raises(ConfigError):
        validate_config(apply_overrides(cfg, engine="spectral"))


def test_empty_manifest(tmp_path):
    m = tmp_path / "empty.json"
    m.write_text("[]")
    assert main(["battery", str(m), "--out-dir", str(tmp_path / "runs")]) == 0
    assert read_json(tmp_path / "runs" / "summary.json")["status"] == "pass"


def test_falsification_battery(tmp_path):
    root = tmp_path / "runs"
    assert main(["battery", "falsification", "--out-dir", str(root), "--jobs", "2"]) == 1
    summary = read_json(root / "summary.json")
    status = {k: v["status"] for k, v in summary["scenarios"].items()}
    assert [k for k, v in status.items() if v != "pass"] == ["falsification-hyperbolic"]
    assert summary["scenarios"]["falsification-hyperbolic"]["checks"]["edi"]["verdict"] == "fail"
    assert main(["report", str(root)]) == 1


def test_report_single_run(tmp_path, capsys):
    main(["run", "uniform-dilation", "--out-dir", str(tmp_path)])
    capsys.readouterr()
    assert main(["report", str(tmp_path / "uniform-dilation")]) == 0
    assert "sturm" in capsys.readouterr().out
    assert main(["report", str(tmp_path / "nothing")]) == 2


def test_w_sign_minus_fails_niw(tmp_path):
    assert main(["run", "weighted-m3", "--out-dir", str(tmp_path), "--w-sign", "minus"]) == 1
    report = read_json(tmp_path / "weighted-m3" / "report.json")
    assert report["checks"]["niw"]["verdict"] == "fail"
    assert main(["run", "weighted-m3", "--out-dir", str(tmp_path / "plus")]) == 0
