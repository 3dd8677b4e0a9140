import io
import json
import subprocess
import sys

import pytest

from harmonic_derating.cli import EXIT_CODES, main
from harmonic_derating.io import Config, write_waveform_csv
from harmonic_derating.report import ReportDocument
from harmonic_derating.signal import HarmonicSpectrum, synthesize


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(map(str, argv)), out=out)
    return code, out.getvalue()


@pytest.fixture
def fixture_csv(tmp_path):
    path = tmp_path / "fixture.csv"
    write_waveform_csv(synthesize(HarmonicSpectrum(60, {1: 1.0, 3: 0.3, 5: 0.4}), 1.0, 20000), path)
    return path


def test_analyze_pure_sine(tmp_path):
    path = tmp_path / "sine.csv"
    write_waveform_csv(synthesize(HarmonicSpectrum(60, {1: 1.0}), 1.0, 20000), path)
    code, text = run_cli("analyze", path, "--out", tmp_path / "r.json")
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    m = doc["metrics"][0]
    assert m["thd"] == pytest.approx(0, abs=1e-9)
    assert m["derating"] == pytest.approx(1.0, abs=1e-9)
    assert "derating    100 %" in text


def test_analyze_fixture(fixture_csv, tmp_path):
    code, text = run_cli("analyze", fixture_csv, "--out", tmp_path / "r.json")
    assert code == 0
    m = json.loads((tmp_path / "r.json").read_text())["metrics"][0]
    assert 100 * m["thd"] == pytest.approx(50, abs=0.01)
    assert m["f_hl"] == pytest.approx(4.648, abs=0.001)
    assert "THD         50 %" in text


def test_analyze_missing_column(tmp_path, capsys):
    path = tmp_path / "one.csv"
    path.write_text("time_s\n0\n0.001\n")
    code, _ = run_cli("analyze", path)
    assert code == EXIT_CODES["E_CSV"]
    err = capsys.readouterr().err
    assert err.startswith("E_CSV:")
    assert "current_a" in err


def test_analyze_nyquist(fixture_csv, capsys):
    code, _ = run_cli("analyze", fixture_csv, "--h-max", 200)
    assert code == EXIT_CODES["E_NYQUIST"]
    assert capsys.readouterr().err.startswith("E_NYQUIST:")


def test_scenarios_stdout_only():
    code, text = run_cli("scenarios")
    assert code == 0
    assert len(text.strip().splitlines()) == 6


def test_scenarios_outputs(tmp_path):
    out = tmp_path / "out"
    code, _ = run_cli("scenarios", "--out", out)
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "report.json",
        "spectrum_scenario_1.csv",
        "spectrum_scenario_2.csv",
        "spectrum_scenario_3.csv",
        "spectrum_scenario_4.csv",
        "spectrum_scenario_5.csv",
        "thd_eddy_summary.csv",
    ]
    text = (out / "report.json").read_text()
    doc = ReportDocument.from_json(text)
    assert doc.schema_version == 1
    assert len(doc.metrics) == 5
    assert doc.to_json() == text
    assert "generated_at" not in json.loads(text)


def test_scenarios_deterministic_and_timestamp(tmp_path):
    run_cli("scenarios", "--out", tmp_path / "a")
    run_cli("scenarios", "--out", tmp_path / "b")
    for name in ("report.json", "thd_eddy_summary.csv", "spectrum_scenario_3.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    run_cli("--timestamp", "scenarios", "--out", tmp_path / "c")
    assert "generated_at" in json.loads((tmp_path / "c" / "report.json").read_text())


def test_scenarios_zero(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenarios": []}))
    code, text = run_cli("scenarios", "--config", cfg)
    assert code == 0
    assert len(text.strip().splitlines()) == 1
    assert "W_EMPTY" in capsys.readouterr().err


def test_scenarios_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, text = run_cli("scenarios", "--out", blocker / "sub")
    assert code == EXIT_CODES["E_IO"]
    assert text == ""
    assert capsys.readouterr().err.startswith("E_IO:")


def test_digest_tracks_input_bytes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"transformer": {"p_ec_r": 0.05}}))
    run_cli("scenarios", "--config", cfg, "--out", tmp_path / "a")
    cfg.write_text(json.dumps({"transformer": {"p_ec_r": 0.050}}) + " ")
    run_cli("scenarios", "--config", cfg, "--out", tmp_path / "b")
    da = json.loads((tmp_path / "a" / "report.json").read_text())
    db = json.loads((tmp_path / "b" / "report.json").read_text())
    assert da["input_digest"] != db["input_digest"]
    assert da["metrics"] == db["metrics"]


def test_flag_beats_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"transformer": {"p_ec_r": 0.01}}))
    run_cli("scenarios", "--config", cfg, "--out", tmp_path / "a")
    run_cli("scenarios", "--config", cfg, "--pec-r", 0.1, "--out", tmp_path / "b")
    a = json.loads((tmp_path / "a" / "report.json").read_text())["metrics"][2]
    b = json.loads((tmp_path / "b" / "report.json").read_text())["metrics"][2]
    assert a["eddy_loss_pu"] == pytest.approx(0.01 * a["f_hl"])
    assert b["eddy_loss_pu"] == pytest.approx(0.1 * b["f_hl"])


def test_synth(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"harmonics": {"1": 1.0}}))
    code, _ = run_cli("synth", spec, tmp_path / "w.csv")
    assert code == 0
    assert len((tmp_path / "w.csv").read_text().splitlines()) == 20001


def test_synth_round_trip(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"harmonics": {"1": 1.0, "3": 0.2}}))
    run_cli("synth", spec, tmp_path / "w.csv")
    run_cli("analyze", tmp_path / "w.csv", "--out", tmp_path / "r.json")
    rows = json.loads((tmp_path / "r.json").read_text())["plots"]["spectrum"]["w.csv"]
    mags = {r["h"]: r["rms_a"] for r in rows}
    assert mags[1] == pytest.approx(1.0, rel=1e-6)
    assert mags[3] == pytest.approx(0.2, rel=1e-6)


def test_synth_errors(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"harmonics": {"1": 1.0}}))
    code, _ = run_cli("synth", spec, tmp_path / "w.csv", "--duration", -1)
    assert code == EXIT_CODES["E_USAGE"]
    assert capsys.readouterr().err.startswith("E_USAGE:")
    spec.write_text(json.dumps({"harmonics": {"1": 1.0, "170": 0.1}}))
    code, _ = run_cli("synth", spec, tmp_path / "w.csv")
    assert code == EXIT_CODES["E_NYQUIST"]
    assert "harmonic 170" in capsys.readouterr().err


def _rect(tmp_path, name, **params):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(params))
    return p


def _analyzed_thd(tmp_path, csv_path):
    run_cli("analyze", csv_path, "--out", tmp_path / "tmp_report.json")
    return json.loads((tmp_path / "tmp_report.json").read_text())["metrics"][0]["thd"]


def test_rectifier_resistive(tmp_path):
    params = _rect(tmp_path, "res", dc_capacitance=1e-9)
    code, _ = run_cli("rectifier", params, tmp_path / "res.csv")
    assert code == 0
    assert _analyzed_thd(tmp_path, tmp_path / "res.csv") < 0.01
    diag = json.loads((tmp_path / "res.json").read_text())
    assert diag["discarded_periods"] == 5
    assert diag["max_iterations_per_step"] >= 1


def test_rectifier_capacitor(tmp_path):
    params = _rect(tmp_path, "cap", dc_capacitance=470e-6, dc_load_resistance=60)
    assert run_cli("rectifier", params, tmp_path / "cap.csv")[0] == 0
    assert _analyzed_thd(tmp_path, tmp_path / "cap.csv") > 0.2


def test_rectifier_errors(tmp_path, capsys):
    params = _rect(tmp_path, "zero", timestep=0)
    code, _ = run_cli("rectifier", params, tmp_path / "z.csv")
    assert code == EXIT_CODES["E_VALUE"]
    params = _rect(tmp_path, "stuck", max_iterations=1)
    code, _ = run_cli("rectifier", params, tmp_path / "s.csv")
    assert code == EXIT_CODES["E_SOLVER"]
    assert "error" in json.loads((tmp_path / "s.json").read_text())


def test_export_defaults(tmp_path):
    code, text = run_cli("export-defaults")
    assert code == 0
    cfg = Config(json.loads(text))
    assert len(cfg.scenarios) == 5
    code, _ = run_cli("export-defaults", "--seed-docs", "--out", tmp_path / "docs")
    assert code == 0
    names = sorted(p.name for p in (tmp_path / "docs").iterdir())
    assert names == ["config.json", "config.schema.json", "rectifier.example.json", "spectrum.example.json"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "harmonic_derating", "analyze", str(tmp_path / "missing.csv")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_CODES["E_IO"]
    assert proc.stderr.startswith("E_IO:")
