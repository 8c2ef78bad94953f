import csv
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from magnomech.cli import DELAY_HEADER, SPECTRUM_HEADER, main
from magnomech.params import baseline_params, dump_config


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "base.json"
    path.write_text(json.dumps(dump_config(baseline_params())))
    return str(path)


def test_spectrum_fig2a_dip_at_resonance(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["spectrum", "--preset", "fig2a", "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header == SPECTRUM_HEADER
    i = np.argmin(data[:, 1])
    assert data[i, 0] == pytest.approx(1.0, abs=1e-3)
    np.testing.assert_allclose(data[:, 0], np.linspace(0.5, 1.5, 2001), rtol=1e-12)
    manifest = json.loads((tmp_path / "f.manifest.json").read_text())
    assert manifest["command"] == "spectrum" and "timestamp" in manifest
    analysis = json.loads((tmp_path / "f.analysis.json").read_text())
    assert analysis["window_count"] == 1


def test_two_points_gives_three_lines(tmp_path, config):
    out = tmp_path / "two.csv"
    assert main(["spectrum", "--config", config, "--points", "2", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_fig4c_sidecar_reports_three_windows(tmp_path):
    out = tmp_path / "f4c.csv"
    assert main(["spectrum", "--preset", "fig4c", "--out", str(out)]) == 0
    doc = json.loads((tmp_path / "f4c.analysis.json").read_text())
    assert doc["window_count"] == 3
    assert len(doc["asymmetry"]) == 3


def test_spectrum_is_byte_identical_across_runs_and_threads(tmp_path, config, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["spectrum", "--config", config, "--out", str(a)]) == 0
    monkeypatch.setenv("MAGNOMECH_THREADS", "4")
    assert main(["spectrum", "--config", config, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_manifest_reruns_bit_for_bit(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["spectrum", "--preset", "fig5b", "--out", str(a)]) == 0
    manifest = tmp_path / "a.manifest.json"
    assert main(["spectrum", "--config", str(manifest), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_svg_written(tmp_path, config):
    svg = tmp_path / "p.svg"
    assert main(["spectrum", "--config", config, "--points", "101", "--channel",
                 "absorption,dispersion", "--out", str(tmp_path / "p.csv"), "--svg", str(svg)]) == 0
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<polyline") == 2


def test_delay_preset_writes_columns(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["delay", "--preset", "fig8a", "--points", "5", "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header == DELAY_HEADER and data.shape == (5, 2)
    doc = json.loads((tmp_path / "d.analysis.json").read_text())
    assert doc["n_positive"] + doc["n_negative"] <= 5


def test_delay_custom_sweep(tmp_path, config):
    out = tmp_path / "d.csv"
    code = main(["delay", "--config", config, "--mode", "override", "--variable", "Omega_d",
                 "--sweep-min", "1e10", "--sweep-max", "1e12", "--points", "3", "--log",
                 "--out", str(out)])
    assert code == 0
    _, data = read_csv(out)
    np.testing.assert_allclose(data[:, 0], [1e10, 1e11, 1e12])


def test_validate_exit_codes(tmp_path, config, capsys):
    assert main(["validate", "--config", config, "--tol", "1e-10"]) == 0
    assert json.loads(capsys.readouterr().out)["pass"] is True
    assert main(["validate", "--config", config, "--tol", "1e-18"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] is False and doc["max_rel_err"] > 0


def test_malformed_config_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"omega_a_hz\": 1e10")
    assert main(["validate", "--config", str(bad)]) == 2
    bad.write_text("{\"omega_a_hz\": 1e10}")
    assert main(["validate", "--config", str(bad)]) == 2
    assert "kappa_a_hz" in capsys.readouterr().err
    assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2


def test_usage_errors(tmp_path, config):
    assert main(["spectrum"]) == 2
    assert main(["spectrum", "--config", config, "--preset", "fig2a"]) == 2
    assert main(["delay", "--preset", "fig2a"]) == 2
    assert main(["spectrum", "--config", config, "--channel", "colour"]) == 2
    assert main(["spectrum", "--config", config, "--out", str(tmp_path / "no" / "x.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--preset", "fig99"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    res = subprocess.run([sys.executable, "-m", "magnomech", "spectrum", "--preset", "fig2a",
                          "--points", "11", "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert len(out.read_text().splitlines()) == 12
