"""Command-line interface: exit codes, outputs, manifest replay."""

import json
import math
import os

import pytest

from syndromestat.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_code_info_toric(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["code", "info", "--builtin", "toric", "--L", "3"],
                     capsys)
    assert rc == 0
    report = json.loads(out)
    assert report["K"] == 2
    assert report["redundancies"] == 2
    assert report["symmetry"] == "global"


def test_code_info_repetition_2d(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["code", "info", "--builtin", "repetition",
                      "--d", "2", "--L", "3"], capsys)
    assert rc == 0
    report = json.loads(out)
    assert report["redundancies"] == 10
    assert report["symmetry"] == "local"


def test_bad_code_file_exits_2(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3, "checks": []}')
    rc, _, err = run(["code", "info", "--file", str(bad)], capsys)
    assert rc == 2
    assert err.strip()


def test_exact_ic_noiseless(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["exact", "ic", "--builtin", "repetition", "--d", "1",
                      "--L", "3", "--T", "2", "--n", "2",
                      "--px", "0", "--q", "0"], capsys)
    assert rc == 0
    ic_line = [ln for ln in out.splitlines() if ",ic," in ln][0]
    assert float(ic_line.split(",")[-1]) == pytest.approx(math.log(2),
                                                          abs=1e-12)


def test_exact_duality(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["exact", "duality", "--builtin", "toric", "--L", "2",
                      "--T", "1", "--pz", "0.2"], capsys)
    assert rc == 0
    rep = json.loads(out)
    assert rep["max_relative_deviation"] <= 1e-10


def test_exact_decode_csv(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    recs = tmp_path / "r.json"
    recs.write_text(json.dumps(
        {"records": [{"m_noisy": [3, 3], "m_final": 3}]}))
    rc, out, _ = run(["exact", "decode", "--builtin", "repetition",
                      "--d", "1", "--L", "3", "--px", "0.1", "--q", "0.05",
                      "--records", str(recs)], capsys)
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "record,kappa,probability"
    probs = [float(ln.split(",")[2]) for ln in lines[1:]]
    assert len(probs) == 4  # 2K = 2 sector bits
    assert all(p >= 0 for p in probs)


def test_budget_exit_code_3(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, _, err = run(["exact", "ic", "--builtin", "toric", "--L", "2",
                      "--T", "2", "--n", "3", "--pz", "0.1", "--q", "0.1",
                      "--bits", "10"], capsys)
    assert rc == 3
    assert "budget" in err


def test_missing_code_source_exits_2(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, _, err = run(["exact", "ic", "--T", "1"], capsys)
    assert rc == 2


def test_manifest_written_and_replay_identical(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out_file = tmp_path / "ic.csv"
    argv = ["exact", "ic", "--builtin", "repetition", "--d", "1", "--L", "3",
            "--T", "1", "--n", "2", "--px", "0.1", "--q", "0.05",
            "--out", str(out_file)]
    assert main(argv) == 0
    capsys.readouterr()
    manifest_path = tmp_path / "ic.manifest.json"
    assert manifest_path.exists()
    manifest = json.loads(manifest_path.read_text())
    assert manifest["argv"] == argv
    assert manifest["code_hash"]
    first = out_file.read_text()
    out_file.unlink()
    assert main(["--replay", str(manifest_path)]) == 0
    capsys.readouterr()
    assert out_file.read_text() == first


def test_mc_scan_summary(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["mc", "scan", "--builtin", "repetition", "--d", "1",
                      "--L", "8,12", "--scan", "px",
                      "--range", "0.30:0.38:0.04", "--q", "0.05",
                      "--sweeps", "2000", "--burn-in", "400",
                      "--out", str(tmp_path / "scan")], capsys)
    assert rc == 0
    summary = json.loads((tmp_path / "scan.summary.json").read_text())
    assert not summary["no_crossing"]
    csv_text = (tmp_path / "scan.csv").read_text()
    assert csv_text.splitlines()[0].startswith("code,L,T,n")
    assert "binder" in csv_text


def test_mc_scan_no_crossing(capsys, tmp_path, monkeypatch):
    """Without readout noise one round has no finite-coupling crossing in
    this window: curves of different sizes just separate."""
    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["mc", "scan", "--builtin", "repetition", "--d", "1",
                      "--L", "6,10", "--scan", "px",
                      "--range", "0.02:0.06:0.02", "--q", "0", "--T", "1",
                      "--sweeps", "1500", "--burn-in", "300",
                      "--out", str(tmp_path / "nc")], capsys)
    assert rc == 0
    summary = json.loads((tmp_path / "nc.summary.json").read_text())
    assert summary["no_crossing"]


def test_mc_correlate_matches_exact(capsys, tmp_path, monkeypatch):
    from syndromestat.codes import build_repetition
    from syndromestat.exact import relative_entropy
    from syndromestat.noise import NoiseParams

    monkeypatch.chdir(tmp_path)
    rc, out, _ = run(["mc", "correlate", "--builtin", "repetition",
                      "--d", "1", "--L", "3", "--T", "2", "--px", "0.1",
                      "--q", "0.05", "--s", "0,1",
                      "--sweeps", "60000", "--burn-in", "4000"], capsys)
    assert rc == 0
    rows = {ln.split(",")[9]: float(ln.split(",")[10])
            for ln in out.strip().splitlines()[1:]}
    corr = rows["correlator_s=0x3"]
    err = rows["correlator_err"]
    want = relative_entropy(build_repetition(1, 3),
                            NoiseParams(px=0.1, q=0.05), 2, 2, 0b011)
    assert abs(-math.log(corr) - want) < 3 * (err / corr)
