import csv
import json

import numpy as np
import pytest

from ndcwt import io as nio
from ndcwt.cli import run


def test_simulate_then_spectra(tmp_path):
    a, s = tmp_path / "a.csv", tmp_path / "s.json"
    assert run(["simulate", "--fbm1d", "--hurst", "0.5", "--length", "4096", "--seed", "7", "--out", str(a)]) == 0
    assert run(["spectra", "--input", str(a), "--wavelet", "cdaub6", "--depth", "6", "--out", str(s)]) == 0
    out = json.loads(s.read_text())
    assert len(out["diagram"]["points"]) == 6
    assert 0 < out["fit"]["hurst"] < 1
    assert out["version"] and out["config"]["depth"] == 6 and out["config"]["fit"] == "ols"


def test_simulate_reproducible(tmp_path):
    args = ["simulate", "--fbm2d", "--hurst", "0.4", "--length", "16", "--cols", "20", "--seed", "3"]
    run(args + ["--out", str(tmp_path / "1.csv")])
    run(args + ["--out", str(tmp_path / "2.csv")])
    data = [(tmp_path / f).read_text().splitlines()[1:] for f in ("1.csv", "2.csv")]
    assert data[0] == data[1]
    cfg = nio.read_config(tmp_path / "1.csv")
    assert cfg["hurst"] == 0.4 and cfg["cols"] == 20
    assert nio.read_image(tmp_path / "1.csv").shape == (16, 20)


def test_short_signal_exit_2(tmp_path, capsys):
    p = tmp_path / "short.csv"
    p.write_text("1\n2\n3\n")
    rc = run(["transform1d", "--input", str(p), "--wavelet", "cdaub6", "--depth", "1", "--out", str(tmp_path / "o.json")])
    assert rc == 2
    assert "--input" in capsys.readouterr().err
    assert not (tmp_path / "o.json").exists()


@pytest.mark.parametrize("argv, flag", [
    (["--depth", "9"], "--depth"),
    (["--depth", "3", "--wavelet", "nope"], "--wavelet"),
    (["--depth", "3", "--levels", "x"], "--levels"),
])
def test_validation_names_flag(tmp_path, capsys, argv, flag):
    p = tmp_path / "y.csv"
    nio.write_signal_csv(p, np.random.default_rng(0).standard_normal(64))
    rc = run(["spectra", "--input", str(p), "--out", str(tmp_path / "o.json")] + argv)
    assert rc == 2
    assert flag in capsys.readouterr().err


def test_missing_input_exit_3(tmp_path):
    assert run(["spectra", "--input", str(tmp_path / "none.csv"), "--depth", "3", "--out", str(tmp_path / "o")]) == 3


def test_argparse_error_exit_2():
    assert run(["spectra", "--fit", "lasso"]) == 2


def test_transform1d_json(tmp_path):
    p = tmp_path / "y.csv"
    nio.write_signal_csv(p, np.arange(16.0))
    before = p.read_bytes()
    assert run(["transform1d", "--input", str(p), "--wavelet", "haar", "--depth", "2", "--out", str(tmp_path / "t.json")]) == 0
    out = json.loads((tmp_path / "t.json").read_text())
    assert len(out["smooth"]) == 16 and sorted(out["detail"]) == ["2", "3"]
    assert p.read_bytes() == before


def test_transform2d_binary(tmp_path):
    img = tmp_path / "i.pgm"
    nio.write_pgm(img, np.random.default_rng(1).integers(0, 256, (20, 30)), 255)
    out = tmp_path / "c.bin"
    assert run(["transform2d", "--input", str(img), "--depth-rows", "2", "--depth-cols", "3",
                "--precision", "complex64", "--out", str(out)]) == 0
    r = nio.read_coeffs_bin(out)
    assert r["B"].shape == (60, 120) and r["itemsize"] == 8
    side = json.loads((tmp_path / "c.bin.json").read_text())
    assert side["config"]["depth_rows"] == 2 and "version" in side


def test_spectra_2d_and_plot_data(tmp_path):
    a = tmp_path / "a.csv"
    run(["simulate", "--fbm2d", "--hurst", "0.5", "--length", "64", "--seed", "1", "--out", str(a)])
    pd = tmp_path / "p.csv"
    rc = run(["spectra", "--input", str(a), "--mode", "2d", "--depth", "4", "--shift", "1",
              "--fit", "wls", "--plot-data", str(pd), "--out", str(tmp_path / "s.json")])
    assert rc == 0
    lines = pd.read_text().splitlines()
    assert lines[0] == "level,log2_energy" and len(lines) == 4
    assert run(["spectra", "--input", str(a), "--mode", "2d", "--depth", "4", "--shift", "9",
                "--out", str(tmp_path / "s.json")]) == 2


def test_degenerate_warning_on_stderr(tmp_path, capsys):
    p = tmp_path / "c.csv"
    nio.write_signal_csv(p, np.ones(64))
    rc = run(["spectra", "--input", str(p), "--depth", "3", "--out", str(tmp_path / "s.json")])
    assert rc == 0
    assert "zero-energy" in capsys.readouterr().err
    out = json.loads((tmp_path / "s.json").read_text())
    assert out["fit"] is None and all(pt["log2_energy"] is None for pt in out["diagram"]["points"])


def test_phase(tmp_path, capsys):
    p = tmp_path / "y.csv"
    nio.write_signal_csv(p, np.random.default_rng(0).standard_normal(128))
    assert run(["phase", "--input", str(p), "--depth", "4", "--out", str(tmp_path / "ph.json")]) == 0
    out = json.loads((tmp_path / "ph.json").read_text())
    assert len(out["phase"]["levels"]) == 4 and out["config"]["statistic"] == "arithmetic"


def test_features_manifest(tmp_path):
    rows = []
    for k in range(4):
        f = tmp_path / f"s{k}.csv"
        nio.write_signal_csv(f, np.random.default_rng(k).standard_normal(1300).cumsum())
        rows.append(f"s{k}.csv,{'a' if k < 2 else 'b'},p{k}")
    man = tmp_path / "m.csv"
    man.write_text("path,group,subject\n" + "\n".join(rows) + "\n")
    out = tmp_path / "f.csv"
    assert run(["features", "--manifest", str(man), "--depth", "3", "--segment", "1024:100",
                "--adjust-subjects", "--out", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    table = list(csv.DictReader(lines))
    assert len(table) == 12
    assert {"id", "group", "subject", "slope", "hurst", "slope_adj"} <= set(table[0])
    assert sum(k.startswith("phase_") and not k.endswith("_adj") for k in table[0]) == 3
    assert run(["features", "--manifest", str(man), "--depth", "3", "--segment", "1024",
                "--out", str(out)]) == 2


def test_threads_env(tmp_path, monkeypatch):
    p = tmp_path / "y.csv"
    nio.write_signal_csv(p, np.random.default_rng(0).standard_normal(256))
    outs = []
    for n in ("1", "2"):
        monkeypatch.setenv("NDCWT_THREADS", n)
        o = tmp_path / f"s{n}.json"
        assert run(["spectra", "--input", str(p), "--depth", "4", "--out", str(o)]) == 0
        outs.append(json.loads(o.read_text()))
    assert outs[0]["config"]["threads"] == 1
    assert abs(outs[0]["fit"]["slope"] - outs[1]["fit"]["slope"]) < 1e-12
    monkeypatch.setenv("NDCWT_THREADS", "zero")
    assert run(["spectra", "--input", str(p), "--depth", "4", "--out", str(o)]) == 2


def test_verify_quick(capsys):
    assert run(["verify", "--quick"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 5
