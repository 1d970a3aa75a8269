import json

import numpy as np
import pytest

from gpsdenoise import cli
from gpsdenoise.harness import PAPER_TIMES_MS
from gpsdenoise.trajectory import NoiseSpec, generate, load_csv


@pytest.fixture
def traj_csv(tmp_path):
    path = tmp_path / "traj.csv"
    assert cli.main(["generate", "--n", "180", "--seed", "7", "--out", str(path)]) == 0
    return path


def read_rows(path):
    return [l for l in path.read_text().splitlines() if l and not l.startswith("#")]


def test_generate_writes_rows(traj_csv):
    rows = read_rows(traj_csv)
    assert rows[0] == "t,truth,measured"
    assert len(rows) == 181


def test_generate_round_trip(traj_csv):
    back = load_csv(traj_csv)
    ref = generate(180, noise=NoiseSpec(seed=7))
    np.testing.assert_allclose(back.measured, ref.measured, rtol=0, atol=1e-12)
    np.testing.assert_allclose(back.truth, ref.truth, rtol=0, atol=1e-12)


def test_generate_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        cli.main(["generate", "--seed", "3", "--white-sigma", "4", "--ar-coeff", "0.5",
                  "--motion", "constant-velocity", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_run_wiener_reduced_parallel(traj_csv, tmp_path):
    out = tmp_path / "est.csv"
    code = cli.main(["run", "--scheme", "wiener", "--length", "90", "--parallel", "3",
                     "--in", str(traj_csv), "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert len(read_rows(out)) == 91
    assert "# mean_abs=" in text and "# variance=" in text


def test_run_parallel_equals_serial(traj_csv, tmp_path):
    outs = []
    for par in ("1", "2", "3"):
        out = tmp_path / f"p{par}.json"
        cli.main(["run", "--scheme", "wiener", "--parallel", par, "--in", str(traj_csv),
                  "--format", "json", "--out", str(out)])
        outs.append(np.array(json.loads(out.read_text())["estimate"]))
    np.testing.assert_allclose(outs[1], outs[0], atol=1e-9)
    np.testing.assert_allclose(outs[2], outs[0], atol=1e-9)


@pytest.mark.parametrize("scheme,rows", [("kalman", 180), ("mlp", 90)])
def test_run_other_schemes(traj_csv, tmp_path, scheme, rows):
    err = tmp_path / "err.csv"
    out = tmp_path / "est.csv"
    assert cli.main(["run", "--scheme", scheme, "--in", str(traj_csv), "--out", str(out),
                     "--errors", str(err), "--epochs", "20"]) == 0
    assert len(read_rows(err)) == rows + 1
    assert len(read_rows(out)) == rows + 1


def test_run_table_format(traj_csv, capsys):
    assert cli.main(["run", "--scheme", "kalman", "--in", str(traj_csv), "--format", "table"]) == 0
    assert "mean_abs=" in capsys.readouterr().out


def test_parallel_only_for_fir(traj_csv, capsys):
    assert cli.main(["run", "--scheme", "kalman", "--parallel", "3", "--in", str(traj_csv)]) == 1
    assert "--parallel" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert cli.main([]) == 1
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["freq", "--t-ref", "1"]) == 1
    assert cli.main(["generate", "--n", "1"]) == 1
    assert capsys.readouterr().out == ""


def test_runtime_errors_exit_2(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert cli.main(["run", "--scheme", "kalman", "--in", str(missing)]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("t,truth,measured\n0,1,1\n0.05,1,1\n0.2,1,1\n")
    assert cli.main(["run", "--scheme", "kalman", "--in", str(bad)]) == 2
    assert "non-uniform" in capsys.readouterr().err


def test_freq(capsys):
    assert cli.main(["freq", "--t-ref", "16.9648", "--t-proc", "9.688", "--n", "90"]) == 0
    assert capsys.readouterr().out.strip() == "12.37 kHz"
    assert cli.main(["freq", "--t-ref", "16.9648", "--t-proc", "25.2656", "--n", "180"]) == 0
    assert capsys.readouterr().out.strip() == "impossible"


def test_emit_error_series(tmp_path):
    p = tmp_path / "e.csv"
    cli.emit_error_series([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], p)
    assert read_rows(p) == ["k,abs_error", "0,0.0", "1,0.0", "2,0.0"]
    cli.emit_error_series(np.arange(4.0) + 2, np.arange(4.0), p)
    assert [r.split(",")[1] for r in read_rows(p)[1:]] == ["2.0"] * 4


def test_emit_error_series_length_check(tmp_path):
    with pytest.raises(Exception):
        cli.emit_error_series([1.0], [1.0, 2.0], tmp_path / "e.csv")


def test_config_file_overrides(traj_csv, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nwiener.length = 45\nkalman.r = auto\n")
    out = tmp_path / "o.json"
    assert cli.main(["--config", str(conf), "run", "--scheme", "wiener", "--in", str(traj_csv),
                     "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["scheme"] == "wiener(45)"
    conf.write_text("wiener.length = 45\nbogus = 1\n")
    assert cli.main(["--config", str(conf), "run", "--scheme", "wiener",
                     "--in", str(traj_csv)]) == 2


def test_report_deterministic_with_timings(traj_csv, tmp_path):
    timings = tmp_path / "t.json"
    timings.write_text(json.dumps(PAPER_TIMES_MS))
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert cli.main(["report", "--in", str(traj_csv), "--timings", str(timings),
                         "--inject-paper-times", "--epochs", "20", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["sampling_frequency_khz"]["published"]["kalman"]["wiener-par3(180)"] == \
        pytest.approx(34.75, rel=5e-3)


def test_bench(traj_csv, capsys):
    assert cli.main(["bench", "--in", str(traj_csv), "--schemes", "kalman", "wiener-par3(180)",
                     "--repetitions", "5"]) == 0
    out = capsys.readouterr().out
    assert "wiener-par3(180)" in out and "120" in out


def test_bench_rejects_unknown_scheme(capsys):
    assert cli.main(["bench", "--schemes", "svm", "--repetitions", "5"]) == 1
