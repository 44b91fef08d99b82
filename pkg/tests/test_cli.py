import json
import os

import pytest

from frdecomp.cli import main


def run_cli(args, tmp_path, extra=None):
    argv = list(args) + ["--cache-dir", str(tmp_path / "cache"),
                         "--out-dir", str(tmp_path / "out")]
    if extra:
        argv += extra
    return main(argv)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def test_build_and_cache_hit(workdir, capsys):
    args = ["build", "--model", "gff", "--d", "3", "--t-max", "4",
            "--n-scales", "5"]
    assert run_cli(args, workdir) == 0
    first = capsys.readouterr().out
    assert "built" in first
    assert run_cli(args, workdir) == 0
    second = capsys.readouterr().out
    assert "cache hit" in second
    manifests = [f for f in os.listdir(workdir / "out") if f.startswith("manifest")]
    assert manifests


def test_corrupted_cache_rebuilt(workdir, capsys):
    args = ["build", "--model", "gff", "--d", "3", "--t-max", "4",
            "--n-scales", "5"]
    run_cli(args, workdir)
    capsys.readouterr()
    cache = workdir / "cache"
    banks = [f for f in os.listdir(cache) if f.startswith("bank")
             and f.endswith(".bin")]
    path = cache / banks[0]
    data = bytearray(path.read_bytes())
    data[-5] ^= 0xFF
    path.write_bytes(bytes(data))
    assert run_cli(args, workdir) == 0
    out = capsys.readouterr().out
    assert "bank" in out and "built" in out


def test_config_error_exit_code(workdir):
    assert run_cli(["build", "--model", "membrane", "--d", "4"], workdir) == 2


def test_config_file_with_flag_override(workdir, capsys):
    cfg = workdir / "conf.json"
    cfg.write_text(json.dumps({"model": "gff", "d": 3, "t_max": 4.0,
                               "n_scales": 5}))
    assert run_cli(["build", "--config", str(cfg)], workdir) == 0
    capsys.readouterr()


def test_sample_deterministic_csv(workdir, capsys):
    args = ["sample", "--model", "gff", "--d", "3", "--t-max", "4",
            "--n-scales", "5", "--core", "6", "--n-samples", "20",
            "--seed", "7"]
    assert run_cli(args, workdir) == 0
    out = capsys.readouterr().out
    path = out.strip().split()[-1]
    first = open(path, "rb").read()
    assert run_cli(args, workdir) == 0
    capsys.readouterr()
    assert open(path, "rb").read() == first


def test_percolate_csv(workdir, capsys):
    cfg = workdir / "perc.json"
    cfg.write_text(json.dumps({
        "model": "gff", "d": 3, "t_max": 4.0, "n_scales": 5, "core": 6,
        "n_samples": 10, "levels": [-0.5, 0.0, 0.5], "seed": 3,
    }))
    assert run_cli(["percolate", "--config", str(cfg)], workdir) == 0
    out = capsys.readouterr().out
    path = out.strip().split()[-1]
    lines = open(path).read().strip().splitlines()
    assert lines[0].startswith("level,n,theta,se,crossing")
    assert len(lines) == 4


def test_export_kernels(workdir, capsys):
    args = ["export-kernels", "--model", "gff", "--d", "3", "--t-max", "4",
            "--n-scales", "5"]
    assert run_cli(args, workdir) == 0
    out = capsys.readouterr().out
    path = out.strip().splitlines()[-1].split()[-1]
    header = open(path).readline().strip()
    assert header == "t,channel,x0,x1,x2,value"


def test_verify_negative_control(workdir, capsys):
    # the h = 1/2 bump must fail discrete verification with a nonnegativity
    # report naming the offending scale
    args = ["verify", "--model", "gff", "--d", "3", "--h", "0.5",
            "--t-max", "8", "--n-scales", "7"]
    code = run_cli(args, workdir)
    out = capsys.readouterr().out
    assert code == 1
    assert "[FAIL] vt-nonnegativity" in out
    assert "t=" in out


def test_verify_discrete_passes(workdir, capsys):
    args = ["verify", "--model", "gff", "--d", "3", "--t-max", "6",
            "--n-scales", "7"]
    code = run_cli(args, workdir)
    out = capsys.readouterr().out
    assert code == 0, out
    assert "[PASS] partition-of-unity" in out
    assert "[PASS] sos-residual" in out
    assert "[PASS] finite-range" in out
    assert "[PASS] greens-reconstruction" in out


def test_verify_report_schema(workdir, capsys):
    args = ["verify", "--model", "continuum-gff", "--d", "3"]
    code = run_cli(args, workdir)
    out = capsys.readouterr().out
    assert code == 0
    report_path = [l.split()[-1] for l in out.splitlines() if l.startswith("report:")][0]
    rep = json.load(open(report_path))
    assert rep["passed"] is True
    assert {"name", "measured", "tolerance", "passed"} <= set(rep["checks"][0])
