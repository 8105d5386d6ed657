import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bifidelity.cli import cli_main
from bifidelity.snapio import read_id, read_snapshots, write_snapshots
from bifidelity.lifting import required_samples
from bifidelity.linalg import spectral_norm


def run_pipeline(workdir: Path, seed=7) -> dict[str, Path]:
    """generate -> decompose -> samples -> lift -> bound, all inside workdir."""
    workdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "high": workdir / "beam.high.bfsm",
        "low": workdir / "beam.low.bfsm",
        "id": workdir / "beam.id.json",
        "skeleton": workdir / "beam.skel.bfsm",
        "estimate": workdir / "beam.hat.bfsm",
        "sub": workdir / "beam.sub.bfsm",
        "report": workdir / "beam.report.csv",
    }
    assert cli_main([
        "generate", "beam", "--samples", "40", "--seed", str(seed),
        "--out", str(workdir / "beam"),
    ]) == 0
    assert cli_main([
        "decompose", "--low", str(paths["low"]), "--rank", "1",
        "--out-id", str(paths["id"]),
    ]) == 0

    high = read_snapshots(paths["high"])
    dec, ids = read_id(paths["id"])
    need = required_samples(dec, ids)
    skeleton_cols = [high.sample_ids.index(s) for s in need]
    write_snapshots(high.columns(skeleton_cols), paths["skeleton"])

    sub_idx = np.sort(np.random.default_rng(seed).choice(high.n_samples, 8,
                                                         replace=False))
    write_snapshots(high.columns(sub_idx), paths["sub"])

    assert cli_main([
        "lift", "--id", str(paths["id"]), "--high-skeleton",
        str(paths["skeleton"]), "--out", str(paths["estimate"]),
    ]) == 0
    assert cli_main([
        "bound", "--low", str(paths["low"]), "--high-sub", str(paths["sub"]),
        "--rank", "1", "--out", str(paths["report"]),
    ]) == 0
    return paths


def test_generate_is_bitwise_reproducible(tmp_path):
    for sub in ("a", "b"):
        d = tmp_path / sub
        d.mkdir()
        assert cli_main([
            "generate", "beam", "--samples", "100", "--seed", "7",
            "--out", str(d / "beam"),
        ]) == 0
    for name in ("beam.high.bfsm", "beam.low.bfsm", "beam.manifest.json",
                 "beam.high.bfsm.json", "beam.low.bfsm.json"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes(), name


def test_full_pipeline_reproducible(tmp_path):
    first = run_pipeline(tmp_path / "run1")
    second = run_pipeline(tmp_path / "run2")
    for key in first:
        assert first[key].read_bytes() == second[key].read_bytes(), key


def test_lift_output_improves_on_lofi(tmp_path):
    paths = run_pipeline(tmp_path)
    high = read_snapshots(paths["high"])
    low = read_snapshots(paths["low"])
    estimate = read_snapshots(paths["estimate"])
    assert estimate.data.shape == high.data.shape
    err_bifi = spectral_norm(high.data - estimate.data)
    err_lofi = spectral_norm(high.data - low.data)
    assert err_bifi < err_lofi


def test_samples_command_lists_required_ids(tmp_path, capsys):
    paths = run_pipeline(tmp_path)
    capsys.readouterr()  # drop pipeline chatter
    assert cli_main(["samples", "--id", str(paths["id"])]) == 0
    out = capsys.readouterr().out.split()
    dec, ids = read_id(paths["id"])
    assert tuple(out) == required_samples(dec, ids)


def test_bound_on_identical_ensembles_reports_tiny_error(tmp_path, capsys):
    rng = np.random.default_rng(0)
    from bifidelity.snapshots import SnapshotMatrix
    low = SnapshotMatrix.from_array(rng.standard_normal((6, 12)))
    low_path = tmp_path / "low.bfsm"
    sub_path = tmp_path / "high_sub.bfsm"
    write_snapshots(low, low_path)
    write_snapshots(low, sub_path)  # "high" columns identical, n = N
    assert cli_main([
        "bound", "--low", str(low_path), "--high-sub", str(sub_path),
        "--rank", "6",
    ]) == 0
    out = capsys.readouterr().out
    best_rho = float(next(l for l in out.splitlines()
                          if l.startswith("best_rho:")).split()[1])
    assert best_rho <= 1e-8 * spectral_norm(low.data)


def test_bound_two_tau_flag(tmp_path, capsys):
    paths = run_pipeline(tmp_path)
    assert cli_main([
        "bound", "--low", str(paths["low"]), "--high-sub", str(paths["sub"]),
        "--rank", "1", "--two-tau",
    ]) == 0
    out = capsys.readouterr().out
    assert "best_tau2:" in out


def test_efficacy_cli_on_diffusion_pair(tmp_path, capsys):
    assert cli_main([
        "generate", "diffusion", "--samples", "120", "--seed", "3",
        "--out", str(tmp_path / "diff"),
    ]) == 0
    capsys.readouterr()
    assert cli_main([
        "efficacy", "--high", str(tmp_path / "diff.high.bfsm"),
        "--low", str(tmp_path / "diff.low.bfsm"),
        "--rank", "10", "--n", "20", "--trials", "30", "--seed", "1",
        "--out", str(tmp_path / "ratios.csv"),
    ]) == 0
    out = capsys.readouterr().out
    mean = float(next(l for l in out.splitlines()
                      if l.startswith("mean:")).split()[1])
    assert 0.95 <= mean <= 12.0
    table = (tmp_path / "ratios.csv").read_text().splitlines()
    assert table[0] == "trial,ratio"
    assert table[-1].startswith("mean,")


def test_csv_format_pipeline(tmp_path):
    assert cli_main([
        "generate", "beam", "--samples", "10", "--seed", "2",
        "--out", str(tmp_path / "beam"), "--format", "csv",
    ]) == 0
    low = read_snapshots(tmp_path / "beam.low.csv")
    assert low.n_samples == 10


def test_usage_errors_exit_one(tmp_path, capsys):
    assert cli_main(["no-such-command"]) == 1
    assert cli_main(["decompose", "--low", "x.bfsm"]) == 1  # missing mode
    assert cli_main([
        "decompose", "--low", "x.bfsm", "--rank", "1", "--tol", "0.1",
        "--out-id", str(tmp_path / "id.json"),
    ]) == 1  # both modes
    assert cli_main([]) == 1


def test_data_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.bfsm"
    bad.write_bytes(b"NOPE" + b"\x00" * 60)
    assert cli_main([
        "decompose", "--low", str(bad), "--rank", "1",
        "--out-id", str(tmp_path / "id.json"),
    ]) == 2
    missing = tmp_path / "missing.bfsm"
    assert cli_main([
        "decompose", "--low", str(missing), "--rank", "1",
        "--out-id", str(tmp_path / "id.json"),
    ]) == 2
    assert "error" in capsys.readouterr().err


def test_numerical_errors_exit_three(tmp_path, capsys):
    rng = np.random.default_rng(1)
    from bifidelity.snapshots import SnapshotMatrix
    low = SnapshotMatrix.from_array(rng.standard_normal((4, 9)))
    low_path = tmp_path / "low.bfsm"
    write_snapshots(low, low_path)
    assert cli_main([
        "decompose", "--low", str(low_path), "--tol", "0.0",
        "--out-id", str(tmp_path / "id.json"),
    ]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_lift_rejects_misaligned_skeleton(tmp_path):
    paths = run_pipeline(tmp_path)
    high = read_snapshots(paths["high"])
    wrong = high.columns([0])  # not the required sample
    dec, ids = read_id(paths["id"])
    if required_samples(dec, ids)[0] == high.sample_ids[0]:
        wrong = high.columns([1])
    wrong_path = tmp_path / "wrong.bfsm"
    write_snapshots(wrong, wrong_path)
    assert cli_main([
        "lift", "--id", str(paths["id"]), "--high-skeleton", str(wrong_path),
        "--out", str(tmp_path / "out.bfsm"),
    ]) == 2


def test_help_and_version_exit_zero():
    assert cli_main(["--help"]) == 0
    assert cli_main(["--version"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "bifidelity.cli", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
