"""End-to-end runs of the command line driver.

Most tests call main() in process to reuse the warmed kernels; one
subprocess test checks the installed entry point for real.
"""

import contextlib
import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rfkcert.cli import _exit_code, main
from rfkcert.report import VERDICT_EQUALITY, VERDICT_HOLDS, VERDICT_VIOLATED
from rfkcert.serialize import read_json, sha256_file


def run(tmp_path, *argv):
    err = io.StringIO()
    with contextlib.redirect_stderr(err):
        code = main([*argv, "--outdir", str(tmp_path)])
    return code, err.getvalue()


def manifest(tmp_path):
    return read_json(str(tmp_path / "manifest.json"))


def test_entry_point(tmp_path):
    proc = subprocess.run(
        ["rfkcert", "radial", "--R0", "1", "--R1", "2", "--outdir", str(tmp_path)],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "radial_pair.csv").exists()
    assert (tmp_path / "radial_pair.json").exists()


def test_radial_writes_pair_and_manifest(tmp_path):
    code, _ = run(tmp_path, "radial", "--R0", "1", "--R1", "2", "--N", "3")
    assert code == 0
    side = read_json(str(tmp_path / "radial_pair.json"))
    assert side["lambda"] > 0
    assert side["problem"]["N"] == 3
    man = manifest(tmp_path)
    names = {e["path"] for e in man["files"]}
    assert names == {"radial_pair.csv", "radial_pair.json"}
    assert all(not e["stale"] for e in man["files"])
    assert man["command"] == "radial"
    assert man["config"]["N"] == 3
    assert "outdir" not in man["config"]


def test_verify_theorem1_names_file_by_parameters(tmp_path):
    code, _ = run(tmp_path, "verify", "theorem1", "--R0", "0.5", "--R1", "2",
                  "--e", "0.3", "--grid", "256")
    assert code == 0
    rep = read_json(str(tmp_path / "theorem1_N2_p2_e0_3.json"))
    assert rep["verdict"] == VERDICT_HOLDS
    assert rep["quotient"] <= rep["reference"]


def test_config_file_sets_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("R0 = 0.5\nR1 = 2\ne = 0.25\nN = 3\ngrid = 256\n# comment\n")
    code, _ = run(tmp_path, "--config", str(cfg), "verify", "theorem1")
    assert code == 0
    assert (tmp_path / "theorem1_N3_p2_e0_25.json").exists()


def test_flag_wins_over_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("R0 = 0.5\nR1 = 2\ne = 0.25\nN = 3\ngrid = 256\n")
    code, _ = run(tmp_path, "--config", str(cfg), "verify", "theorem1", "--e", "1.0")
    assert code == 0
    assert (tmp_path / "theorem1_N3_p2_e1.json").exists()


def test_unknown_config_key_is_a_json_error(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("R0 = 0.5\nR1 = 2\nwidth = 3\n")
    code, err = run(tmp_path, "--config", str(cfg), "verify", "theorem1")
    assert code == 1
    diag = json.loads(err)
    assert "width" in diag["message"]


def test_invalid_domain_reports_and_records(tmp_path):
    code, err = run(tmp_path, "verify", "theorem1", "--R0", "2", "--R1", "1")
    assert code == 1
    diag = json.loads(err)
    assert diag["error"]
    man = manifest(tmp_path)
    assert "error" in man
    assert man["files"] == []


def test_iso_random_batch_is_deterministic(tmp_path):
    outs = []
    for tag in ("one", "two"):
        d = tmp_path / tag
        d.mkdir()
        code, _ = run(d, "verify", "iso", "--random", "6", "--seed", "3",
                      "--grid", "256")
        assert code == 0
        outs.append(d)
    for name in ("iso_batch.csv", "iso_summary.json"):
        assert sha256_file(str(outs[0] / name)) == sha256_file(str(outs[1] / name))
    summary = read_json(str(outs[0] / "iso_summary.json"))
    assert summary["count"] == 6
    assert summary["equality_indices"] == [0, 1]


def test_nodal_candidate_and_counterexample(tmp_path):
    code, _ = run(tmp_path, "nodal", "candidate", "--R1", "1", "--which", "mu2")
    assert code == 0
    cand = read_json(str(tmp_path / "nodal_candidate_mu2.json"))
    assert cand["candidate_value"] == pytest.approx(14.681970642123895, rel=1e-9)

    code, _ = run(tmp_path, "nodal", "counterexample", "--R1", "1",
                  "--which", "mu2", "--s", "0.05", "--grid", "256")
    assert code == 0
    rep = read_json(str(tmp_path / "nodal_mu2_s0_05.json"))
    assert rep["verdict"] == VERDICT_HOLDS


def test_sweep_two_points(tmp_path):
    code, _ = run(tmp_path, "sweep", "nu1", "--R0", "0.5", "--R1", "2",
                  "--from", "0", "--to", "0.4", "--steps", "2",
                  "--h2d", "0.08", "--grid", "256")
    assert code == 0
    rows = (tmp_path / "sweep_nu1.csv").read_text().splitlines()
    assert rows[0] == "e,nu1_oracle,transplant_quotient,reference"
    assert len(rows) == 3
    first = read_json(str(tmp_path / "sweep_nu1_000.json"))
    last = read_json(str(tmp_path / "sweep_nu1_001.json"))
    assert first["e"] == 0.0
    # the oracle eigenvalue drops as the hole moves off center
    assert last["nu1_oracle"] < first["nu1_oracle"]


def test_elasticity_with_dirichlet_limit(tmp_path):
    code, _ = run(tmp_path, "elasticity", "--R0", "1", "--R1", "2",
                  "--k", "1e6", "--dirichlet-limit", "--grid", "256")
    assert code == 0
    rep = read_json(str(tmp_path / "elasticity_k1e06.json"))
    assert rep["verdict"] == VERDICT_EQUALITY
    assert rep["meta"]["dirichlet_limit"]["rel_gap"] < 1e-3


def test_oracle2d_writes_mesh_on_request(tmp_path):
    code, _ = run(tmp_path, "oracle2d", "--R0", "1", "--R1", "2",
                  "--h", "0.15", "--write-mesh")
    assert code == 0
    assert (tmp_path / "plane_pair.csv").exists()
    assert (tmp_path / "mesh.txt").exists()


def test_maps_and_lemmas(tmp_path):
    code, _ = run(tmp_path, "maps", "--R0", "0.5", "--R1", "2", "--e", "0.3",
                  "--grid", "256")
    assert code == 0
    maps = read_json(str(tmp_path / "maps.json"))
    assert maps["t_omega"] > 0

    code, _ = run(tmp_path, "verify", "lemmas", "--R0", "0.5", "--R1", "2",
                  "--e", "0.3", "--grid", "256")
    assert code == 0
    lemmas = read_json(str(tmp_path / "lemmas.json"))
    assert set(lemmas) - {"schema"} == {"r_prime_bound", "g_vs_reference",
                                        "depth_order", "volume_identity",
                                        "area_radius_form"}


def test_exit_codes_by_verdict():
    assert _exit_code([]) == 0
    assert _exit_code([VERDICT_HOLDS, VERDICT_EQUALITY]) == 0
    assert _exit_code([VERDICT_HOLDS, "Inconclusive"]) == 1
    assert _exit_code([VERDICT_HOLDS, VERDICT_VIOLATED]) == 2
