import json
import os
import subprocess
import sys

import numpy as np
import pytest

from subsimplex.cli import main
from subsimplex.dataset import ingest_csv

METHODS = ("psa-s", "psa-o", "pca", "power-pca", "logratio-pca")


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_manifest(outdir):
    with open(os.path.join(outdir, "manifest.json")) as handle:
        return json.load(handle)


def tree_bytes(outdir, skip=("manifest.json",)):
    """Relative path -> content for every file under a run directory."""
    found = {}
    for base, _, names in os.walk(outdir):
        for name in names:
            path = os.path.join(base, name)
            rel = os.path.relpath(path, outdir)
            if rel in skip:
                continue
            with open(path, "rb") as handle:
                found[rel] = handle.read()
    return found


def test_synth_writes_ingestible_csv(tmp_path):
    out = tmp_path / "ex1.csv"
    assert run_cli("synth", "--example", 1, "--seed", 42, "--out", out) == 0
    data = ingest_csv(out, meta=("cluster",))
    assert data.values.shape == (30, 3)
    assert data.row_metadata["cluster"][0] == "1"


def test_run_every_method_emits_the_artifact_set(tmp_path):
    for method in METHODS:
        out = tmp_path / method
        code = run_cli("run", "--method", method, "--example", 1,
                       "--seed", 42, "--out", out)
        assert code == 0
        for name in ("scores.csv", "loadings.csv", "variance.csv",
                     "manifest.json", "scores_matrix.png", "loadings.png",
                     "ternary.svg"):
            assert (out / name).exists(), f"{method} missing {name}"
        manifest = read_manifest(out)
        assert manifest["config"]["method"] == method
        assert manifest["results"]["n_samples"] == 30
        assert sorted(manifest["results"]["files"]) == manifest["results"]["files"]


def test_psa_s_run_layout(tmp_path):
    out = tmp_path / "run"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 42,
            "--out", out)

    header, *rows = (out / "scores.csv").read_text().splitlines()
    assert header == "rank_2,rank_1"
    assert len(rows) == 30

    merges = (out / "merges.csv").read_text().splitlines()
    assert merges[0] == "rank_from,vertex_i,vertex_j,alpha,rss"
    assert len(merges) == 3
    assert merges[1].startswith("2,0,2,")
    assert merges[2].startswith("1,0,1,")

    vertices = (out / "vertices_rank_1.csv").read_text().splitlines()
    assert vertices[0] == "vertex,parts,V1,V2,V3"
    assert vertices[1].startswith("v1,V1+V3,")

    manifest = read_manifest(out)
    assert manifest["results"]["method_family"] == "psa"
    assert [m["pair"] for m in manifest["results"]["merges"]] == [[0, 2], [0, 1]]


def test_approximations_round_trip_through_csv(tmp_path):
    out = tmp_path / "run"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 42,
            "--out", out, "--no-plots")
    original = ingest_csv(out / "approximations_rank_2.csv")
    reduced = ingest_csv(out / "approximations_rank_1.csv")
    assert original.values.shape == reduced.values.shape == (30, 3)
    # rank-d approximations are the data themselves
    synth = tmp_path / "ex1.csv"
    run_cli("synth", "--example", 1, "--seed", 42, "--out", synth)
    data = ingest_csv(synth, meta=("cluster",))
    np.testing.assert_allclose(original.values, data.values,
                               rtol=0.0, atol=1e-9)


def test_pca_run_layout(tmp_path):
    out = tmp_path / "run"
    run_cli("run", "--method", "logratio-pca", "--logratio", "ilr",
            "--example", 1, "--seed", 42, "--out", out, "--no-plots")
    header, *rows = (out / "scores.csv").read_text().splitlines()
    assert header == "pc_1,pc_2"
    approx = (out / "approximations_rank_1.csv").read_text().splitlines()
    assert approx[0] == "ilr_1,ilr_2"
    simplex = (out / "simplex_approximations_rank_1.csv").read_text().splitlines()
    assert simplex[0] == "V1,V2,V3"
    loadings = (out / "loadings.csv").read_text().splitlines()
    assert loadings[0] == "mode,V1,V2,V3"
    manifest = read_manifest(out)
    assert manifest["results"]["transform"] == "ilr"
    assert manifest["results"]["zero_replacement"] is not None


def test_power_pca_emits_hyperplane_files(tmp_path):
    out = tmp_path / "run"
    run_cli("run", "--method", "power-pca", "--exponent", 0.5,
            "--example", 1, "--seed", 42, "--out", out, "--no-plots")
    assert (out / "hyperplane_rank_1.csv").exists()
    manifest = read_manifest(out)
    assert manifest["results"]["out_of_simplex_counts"][1] >= 0


def test_reruns_are_byte_identical(tmp_path):
    first = tmp_path / "first"
    second = tmp_path / "second"
    for out in (first, second):
        run_cli("run", "--method", "psa-o", "--example", 2, "--seed", 42,
                "--out", out)
    assert tree_bytes(first) == tree_bytes(second)


def test_from_manifest_reproduces_a_run(tmp_path):
    first = tmp_path / "first"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 7,
            "--out", first)
    again = tmp_path / "again"
    assert run_cli("run", "--from-manifest", first / "manifest.json",
                   "--out", again) == 0
    assert tree_bytes(first) == tree_bytes(again)
    # overrides still apply on top of the stored configuration
    refit = tmp_path / "refit"
    run_cli("run", "--from-manifest", first / "manifest.json",
            "--method", "pca", "--out", refit)
    assert read_manifest(refit)["config"]["method"] == "pca"


def test_run_accepts_external_csv(tmp_path):
    synth = tmp_path / "data.csv"
    run_cli("synth", "--example", 1, "--seed", 42, "--out", synth)
    out = tmp_path / "run"
    code = run_cli("run", "--method", "psa-s", "--input", synth,
                   "--meta", "cluster", "--out", out, "--no-plots")
    assert code == 0
    direct = tmp_path / "direct"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 42,
            "--out", direct, "--no-plots")
    # ingestion renormalizes rows, nudging values by one ulp, so the
    # two score files agree numerically rather than byte for byte
    via_csv = np.loadtxt(out / "scores.csv", delimiter=",", skiprows=1)
    in_memory = np.loadtxt(direct / "scores.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(via_csv, in_memory, rtol=0.0, atol=1e-12)


def test_zero_column_dataset_reports_replacement(tmp_path):
    path = tmp_path / "zeros.csv"
    path.write_text("A,B,C\n0.25,0.75,0\n0.5,0.5,0\n0.4,0.6,0\n")
    out = tmp_path / "run"
    code = run_cli("run", "--method", "logratio-pca", "--input", path,
                   "--out", out, "--no-plots")
    assert code == 0
    manifest = read_manifest(out)
    assert manifest["results"]["zero_replacement"] == pytest.approx(0.125)


def test_exit_codes(tmp_path):
    assert run_cli("run", "--method", "psa-s", "--input", tmp_path / "no.csv",
                   "--out", tmp_path / "o") == 2
    assert run_cli("run", "--method", "psa-s",
                   "--out", tmp_path / "o") == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("A,B\n0.5,0.4\n")
    assert run_cli("run", "--method", "psa-s", "--input", bad,
                   "--out", tmp_path / "o") == 3
    unparseable = tmp_path / "cells.csv"
    unparseable.write_text("A,B\n0.5,oops\n")
    assert run_cli("run", "--method", "psa-s", "--input", unparseable,
                   "--out", tmp_path / "o") == 2


def test_precision_flag_and_environment(tmp_path, monkeypatch):
    short = tmp_path / "short"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 42,
            "--out", short, "--no-plots", "--precision", 3)
    line = (short / "scores.csv").read_text().splitlines()[1]
    for cell in line.split(","):
        # every cell is already at 3-significant-digit resolution
        assert format(float(cell), ".3g") == cell

    monkeypatch.setenv("SUBSIMPLEX_PRECISION", "3")
    via_env = tmp_path / "env"
    run_cli("run", "--method", "psa-s", "--example", 1, "--seed", 42,
            "--out", via_env, "--no-plots")
    assert ((via_env / "scores.csv").read_text()
            == (short / "scores.csv").read_text())

    monkeypatch.setenv("SUBSIMPLEX_PRECISION", "nope")
    assert run_cli("run", "--method", "psa-s", "--example", 1,
                   "--out", tmp_path / "e") == 2


def test_console_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "subsimplex.cli", "--version"],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert "subsimplex" in result.stdout


def test_synth_example2_with_options(tmp_path):
    out = tmp_path / "ex2.csv"
    assert run_cli("synth", "--example", 2, "--seed", 3, "--out", out,
                   "--cluster-sizes", "2,2,2,2", "--noise-sd", 0.01) == 0
    data = ingest_csv(out, meta=("cluster",))
    assert data.values.shape == (8, 6)
