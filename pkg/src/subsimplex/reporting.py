"""Run artifact emission: delimited outputs, JSON manifest and plots.

Every run directory contains scores.csv, loadings.csv, variance.csv and
per-rank approximation files; PSA runs add merges.csv and per-rank vertex
files, log-ratio PCA adds simplex approximations and the power transform
adds unit-sum hyperplane projections.  All floats are written with a
configurable number of significant digits (17 by default, which round
trips doubles exactly), files are written atomically, and the manifest
echoes the full configuration so a run can be reproduced from it alone.
"""

from __future__ import annotations

import datetime
import json
import os
import platform
import sys

import matplotlib
import numpy as np

from . import __version__
from .benchmarks import PcaResult
from .dataset import (
    DEFAULT_PRECISION,
    Dataset,
    atomic_write_text,
    write_matrix_csv,
)
from .figures import save_loading_bars, save_score_matrix
from .psa_o import PsaODecomposition
from .psa_s import PsaSDecomposition
from .ternary import emit_ternary_svg, rank2_scene, render_scene_svg


def write_run_outputs(result, dataset: Dataset, outdir, config: dict,
                      precision: int = DEFAULT_PRECISION, plots: bool = True,
                      elapsed_seconds: float | None = None) -> dict:
    """Write the full artifact set for one fitted result; returns the manifest."""
    os.makedirs(outdir, exist_ok=True)
    files: list[str] = []

    def emit(name: str, matrix, header, text_columns=None):
        write_matrix_csv(os.path.join(outdir, name), matrix, header,
                         precision, text_columns)
        files.append(name)

    if isinstance(result, (PsaSDecomposition, PsaODecomposition)):
        details = _write_psa(result, dataset, emit)
    elif isinstance(result, PcaResult):
        details = _write_pca(result, dataset, emit)
    else:
        raise TypeError(f"cannot report a {type(result).__name__}")

    if plots:
        files.extend(_write_plots(result, dataset, outdir))

    manifest = {
        "tool": "subsimplex",
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "elapsed_seconds": elapsed_seconds,
        "config": dict(config),
        "environment": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "matplotlib": matplotlib.__version__,
        },
        "results": {
            "n_samples": dataset.n_samples,
            "n_parts": dataset.n_parts,
            "files": sorted(files),
            **details,
        },
    }
    atomic_write_text(os.path.join(outdir, "manifest.json"),
                      json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def psa_mode_names(dimension: int) -> list[str]:
    """Score column names in storage order: rank d first, rank 1 last."""
    return [f"rank_{r}" for r in range(dimension, 0, -1)]


def _write_psa(result, dataset: Dataset, emit) -> dict:
    d = result.dimension
    labels = list(dataset.column_labels)
    mode_names = psa_mode_names(d)

    emit("scores.csv", result.scores, mode_names)
    emit("loadings.csv", result.loadings, labels, {"mode": mode_names})

    rss = np.array([m.rss for m in result.merges])
    total = rss.sum()
    proportions = rss / total if total > 0 else np.zeros_like(rss)
    variance = np.column_stack([rss, proportions, np.cumsum(proportions)])
    emit("variance.csv", variance, ["rss", "proportion", "cumulative"],
         {"mode": mode_names})

    merge_rows = np.array([[m.rank_from, m.merged_pair[0], m.merged_pair[1],
                            m.alpha, m.rss] for m in result.merges])
    emit("merges.csv", merge_rows,
         ["rank_from", "vertex_i", "vertex_j", "alpha", "rss"])

    for rank in range(d, -1, -1):
        vertices = result.vertex_set(rank).vertices
        names = [f"v{k + 1}" for k in range(len(vertices))]
        pooled = ["+".join(labels[p] for p in group)
                  for group in result.partition(rank)]
        emit(f"vertices_rank_{rank}.csv", vertices, labels,
             {"vertex": names, "parts": pooled})
        emit(f"approximations_rank_{rank}.csv", result.approximation(rank), labels)

    details = {
        "method_family": "psa",
        "merges": [
            {"rank_from": m.rank_from, "pair": list(m.merged_pair),
             "alpha": m.alpha, "rss": m.rss}
            for m in result.merges
        ],
        "backwards_mean": [float(v) for v in np.asarray(result.backwards_mean)],
    }
    if isinstance(result, PsaODecomposition):
        details["grid_points"] = result.grid_points
        details["refined"] = result.refined
        details["pole_events"] = [
            {"rank_from": e.rank_from, "sample_index": e.sample_index}
            for e in result.pole_events
        ]
    return details


def _write_pca(result: PcaResult, dataset: Dataset, emit) -> dict:
    labels = list(dataset.column_labels)
    k = result.n_components
    mode_names = [f"pc_{c + 1}" for c in range(k)]
    codomain = _codomain_labels(result, labels)

    emit("scores.csv", result.scores, mode_names)
    emit("loadings.csv", result.part_loadings(dataset.n_parts), labels,
         {"mode": mode_names})

    eigenvalues = result.eigenvalues
    total = eigenvalues.sum()
    proportions = eigenvalues / total if total > 0 else np.zeros_like(eigenvalues)
    variance = np.column_stack([eigenvalues, proportions, np.cumsum(proportions)])
    emit("variance.csv", variance, ["eigenvalue", "proportion", "cumulative"],
         {"mode": mode_names})

    for rank, approx in enumerate(result.approximations):
        emit(f"approximations_rank_{rank}.csv", approx, codomain)
    if result.simplex_approximations is not None:
        for rank, approx in enumerate(result.simplex_approximations):
            emit(f"simplex_approximations_rank_{rank}.csv", approx, labels)
    if result.hyperplane_projections is not None:
        for rank, approx in enumerate(result.hyperplane_projections):
            emit(f"hyperplane_rank_{rank}.csv", approx, labels)

    details = {
        "method_family": "pca",
        "transform": result.transform.kind,
        "eigenvalues": [float(v) for v in eigenvalues],
        "zero_replacement": (result.zero_replacement.replacement
                             if result.zero_replacement is not None else None),
    }
    if result.out_of_simplex is not None:
        details["out_of_simplex_counts"] = [int(f.sum())
                                            for f in result.out_of_simplex]
    return details


def _codomain_labels(result: PcaResult, labels: list[str]) -> list[str]:
    kind = result.transform.kind
    if kind == "clr":
        return [f"clr_{name}" for name in labels]
    if kind == "alr":
        ref = range(len(labels))[result.transform.alr_ref]
        return [f"alr_{name}" for k, name in enumerate(labels) if k != ref]
    if kind == "ilr":
        return [f"ilr_{c + 1}" for c in range(len(labels) - 1)]
    return labels


def _write_plots(result, dataset: Dataset, outdir) -> list[str]:
    files = []
    groups = None
    for column in dataset.row_metadata.values():
        groups = tuple(str(v) for v in column)
        break

    if isinstance(result, (PsaSDecomposition, PsaODecomposition)):
        # first mode of variation first: reverse the stored rank d..1 order
        scores = result.scores[:, ::-1]
        names = [f"rank {r}" for r in range(1, result.dimension + 1)]
        loadings = result.loadings[::-1]
    else:
        scores = result.scores
        names = [f"PC{c + 1}" for c in range(result.n_components)]
        loadings = result.part_loadings(dataset.n_parts)

    save_score_matrix(scores, names, os.path.join(outdir, "scores_matrix.png"),
                      groups=groups)
    files.append("scores_matrix.png")
    keep = min(4, loadings.shape[0])
    save_loading_bars(loadings[:keep], list(dataset.column_labels), names[:keep],
                      os.path.join(outdir, "loadings.png"))
    files.append("loadings.png")

    if dataset.dimension == 2:
        emit_ternary_svg(dataset, result, os.path.join(outdir, "ternary.svg"))
        files.append("ternary.svg")
    elif isinstance(result, (PsaSDecomposition, PsaODecomposition)):
        scene = rank2_scene(result, dataset)
        atomic_write_text(os.path.join(outdir, "ternary_rank2.svg"),
                          render_scene_svg(scene))
        files.append("ternary_rank2.svg")
    return files
