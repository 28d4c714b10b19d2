"""Seeded synthetic compositional datasets.

Example 1 draws four Gaussian clusters around fixed three-part centers,
clips negatives to zero and renormalizes rows to unit sum; cluster labels
ride along as row metadata.  Example 2 extends each Example 1 row with
three pure-noise coordinates before the same clip-and-renormalize step.

Randomness comes from numpy's PCG64 generator, which produces identical
streams for identical seeds on every platform.  The seed is split into
two independent child streams (cluster draws, noise draws), so the first
three columns of Example 2 match Example 1 for the same seed up to the
final renormalization.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .errors import ValidationError

#: Cluster centers; one row per cluster.
EXAMPLE1_CENTERS = np.array([
    [0.05, 0.05, 0.90],
    [0.05, 0.90, 0.05],
    [0.90, 0.05, 0.05],
    [0.25, 0.70, 0.05],
])

#: Samples drawn around each center.  Chosen so that the dominant modes
#: of variation recover the cluster structure: the first backwards merge
#: has to combine the first and third parts, which needs the third
#: cluster (heavy in part 1) to outweigh the first (heavy in part 3).
DEFAULT_CLUSTER_SIZES = (5, 10, 10, 5)

#: Isotropic within-cluster standard deviation.
DEFAULT_SD = 0.04

#: Number of appended pure-noise coordinates in Example 2.
NOISE_PARTS = 3


def _cluster_draws(rng: np.random.Generator, cluster_sizes, sd: float) -> tuple[np.ndarray, tuple[str, ...]]:
    cluster_sizes = tuple(int(s) for s in cluster_sizes)
    if len(cluster_sizes) != len(EXAMPLE1_CENTERS):
        raise ValidationError(
            f"need {len(EXAMPLE1_CENTERS)} cluster sizes, got {len(cluster_sizes)}"
        )
    if any(s < 0 for s in cluster_sizes) or sum(cluster_sizes) < 1:
        raise ValidationError(f"cluster sizes must be nonnegative and nonempty")
    if sd < 0.0:
        raise ValidationError(f"standard deviation must be nonnegative, got {sd!r}")
    rows = []
    labels = []
    for k, (center, size) in enumerate(zip(EXAMPLE1_CENTERS, cluster_sizes)):
        rows.append(center + rng.normal(0.0, sd, size=(size, len(center))))
        labels.extend([str(k + 1)] * size)
    return np.vstack(rows), tuple(labels)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    base, noise = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(base), np.random.default_rng(noise)


def generate_example1(seed: int, cluster_sizes=DEFAULT_CLUSTER_SIZES,
                      sd: float = DEFAULT_SD) -> Dataset:
    """Four three-part clusters: clip negatives to zero, then renormalize."""
    cluster_rng, _ = _streams(seed)
    raw, labels = _cluster_draws(cluster_rng, cluster_sizes, sd)
    clipped = np.clip(raw, 0.0, None)
    values = clipped / clipped.sum(axis=1, keepdims=True)
    return Dataset(values, ("V1", "V2", "V3"), {"cluster": labels})


def generate_example2(seed: int, cluster_sizes=DEFAULT_CLUSTER_SIZES,
                      sd: float = DEFAULT_SD, noise_sd: float = DEFAULT_SD) -> Dataset:
    """Example 1 rows extended with pure-noise coordinates.

    Noise columns are drawn from N(0, noise_sd^2) on an independent
    stream, appended to the finished Example 1 rows, clipped at zero,
    and the widened rows renormalized to unit sum.
    """
    if noise_sd < 0.0:
        raise ValidationError(f"noise sd must be nonnegative, got {noise_sd!r}")
    base = generate_example1(seed, cluster_sizes, sd)
    _, noise_rng = _streams(seed)
    noise = noise_rng.normal(0.0, noise_sd, size=(base.n_samples, NOISE_PARTS))
    widened = np.hstack([base.values, np.clip(noise, 0.0, None)])
    values = widened / widened.sum(axis=1, keepdims=True)
    labels = base.column_labels + tuple(f"N{k + 1}" for k in range(NOISE_PARTS))
    return Dataset(values, labels, dict(base.row_metadata))
