"""Benchmark PCA variants for compositional data.

Three routes into Euclidean space are provided, each followed by ordinary
PCA (column centering, covariance with divisor n-1, symmetric
eigendecomposition):

* identity - PCA directly on the compositions; rank-k approximations may
  leave the simplex, which is flagged per sample rather than clamped;
* power - entrywise x**alpha (default 1/2, which maps the simplex onto
  the unit sphere); approximations live in transform space and are also
  projected orthogonally onto the unit-sum hyperplane for plotting;
* log ratios - clr, alr or ilr, which require strictly positive entries;
  zeros are first replaced by half the smallest nonzero entry of the
  whole matrix (rows renormalized), and approximations map back to the
  simplex through the inverse transform.

The clr image of any dataset sums to zero, so clr covariance always has
the 1-vector in its null space; ilr applies the lower rows of a Helmert
matrix to clr and is an isometry onto one dimension less.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, as_matrix
from .errors import (
    AllZeroMatrix,
    DimensionMismatch,
    EmptyDataset,
    NonPositiveEntry,
    ValidationError,
)

TRANSFORM_KINDS = ("identity", "power", "clr", "alr", "ilr")

#: Default zero replacement: this fraction of the smallest nonzero entry.
DEFAULT_ZERO_FACTOR = 0.5

#: Default power transform exponent (square root).
DEFAULT_EXPONENT = 0.5


@dataclass(frozen=True)
class TransformSpec:
    """How raw compositions are mapped into PCA space.

    ``exponent`` applies to the power kind only; ``zero_factor`` scales
    the smallest nonzero entry when log-ratio kinds replace zeros, and
    ``renormalize`` controls whether rows are rescaled to unit sum after
    replacement.  ``alr_ref`` picks the alr divisor column (default the
    last).
    """

    kind: str = "identity"
    exponent: float = DEFAULT_EXPONENT
    zero_factor: float = DEFAULT_ZERO_FACTOR
    renormalize: bool = True
    alr_ref: int = -1

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValidationError(
                f"transform kind must be one of {TRANSFORM_KINDS}, got {self.kind!r}"
            )
        if not self.exponent > 0.0:
            raise ValidationError(f"exponent must be positive, got {self.exponent!r}")
        if not self.zero_factor > 0.0:
            raise ValidationError(
                f"zero_factor must be positive, got {self.zero_factor!r}"
            )

    @property
    def is_logratio(self) -> bool:
        return self.kind in ("clr", "alr", "ilr")


@dataclass(frozen=True, eq=False)
class ZeroReplacement:
    """Zero-substituted matrix plus what was done to obtain it."""

    values: np.ndarray
    mask: np.ndarray
    replacement: float
    renormalized: bool


@dataclass(frozen=True, eq=False)
class PcaResult:
    """PCA in transform space, with maps back toward the simplex.

    ``components`` rows are ordered by nonincreasing eigenvalue, each with
    its largest-magnitude entry positive.  ``approximations[k]`` is the
    rank-k reconstruction in transform space for k = 0..n_components.
    ``simplex_approximations`` exists for log-ratio kinds (the inverse
    transform of each reconstruction); ``hyperplane_projections`` exists
    for the power kind (reconstructions projected onto the unit-sum
    hyperplane); ``out_of_simplex`` flags rows of per-rank approximations
    with a negative coordinate, where approximations are comparable to
    compositions (identity and power kinds).
    """

    transform: TransformSpec
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    scores: np.ndarray
    approximations: tuple[np.ndarray, ...]
    simplex_approximations: tuple[np.ndarray, ...] | None = None
    hyperplane_projections: tuple[np.ndarray, ...] | None = None
    out_of_simplex: tuple[np.ndarray, ...] | None = None
    zero_replacement: ZeroReplacement | None = field(default=None)

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def n_samples(self) -> int:
        return self.scores.shape[0]

    def part_loadings(self, n_parts: int) -> np.ndarray:
        """Components expressed over the original parts.

        clr, identity and power components already live there; ilr
        components are pulled back through the Helmert rows; alr
        components get a zero at the reference column.
        """
        if self.transform.kind == "ilr":
            return self.components @ helmert_submatrix(n_parts)
        if self.transform.kind == "alr":
            ref = range(n_parts)[self.transform.alr_ref]
            out = np.zeros((self.n_components, n_parts))
            keep = [k for k in range(n_parts) if k != ref]
            out[:, keep] = self.components
            return out
        return self.components


# --- transforms --------------------------------------------------------

def _positive_matrix(x) -> np.ndarray:
    matrix = np.asarray(x, dtype=float)
    if np.any(matrix <= 0.0):
        raise NonPositiveEntry("log-ratio transforms need strictly positive entries")
    return matrix


def clr(x) -> np.ndarray:
    """Centered log ratio: log(x) minus its row mean.  Rows sum to zero."""
    logs = np.log(_positive_matrix(x))
    return logs - logs.mean(axis=-1, keepdims=True)


def clr_inv(w) -> np.ndarray:
    """Inverse clr: exponentiate and renormalize rows to unit sum."""
    e = np.exp(np.asarray(w, dtype=float))
    return e / e.sum(axis=-1, keepdims=True)


def alr(x, ref: int = -1) -> np.ndarray:
    """Additive log ratio against the ``ref`` column (default the last).

    Output keeps the input column order with the reference removed.
    """
    matrix = _positive_matrix(x)
    m = matrix.shape[-1]
    ref = range(m)[ref]
    keep = [k for k in range(m) if k != ref]
    return np.log(matrix[..., keep] / matrix[..., ref, np.newaxis])


def alr_inv(w, ref: int = -1) -> np.ndarray:
    """Inverse alr: insert a zero log ratio at ``ref``, exponentiate, renormalize."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    m = w.shape[-1] + 1
    ref = range(m)[ref]
    logs = np.insert(w, ref, 0.0, axis=-1)
    e = np.exp(logs)
    return e / e.sum(axis=-1, keepdims=True)


def helmert_submatrix(m: int) -> np.ndarray:
    """Rows 2..m of the order-m Helmert matrix (orthonormal, zero-sum rows)."""
    if m < 2:
        raise DimensionMismatch(f"Helmert submatrix needs m >= 2, got {m}")
    h = np.zeros((m - 1, m))
    for k in range(1, m):
        scale = 1.0 / np.sqrt(k * (k + 1))
        h[k - 1, :k] = scale
        h[k - 1, k] = -k * scale
    return h


def ilr(x) -> np.ndarray:
    """Isometric log ratio: Helmert rows applied to clr.  Preserves norms."""
    matrix = _positive_matrix(x)
    return clr(matrix) @ helmert_submatrix(matrix.shape[-1]).T


def ilr_inv(w) -> np.ndarray:
    """Inverse ilr back through clr."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    return clr_inv(w @ helmert_submatrix(w.shape[-1] + 1))


def power_transform(x, exponent: float = DEFAULT_EXPONENT) -> np.ndarray:
    """Entrywise power x**exponent; 1/2 maps compositions to unit vectors."""
    if not exponent > 0.0:
        raise ValidationError(f"exponent must be positive, got {exponent!r}")
    matrix = np.asarray(x, dtype=float)
    if np.any(matrix < 0.0):
        raise NonPositiveEntry("power transform needs nonnegative entries")
    return matrix ** exponent


def zero_replace(data, factor: float = DEFAULT_ZERO_FACTOR,
                 renormalize: bool = True) -> ZeroReplacement:
    """Replace every zero by ``factor`` times the smallest nonzero entry.

    The replacement value is global to the matrix.  Rows are renormalized
    to unit sum afterwards unless ``renormalize`` is false; the returned
    mask is True where the original entry was zero.
    """
    matrix = np.asarray(as_matrix(data) if not isinstance(data, np.ndarray) else data,
                        dtype=float).copy()
    if np.any(matrix < 0.0):
        raise NonPositiveEntry("zero replacement needs nonnegative entries")
    mask = matrix == 0.0
    if np.all(mask):
        raise AllZeroMatrix("zero replacement needs at least one nonzero entry")
    if not factor > 0.0:
        raise ValidationError(f"factor must be positive, got {factor!r}")
    replacement = factor * float(matrix[~mask].min())
    matrix[mask] = replacement
    if renormalize:
        matrix /= matrix.sum(axis=-1, keepdims=True)
    matrix.setflags(write=False)
    return ZeroReplacement(matrix, mask, replacement, bool(renormalize))


# --- PCA ---------------------------------------------------------------

def pca(matrix, transform: TransformSpec | None = None) -> PcaResult:
    """Ordinary PCA of ``matrix`` under the given transform.

    ``matrix`` may be a Dataset or an (n, m) array of compositions; n >= 2
    is required.  See ``PcaResult`` for the layout of the output.
    """
    transform = transform or TransformSpec()
    if isinstance(matrix, (Dataset,)):
        raw = matrix.values
    else:
        raw = np.atleast_2d(np.asarray(matrix, dtype=float))
    if raw.ndim != 2:
        raise DimensionMismatch("PCA input must be a 2-d matrix")
    if raw.shape[0] < 2:
        raise EmptyDataset("PCA needs at least two rows")

    replacement = None
    if transform.is_logratio and np.any(raw == 0.0):
        replacement = zero_replace(raw, transform.zero_factor, transform.renormalize)
        raw = replacement.values

    if transform.kind == "identity":
        transformed = raw
    elif transform.kind == "power":
        transformed = power_transform(raw, transform.exponent)
    elif transform.kind == "clr":
        transformed = clr(raw)
    elif transform.kind == "alr":
        transformed = alr(raw, transform.alr_ref)
    else:
        transformed = ilr(raw)

    mean = transformed.mean(axis=0)
    centered = transformed - mean
    covariance = centered.T @ centered / (len(centered) - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = eigenvectors[:, order].T
    # deterministic sign: the largest-magnitude entry of each component
    # is positive
    for row in components:
        if row[int(np.argmax(np.abs(row)))] < 0.0:
            row *= -1.0
    scores = centered @ components.T

    approximations = tuple(
        _ro(mean + scores[:, :k] @ components[:k])
        for k in range(components.shape[0] + 1)
    )

    simplex_approximations = None
    hyperplane = None
    out_flags = None
    if transform.kind == "clr":
        simplex_approximations = tuple(_ro(clr_inv(a)) for a in approximations)
    elif transform.kind == "alr":
        simplex_approximations = tuple(_ro(alr_inv(a, transform.alr_ref))
                                       for a in approximations)
    elif transform.kind == "ilr":
        simplex_approximations = tuple(_ro(ilr_inv(a)) for a in approximations)
    elif transform.kind == "identity":
        out_flags = tuple(np.any(a < -1e-12, axis=1) for a in approximations)
    else:  # power
        hyperplane = tuple(_ro(_project_to_unit_sum(a)) for a in approximations)
        out_flags = tuple(np.any(p < -1e-12, axis=1) for p in hyperplane)

    return PcaResult(
        transform=transform,
        mean=_ro(mean),
        components=_ro(components),
        eigenvalues=_ro(eigenvalues),
        scores=_ro(scores),
        approximations=approximations,
        simplex_approximations=simplex_approximations,
        hyperplane_projections=hyperplane,
        out_of_simplex=out_flags,
        zero_replacement=replacement,
    )


def _project_to_unit_sum(points: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the hyperplane of unit-sum vectors."""
    points = np.asarray(points, dtype=float)
    m = points.shape[-1]
    excess = (points.sum(axis=-1, keepdims=True) - 1.0) / m
    return points - excess


def _ro(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.setflags(write=False)
    return out
