"""Principal subsimplex analysis in simplex geometry (PSA-S).

The decomposition runs backwards: starting from the full simplex it
repeatedly replaces one pair of vertices (v_i, v_j) by the single vertex
alpha*v_i + (1-alpha)*v_j, producing a nested sequence of subsimplices of
rank d, d-1, ..., 0.  Data points follow through the mass-preserving
projection that pools the two merged barycentric coordinates, and the
signed residual of each sample at rank r is its score

    s = sqrt(2) * (-(1-alpha)*x_i + alpha*x_j),

where x_i, x_j are the sample's coordinates on the merged pair.  At every
rank the pair and alpha minimizing the residual sum of squares are chosen;
alpha has a closed form.  The rank-0 vertex is the backwards mean.

Vertices are convex combinations of the original unit vectors, so a
vertex's ambient coordinates are exactly the cumulative weights of the
original parts pooled into it; ``partitions`` records which parts those
are for each vertex at each rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix
from .errors import (
    DegeneratePair,
    DimensionMismatch,
    OutOfSimplex,
    RankZero,
    ValidationError,
)
from .geometry import Composition, SimplexVertexSet, as_array

SQRT2 = float(np.sqrt(2.0))

#: RSS gap treated as a tie when selecting the merge pair.
RSS_TIE_TOL = 1e-12

#: Entries of a mode-of-variation point may round this far below zero.
MODE_NEGATIVE_TOL = -1e-9


@dataclass(frozen=True)
class MergeRecord:
    """One backwards merge: rank r -> r-1.

    ``merged_pair`` holds 0-based indexes (i, j), i < j, into the rank-r
    vertex list; ``alpha`` is the weight of vertex i in the new vertex and
    ``rss`` the sum of squared rank-r scores.
    """

    rank_from: int
    merged_pair: tuple[int, int]
    alpha: float
    rss: float


@dataclass(frozen=True, eq=False)
class PsaSDecomposition:
    """Full output of a PSA-S fit.

    Per-rank sequences run from rank d down to rank 0 (or down to rank 1
    for quantities attached to merges); use ``vertex_set``, ``merge``,
    ``approximation``, ``coefficients_at`` and ``score_column`` to index
    by rank instead of position.  ``scores`` column k holds the rank
    (d - k) scores, so the last column is the first mode of variation.
    """

    vertex_sets: tuple[SimplexVertexSet, ...]
    merges: tuple[MergeRecord, ...]
    scores: np.ndarray
    loadings: np.ndarray
    approximations: tuple[np.ndarray, ...]
    coefficients: tuple[np.ndarray, ...]
    partitions: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.merges)

    @property
    def n_samples(self) -> int:
        return self.scores.shape[0]

    def _merge_index(self, rank: int) -> int:
        if not 1 <= rank <= self.dimension:
            raise DimensionMismatch(f"rank must be in 1..{self.dimension}, got {rank}")
        return self.dimension - rank

    def _rank_index(self, rank: int) -> int:
        if not 0 <= rank <= self.dimension:
            raise DimensionMismatch(f"rank must be in 0..{self.dimension}, got {rank}")
        return self.dimension - rank

    def vertex_set(self, rank: int) -> SimplexVertexSet:
        return self.vertex_sets[self._rank_index(rank)]

    def merge(self, rank: int) -> MergeRecord:
        return self.merges[self._merge_index(rank)]

    def approximation(self, rank: int) -> np.ndarray:
        return self.approximations[self._rank_index(rank)]

    def coefficients_at(self, rank: int) -> np.ndarray:
        return self.coefficients[self._rank_index(rank)]

    def partition(self, rank: int) -> tuple[tuple[int, ...], ...]:
        return self.partitions[self._rank_index(rank)]

    def score_column(self, rank: int) -> np.ndarray:
        return self.scores[:, self._merge_index(rank)]

    def loading(self, rank: int) -> np.ndarray:
        return self.loadings[self._merge_index(rank)]

    @property
    def backwards_mean(self) -> Composition:
        return Composition(self.vertex_sets[-1].vertices[0])


def merge_vertices(basis: SimplexVertexSet, i: int, j: int, alpha: float) -> SimplexVertexSet:
    """Replace vertices i and j by alpha*v_i + (1-alpha)*v_j.

    The new vertex comes first, followed by the untouched vertices in
    their original order.
    """
    vertices = as_array(basis)
    _check_pair(len(vertices), i, j)
    if len(vertices) < 2:
        raise RankZero("cannot merge vertices of a rank-0 set")
    _check_alpha(alpha)
    merged = alpha * vertices[i] + (1.0 - alpha) * vertices[j]
    rest = np.delete(vertices, (i, j), axis=0)
    return SimplexVertexSet(np.vstack([merged[np.newaxis, :], rest]))


def project_mass_preserving(coeffs, i: int, j: int, alpha: float) -> np.ndarray:
    """Barycentric coordinates after the (i, j) merge: pooled mass first.

    The pooled coordinate x_i + x_j goes to position 0 and the remaining
    coordinates keep their order; ``alpha`` fixes where the merged vertex
    sits but does not enter the pooled coordinates.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    m = coeffs.shape[-1]
    _check_pair(m, i, j)
    _check_alpha(alpha)
    pooled = coeffs[..., i] + coeffs[..., j]
    rest = np.delete(coeffs, (i, j), axis=-1)
    return np.concatenate([pooled[..., np.newaxis], rest], axis=-1)


def optimal_alpha(coeffs, i: int, j: int) -> float:
    """Closed-form RSS-minimizing merge weight for the pair (i, j).

    With x_1 = column i and x_2 = column j of the coordinate matrix,

        alpha = sum(x_1 * (x_1 + x_2)) / sum((x_1 + x_2)^2),

    clipped into [0, 1].  Raises ``DegeneratePair`` when the pair carries
    no mass in any sample (zero denominator).
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    _check_pair(coeffs.shape[1], i, j)
    xi = coeffs[:, i]
    xj = coeffs[:, j]
    pooled = xi + xj
    denominator = float(pooled @ pooled)
    if denominator == 0.0:
        raise DegeneratePair(f"pair ({i}, {j}) carries zero mass in every sample")
    alpha = float(xi @ pooled) / denominator
    return float(np.clip(alpha, 0.0, 1.0))


def score(coeffs_row, i: int, j: int, alpha: float) -> float:
    """Signed rank-r score of one sample for the (i, j) merge at ``alpha``."""
    row = np.asarray(coeffs_row, dtype=float)
    _check_pair(row.shape[-1], i, j)
    _check_alpha(alpha)
    return float(SQRT2 * (-(1.0 - alpha) * row[..., i] + alpha * row[..., j]))


def fit(data) -> PsaSDecomposition:
    """Run the full backwards sweep from rank d to rank 0."""
    X = as_matrix(data)
    n, m = X.shape
    if m < 2:
        raise DimensionMismatch("need at least two parts to decompose")
    d = m - 1

    coeffs = X.copy()
    vertices = np.eye(m)
    groups: list[tuple[int, ...]] = [(k,) for k in range(m)]

    vertex_sets = [SimplexVertexSet(vertices)]
    coefficients = [_frozen(coeffs)]
    approximations = [_frozen(X)]
    partitions = [tuple(groups)]
    merges: list[MergeRecord] = []
    score_columns: list[np.ndarray] = []
    loading_rows: list[np.ndarray] = []

    for rank in range(d, 0, -1):
        i, j, alpha = _best_pair(coeffs)
        scores = SQRT2 * (alpha * coeffs[:, j] - (1.0 - alpha) * coeffs[:, i])
        rss = float(scores @ scores)

        loading_rows.append(vertices[j] - vertices[i])
        merges.append(MergeRecord(rank, (i, j), alpha, rss))
        score_columns.append(scores)

        merged_vertex = alpha * vertices[i] + (1.0 - alpha) * vertices[j]
        vertices = np.vstack([merged_vertex[np.newaxis, :],
                              np.delete(vertices, (i, j), axis=0)])
        coeffs = project_mass_preserving(coeffs, i, j, alpha)
        groups = [groups[i] + groups[j]] + [g for k, g in enumerate(groups)
                                            if k not in (i, j)]

        vertex_sets.append(SimplexVertexSet(vertices))
        coefficients.append(_frozen(coeffs))
        approximations.append(_frozen(coeffs @ vertices))
        partitions.append(tuple(groups))

    return PsaSDecomposition(
        vertex_sets=tuple(vertex_sets),
        merges=tuple(merges),
        scores=_frozen(np.column_stack(score_columns)),
        loadings=_frozen(np.vstack(loading_rows)),
        approximations=tuple(approximations),
        coefficients=tuple(coefficients),
        partitions=tuple(partitions),
    )


def mode_of_variation(decomposition: PsaSDecomposition, rank: int, t: float) -> Composition:
    """Point at parameter ``t`` along the rank-``rank`` mode of variation.

    The mode is the line through the backwards mean in the direction of
    the rank-``rank`` loading, traversed so that t equals the rank-r score:
    v0 + (t / sqrt(2)) * l_r.  Raises ``OutOfSimplex`` when any coordinate
    falls below ``MODE_NEGATIVE_TOL``.
    """
    v0 = as_array(decomposition.backwards_mean)
    direction = decomposition.loading(rank)
    point = v0 + (float(t) / SQRT2) * direction
    if np.any(point < MODE_NEGATIVE_TOL):
        raise OutOfSimplex(
            f"t={t!r} leaves the simplex (minimum coordinate {point.min():.3g})"
        )
    return Composition(np.clip(point, 0.0, None))


def _best_pair(coeffs: np.ndarray) -> tuple[int, int, float]:
    """Minimum-RSS (i, j, alpha) over all vertex pairs, lexicographic ties.

    Works off the Gram matrix P = C^T C: for a pair (i, j) the optimal
    alpha is (P_ii + P_ij) / (P_ii + 2 P_ij + P_jj) and the RSS at that
    alpha is 2 (P_ii P_jj - P_ij^2) / (P_ii + 2 P_ij + P_jj).  A pair with
    zero denominator carries no mass at all; by convention it merges with
    alpha = 1/2 and RSS 0.
    """
    gram = coeffs.T @ coeffs
    m = gram.shape[0]
    iu, ju = np.triu_indices(m, k=1)
    pii = gram[iu, iu]
    pjj = gram[ju, ju]
    pij = gram[iu, ju]
    denom = pii + 2.0 * pij + pjj
    with np.errstate(divide="ignore", invalid="ignore"):
        alphas = np.where(denom > 0.0, (pii + pij) / denom, 0.5)
        rss = np.where(denom > 0.0, 2.0 * (pii * pjj - pij * pij) / denom, 0.0)
    alphas = np.clip(alphas, 0.0, 1.0)
    rss = np.maximum(rss, 0.0)
    # triu_indices enumerates pairs in lexicographic order, so the first
    # candidate within the tie window is the lexicographically smallest.
    best = int(np.argmax(rss <= rss.min() + RSS_TIE_TOL))
    return int(iu[best]), int(ju[best]), float(alphas[best])


def _check_pair(m: int, i: int, j: int) -> None:
    if not (isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer))):
        raise ValidationError("pair indexes must be integers")
    if not (0 <= i < m and 0 <= j < m):
        raise DimensionMismatch(f"pair ({i}, {j}) out of range for {m} vertices")
    if i == j:
        raise ValidationError("pair indexes must be distinct")


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= float(alpha) <= 1.0:
        raise ValidationError(f"alpha must be in [0, 1], got {alpha!r}")


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.setflags(write=False)
    return out
