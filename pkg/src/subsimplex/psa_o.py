"""Principal subsimplex analysis in spherical geometry (PSA-O).

Rows are first scaled to unit Euclidean length, which places them on the
nonnegative orthant of the unit sphere where the starting basis is the
ambient identity.  A backwards merge replaces the orthonormal pair
(v_i, v_j) by the unit vector

    w = (alpha*v_i + (1-alpha)*v_j) / ||.||,

discarding the orthogonal unit direction u = (alpha*v_j - (1-alpha)*v_i)
/ ||.|| (positive component meaning excess toward v_j).  Each sample then
moves along its great circle to the reduced subsphere,

    x -> (x - (x.u) u) / sqrt(1 - (x.u)^2),

and its signed score is the arc length of that move, sgn(x.u) times the
arc distance to the projection; numerically this equals asin(x.u), which
stays exact for small scores.  The merge weight alpha has no closed form
here and is found by a uniform grid search over [0, 1] for every pair.

When a sample is (anti)parallel to u, every point of the subsphere is
equally close; the sample gets score pi/2 and is placed at the remainder
of its basis expansion with the pair's coordinates replaced by the new
vertex scaled by their pooled norm.  Such events are reported in
``pole_events``.

After rank 0 the whole nested sequence is mapped back to the simplex by
dividing vertices and approximations by their L1 norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import as_matrix
from .errors import (
    DegenerateRatio,
    DimensionMismatch,
    OutOfOrthant,
    PoleSingularity,
    RankZero,
    ValidationError,
)
from .geometry import (
    OrthantVertexSet,
    SimplexVertexSet,
    SphericalPoint,
    Composition,
    as_array,
    normalize_rows_l1,
    normalize_rows_l2,
)
from .psa_s import MODE_NEGATIVE_TOL, RSS_TIE_TOL, _check_pair, _check_alpha, _frozen

#: |x.u| at or above 1 - POLE_TOL counts as the pole of the projection.
POLE_TOL = 1e-12

#: Grid resolution of the alpha search, endpoints included.
DEFAULT_GRID_POINTS = 101


@dataclass(frozen=True, eq=False)
class OrthantMergeRecord:
    """One spherical merge: rank r -> r-1, with the geometry it removed."""

    rank_from: int
    merged_pair: tuple[int, int]
    alpha: float
    new_vertex: np.ndarray
    removed_direction: np.ndarray
    rss: float


@dataclass(frozen=True)
class PoleEvent:
    """A sample that sat at the pole of a rank's projection."""

    rank_from: int
    sample_index: int


@dataclass(frozen=True, eq=False)
class PsaODecomposition:
    """Full output of a PSA-O fit.

    Sequences ordered from rank d down to 0 (merges down to 1), as in
    ``PsaSDecomposition``; ``scores`` column k holds the rank (d - k)
    scores.  ``coefficients`` are coordinates in the orthonormal basis of
    each rank; ``barycentric`` converts them to simplex coordinates.
    """

    orthant_vertex_sets: tuple[OrthantVertexSet, ...]
    simplex_vertex_sets: tuple[SimplexVertexSet, ...]
    merges: tuple[OrthantMergeRecord, ...]
    scores: np.ndarray
    loadings: np.ndarray
    spherical_approximations: tuple[np.ndarray, ...]
    simplex_approximations: tuple[np.ndarray, ...]
    coefficients: tuple[np.ndarray, ...]
    partitions: tuple[tuple[tuple[int, ...], ...], ...]
    pole_events: tuple[PoleEvent, ...]
    grid_points: int
    refined: bool

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

    def orthant_vertex_set(self, rank: int) -> OrthantVertexSet:
        return self.orthant_vertex_sets[self._rank_index(rank)]

    def vertex_set(self, rank: int) -> SimplexVertexSet:
        return self.simplex_vertex_sets[self._rank_index(rank)]

    def merge(self, rank: int) -> OrthantMergeRecord:
        return self.merges[self._merge_index(rank)]

    def spherical_approximation(self, rank: int) -> np.ndarray:
        return self.spherical_approximations[self._rank_index(rank)]

    def approximation(self, rank: int) -> np.ndarray:
        return self.simplex_approximations[self._rank_index(rank)]

    def coefficients_at(self, rank: int) -> np.ndarray:
        return self.coefficients[self._rank_index(rank)]

    def partition(self, rank: int) -> tuple[tuple[int, ...], ...]:
        return self.partitions[self._rank_index(rank)]

    def score_column(self, rank: int) -> np.ndarray:
        return self.scores[:, self._merge_index(rank)]

    def loading(self, rank: int) -> np.ndarray:
        return self.loadings[self._merge_index(rank)]

    def barycentric(self, rank: int) -> np.ndarray:
        """Simplex coordinates of every sample in the rank's vertex basis.

        With orthant coordinates c and vertex L1 norms l, the simplex
        coordinates are (c * l) / sum(c * l).
        """
        coeffs = np.clip(self.coefficients_at(rank), 0.0, None)
        l1 = self.orthant_vertex_sets[self._rank_index(rank)].vertices.sum(axis=1)
        weighted = coeffs * l1
        return weighted / weighted.sum(axis=1, keepdims=True)

    @property
    def spherical_backwards_mean(self) -> SphericalPoint:
        return SphericalPoint(self.orthant_vertex_sets[-1].vertices[0])

    @property
    def backwards_mean(self) -> Composition:
        return Composition(self.simplex_vertex_sets[-1].vertices[0])


def merge_orthant_vertices(basis: OrthantVertexSet, i: int, j: int,
                           alpha: float) -> tuple[OrthantVertexSet, np.ndarray]:
    """Merge orthonormal vertices i and j at weight ``alpha``.

    Returns the reduced basis (new vertex first, others in order) and the
    removed unit direction u orthogonal to it.
    """
    vertices = as_array(basis)
    _check_pair(len(vertices), i, j)
    if len(vertices) < 2:
        raise RankZero("cannot merge vertices of a rank-0 set")
    _check_alpha(alpha)
    w, u = _merge_directions(vertices[i], vertices[j], alpha)
    rest = np.delete(vertices, (i, j), axis=0)
    return OrthantVertexSet(np.vstack([w[np.newaxis, :], rest])), u


def project_to_suborthant(x, u) -> tuple[SphericalPoint, float]:
    """Great-circle projection of ``x`` onto the subsphere orthogonal to ``u``.

    Returns (projection, signed score); the score is sgn(x.u) times the
    arc distance from ``x`` to its projection, evaluated as asin(x.u).
    Raises ``PoleSingularity`` when ``x`` is within ``POLE_TOL`` of the
    pole, where the projection is undefined.
    """
    point = as_array(x)
    direction = np.asarray(u, dtype=float)
    if point.shape != direction.shape:
        raise DimensionMismatch("point and direction must have matching shape")
    c = float(np.clip(point @ direction, -1.0, 1.0))
    if abs(c) >= 1.0 - POLE_TOL:
        raise PoleSingularity("point is (anti)parallel to the removed direction")
    projection = (point - c * direction) / float(np.sqrt(1.0 - c * c))
    projection = _clip_dust(projection)
    return SphericalPoint(projection), float(np.arcsin(c))


def fit(data, grid_points: int = DEFAULT_GRID_POINTS, refine: bool = False) -> PsaODecomposition:
    """Run the full backwards sweep from rank d to rank 0.

    ``grid_points`` sets the uniform alpha grid (endpoints included) used
    for every candidate pair; ties go to the smallest RSS, then the
    lexicographically smallest pair, then the smallest alpha.  With
    ``refine`` a golden-section pass narrows alpha inside one grid step
    around the best grid point.
    """
    if int(grid_points) < 2:
        raise ValidationError(f"grid_points must be at least 2, got {grid_points}")
    grid_points = int(grid_points)
    X = as_matrix(data)
    n, m = X.shape
    if m < 2:
        raise DimensionMismatch("need at least two parts to decompose")
    d = m - 1

    spherical = normalize_rows_l2(X)
    vertices = np.eye(m)
    groups: list[tuple[int, ...]] = [(k,) for k in range(m)]
    alphas = np.linspace(0.0, 1.0, grid_points)

    orthant_sets = [OrthantVertexSet(vertices)]
    sphere_tracks = [_frozen(spherical)]
    coefficients = [_frozen(spherical.copy())]
    partitions = [tuple(groups)]
    merges: list[OrthantMergeRecord] = []
    score_columns: list[np.ndarray] = []
    loading_rows: list[np.ndarray] = []
    pole_events: list[PoleEvent] = []

    for rank in range(d, 0, -1):
        coords = spherical @ vertices.T
        i, j, alpha = _grid_best_pair(coords, alphas)
        if refine:
            step = 1.0 / (grid_points - 1)
            alpha = _golden_refine(coords[:, i], coords[:, j], alpha, step)

        w, u = _merge_directions(vertices[i], vertices[j], alpha)
        projected, scores, poles = _project_rows(spherical, u, vertices[i],
                                                 vertices[j], w)
        rss = float(scores @ scores)

        simplex_i = vertices[i] / vertices[i].sum()
        simplex_j = vertices[j] / vertices[j].sum()
        loading_rows.append(simplex_j - simplex_i)
        merges.append(OrthantMergeRecord(rank, (i, j), float(alpha),
                                         _frozen(w), _frozen(u), rss))
        score_columns.append(scores)
        pole_events.extend(PoleEvent(rank, int(s)) for s in poles)

        vertices = np.vstack([w[np.newaxis, :], np.delete(vertices, (i, j), axis=0)])
        groups = [groups[i] + groups[j]] + [g for k, g in enumerate(groups)
                                            if k not in (i, j)]
        spherical = projected

        orthant_sets.append(OrthantVertexSet(vertices))
        sphere_tracks.append(_frozen(spherical))
        coefficients.append(_frozen(spherical @ vertices.T))
        partitions.append(tuple(groups))

    simplex_sets = tuple(SimplexVertexSet(normalize_rows_l1(s.vertices))
                         for s in orthant_sets)
    simplex_tracks = tuple(_frozen(normalize_rows_l1(track))
                           for track in sphere_tracks)

    return PsaODecomposition(
        orthant_vertex_sets=tuple(orthant_sets),
        simplex_vertex_sets=simplex_sets,
        merges=tuple(merges),
        scores=_frozen(np.column_stack(score_columns)),
        loadings=_frozen(np.vstack(loading_rows)),
        spherical_approximations=tuple(sphere_tracks),
        simplex_approximations=simplex_tracks,
        coefficients=tuple(coefficients),
        partitions=tuple(partitions),
        pole_events=tuple(pole_events),
        grid_points=grid_points,
        refined=bool(refine),
    )


def mode_of_variation(decomposition: PsaODecomposition, rank: int, t: float) -> Composition:
    """Point at arc length ``t`` along the rank-``rank`` mode of variation.

    Travels the great circle through the spherical backwards mean in the
    removed direction of the rank-``rank`` merge, then maps to the
    simplex; t = 0 returns the backwards mean.  Raises ``OutOfOrthant``
    when any coordinate falls below ``MODE_NEGATIVE_TOL``.
    """
    mean = as_array(decomposition.spherical_backwards_mean)
    direction = decomposition.merge(rank).removed_direction
    point = np.cos(float(t)) * mean + np.sin(float(t)) * direction
    if np.any(point < MODE_NEGATIVE_TOL):
        raise OutOfOrthant(
            f"t={t!r} leaves the orthant (minimum coordinate {point.min():.3g})"
        )
    point = np.clip(point, 0.0, None)
    return Composition(point / point.sum())


def _merge_directions(vi: np.ndarray, vj: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit new vertex and unit removed direction for one merge."""
    w = alpha * vi + (1.0 - alpha) * vj
    u = alpha * vj - (1.0 - alpha) * vi
    wn = float(np.linalg.norm(w))
    un = float(np.linalg.norm(u))
    if wn == 0.0 or un == 0.0:
        raise DegenerateRatio("merge combination collapsed to the zero vector")
    return w / wn, u / un


def _grid_best_pair(coords: np.ndarray, alphas: np.ndarray) -> tuple[int, int, float]:
    """Exhaustive (pair, alpha) search on the score RSS surface.

    Candidates tie within ``RSS_TIE_TOL`` of the global minimum; ties are
    broken by lexicographic pair order, then smallest alpha.  Scores for
    a candidate only need the two coordinate columns: x.u =
    (alpha*c_j - (1-alpha)*c_i) / sqrt(alpha^2 + (1-alpha)^2).
    """
    m = coords.shape[1]
    norms = np.hypot(alphas, 1.0 - alphas)
    weight_j = alphas / norms
    weight_i = (1.0 - alphas) / norms

    pair_rss = []
    pair_alpha = []
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    for i, j in pairs:
        t = np.outer(coords[:, j], weight_j) - np.outer(coords[:, i], weight_i)
        rss_grid = (np.arcsin(np.clip(t, -1.0, 1.0)) ** 2).sum(axis=0)
        best = int(np.argmax(rss_grid <= rss_grid.min() + RSS_TIE_TOL))
        pair_rss.append(float(rss_grid[best]))
        pair_alpha.append(float(alphas[best]))

    pair_rss = np.asarray(pair_rss)
    chosen = int(np.argmax(pair_rss <= pair_rss.min() + RSS_TIE_TOL))
    i, j = pairs[chosen]
    return i, j, pair_alpha[chosen]


def _golden_refine(ci: np.ndarray, cj: np.ndarray, alpha: float, step: float) -> float:
    """Golden-section pass on one pair's RSS inside +/- one grid step."""
    def rss(a: float) -> float:
        nu = float(np.hypot(a, 1.0 - a))
        t = np.clip((a * cj - (1.0 - a) * ci) / nu, -1.0, 1.0)
        s = np.arcsin(t)
        return float(s @ s)

    lo = max(0.0, alpha - step)
    hi = min(1.0, alpha + step)
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a = hi - invphi * (hi - lo)
    b = lo + invphi * (hi - lo)
    fa, fb = rss(a), rss(b)
    while hi - lo > 1e-12:
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - invphi * (hi - lo)
            fa = rss(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + invphi * (hi - lo)
            fb = rss(b)
    mid = 0.5 * (lo + hi)
    return float(mid) if rss(mid) <= rss(alpha) else float(alpha)


def _project_rows(spherical: np.ndarray, u: np.ndarray, vi: np.ndarray,
                  vj: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project every row off the direction ``u``; returns rows, scores, poles."""
    c = np.clip(spherical @ u, -1.0, 1.0)
    scores = np.arcsin(c)
    pole = np.abs(c) >= 1.0 - POLE_TOL
    out = np.empty_like(spherical)
    safe = ~pole
    denom = np.sqrt(1.0 - c[safe] ** 2)
    out[safe] = (spherical[safe] - c[safe, np.newaxis] * u) / denom[:, np.newaxis]
    for idx in np.where(pole)[0]:
        out[idx] = _pole_placement(spherical[idx], vi, vj, w)
    np.clip(out, 0.0, None, out=out)
    return out, scores, np.where(pole)[0]


def _pole_placement(x: np.ndarray, vi: np.ndarray, vj: np.ndarray,
                    w: np.ndarray) -> np.ndarray:
    """Suborthant stand-in for a pole sample.

    The pair's coordinates are replaced by the new vertex direction scaled
    by their pooled norm; the remainder of the expansion is kept and the
    result renormalized.  Entries can dip a hair below zero because the
    remainder is only orthogonal to the pair in exact arithmetic; they are
    clipped to keep the point in the orthant.
    """
    ci = float(x @ vi)
    cj = float(x @ vj)
    pooled = float(np.hypot(ci, cj))
    y = x - ci * vi - cj * vj + pooled * w
    y = np.clip(y, 0.0, None)
    norm = float(np.linalg.norm(y))
    if norm == 0.0:
        raise DegenerateRatio("pole placement collapsed to the zero vector")
    return y / norm


def _clip_dust(a: np.ndarray) -> np.ndarray:
    """Zero out negative entries that are rounding dust (above -1e-12)."""
    return np.where((a < 0.0) & (a >= -1e-12), 0.0, a)
