"""Geometry of the unit simplex and the unit nonnegative orthant.

A composition is a point of the unit simplex: nonnegative entries that sum
to one.  Scaling a composition to unit Euclidean length moves it onto the
nonnegative part of the unit sphere; dividing a spherical point by its L1
norm moves it back.  These two charts, together with arc-length distance
on the sphere, are all the geometry the decompositions in this package
need.

Points and vertex sets are small immutable value objects wrapping
read-only numpy arrays; they validate their defining invariants on
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVertices,
    DimensionMismatch,
    NegativeEntry,
    NotInSimplex,
    RowSumOutOfTolerance,
)

#: Tolerance on unit sum for compositions and unit norm for spherical points.
UNIT_TOL = 1e-9

#: Relative singular value cutoff in the affine independence check.
AFFINE_RANK_RTOL = 1e-10

#: Largest least-squares residual accepted by :func:`barycentric_coordinates`.
BARYCENTRIC_RESIDUAL_TOL = 1e-8

#: Most negative barycentric coefficient accepted before rejection.
BARYCENTRIC_COEFF_TOL = -1e-8

#: Gram matrix tolerance for orthonormal vertex sets.
ORTHONORMAL_TOL = 1e-9


def as_array(x) -> np.ndarray:
    """Return ``x`` (or its ``entries``/``vertices`` payload) as a float array."""
    for attr in ("entries", "vertices"):
        payload = getattr(x, attr, None)
        if payload is not None:
            return np.asarray(payload, dtype=float)
    return np.asarray(x, dtype=float)


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Composition:
    """A point of the unit simplex.

    Entries are nonnegative and sum to one within ``UNIT_TOL``.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = _freeze(as_array(self.entries))
        if entries.ndim != 1 or entries.size < 1:
            raise DimensionMismatch("a composition must be a nonempty 1-d vector")
        if np.any(entries < 0.0):
            raise NegativeEntry("composition entries must be nonnegative")
        if abs(float(entries.sum()) - 1.0) > UNIT_TOL:
            raise RowSumOutOfTolerance(
                f"composition entries sum to {entries.sum()!r}, expected 1"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        """Dimension d of the simplex this point lives on (size - 1)."""
        return self.entries.size - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class SphericalPoint:
    """A point of the unit nonnegative orthant of the sphere.

    Entries are nonnegative with unit Euclidean norm within ``UNIT_TOL``.
    """

    entries: np.ndarray

    def __post_init__(self):
        entries = _freeze(as_array(self.entries))
        if entries.ndim != 1 or entries.size < 1:
            raise DimensionMismatch("a spherical point must be a nonempty 1-d vector")
        if np.any(entries < 0.0):
            raise NegativeEntry("spherical point entries must be nonnegative")
        norm = float(np.linalg.norm(entries))
        if abs(norm - 1.0) > UNIT_TOL:
            raise DimensionMismatch(
                f"spherical point has Euclidean norm {norm!r}, expected 1"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def dimension(self) -> int:
        return self.entries.size - 1

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True, eq=False)
class SimplexVertexSet:
    """An affinely independent list of simplex points spanning a subsimplex.

    ``vertices`` is an (r+1, d+1) matrix whose rows are compositions; the
    subsimplex they span has rank r.  Affine independence is checked with a
    rank-revealing SVD of the difference vectors at relative threshold
    ``AFFINE_RANK_RTOL``.
    """

    vertices: np.ndarray

    def __post_init__(self):
        vertices = _freeze(np.atleast_2d(as_array(self.vertices)))
        if vertices.ndim != 2 or vertices.size == 0:
            raise DimensionMismatch("vertex set must be a nonempty 2-d matrix")
        if np.any(vertices < 0.0):
            raise NegativeEntry("vertices must have nonnegative entries")
        sums = vertices.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > UNIT_TOL):
            raise RowSumOutOfTolerance("every vertex must sum to 1")
        if len(vertices) > 1:
            diffs = vertices[:-1] - vertices[-1]
            svals = np.linalg.svd(diffs, compute_uv=False)
            rank = int(np.sum(svals > AFFINE_RANK_RTOL * svals[0])) if svals[0] > 0 else 0
            if rank != len(vertices) - 1:
                raise DegenerateVertices(
                    f"vertices are affinely dependent (rank {rank} of {len(vertices) - 1})"
                )
        object.__setattr__(self, "vertices", vertices)

    @property
    def rank(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_parts(self) -> int:
        return self.vertices.shape[1]

    def vertex(self, k: int) -> Composition:
        return Composition(self.vertices[k])

    def __len__(self) -> int:
        return len(self.vertices)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vertices, dtype=dtype)


@dataclass(frozen=True, eq=False)
class OrthantVertexSet:
    """An orthonormal, entrywise nonnegative basis spanning a suborthant.

    ``vertices`` is an (r+1, d+1) matrix with pairwise orthonormal rows
    (Gram matrix within ``ORTHONORMAL_TOL`` of the identity).  Orthonormal
    nonnegative vectors necessarily have pairwise disjoint supports.
    """

    vertices: np.ndarray

    def __post_init__(self):
        vertices = _freeze(np.atleast_2d(as_array(self.vertices)))
        if vertices.ndim != 2 or vertices.size == 0:
            raise DimensionMismatch("vertex set must be a nonempty 2-d matrix")
        if np.any(vertices < 0.0):
            raise NegativeEntry("orthant vertices must have nonnegative entries")
        gram = vertices @ vertices.T
        if np.max(np.abs(gram - np.eye(len(vertices)))) > ORTHONORMAL_TOL:
            raise DegenerateVertices("orthant vertices must be orthonormal")
        object.__setattr__(self, "vertices", vertices)

    @property
    def rank(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_parts(self) -> int:
        return self.vertices.shape[1]

    def vertex(self, k: int) -> SphericalPoint:
        return SphericalPoint(self.vertices[k])

    def __len__(self) -> int:
        return len(self.vertices)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vertices, dtype=dtype)


# --- charts between the simplex and the sphere -------------------------

def normalize_rows_l1(x: np.ndarray) -> np.ndarray:
    """Divide each row by its L1 norm."""
    x = np.asarray(x, dtype=float)
    return x / np.abs(x).sum(axis=-1, keepdims=True)


def normalize_rows_l2(x: np.ndarray) -> np.ndarray:
    """Divide each row by its Euclidean norm."""
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def simplex_to_orthant(x) -> SphericalPoint:
    """Scale a composition to unit Euclidean length.

    The zero vector is excluded by the composition invariant, so the map
    is total on its domain.
    """
    entries = as_array(x)
    Composition(entries)  # validate the domain
    return SphericalPoint(entries / np.linalg.norm(entries))


def orthant_to_simplex(x) -> Composition:
    """Scale a spherical orthant point to unit sum."""
    entries = as_array(x)
    SphericalPoint(entries)  # validate the domain
    return Composition(entries / entries.sum())


def geodesic_distance(x, y) -> float:
    """Arc-length distance between two unit vectors.

    Mathematically cos^-1 of the inner product; evaluated through the
    chord length 2*asin(|x - y|/2), which is exact for the same quantity
    and does not lose precision when the points nearly coincide.
    """
    a = as_array(x)
    b = as_array(y)
    chord = 0.5 * float(np.linalg.norm(a - b))
    return 2.0 * float(np.arcsin(min(chord, 1.0)))


# --- barycentric coordinates -------------------------------------------

def barycentric_matrix(points: np.ndarray, vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Affine coordinates of each row of ``points`` in the rows of ``vertices``.

    Solves the stacked linear system (vertex matrix plus the unit-sum
    constraint) by least squares.  Returns (coefficients, residuals) without
    any containment check; callers decide how to treat negative
    coefficients or large residuals.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    vertices = np.asarray(vertices, dtype=float)
    m = len(vertices)
    lhs = np.vstack([vertices.T, np.ones((1, m))])
    rhs = np.vstack([points.T, np.ones((1, len(points)))])
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    coeffs = sol.T
    residuals = np.linalg.norm(points - coeffs @ vertices, axis=1)
    return coeffs, residuals


def barycentric_coordinates(x, basis: SimplexVertexSet) -> np.ndarray:
    """Coordinates of composition ``x`` in an affinely independent basis.

    Raises ``NotInSimplex`` when the least-squares fit leaves a residual
    above ``BARYCENTRIC_RESIDUAL_TOL`` or produces a coefficient below
    ``BARYCENTRIC_COEFF_TOL``.  Returned coefficients are clipped to be
    nonnegative and renormalized to unit sum.
    """
    point = as_array(x)
    vertices = as_array(basis)
    if point.shape[-1] != vertices.shape[1]:
        raise DimensionMismatch(
            f"point has {point.shape[-1]} parts, vertices have {vertices.shape[1]}"
        )
    coeffs, residuals = barycentric_matrix(point[np.newaxis, :], vertices)
    if residuals[0] > BARYCENTRIC_RESIDUAL_TOL:
        raise NotInSimplex(
            f"point is off the subsimplex span (residual {residuals[0]:.3g})"
        )
    c = coeffs[0]
    if np.any(c < BARYCENTRIC_COEFF_TOL):
        raise NotInSimplex(
            f"point lies outside the subsimplex (coefficient {c.min():.3g})"
        )
    c = np.clip(c, 0.0, None)
    return c / c.sum()
