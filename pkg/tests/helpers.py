"""Shared data builders for the test suite."""

import numpy as np


def random_compositions(rng, n, m, zero_fraction=0.0):
    """n rows of m-part compositions; optionally sprinkle exact zeros."""
    raw = rng.gamma(1.5, size=(n, m))
    if zero_fraction > 0.0:
        mask = rng.random(size=raw.shape) < zero_fraction
        # keep at least one positive entry per row and per column, so no
        # row collapses and no merge pair is fully degenerate by accident
        mask[np.arange(n), rng.integers(0, m, size=n)] = False
        mask[rng.integers(0, n, size=m), np.arange(m)] = False
        raw[mask] = 0.0
    return raw / raw.sum(axis=1, keepdims=True)


def brute_force_psa_s_rank(coeffs, grid):
    """Exhaustive (pair, alpha, rss) minimum over a uniform alpha grid.

    RSS for a pair comes from the closed score form evaluated at every
    grid point; degenerate pairs (no mass) are skipped.
    """
    n, m = coeffs.shape
    best = None
    for i in range(m):
        for j in range(i + 1, m):
            xi = coeffs[:, i]
            xj = coeffs[:, j]
            if float((xi + xj) @ (xi + xj)) == 0.0:
                continue
            scores = np.sqrt(2.0) * (np.outer(xj, grid) - np.outer(xi, 1.0 - grid))
            rss = (scores ** 2).sum(axis=0)
            k = int(np.argmin(rss))
            if best is None or rss[k] < best[3]:
                best = (i, j, float(grid[k]), float(rss[k]))
    return best


def brute_force_psa_o_rank(coords, grid):
    """Exhaustive spherical (pair, alpha, rss) minimum over a grid.

    Scores are computed through the merged-direction inner product
    (alpha*c_j - (1-alpha)*c_i) / hypot(alpha, 1-alpha).
    """
    n, m = coords.shape
    norms = np.hypot(grid, 1.0 - grid)
    best = None
    for i in range(m):
        for j in range(i + 1, m):
            t = (np.outer(coords[:, j], grid) - np.outer(coords[:, i], 1.0 - grid))
            t = np.clip(t / norms, -1.0, 1.0)
            rss = (np.arcsin(t) ** 2).sum(axis=0)
            k = int(np.argmin(rss))
            if best is None or rss[k] < best[3]:
                best = (i, j, float(grid[k]), float(rss[k]))
    return best


def split_embed(coeffs, i, j, alpha):
    """Rank-r coordinates of the projected points, for displacement checks.

    Projection pools coordinates i and j; re-expanding the pooled mass as
    alpha at i and (1-alpha) at j expresses the projected point in the
    rank-r basis again.
    """
    out = np.array(coeffs, dtype=float)
    pooled = coeffs[:, i] + coeffs[:, j]
    out[:, i] = alpha * pooled
    out[:, j] = (1.0 - alpha) * pooled
    return out
