"""Exact nearest-pair search on sets of complex (or real-stacked) points."""

import numpy as np
from scipy.spatial import cKDTree


def as_real(points):
    """Stack complex vectors into real coordinates.

    A 1-D complex array of n points becomes (n, 2); an (n, d) complex array
    becomes (n, 2d).
    """
    points = np.asarray(points)
    if points.ndim == 1:
        points = points[:, None]
    return np.concatenate([points.real, points.imag], axis=1).astype(float)


def closest_pair(points):
    """Return ``(distance, i, j)`` for the closest pair of rows in `points`.

    Uses a k-d tree with exact queries, so the result is the true minimum
    Euclidean distance. Ties resolve to the smallest ``i``. With fewer than
    two points the distance is ``inf`` and the indices are ``-1``.
    """
    coords = as_real(points)
    n = coords.shape[0]
    if n < 2:
        return np.inf, -1, -1
    tree = cKDTree(coords)
    dist, idx = tree.query(coords, k=2)
    # coincident points may come back in either column
    self_first = idx[:, 0] == np.arange(n)
    nn_dist = np.where(self_first, dist[:, 1], dist[:, 0])
    nn_idx = np.where(self_first, idx[:, 1], idx[:, 0])
    i = int(np.argmin(nn_dist))
    j = int(nn_idx[i])
    # recompute directly so the value does not depend on tree internals
    d = float(np.sqrt(np.sum((coords[i] - coords[j]) ** 2)))
    return d, min(i, j), max(i, j)
