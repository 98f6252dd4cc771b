"""Independent oracles used by the test suite.

These deliberately avoid the library's own solution paths: the projection
oracle is a coarse-to-fine grid search over barycentric weights, relying only
on convexity of the squared distance in theta.
"""

import itertools

import numpy as np


def simplex_grid(K, resolution):
    """All compositions of ``resolution`` into K parts, scaled to the simplex."""
    pts = []
    for comp in itertools.combinations(range(resolution + K - 1), K - 1):
        bars = (-1,) + comp + (resolution + K - 1,)
        pts.append([bars[i + 1] - bars[i] - 1 for i in range(K)])
    return np.asarray(pts, dtype=np.float64) / resolution


def grid_project(query, vertices, final_step=1e-3, resolution=16):
    """Projection onto conv(rows of vertices) by recursive grid refinement.

    Searches the full theta simplex at a coarse resolution, then repeatedly
    shrinks the search region around the incumbent. Returns (theta, point,
    squared distance). The objective is convex in theta, so the refinement
    converges to the global minimum.
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    K = vertices.shape[0]
    if K == 1:
        point = vertices[0]
        return np.ones(1), point, float(np.sum((query - point) ** 2))
    base = simplex_grid(K, resolution) - 1.0 / K  # zero-sum offsets spanning the simplex
    center = np.full(K, 1.0 / K)
    shrink = 1.0
    while True:
        # symmetric scaled-simplex neighborhood of the incumbent, clipped to
        # the feasible set (clipping keeps candidates valid mixtures)
        thetas = np.vstack([center[None, :], center[None, :] + shrink * base])
        np.clip(thetas, 0.0, None, out=thetas)
        thetas /= thetas.sum(axis=1, keepdims=True)
        pts = thetas @ vertices
        d2 = np.sum((pts - query[None, :]) ** 2, axis=1)
        best = int(np.argmin(d2))
        center = thetas[best]
        if shrink / resolution <= final_step:
            return center, pts[best], float(d2[best])
        shrink *= 4.0 / resolution  # new radius spans several old cells


def grid_tune_extension(center, centroid, other_vertices, rows, weights, m_max, n=2000):
    """Dense grid search over one extension scalar for the per-cluster objective."""
    from gdmtopics.gdm import extend_and_threshold
    from gdmtopics.geometry import TopicPolytope, geometric_objective
    from gdmtopics.corpus import NormalizedCorpus

    data = NormalizedCorpus(rows=rows, weights=weights)
    best = (np.inf, None)
    for m in np.linspace(1.0, m_max, n):
        v = extend_and_threshold(center, centroid, m)
        v = v / v.sum()
        cand = np.vstack([v[None, :], other_vertices])
        val = geometric_objective(data, TopicPolytope(cand))
        if val < best[0]:
            best = (val, m)
    return best
