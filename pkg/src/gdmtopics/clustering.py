"""Weighted clustering: k-means (fixed K), DP-means (penalized K), brute force.

All routines minimize the weighted within-cluster sum of squares
``sum_k sum_{m in C_k} N_m ||w_m - mu_k||^2`` with centroids at the weighted
means of their clusters. ``brute_force_kmeans`` is an exact enumeration
oracle intended for tests on tiny instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import NormalizedCorpus

_REL_TOL = 1e-10  # relative objective decrease treated as converged
_MONOTONE_SLACK = 1e-8


@dataclass(frozen=True)
class ClusteringResult:
    centroids: np.ndarray
    assignments: np.ndarray
    objective: float

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


def _sq_dists(rows, centroids):
    """Squared Euclidean distances, rows x centroids."""
    d = (
        (rows * rows).sum(axis=1)[:, None]
        - 2.0 * rows @ centroids.T
        + (centroids * centroids).sum(axis=1)[None, :]
    )
    np.maximum(d, 0.0, out=d)
    return d


def _weighted_objective(rows, weights, centroids, assignments):
    diff = rows - centroids[assignments]
    return float(np.sum(weights * np.einsum("ij,ij->i", diff, diff)))


def _weighted_means(rows, weights, assignments, k):
    """Weighted mean per cluster; clusters assumed nonempty."""
    wsum = np.bincount(assignments, weights=weights, minlength=k)
    acc = np.zeros((k, rows.shape[1]))
    np.add.at(acc, assignments, rows * weights[:, None])
    return acc / wsum[:, None]


def _n_distinct_rows(rows):
    return np.unique(rows, axis=0).shape[0]


def kmeanspp_init(data: NormalizedCorpus, K: int, rng: np.random.Generator) -> np.ndarray:
    """Weighted k-means++ seeding.

    The first seed is drawn with probability proportional to the document
    weight N_m; each subsequent seed with probability proportional to
    N_m * D(m)^2, D(m) being the distance to the nearest chosen seed.
    Returns K distinct rows.
    """
    rows, weights = data.rows, data.weights
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > _n_distinct_rows(rows):
        raise ValueError(f"K={K} exceeds the number of distinct rows")
    seeds = np.empty((K, rows.shape[1]))
    first = rng.choice(rows.shape[0], p=weights / weights.sum())
    seeds[0] = rows[first]
    d2 = _sq_dists(rows, seeds[:1]).ravel()
    for k in range(1, K):
        scores = weights * d2
        total = scores.sum()
        if total > 0:
            idx = rng.choice(rows.shape[0], p=scores / total)
        else:  # all mass on already-chosen points; grab any unseen distinct row
            idx = int(np.flatnonzero(d2 > 0)[0])
        seeds[k] = rows[idx]
        d2 = np.minimum(d2, _sq_dists(rows, seeds[k : k + 1]).ravel())
    return seeds


def _lloyd(rows, weights, seeds, max_iters):
    """Weighted Lloyd iterations from given seeds until assignment fixpoint."""
    k = seeds.shape[0]
    centroids = seeds.copy()
    assignments = None
    prev_obj = np.inf
    for _ in range(max(1, max_iters)):
        d2 = _sq_dists(rows, centroids)
        new_assign = np.argmin(d2, axis=1)  # ties resolved to lowest index
        # repair emptied clusters: reseed at the largest weighted contributor
        counts = np.bincount(new_assign, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            contrib = weights * d2[np.arange(rows.shape[0]), new_assign]
            donor = int(np.argmax(contrib))
            new_assign[donor] = empty
            centroids[empty] = rows[donor]
            counts = np.bincount(new_assign, minlength=k)
            d2 = _sq_dists(rows, centroids)
        if assignments is not None and np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        centroids = _weighted_means(rows, weights, assignments, k)
        obj = _weighted_objective(rows, weights, centroids, assignments)
        assert obj <= prev_obj + _MONOTONE_SLACK * max(1.0, prev_obj if np.isfinite(prev_obj) else 1.0), (
            "weighted Lloyd objective increased"
        )
        if np.isfinite(prev_obj) and prev_obj - obj <= _REL_TOL * max(prev_obj, 1e-300):
            prev_obj = obj
            break
        prev_obj = obj
    obj = _weighted_objective(rows, weights, centroids, assignments)
    return ClusteringResult(centroids=centroids, assignments=assignments, objective=obj)


def fit_kmeans(
    data: NormalizedCorpus,
    K: int,
    restarts: int = 10,
    max_iters: int = 1500,
    rng: np.random.Generator | None = None,
) -> ClusteringResult:
    """Best-of-restarts weighted k-means with k-means++ seeding."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    best = None
    for _ in range(restarts):
        seeds = kmeanspp_init(data, K, rng)
        result = _lloyd(data.rows, data.weights, seeds, max_iters)
        if best is None or result.objective < best.objective:
            best = result
    return best


def brute_force_kmeans(data: NormalizedCorpus, K: int) -> ClusteringResult:
    """Exact weighted k-means by enumerating all K^M assignments.

    Only assignments using all K labels are considered. Instances with
    K^M > 10^7 are rejected.
    """
    rows, weights = data.rows, data.weights
    M = rows.shape[0]
    if K < 1 or K > M:
        raise ValueError(f"need 1 <= K <= M, got K={K}, M={M}")
    if K**M > 10**7:
        raise ValueError(f"instance too large: K^M = {K}^{M} > 1e7")
    # objective identity: sum_m N_m||x_m||^2 - sum_k ||S_k||^2 / W_k
    base = float(np.sum(weights * np.einsum("ij,ij->i", rows, rows)))
    wx = rows * weights[:, None]
    best_obj = np.inf
    best_assign = None
    chunk = 8192
    total = K**M
    codes = np.arange(M, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # decode base-K digits -> assignment matrix (n, M)
        A = (idx[:, None] // K**codes[None, :]) % K
        onehot = A[:, :, None] == np.arange(K)[None, None, :]
        wsum = np.einsum("nmk,m->nk", onehot, weights)
        valid = (wsum > 0).all(axis=1)
        if not valid.any():
            continue
        S = np.einsum("nmk,mv->nkv", onehot.astype(np.float64), wx)
        with np.errstate(divide="ignore", invalid="ignore"):
            red = np.einsum("nkv,nkv->nk", S, S) / wsum
        obj = base - np.where(valid, red.sum(axis=1), -np.inf)
        obj[~valid] = np.inf
        i = int(np.argmin(obj))
        if obj[i] < best_obj:
            best_obj = float(obj[i])
            best_assign = A[i].copy()
    if best_assign is None:
        raise ValueError("no assignment uses all K clusters")
    centroids = _weighted_means(rows, weights, best_assign, K)
    obj = _weighted_objective(rows, weights, centroids, best_assign)
    return ClusteringResult(centroids=centroids, assignments=best_assign, objective=obj)


def fit_dpmeans(
    data: NormalizedCorpus,
    lam: float,
    max_iters: int = 1500,
    rng: np.random.Generator | None = None,
    weighted_rule: bool = True,
) -> ClusteringResult:
    """Weighted DP-means: a document opens a new cluster when its assignment
    cost exceeds the penalty.

    With ``weighted_rule`` the opening test is ``N_m * d^2 > lam`` so lambda
    shares units with the penalized objective; otherwise the unweighted test
    ``d^2 > lam / mean(N)`` is used. The penalized objective
    (within-cluster sum + lam * K') is nonincreasing across iterations.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    rows, weights = data.rows, data.weights
    M = rows.shape[0]
    if rng is None:
        rng = np.random.default_rng(0)
    order = rng.permutation(M)
    mean_w = weights.mean()

    centroids = [np.average(rows, axis=0, weights=weights)]
    assignments = np.zeros(M, dtype=np.int64)
    prev_pen = np.inf
    for _ in range(max(1, max_iters)):
        changed = False
        for m in order:
            C = np.asarray(centroids)
            d2 = _sq_dists(rows[m : m + 1], C).ravel()
            cost = weights[m] * d2 if weighted_rule else d2 * mean_w
            best = int(np.argmin(d2))
            if cost[best] > lam:
                centroids.append(rows[m].copy())
                best = len(centroids) - 1
            if assignments[m] != best:
                changed = True
            assignments[m] = best
        # recompute weighted means, dropping emptied clusters
        k = len(centroids)
        occupied = np.flatnonzero(np.bincount(assignments, minlength=k) > 0)
        remap = -np.ones(k, dtype=np.int64)
        remap[occupied] = np.arange(occupied.size)
        assignments = remap[assignments]
        means = _weighted_means(rows, weights, assignments, occupied.size)
        centroids = [means[j] for j in range(occupied.size)]
        pen = _weighted_objective(rows, weights, means, assignments) + lam * occupied.size
        assert pen <= prev_pen + _MONOTONE_SLACK * max(1.0, abs(pen)), (
            "penalized DP-means objective increased"
        )
        if not changed or prev_pen - pen <= _REL_TOL * max(abs(prev_pen), 1e-300):
            prev_pen = pen
            break
        prev_pen = pen
    means = np.asarray(centroids)
    obj = _weighted_objective(rows, weights, means, assignments)
    return ClusteringResult(centroids=means, assignments=assignments, objective=obj)
