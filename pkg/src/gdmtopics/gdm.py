"""Topic polytope estimators: GDM, tuned GDM, and the nonparametric variant.

The common recipe: cluster the normalized documents (weighted k-means with K
fixed, or weighted DP-means when K is unknown), then push each cluster
centroid outward along the ray from the data center until it reaches the
cluster's covering radius, thresholding and renormalizing whenever the
extended vertex leaves the vocabulary simplex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .clustering import ClusteringResult, fit_dpmeans, fit_kmeans
from .corpus import NormalizedCorpus
from .geometry import TopicPolytope, geometric_objective

_DEGENERATE_EPS = 1e-12


class DegenerateClusterError(ValueError):
    """A cluster centroid coincides with the data center; no extension ray exists."""


@dataclass(frozen=True)
class GdmConfig:
    """Estimator configuration; give K for GDM/tGDM or lam for nGDM, not both."""

    K: int | None = None
    restarts: int = 10
    max_iters: int = 1500
    weighted_center: bool = True
    tune: bool = False
    lam: float | None = None
    seed: int = 0
    weighted_dpmeans_rule: bool = True

    def __post_init__(self):
        if (self.K is None) == (self.lam is None):
            raise ValueError("exactly one of K and lam must be given")
        if self.K is not None and self.K < 1:
            raise ValueError("K must be >= 1")
        if self.lam is not None and not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class GdmModel:
    polytope: TopicPolytope
    center: np.ndarray
    centroids: np.ndarray
    extensions: np.ndarray
    radii: np.ndarray
    objective: float
    config: GdmConfig
    assignments: np.ndarray

    @property
    def K(self) -> int:
        return self.polytope.K


def default_extensions(center, centroids, radii) -> np.ndarray:
    """Per-cluster extension scalars m_k = R_k / ||C - mu_k||."""
    center = np.asarray(center, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    radii = np.asarray(radii, dtype=np.float64)
    dists = np.linalg.norm(centroids - center, axis=1)
    bad = np.flatnonzero(dists <= _DEGENERATE_EPS)
    if bad.size:
        raise DegenerateClusterError(
            f"cluster {int(bad[0])} has centroid equal to the data center; "
            "reduce the number of topics"
        )
    return radii / dists


def extend_and_threshold(center, centroid, m: float) -> np.ndarray:
    """Extend the ray C + m (mu - C) and clip back onto the simplex.

    When the raw extension has negative coordinates, those are zeroed and the
    remaining mass renormalized; otherwise the raw extension is returned.
    """
    center = np.asarray(center, dtype=np.float64)
    centroid = np.asarray(centroid, dtype=np.float64)
    raw = center + m * (centroid - center)
    if raw.min() >= 0.0:
        return raw
    clipped = np.where(raw > 0.0, raw, 0.0)
    total = clipped.sum()
    if total <= 0.0:
        raise AssertionError("extended vertex lost all mass; inputs were not on the simplex")
    return clipped / total


def _canonical_order(data: NormalizedCorpus) -> np.ndarray:
    """Document ordering independent of input row order.

    Clustering consumes documents in this order so that permuting the corpus
    (with matching weights) reproduces the same model for a fixed seed.
    """
    keys = sorted(
        range(data.M),
        key=lambda m: (data.weights[m], data.rows[m].tobytes()),
    )
    return np.asarray(keys, dtype=np.int64)


def _data_center(data: NormalizedCorpus, weighted: bool) -> np.ndarray:
    if weighted:
        return np.average(data.rows, axis=0, weights=data.weights)
    return data.rows.mean(axis=0)


def _cluster_radii(data: NormalizedCorpus, center, assignments, k) -> np.ndarray:
    d = np.linalg.norm(data.rows - center, axis=1)
    radii = np.zeros(k)
    for j in range(k):
        members = assignments == j
        if members.any():
            radii[j] = d[members].max()
    return radii


def _correct(data: NormalizedCorpus, clustering: ClusteringResult, config: GdmConfig):
    """Geometric correction shared by GDM and nGDM."""
    k = clustering.n_clusters
    center = _data_center(data, config.weighted_center)
    radii = _cluster_radii(data, center, clustering.assignments, k)
    if k == 1:
        # a single topic minimizing G is the weighted mean itself
        polytope = TopicPolytope(center[None, :] / center.sum())
        return GdmModel(
            polytope=polytope,
            center=center,
            centroids=clustering.centroids,
            extensions=np.ones(1),
            radii=radii,
            objective=geometric_objective(data, polytope),
            config=config,
            assignments=clustering.assignments,
        )
    extensions = default_extensions(center, clustering.centroids, radii)
    vertices = np.stack(
        [
            extend_and_threshold(center, clustering.centroids[j], extensions[j])
            for j in range(k)
        ]
    )
    polytope = TopicPolytope(vertices / vertices.sum(axis=1, keepdims=True))
    return GdmModel(
        polytope=polytope,
        center=center,
        centroids=clustering.centroids,
        extensions=extensions,
        radii=radii,
        objective=geometric_objective(data, polytope),
        config=config,
        assignments=clustering.assignments,
    )


def fit_gdm(data: NormalizedCorpus, config: GdmConfig, rng=None) -> GdmModel:
    """Geometric Dirichlet Means: weighted k-means plus vertex extension."""
    if config.K is None:
        raise ValueError("fit_gdm needs config.K; use fit_ngdm for the penalized variant")
    if config.K > data.M:
        raise ValueError(f"K={config.K} exceeds the number of documents M={data.M}")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    order = _canonical_order(data)
    ordered = NormalizedCorpus(rows=data.rows[order], weights=data.weights[order])
    clustering = fit_kmeans(ordered, config.K, config.restarts, config.max_iters, rng)
    clustering = _reorder_assignments(clustering, order, data.M)
    model = _correct(data, clustering, config)
    if config.tune:
        model = tune_extensions(model, data)
    return model


def fit_ngdm(data: NormalizedCorpus, config: GdmConfig, rng=None) -> GdmModel:
    """Nonparametric GDM: DP-means picks the topic count, correction as in GDM.

    The reported objective includes the lam * K' penalty.
    """
    if config.lam is None:
        raise ValueError("fit_ngdm needs config.lam")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    order = _canonical_order(data)
    ordered = NormalizedCorpus(rows=data.rows[order], weights=data.weights[order])
    clustering = fit_dpmeans(
        ordered, config.lam, config.max_iters, rng, weighted_rule=config.weighted_dpmeans_rule
    )
    clustering = _reorder_assignments(clustering, order, data.M)
    model = _correct(data, clustering, config)
    model = replace(model, objective=model.objective + config.lam * model.K)
    if config.tune:
        model = tune_extensions(model, data)
    return model


def _reorder_assignments(clustering: ClusteringResult, order, M) -> ClusteringResult:
    assignments = np.empty(M, dtype=np.int64)
    assignments[order] = clustering.assignments
    return ClusteringResult(
        centroids=clustering.centroids,
        assignments=assignments,
        objective=clustering.objective,
    )


def tune_extensions(model: GdmModel, data: NormalizedCorpus, assignments=None) -> GdmModel:
    """Line-search each extension scalar over [1, default m_k].

    Clusters are visited in ascending index order; cluster k's per-cluster
    geometric objective is minimized by bounded scalar search while the other
    topics stay at their current vertices. If the joint objective somehow
    ends up worse than the input model's, the input model is returned.
    """
    if assignments is None:
        assignments = model.assignments
    assignments = np.asarray(assignments)
    k_total = model.K
    if k_total == 1:
        return model
    vertices = model.polytope.vertices.copy()
    extensions = model.extensions.copy()
    for k in range(k_total):
        members = np.flatnonzero(assignments == k)
        if members.size == 0:
            continue
        sub = NormalizedCorpus(
            rows=data.rows[members],
            weights=data.weights[members],
        )

        def g_k(m, _k=k, _sub=sub):
            cand = vertices.copy()
            v = extend_and_threshold(model.center, model.centroids[_k], m)
            cand[_k] = v / v.sum()
            return geometric_objective(_sub, TopicPolytope(cand))

        hi = float(extensions[k])
        if hi <= 1.0 + 1e-12:
            continue
        res = minimize_scalar(g_k, bounds=(1.0, hi), method="bounded", options={"xatol": 1e-4})
        candidates = [(g_k(hi), hi), (float(res.fun), float(res.x)), (g_k(1.0), 1.0)]
        best_val, best_m = min(candidates, key=lambda t: t[0])
        extensions[k] = best_m
        v = extend_and_threshold(model.center, model.centroids[k], best_m)
        vertices[k] = v / v.sum()
    tuned_polytope = TopicPolytope(vertices)
    tuned_obj = geometric_objective(data, tuned_polytope)
    base_obj = geometric_objective(data, model.polytope)
    if tuned_obj > base_obj + 1e-9:
        return model
    penalty = model.objective - base_obj  # carries lam * K' for nGDM, ~0 otherwise
    return replace(
        model,
        polytope=tuned_polytope,
        extensions=extensions,
        objective=tuned_obj + penalty,
    )


def model_to_dict(model: GdmModel) -> dict:
    cfg = model.config
    return {
        "beta": model.polytope.vertices.tolist(),
        "center": model.center.tolist(),
        "centroids": model.centroids.tolist(),
        "extensions": model.extensions.tolist(),
        "radii": model.radii.tolist(),
        "objective": model.objective,
        "config": {
            "K": cfg.K,
            "restarts": cfg.restarts,
            "max_iters": cfg.max_iters,
            "weighted_center": cfg.weighted_center,
            "tune": cfg.tune,
            "lambda": cfg.lam,
            "seed": cfg.seed,
            "weighted_dpmeans_rule": cfg.weighted_dpmeans_rule,
        },
    }


def save_model(model: GdmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=1, sort_keys=True)
        f.write("\n")


def load_model(path) -> GdmModel:
    with open(path, "r", encoding="utf-8") as f:
        d = json.load(f)
    cfg = d["config"]
    config = GdmConfig(
        K=cfg["K"],
        restarts=cfg["restarts"],
        max_iters=cfg["max_iters"],
        weighted_center=cfg["weighted_center"],
        tune=cfg["tune"],
        lam=cfg["lambda"],
        seed=cfg["seed"],
        weighted_dpmeans_rule=cfg.get("weighted_dpmeans_rule", True),
    )
    beta = np.asarray(d["beta"], dtype=np.float64)
    return GdmModel(
        polytope=TopicPolytope(beta),
        center=np.asarray(d["center"]),
        centroids=np.asarray(d["centroids"]),
        extensions=np.asarray(d["extensions"]),
        radii=np.asarray(d["radii"]),
        objective=float(d["objective"]),
        config=config,
        assignments=np.zeros(0, dtype=np.int64),
    )
