"""Synthetic corpora from the LDA generative model with known ground truth.

Documents are drawn by the marginalized route: topic rows beta ~ Dir_V(eta),
per-document proportions theta ~ Dir_K(alpha), word probabilities
p_m = theta_m . beta, and counts w_m ~ Multinomial(p_m, N_m). Every document
uses an independent RNG substream derived from (seed, m), so generation is
reproducible regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus

# substream tags keeping beta / theta / lengths / documents independent
_BETA_STREAM = 0
_THETA_STREAM = 1
_LENGTH_STREAM = 2
_DOC_STREAM = 3


@dataclass(frozen=True)
class LdaParams:
    """Hyperparameters of the symmetric-Dirichlet LDA generator.

    ``doc_lengths`` is either a single int (constant length), a tuple
    ``(lo, hi)`` for i.i.d. uniform integer lengths, or a sequence of M
    per-document lengths.
    """

    K: int
    V: int
    M: int
    doc_lengths: object
    alpha: float
    eta: float
    seed: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.V < 2:
            raise ValueError("V must be >= 2")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        lengths = self.doc_lengths
        if isinstance(lengths, tuple):
            if len(lengths) != 2 or lengths[0] < 1 or lengths[1] < lengths[0]:
                raise ValueError(f"invalid length range {lengths}")
        elif np.isscalar(lengths):
            if int(lengths) < 1:
                raise ValueError("document length must be >= 1")
        else:
            arr = np.asarray(lengths, dtype=np.int64)
            if arr.shape != (self.M,) or (arr < 1).any():
                raise ValueError("per-document lengths must be M positive integers")

    def resolve_lengths(self) -> np.ndarray:
        if isinstance(self.doc_lengths, tuple):
            lo, hi = self.doc_lengths
            rng = np.random.default_rng([self.seed, _LENGTH_STREAM])
            return rng.integers(lo, hi + 1, size=self.M, dtype=np.int64)
        if np.isscalar(self.doc_lengths):
            return np.full(self.M, int(self.doc_lengths), dtype=np.int64)
        return np.asarray(self.doc_lengths, dtype=np.int64)


@dataclass(frozen=True)
class GroundTruth:
    """Generating parameters of a synthetic corpus: beta, theta and p = theta.beta."""

    beta: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    params: LdaParams


def sample_dirichlet(dim: int, concentration: float, rng: np.random.Generator) -> np.ndarray:
    """One draw from a symmetric Dirichlet via normalized Gamma variates.

    Small concentrations are sampled in log space (Gamma(a+1) boost plus a
    log-uniform factor) so that draws do not underflow to an all-zero vector.
    """
    if not concentration > 0:
        raise ValueError(f"concentration must be positive, got {concentration}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.ones(1)
    if concentration >= 0.05:
        g = rng.standard_gamma(concentration, size=dim)
        s = g.sum()
        if s > 0:
            return g / s
    # log-space route: X = G(a+1) * U^{1/a}
    boost = rng.standard_gamma(concentration + 1.0, size=dim)
    u = rng.random(size=dim)
    logx = np.log(boost) + np.log1p(-u) / concentration
    logx -= logx.max()
    x = np.exp(logx)
    return x / x.sum()


def _sample_stochastic_matrix(n_rows, dim, concentration, rng):
    return np.stack([sample_dirichlet(dim, concentration, rng) for _ in range(n_rows)])


def generate_corpus(params: LdaParams, beta=None, theta=None):
    """Draw a corpus and its ground truth from the LDA model.

    ``beta`` and ``theta`` are test-only injection hooks: passing a
    row-stochastic matrix fixes that factor instead of sampling it, so the
    mixing arithmetic can be exercised deterministically.

    Returns (Corpus, GroundTruth).
    """
    if beta is None:
        beta = _sample_stochastic_matrix(
            params.K, params.V, params.eta, np.random.default_rng([params.seed, _BETA_STREAM])
        )
    else:
        beta = np.asarray(beta, dtype=np.float64)
        if beta.shape != (params.K, params.V):
            raise ValueError(f"injected beta must be {params.K}x{params.V}")
        if not np.allclose(beta.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("injected beta rows must sum to 1")
    if theta is None:
        theta = _sample_stochastic_matrix(
            params.M, params.K, params.alpha, np.random.default_rng([params.seed, _THETA_STREAM])
        )
    else:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (params.M, params.K):
            raise ValueError(f"injected theta must be {params.M}x{params.K}")
        if not np.allclose(theta.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("injected theta rows must sum to 1")

    p = theta @ beta
    lengths = params.resolve_lengths()
    counts = np.empty((params.M, params.V), dtype=np.int64)
    for m in range(params.M):
        doc_rng = np.random.default_rng([params.seed, _DOC_STREAM, m])
        pm = p[m] / p[m].sum()
        counts[m] = doc_rng.multinomial(lengths[m], pm)
    truth = GroundTruth(beta=beta, theta=theta, p=p, params=params)
    return Corpus(counts), truth
