import numpy as np
import pytest

from gdmtopics.corpus import normalize
from gdmtopics.geometry import TopicPolytope, project_point
from gdmtopics.synth import LdaParams, generate_corpus, sample_dirichlet


def test_dirichlet_dim_one():
    rng = np.random.default_rng(0)
    assert sample_dirichlet(1, 0.7, rng).tolist() == [1.0]


def test_dirichlet_determinism():
    a = sample_dirichlet(6, 0.3, np.random.default_rng(42))
    b = sample_dirichlet(6, 0.3, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_dirichlet_rejects_bad_concentration():
    with pytest.raises(ValueError):
        sample_dirichlet(3, 0.0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_dirichlet(3, -1.0, np.random.default_rng(0))


def test_dirichlet_simplex_and_positive():
    rng = np.random.default_rng(1)
    for conc in (0.1, 1.0, 10.0):
        for _ in range(50):
            x = sample_dirichlet(5, conc, rng)
            assert abs(x.sum() - 1.0) < 1e-12
            assert (x > 0).all()


def test_dirichlet_mean_symmetry():
    # Monte-Carlo oracle: symmetric Dirichlet has mean 1/dim per coordinate
    rng = np.random.default_rng(7)
    draws = np.stack([sample_dirichlet(5, 0.1, rng) for _ in range(100_000)])
    assert np.abs(draws.mean(axis=0) - 0.2).max() < 0.01


def test_dirichlet_tiny_concentration_no_underflow():
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = sample_dirichlet(4, 0.001, rng)
        assert abs(x.sum() - 1.0) < 1e-12
        assert np.isfinite(x).all()


def test_generate_mixing_arithmetic_with_injection():
    K, V, M = 2, 4, 3
    beta = np.zeros((K, V))
    beta[0, 0] = beta[1, 1] = 1.0
    theta = np.full((M, K), 0.5)
    params = LdaParams(K=K, V=V, M=M, doc_lengths=8, alpha=1.0, eta=1.0, seed=0)
    _, truth = generate_corpus(params, beta=beta, theta=theta)
    assert np.allclose(truth.p, [[0.5, 0.5, 0, 0]] * M)


def test_generate_row_totals_match_lengths():
    params = LdaParams(K=3, V=7, M=25, doc_lengths=(2, 9), alpha=0.5, eta=0.5, seed=4)
    corpus, _ = generate_corpus(params)
    assert np.array_equal(
        np.asarray(corpus.counts.sum(axis=1)).ravel(), corpus.lengths
    )
    assert ((corpus.lengths >= 2) & (corpus.lengths <= 9)).all()


def test_generate_deterministic():
    params = LdaParams(K=2, V=5, M=10, doc_lengths=6, alpha=0.2, eta=0.2, seed=9)
    c1, t1 = generate_corpus(params)
    c2, t2 = generate_corpus(params)
    assert c1 == c2
    assert np.array_equal(t1.beta, t2.beta)
    assert np.array_equal(t1.theta, t2.theta)


def test_generate_law_of_large_numbers():
    # Monte-Carlo oracle: empirical frequencies converge to p
    params = LdaParams(K=3, V=6, M=1, doc_lengths=100_000, alpha=0.5, eta=0.5, seed=12)
    corpus, truth = generate_corpus(params)
    wbar = normalize(corpus).rows[0]
    assert np.abs(wbar - truth.p[0]).max() < 0.01


def test_ground_truth_rows_inside_polytope():
    params = LdaParams(K=4, V=8, M=30, doc_lengths=5, alpha=0.3, eta=0.3, seed=21)
    _, truth = generate_corpus(params)
    polytope = TopicPolytope(truth.beta)
    for m in range(truth.p.shape[0]):
        assert project_point(truth.p[m], polytope).sq_distance < 1e-9


def test_alpha_to_zero_weak_limit():
    # draws concentrate on the vertices, near-uniformly across topics
    params = LdaParams(K=4, V=6, M=2000, doc_lengths=3, alpha=1e-3, eta=0.5, seed=33)
    _, truth = generate_corpus(params)
    peak = truth.theta.max(axis=1)
    assert np.mean(peak > 0.99) > 0.95
    counts = np.bincount(np.argmax(truth.theta, axis=1), minlength=4)
    assert counts.min() > 400 and counts.max() < 600  # near-uniform over the 4 topics


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(K=0, V=3, M=1, doc_lengths=1, alpha=1, eta=1, seed=0),
        dict(K=1, V=1, M=1, doc_lengths=1, alpha=1, eta=1, seed=0),
        dict(K=1, V=3, M=0, doc_lengths=1, alpha=1, eta=1, seed=0),
        dict(K=1, V=3, M=1, doc_lengths=0, alpha=1, eta=1, seed=0),
        dict(K=1, V=3, M=1, doc_lengths=1, alpha=0, eta=1, seed=0),
        dict(K=1, V=3, M=1, doc_lengths=1, alpha=1, eta=-2, seed=0),
        dict(K=1, V=3, M=2, doc_lengths=[1, 2, 3], alpha=1, eta=1, seed=0),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        LdaParams(**kwargs)
