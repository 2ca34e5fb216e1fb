import itertools

import numpy as np
import pytest

from sbmperturb.errors import KTooLarge, LabelOutOfRange, MismatchedLength
from sbmperturb.estimation import align_labels, estimate_block_matrix, estimate_labels, kmeans
from sbmperturb.model import oracle_labels, benchmark_model, sample_adjacency
from sbmperturb.seeding import derive_seed


def edges_to_matrix(n, edges, one_based=True):
    A = np.zeros((n, n), dtype=np.int8)
    for i, j in edges:
        i, j = (i - 1, j - 1) if one_based else (i, j)
        A[i, j] = A[j, i] = 1
    return A


def cliques(sizes):
    n = sum(sizes)
    A = np.zeros((n, n), dtype=np.int8)
    start = 0
    for s in sizes:
        A[start : start + s, start : start + s] = 1
        start += s
    np.fill_diagonal(A, 0)
    return A


def test_two_three_cliques():
    est = estimate_block_matrix(cliques([3, 3]), [1, 1, 1, 2, 2, 2])
    np.testing.assert_array_equal(est.B_hat, [[1, 0], [0, 1]])


def test_single_edge_k1():
    est = estimate_block_matrix(edges_to_matrix(3, [(1, 2)]), [1, 1, 1])
    assert est.B_hat[0, 0] == pytest.approx(1 / 3)


def test_hand_count():
    A = edges_to_matrix(5, [(1, 2), (1, 3), (1, 4), (4, 5)])
    est = estimate_block_matrix(A, [1, 1, 1, 2, 2])
    np.testing.assert_allclose(est.B_hat, [[2 / 3, 1 / 6], [1 / 6, 1]], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(est.counts_n_uv, [[3, 6], [6, 1]])


def test_weighted_edge_identity_and_equivariance():
    m = benchmark_model(3, n=90)
    g = oracle_labels(m)
    A = sample_adjacency(m, g, 3)
    est = estimate_block_matrix(A, g)
    iu = np.triu_indices(3)
    assert round(float((est.counts_n_uv * est.B_hat)[iu].sum())) == np.triu(A).sum()
    perm = np.array([2, 0, 1])
    est_p = estimate_block_matrix(A, perm[g - 1] + 1)
    Bp = np.empty_like(est.B_hat)
    Bp[np.ix_(perm, perm)] = est.B_hat
    np.testing.assert_allclose(est_p.B_hat, Bp, atol=1e-15)


def test_mle_concentration():
    m = benchmark_model(2)
    g = oracle_labels(m)
    close = 0
    for r in range(500):
        est = estimate_block_matrix(sample_adjacency(m, g, derive_seed(99, r)), g)
        close += np.abs(est.B_hat - m.B).max() < 0.05
    assert close >= 0.99 * 500


def test_estimate_block_matrix_errors():
    with pytest.raises(MismatchedLength):
        estimate_block_matrix(np.zeros((3, 3)), [1, 1])
    with pytest.raises(LabelOutOfRange):
        estimate_block_matrix(np.zeros((3, 3)), [1, 2, 3], K=2)


def test_spectral_recovers_disconnected_cliques():
    g = estimate_labels(cliques([5, 5]), 2, seed=0)
    assert align_labels(np.repeat([1, 2], 5), g).misclustering_rate == 0
    assert g[0] == 1  # first-appearance order


def test_oracle_mode_returns_truth():
    truth = np.array([2, 1, 2, 1])
    np.testing.assert_array_equal(estimate_labels(np.zeros((4, 4)), 2, mode="oracle", truth=truth), truth)


def test_k_too_large():
    with pytest.raises(KTooLarge):
        estimate_labels(np.zeros((3, 3)), 4)


def test_spectral_exact_recovery_rate():
    m = benchmark_model(2)
    g = oracle_labels(m)
    exact = 0
    for r in range(100):
        A = sample_adjacency(m, g, derive_seed(5, r))
        exact += align_labels(g, estimate_labels(A, 2, seed=r)).misclustering_rate == 0
    assert exact >= 95


def test_kmeans_is_deterministic(rng):
    X = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(3, 0.1, (20, 2))])
    a = kmeans(X, 2, np.random.default_rng(1))
    b = kmeans(X, 2, np.random.default_rng(1))
    np.testing.assert_array_equal(a, b)
    assert len(set(a[:20])) == 1 and len(set(a[20:])) == 1 and a[0] != a[-1]


def test_align_labels_examples():
    a = align_labels([1, 1, 2, 2], [2, 2, 1, 1])
    assert a.misclustering_rate == 0
    np.testing.assert_array_equal(a.permutation, [2, 1])
    a = align_labels([1, 1, 2, 2], [1, 1, 2, 2])
    np.testing.assert_array_equal(a.permutation, [1, 2])
    assert align_labels([1, 1, 2, 2], [1, 2, 1, 2]).misclustering_rate == 0.5


def test_align_labels_matches_brute_force(rng):
    for _ in range(20):
        truth = rng.integers(1, 4, 30)
        est = rng.integers(1, 4, 30)
        best = min(np.mean(np.array(p)[est - 1] != truth) for p in itertools.permutations([1, 2, 3]))
        assert align_labels(truth, est).misclustering_rate == pytest.approx(best)


def test_align_labels_hungarian_path(rng):
    truth = rng.integers(1, 11, 200)
    perm = rng.permutation(10) + 1
    est = np.argsort(perm)[truth - 1] + 1  # est label k maps back to truth perm[k-1]
    a = align_labels(truth, est)
    assert a.misclustering_rate == 0
    np.testing.assert_array_equal(a.permutation[est - 1], truth)
