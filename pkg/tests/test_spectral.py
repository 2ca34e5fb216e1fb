import math

import numpy as np
import pytest
import scipy.linalg

from sbmperturb.errors import ClampedStack, DegenerateVariance, NonSymmetric
from sbmperturb.estimation import BlockEstimate, block_counts, estimate_block_matrix
from sbmperturb.model import build_model, oracle_labels, benchmark_model, probability_matrix, sample_adjacency
from sbmperturb.seeding import derive_seed
from sbmperturb.spectral import (
    compute_L,
    largest_eigenvalue,
    standardize,
    trace_cube,
    trace_product,
    trace_report,
)
from sbmperturb.stack import build_stack


def report_for(model, A, est=None, **kw):
    g = oracle_labels(model)
    est = estimate_block_matrix(A, g, model.K) if est is None else est
    return trace_report(build_stack(A, probability_matrix(model, g), est), model, est, **kw)


def test_trace_helpers(rng):
    M = rng.normal(size=(7, 7))
    N = rng.normal(size=(7, 7))
    assert trace_product(M, N) == pytest.approx(np.trace(M @ N))
    S = M + M.T
    assert trace_cube(S) == pytest.approx(np.sum(np.linalg.eigvalsh(S) ** 3))


def test_hand_computed_k1():
    m = build_model(1, [[0.5]], [3])
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 0] = 1
    rep = report_for(m, A, eigenvalue=False)
    assert rep.eta == pytest.approx(1 / 3, abs=1e-15)
    assert rep.sq_simple == pytest.approx(2 / 9, abs=1e-15)
    assert rep.cross_simple == pytest.approx(-2 / 9, abs=1e-15)
    assert rep.tr_ahat_sq == pytest.approx(2, abs=1e-12)


def test_zero_perturbation():
    m = benchmark_model(2, n=40)
    g = oracle_labels(m)
    A = sample_adjacency(m, g, 0)
    n_u, n_uv = block_counts(g, 2)
    est = BlockEstimate(B_hat=np.array(m.B), counts_n_u=n_u, counts_n_uv=n_uv, labels_used=g)
    rep = report_for(m, A, est)
    assert rep.cross_simple == rep.sq_simple == rep.eta == 0
    assert rep.tr_abar_sq == rep.tr_astar_sq
    z = standardize(rep, 40, 2)
    assert z.chi_simple_cross == 0 and z.chi_simple_sq == 0 and z.chi_composite_sq == 0
    s = build_stack(A, probability_matrix(m, g), est)
    assert z.z_lss == pytest.approx(trace_cube(s.astar) / math.sqrt(6))


@pytest.mark.parametrize("seed", range(4))
def test_identity_suite(seed):
    m = benchmark_model(2)
    rep = report_for(m, sample_adjacency(m, oracle_labels(m), seed), eigenvalue=False)
    n, eta = 400, rep.eta
    assert abs(rep.tr_ahat_sq - (n - 1)) <= 1e-9 * n
    assert abs(rep.cross_simple + 2 * eta / n) <= 1e-10 * (1 + eta)
    assert abs(rep.sq_simple - 2 * eta / n) <= 1e-10 * (1 + eta)
    assert abs(rep.cross_simple + rep.sq_simple) <= 1e-10 * (1 + eta)
    assert rep.additivity_residual_simple < 1e-9 * n
    assert rep.additivity_residual_composite < 1e-9 * n
    z = standardize(rep, n, 2)
    assert z.chi_simple_cross == pytest.approx(eta, abs=1e-8)
    assert z.chi_simple_sq == pytest.approx(eta, abs=1e-8)


def test_tr_ahat_sq_any_labels(rng):
    m = benchmark_model(2, n=50)
    A = sample_adjacency(m, oracle_labels(m), 3)
    g = rng.integers(1, 3, 50)
    est = estimate_block_matrix(A, g, 2)
    s = build_stack(A, probability_matrix(m, oracle_labels(m)), est)
    assert trace_product(s.ahat, s.ahat) == pytest.approx(49, abs=1e-10)


def test_compute_L_oracles():
    assert compute_L(np.full((10, 10), 0.5)) == pytest.approx(9 / 10)
    assert compute_L(np.full((100, 100), 0.1)) == pytest.approx(8.0300, abs=1e-4)
    m = benchmark_model(2)
    L = compute_L(probability_matrix(m, oracle_labels(m)))
    assert L == pytest.approx(4.6360, abs=1e-4)
    assert 2 * L - 2 == pytest.approx(7.2719, abs=1e-4)


def test_largest_eigenvalue_small():
    assert largest_eigenvalue(np.array([[0.0, 3.0], [3.0, 0.0]])) == pytest.approx(3)
    assert largest_eigenvalue(np.diag([1.0, 5.0, 2.0])) == pytest.approx(5)
    with pytest.raises(NonSymmetric):
        largest_eigenvalue(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("n", [50, 200, 300])
def test_largest_eigenvalue_matches_full_eig(n):
    m = benchmark_model(2, n=n)
    g = oracle_labels(m)
    A = sample_adjacency(m, g, n)
    s = build_stack(A, probability_matrix(m, g), estimate_block_matrix(A, g, 2))
    for M in (s.astar, s.ahat, s.delta_tilde):
        ref = scipy.linalg.eigvalsh(M)[-1]
        for method in ("dense", "lanczos"):
            assert largest_eigenvalue(M, method=method) == pytest.approx(ref, abs=1e-8)


def test_goe_edge_mean():
    m = 1000
    vals = []
    for r in range(500):
        X = np.random.default_rng(derive_seed(3, r)).standard_normal((m, m))
        vals.append(m ** (2 / 3) * (largest_eigenvalue((X + X.T) / math.sqrt(2 * m)) - 2))
    assert abs(np.mean(vals) + 1.21) < 0.15


def test_standardize_df_and_degenerate():
    m = benchmark_model(2, n=40)
    rep = report_for(m, sample_adjacency(m, oracle_labels(m), 0), eigenvalue=False)
    assert standardize(rep, 40, 2).df_chi == 3
    assert standardize(rep, 40, 5).df_chi == 15
    m = build_model(1, [[0.5]], [10])
    rep = report_for(m, sample_adjacency(m, oracle_labels(m), 0), L_source="true")
    with pytest.raises(DegenerateVariance):
        standardize(rep, 10, 1)


def test_clamped_stack_refused():
    A = np.zeros((6, 6))
    A[:3, :3] = 1
    np.fill_diagonal(A, 0)
    m = benchmark_model(2, n=6)
    g = oracle_labels(m)
    est = estimate_block_matrix(A, g)
    s = build_stack(A, probability_matrix(m, g), est, clamp_epsilon=1e-6)
    with pytest.raises(ClampedStack):
        trace_report(s, m, est)


def test_L_plugin_mode():
    m = benchmark_model(2, n=40)
    g = oracle_labels(m)
    A = sample_adjacency(m, g, 1)
    est = estimate_block_matrix(A, g)
    rep = trace_report(build_stack(A, probability_matrix(m, g), est), m, est, L_source="plugin")
    assert rep.L_value == pytest.approx(compute_L(est.expand()))
