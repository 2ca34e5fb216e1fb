"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""

import math

import numpy as np
import pytest
from scipy import integrate

from sbmperturb import distributions as dist
from sbmperturb.estimation import estimate_block_matrix
from sbmperturb.model import oracle_labels, benchmark_model, probability_matrix, sample_adjacency
from sbmperturb.montecarlo import benchmark_config, run_replications, summarize
from sbmperturb.seeding import derive_seed
from sbmperturb.spectral import compute_L, trace_report
from sbmperturb.stack import build_stack, numeric_rank

from conftest import SEED, record_criterion

CHI3 = dist.chi_square(3)
NORMAL = dist.standard_normal()


@pytest.fixture(scope="module")
def oracle_draws():
    """50 seeded K=2 draws with oracle labels: (model, estimate, stack, report)."""
    model = benchmark_model(2)
    g = oracle_labels(model)
    P = probability_matrix(model, g)
    out = []
    for r in range(50):
        A = sample_adjacency(model, g, derive_seed(SEED, r))
        est = estimate_block_matrix(A, g, 2)
        stack = build_stack(A, P, est)
        out.append((model, est, stack, trace_report(stack, model, est, eigenvalue=False)))
    return out


def test_c01_exact_identities(oracle_draws):
    failures = 0
    worst = 0.0
    for model, est, s, rep in oracle_draws:
        n, eta = s.n, rep.eta
        off = ~np.eye(n, dtype=bool)
        eq43 = np.abs(s.delta_tilde - (s.a_check + s.delta + s.delta_check)).max()
        remark = np.abs((s.ahat - (1 + s.alpha) * s.abar)[off]).max()
        ok = (
            abs(rep.tr_ahat_sq - (n - 1)) <= 1e-9 * n
            and eq43 <= 1e-12
            and abs(rep.cross_simple + 2 * eta / n) <= 1e-10 * (1 + eta)
            and abs(rep.sq_simple - 2 * eta / n) <= 1e-10 * (1 + eta)
            and remark <= 1e-12
        )
        worst = max(worst, eq43, remark)
        failures += not ok
    record_criterion(1, failures == 0, f"exact identities: {50 - failures}/50 replications, worst entrywise {worst:.1e}")
    assert failures == 0


def test_c02_low_rank(oracle_draws):
    K = 2
    low = 0
    full = 0
    for _, _, s, _ in oracle_draws:
        low += numeric_rank(s.delta_bar) <= K and numeric_rank(s.delta_hat) <= K
        full += numeric_rank(s.delta_tilde) > K
    ok = low == 50 and full >= 0.95 * 50
    record_criterion(2, ok, f"rank(delta_bar), rank(delta_hat) <= K in {low}/50; rank(delta_tilde) > K in {full}/50")
    assert ok


def test_c03_simple_cross_chi_square(benchmark_table):
    x = benchmark_table.values("chi_simple_cross")
    ks = dist.ks_distance(x, CHI3)
    ok = ks < 0.06 and abs(x.mean() - 3) <= 0.3
    record_criterion(3, ok, f"-(n/2) tr(A* delta) vs chi2_3: KS {ks:.4f} (< 0.06), mean {x.mean():.3f} (3 +- 0.3)")
    assert ok


def test_c04_composite_and_bias_normal(benchmark_table):
    model = benchmark_model(2)
    g = oracle_labels(model)
    L = compute_L(probability_matrix(model, g))
    # independent block-count summation: 2 * 200 * 199 within pairs, 2 * 200 * 200 cross pairs
    f = lambda p: (p**3 + (1 - p) ** 3) / (p * (1 - p))
    L_direct = (2 * 200 * 199 * f(0.4) + 2 * 200 * 200 * f(0.1)) / 400**2
    ks2 = dist.ks_distance(benchmark_table.values("z_composite_cross"), NORMAL)
    ks3 = dist.ks_distance(benchmark_table.values("z_bias_cross"), NORMAL)
    ok = ks2 < 0.08 and ks3 < 0.08 and abs(L - L_direct) < 1e-10 and abs(L - 4.6360) < 5e-4
    record_criterion(
        4, ok, f"z_composite_cross KS {ks2:.4f}, z_bias_cross KS {ks3:.4f} (< 0.08); L = {L:.4f}, 2L-2 = {2 * L - 2:.4f}"
    )
    assert ok


def test_c05_square_trace_contrast(benchmark_table):
    ks4 = dist.ks_distance(benchmark_table.values("chi_simple_sq"), CHI3)
    ks5 = dist.ks_distance(benchmark_table.values("chi_composite_sq"), CHI3)
    ok = ks4 < 0.06 and ks5 > ks4
    record_criterion(5, ok, f"(n/2) tr(delta^2) KS {ks4:.4f} (< 0.06); (n/2) tr(delta_tilde^2) KS {ks5:.4f} (> simple-square KS)")
    assert ok


def test_c06_tracy_widom():
    table = run_replications(benchmark_config(K=3, reps=300, seed=SEED, statistics=("tw_lambda1",)))
    x = table.values("tw_lambda1")
    ks = dist.ks_distance(x, dist.tracy_widom_1())
    ok = ks < 0.15 and abs(x.mean() + 1.21) <= 0.25
    record_criterion(6, ok, f"n^(2/3)(lambda1 - 2) at n=600, K=3: KS {ks:.4f} (< 0.15), mean {x.mean():.3f} (-1.21 +- 0.25)")
    assert ok


def test_c07_lss(benchmark_table):
    summary = summarize(benchmark_table, alpha=0.05)["z_lss"]
    ok = summary.ks < 0.08 and 0.03 <= summary.reject_rate <= 0.08
    record_criterion(
        7, ok, f"tr(A_hat^3)/sqrt(6): KS {summary.ks:.4f} (< 0.08), type-I {summary.reject_rate:.3f} ([0.03, 0.08])"
    )
    assert ok


def test_c08_decay():
    med = {}
    for n in (400, 1600):
        table = run_replications(benchmark_config(K=2, n=n, reps=200, seed=SEED, statistics=("cross_simple",)))
        med[n] = float(np.median(np.abs(table.values("cross_simple"))))
    factor = med[400] / med[1600]
    ok = 2.5 <= factor <= 6.5
    record_criterion(8, ok, f"median |tr(A* delta)|: n=400 {med[400]:.3e}, n=1600 {med[1600]:.3e}, factor {factor:.2f}")
    assert ok


def test_c09_variance_identity(benchmark_table):
    model = benchmark_model(2)
    target = 2 * compute_L(probability_matrix(model, oracle_labels(model))) - 2
    v = benchmark_table.values("eta_prime").var(ddof=1)
    ok = abs(v / target - 1) <= 0.2
    record_criterion(9, ok, f"var(eta') = {v:.4f} vs 2L-2 = {target:.4f} (ratio {v / target:.3f})")
    assert ok


def _chi2_density(t, k):
    return t ** (k / 2 - 1) * math.exp(-t / 2) / (2 ** (k / 2) * math.gamma(k / 2))


def test_c10_reference_oracles():
    cal = dist.calibrate_tw1(1000, 2000, SEED)
    ks_tw = dist.ks_distance(cal.samples, dist.tracy_widom_1())

    worst = 0.0
    for k in (1, 3, 6):
        law = dist.chi_square(k)
        for x in np.linspace(0.05, 4 * k + 10, 100):
            ref, _ = integrate.quad(_chi2_density, 0, x, args=(k,), epsabs=1e-13, epsrel=1e-12, limit=200)
            worst = max(worst, abs(dist.cdf(law, x) - ref))
    for x in np.linspace(-6, 6, 100):
        ref, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), -np.inf, x, epsabs=1e-13)
        worst = max(worst, abs(dist.cdf(NORMAL, x) - ref))
    ok = ks_tw < 0.03 and worst < 1e-6
    record_criterion(10, ok, f"TW1 grid vs GOE m=1000 x 2000: KS {ks_tw:.4f} (< 0.03); chi2/normal vs quadrature max err {worst:.1e}")
    assert ok
