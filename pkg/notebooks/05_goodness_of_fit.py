"""
Testing the number of communities
=================================

Test H0: "the network is a K0-block model" using only the data, then choose
K by testing K0 = 1, 2, ... until the first acceptance.
"""

# %%
from sbmperturb import estimate_num_communities, gof_test, oracle_labels, benchmark_model, sample_adjacency

model = benchmark_model(3)
g = oracle_labels(model)
A = sample_adjacency(model, g, seed=11)

for k0 in (1, 2, 3):
    for kind in ("lambda1_tw", "lss_normal"):
        out = gof_test(A, k0, kind, seed=0, truth=g)
        print(f"K0={k0} {kind:10s} value={out.value:10.3f} p={out.p_value:.3g} reject={out.reject}")

# %%
result = estimate_num_communities(A, kmax=5, statistic_kind="lss_normal", seed=0)
print("k_hat =", result.k_hat, " p-values along the way:", [round(o.p_value, 4) for o in result.trail])
