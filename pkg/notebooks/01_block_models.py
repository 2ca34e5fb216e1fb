"""
Block models, sampling and estimation
=====================================

Build the two-community model used throughout, draw a network, and recover
labels and the block matrix from it.
"""

# %%
import numpy as np

from sbmperturb import build_model, estimate_block_matrix, estimate_labels, oracle_labels, sample_adjacency
from sbmperturb.estimation import align_labels
from sbmperturb.model import check_assumptions, probability_matrix

model = build_model(2, [[0.4, 0.1], [0.1, 0.4]], [200, 200])
g = oracle_labels(model)
P = probability_matrix(model, g)
print("n =", model.n, "  balance:", check_assumptions(model))

# %%
# A draw is a pure function of its seed.
A = sample_adjacency(model, g, seed=1)
print("edges:", np.triu(A).sum(), "(expected 19920 +- 114.7)")
assert np.array_equal(A, sample_adjacency(model, g, seed=1))

# %%
# The MLE of B under the true labels, and under spectral-clustering labels.
est = estimate_block_matrix(A, g)
print("B_hat (oracle labels):\n", est.B_hat.round(4))

g_hat = estimate_labels(A, 2, mode="spectral", seed=0)
print("misclustering rate:", align_labels(g, g_hat).misclustering_rate)
print("B_hat (spectral labels):\n", estimate_block_matrix(A, g_hat).B_hat.round(4))
