"""Ground-truth stochastic block models: construction, expansion and sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CommunityTooSmall, LabelOutOfRange, NonSymmetricB, ProbabilityOutOfRange


@dataclass(frozen=True)
class BlockModel:
    """A K-community SBM with explicit community sizes.

    Attributes
    ----------
    K : int
        Number of communities.
    B : ndarray, shape (K, K)
        Symmetric block probability matrix, entries in the open interval (0, 1).
    sizes : ndarray of int, shape (K,)
        Community sizes, each at least 2.
    """

    K: int
    B: np.ndarray
    sizes: np.ndarray

    @property
    def n(self) -> int:
        return int(self.sizes.sum())


@dataclass(frozen=True)
class BalanceDiagnostics:
    """Observable parts of the community-balance conditions.

    ``min_ratio = K * min(n_k) / n`` and ``max_ratio = log(K) * max(n_k) / n``.
    """

    min_ratio: float
    max_ratio: float


def build_model(K: int, B, sizes) -> BlockModel:
    """Validate block parameters and return an immutable :class:`BlockModel`.

    Raises
    ------
    NonSymmetricB
        If ``B`` is not exactly symmetric.
    ProbabilityOutOfRange
        If any entry of ``B`` is not strictly inside (0, 1).
    CommunityTooSmall
        If some community has fewer than two nodes.
    """
    K = int(K)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    B = np.array(B, dtype=float)
    sizes = np.array(sizes, dtype=np.int64)
    if B.shape != (K, K):
        raise ValueError(f"B must be {K}x{K}, got shape {B.shape}")
    if sizes.shape != (K,):
        raise ValueError(f"sizes must have {K} entries, got {sizes.shape}")
    if not np.array_equal(B, B.T):
        u, v = np.argwhere(B != B.T)[0]
        raise NonSymmetricB(f"B[{u}][{v}]={B[u, v]} differs from B[{v}][{u}]={B[v, u]}")
    bad = ~((B > 0) & (B < 1))
    if bad.any():
        u, v = np.argwhere(bad)[0]
        raise ProbabilityOutOfRange(f"B[{u}][{v}]={B[u, v]} is not in (0, 1)")
    if (sizes < 2).any():
        k = int(np.argmax(sizes < 2))
        raise CommunityTooSmall(f"community {k + 1} has size {sizes[k]} < 2")
    B.setflags(write=False)
    sizes.setflags(write=False)
    return BlockModel(K=K, B=B, sizes=sizes)


def balanced_sizes(n: int, K: int) -> np.ndarray:
    """Split ``n`` nodes into ``K`` near-equal communities.

    Remainders go to the lowest-index communities.
    """
    base, extra = divmod(int(n), int(K))
    return np.array([base + (k < extra) for k in range(K)], dtype=np.int64)


def benchmark_model(K: int, n: int | None = None) -> BlockModel:
    """The simulation setting ``B = 0.1 (1 + 3 * I(u == v))`` with ``n = 200 K``."""
    if n is None:
        n = 200 * K
    B = 0.1 * (1 + 3 * np.eye(K))
    return build_model(K, B, balanced_sizes(n, K))


def oracle_labels(model: BlockModel) -> np.ndarray:
    """Canonical block ordering: the first ``n_1`` nodes get label 1, and so on."""
    return np.repeat(np.arange(1, model.K + 1), model.sizes)


def validate_labels(labels, K: int) -> np.ndarray:
    """Return ``labels`` as an int array, checking every value lies in 1..K."""
    g = np.asarray(labels)
    if g.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if not np.issubdtype(g.dtype, np.integer):
        if not np.all(g == np.round(g)):
            raise LabelOutOfRange("labels must be integers")
        g = g.astype(np.int64)
    if g.size and (g.min() < 1 or g.max() > K):
        raise LabelOutOfRange(f"labels must lie in 1..{K}, got range [{g.min()}, {g.max()}]")
    return g


def probability_matrix(model: BlockModel, labels) -> np.ndarray:
    """Expand ``B`` to the n x n matrix ``P_ij = B[g_i, g_j]``, diagonal included."""
    g = validate_labels(labels, model.K) - 1
    return model.B[np.ix_(g, g)]


def sample_adjacency(model: BlockModel, labels, seed) -> np.ndarray:
    """Draw a symmetric, hollow 0/1 adjacency matrix from the model.

    Each pair ``i < j`` is an independent Bernoulli(``P_ij``) draw from a
    PCG64 stream seeded by ``seed``; the map seed -> matrix is pure.
    """
    P = probability_matrix(model, labels)
    rng = np.random.default_rng(seed)
    U = rng.random(P.shape)
    A = np.triu(U < P, k=1).astype(np.int8)
    return A + A.T


def check_assumptions(model: BlockModel) -> BalanceDiagnostics:
    n = model.n
    return BalanceDiagnostics(
        min_ratio=float(model.K * model.sizes.min() / n),
        max_ratio=float(math.log(model.K) * model.sizes.max() / n) if model.K > 1 else 0.0,
    )
