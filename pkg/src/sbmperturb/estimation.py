"""Community-label recovery and the plug-in block-probability estimator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import CommunityTooSmall, EmptyCluster, KTooLarge, MismatchedLength
from .model import validate_labels


@dataclass(frozen=True)
class BlockEstimate:
    """Maximum-likelihood estimate of ``B`` under a fixed label vector.

    ``counts_n_uv`` holds ``n_u * n_v`` off the diagonal and
    ``n_u (n_u - 1) / 2`` on it. ``B_hat`` is stored raw (it may contain
    exact zeros or ones).
    """

    B_hat: np.ndarray
    counts_n_u: np.ndarray
    counts_n_uv: np.ndarray
    labels_used: np.ndarray

    @property
    def K(self) -> int:
        return self.B_hat.shape[0]

    def expand(self) -> np.ndarray:
        """The n x n plug-in matrix ``P_hat_ij = B_hat[g_i, g_j]``."""
        g = self.labels_used - 1
        return self.B_hat[np.ix_(g, g)]


@dataclass(frozen=True)
class LabelAlignment:
    """Best relabeling of an estimate onto the truth.

    ``permutation[k - 1]`` is the truth label assigned to estimated label ``k``.
    """

    permutation: np.ndarray
    misclustering_rate: float


def block_counts(labels, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Community sizes and pair counts with the ``n_uu = n_u (n_u - 1) / 2`` convention."""
    g = validate_labels(labels, K)
    n_u = np.bincount(g - 1, minlength=K).astype(np.int64)
    n_uv = np.outer(n_u, n_u)
    np.fill_diagonal(n_uv, n_u * (n_u - 1) // 2)
    return n_u, n_uv


def estimate_block_matrix(A, labels, K: int | None = None) -> BlockEstimate:
    """MLE of ``B``: block edge sums divided by the number of node pairs.

    Raises
    ------
    CommunityTooSmall
        If some community has fewer than two members.
    MismatchedLength
        If ``labels`` does not have one entry per node.
    """
    A = np.asarray(A)
    g = np.asarray(labels)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != g.size:
        raise MismatchedLength(f"adjacency has shape {A.shape}, labels have length {g.size}")
    if K is None:
        K = int(g.max())
    n_u, n_uv = block_counts(g, K)
    if (n_u < 2).any():
        k = int(np.argmax(n_u < 2))
        raise CommunityTooSmall(f"community {k + 1} has {n_u[k]} member(s); need at least 2")
    Z = np.zeros((g.size, K))
    Z[np.arange(g.size), g - 1] = 1.0
    sums = Z.T @ A @ Z
    # within-block sums count each i<j pair twice
    sums[np.diag_indices(K)] /= 2.0
    B_hat = sums / n_uv
    return BlockEstimate(B_hat=B_hat, counts_n_u=n_u, counts_n_uv=n_uv, labels_used=g.astype(np.int64))


def first_appearance_order(labels) -> np.ndarray:
    """Relabel so communities are numbered 1, 2, ... in order of first appearance."""
    g = np.asarray(labels)
    _, first = np.unique(g, return_index=True)
    order = g[np.sort(first)]
    mapping = {old: new for new, old in enumerate(order, start=1)}
    return np.array([mapping[x] for x in g], dtype=np.int64)


def _kmeans_pp_init(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = min(int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right")), n - 1)
        centers[c] = X[idx]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers, n_iter):
    k = centers.shape[0]
    assign = None
    for _ in range(n_iter):
        dist = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        # np.argmin returns the lowest index among equidistant centroids
        new = dist.argmin(axis=1)
        counts = np.bincount(new, minlength=k)
        if (counts == 0).any():
            return None, np.inf
        if assign is not None and np.array_equal(new, assign):
            break
        assign = new
        centers = np.stack([X[assign == c].mean(axis=0) for c in range(k)])
    inertia = ((X - centers[assign]) ** 2).sum()
    return assign, float(inertia)


def kmeans(X, k: int, rng, n_init: int = 10, n_iter: int = 100, max_failures: int = 10) -> np.ndarray:
    """Lloyd's k-means with k-means++ seeding; returns 0-based assignments.

    Runs ``n_init`` restarts and keeps the lowest squared-Euclidean objective.
    A restart whose cluster empties is reseeded; :class:`EmptyCluster` is
    raised after ``max_failures`` such failures.
    """
    X = np.asarray(X, dtype=float)
    best, best_inertia = None, np.inf
    failures = done = 0
    while done < n_init:
        assign, inertia = _lloyd(X, _kmeans_pp_init(X, k, rng), n_iter)
        if assign is None:
            failures += 1
            if failures >= max_failures:
                raise EmptyCluster(f"k-means emptied a cluster {failures} times")
            continue
        done += 1
        if inertia < best_inertia:
            best, best_inertia = assign, inertia
    return best


def spectral_embedding(A, K: int) -> np.ndarray:
    """Eigenvectors of ``A`` for its K algebraically largest eigenvalues, as an n x K array."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    _, vecs = scipy.linalg.eigh(A, subset_by_index=[n - K, n - 1])
    return vecs[:, ::-1]


def estimate_labels(A, K: int, mode: str = "spectral", truth=None, seed=None) -> np.ndarray:
    """Recover community labels.

    Parameters
    ----------
    A : array_like
        Adjacency matrix.
    K : int
        Number of communities to fit.
    mode : {"oracle", "spectral"}
        ``"oracle"`` returns ``truth`` unchanged; ``"spectral"`` clusters the
        rows of the top-K eigenvector embedding with k-means.
    truth : array_like, optional
        Required for oracle mode.
    seed : int or Generator, optional
        Randomness for the k-means seeding.
    """
    n = np.asarray(A).shape[0]
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if K > n:
        raise KTooLarge(f"K={K} exceeds the number of nodes n={n}")
    if mode == "oracle":
        if truth is None:
            raise ValueError("oracle mode needs the true labels")
        return validate_labels(truth, K)
    if mode != "spectral":
        raise ValueError(f"unknown label mode {mode!r}")
    if K == 1:
        return np.ones(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    X = spectral_embedding(A, K)
    assign = kmeans(X, K, rng)
    return first_appearance_order(assign + 1)


def align_labels(truth, estimate) -> LabelAlignment:
    """Relabel ``estimate`` to minimize mismatches against ``truth``.

    Exhaustive search over all K! permutations for K <= 8, optimal assignment
    on the confusion matrix otherwise.
    """
    t = np.asarray(truth, dtype=np.int64)
    e = np.asarray(estimate, dtype=np.int64)
    if t.shape != e.shape:
        raise MismatchedLength(f"truth has length {t.size}, estimate has length {e.size}")
    K = int(max(t.max(), e.max()))
    confusion = np.zeros((K, K), dtype=np.int64)
    np.add.at(confusion, (e - 1, t - 1), 1)
    if K <= 8:
        best_perm, best_hits = None, -1
        for perm in itertools.permutations(range(K)):
            hits = confusion[np.arange(K), perm].sum()
            if hits > best_hits:
                best_perm, best_hits = perm, hits
        perm = np.array(best_perm)
    else:
        rows, perm = linear_sum_assignment(-confusion)
        best_hits = confusion[rows, perm].sum()
    return LabelAlignment(permutation=perm + 1, misclustering_rate=float(1 - best_hits / t.size))
