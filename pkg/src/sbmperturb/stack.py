"""Every matrix of the simple/composite perturbation decomposition for one network.

Notation used in attribute names:

* ``astar``   normalized adjacency ``(A - P) / sqrt(n P (1 - P))``
* ``abar``    numerator-only plug-in ``(A - P_hat) / sqrt(n P (1 - P))``
* ``ahat``    full plug-in ``(A - P_hat) / sqrt(n P_hat (1 - P_hat))``
* ``delta``   simple perturbation, ``abar - astar``
* ``delta_tilde`` composite perturbation, ``ahat - astar``
* ``a_check`` / ``delta_check`` rescaling biases ``alpha * astar`` and ``alpha * delta``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClampedStack, DegenerateEstimate, ProbabilityOutOfRange
from .estimation import BlockEstimate

DEFAULT_CLAMP = 1e-6


@dataclass(frozen=True)
class PerturbationStack:
    n: int
    astar: np.ndarray
    abar: np.ndarray
    ahat: np.ndarray
    delta: np.ndarray
    delta_tilde: np.ndarray
    delta_bar: np.ndarray
    upsilon: np.ndarray
    a_check: np.ndarray
    delta_check: np.ndarray
    delta_hat: np.ndarray
    upsilon_check: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    clamp_applied: bool
    p_true: np.ndarray
    p_hat: np.ndarray


@dataclass(frozen=True)
class DecompositionReport:
    """Largest entrywise residual of each exact identity, plus ``gamma``/``alpha`` sizes."""

    residuals: dict
    gamma_max: float
    alpha_max: float
    gamma_bound: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


@dataclass(frozen=True)
class LowRankDiagnostics:
    singular_values_delta_bar: np.ndarray
    numeric_rank_delta_bar: int
    singular_values_delta_hat: np.ndarray
    numeric_rank_delta_hat: int
    sigma_norm: float
    sigma_hat_norm: float
    delta_bar_norm: float
    delta_hat_norm: float
    a_check_norm: float
    theta_used: np.ndarray


def _clamped_plugin(P_hat, clamp_epsilon):
    degenerate = (P_hat <= 0) | (P_hat >= 1)
    if clamp_epsilon is None:
        if degenerate.any():
            i, j = np.argwhere(degenerate)[0]
            raise DegenerateEstimate(
                f"plug-in probability P_hat[{i}][{j}]={P_hat[i, j]} is degenerate; pass a clamp epsilon"
            )
        return P_hat, False
    eps = float(clamp_epsilon)
    outside = (P_hat < eps) | (P_hat > 1 - eps)
    if outside.any():
        return np.clip(P_hat, eps, 1 - eps), True
    return P_hat, False


def plugin_normalized_adjacency(A, estimate: BlockEstimate, clamp_epsilon=None) -> np.ndarray:
    """``A_hat`` computed from data alone (the plug-in ``P_hat`` everywhere)."""
    A = np.asarray(A, dtype=float)
    P_hat, _ = _clamped_plugin(estimate.expand(), clamp_epsilon)
    n = A.shape[0]
    M = (A - P_hat) / np.sqrt(n * P_hat * (1 - P_hat))
    np.fill_diagonal(M, 0.0)
    return M


def build_stack(A, P_true, estimate: BlockEstimate, clamp_epsilon=None) -> PerturbationStack:
    """Compute every matrix of the decomposition for one realization.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Observed adjacency matrix.
    P_true : array_like, shape (n, n)
        True edge-probability matrix, diagonal included (the diagonal feeds
        ``upsilon``).
    estimate : BlockEstimate
        Plug-in estimate; ``P_hat`` is expanded from its labels.
    clamp_epsilon : float, optional
        If given, plug-in probabilities outside ``[eps, 1 - eps]`` are clamped
        and ``clamp_applied`` is set. Without it a 0 or 1 entry raises
        :class:`DegenerateEstimate`.
    """
    A = np.asarray(A, dtype=float)
    P = np.asarray(P_true, dtype=float)
    n = A.shape[0]
    if P.shape != (n, n):
        raise ValueError(f"P_true has shape {P.shape}, expected {(n, n)}")
    if not ((P > 0) & (P < 1)).all():
        raise ProbabilityOutOfRange("true probabilities must lie in (0, 1)")
    P_hat = estimate.expand()
    if P_hat.shape != (n, n):
        raise ValueError(f"estimate covers {P_hat.shape[0]} nodes, adjacency has {n}")
    P_hat, clamped = _clamped_plugin(P_hat, clamp_epsilon)

    var = P * (1 - P)
    var_hat = P_hat * (1 - P_hat)
    root, root_hat = np.sqrt(var), np.sqrt(var_hat)
    inv_sd = 1.0 / (np.sqrt(n) * root)
    resid_hat = A - P_hat
    rescale = (1 - P_hat - P) / (root_hat * (root + root_hat))

    astar = (A - P) * inv_sd
    abar = resid_hat * inv_sd
    ahat = resid_hat / (np.sqrt(n) * root_hat)
    delta = (P - P_hat) * inv_sd
    gamma = resid_hat * rescale
    alpha = (P - P_hat) * rescale
    ups = np.diag(delta).copy()
    for M in (astar, abar, ahat, delta, gamma):
        np.fill_diagonal(M, 0.0)
    delta_tilde = (1 + gamma) * delta
    upsilon = np.diag(ups)
    upsilon_check = np.diag((1 + np.diag(alpha)) * ups)
    a_check = alpha * astar
    delta_check = alpha * delta

    return PerturbationStack(
        n=n,
        astar=astar,
        abar=abar,
        ahat=ahat,
        delta=delta,
        delta_tilde=delta_tilde,
        delta_bar=delta + upsilon,
        upsilon=upsilon,
        a_check=a_check,
        delta_check=delta_check,
        delta_hat=delta + delta_check + upsilon_check,
        upsilon_check=upsilon_check,
        alpha=alpha,
        gamma=gamma,
        clamp_applied=clamped,
        p_true=P,
        p_hat=P_hat,
    )


def verify_decompositions(stack: PerturbationStack, B=None) -> DecompositionReport:
    """Entrywise residuals of the six exact identities relating the stack matrices.

    ``B`` (the true block matrix) is only used for ``gamma_bound = C / 2`` with
    ``C = max 1 / (B_uv (1 - B_uv))``; it is NaN when omitted.
    """
    if stack.clamp_applied:
        raise ClampedStack("identities are not guaranteed for a clamped stack")
    s = stack
    off = ~np.eye(s.n, dtype=bool)

    def worst(M):
        return float(np.abs(M).max()) if M.size else 0.0

    residuals = {
        "abar = astar + delta": worst(s.abar - (s.astar + s.delta)),
        "ahat = astar + delta_tilde": worst(s.ahat - (s.astar + s.delta_tilde)),
        "delta_tilde = a_check + delta + delta_check": worst(s.delta_tilde - (s.a_check + s.delta + s.delta_check)),
        "delta_bar = delta + upsilon": worst(s.delta_bar - (s.delta + s.upsilon)),
        "delta_hat = delta + delta_check + upsilon_check": worst(
            s.delta_hat - (s.delta + s.delta_check + s.upsilon_check)
        ),
        "ahat = (1 + alpha) abar": worst((s.ahat - (1 + s.alpha) * s.abar)[off]),
    }
    if B is None:
        bound = float("nan")
    else:
        B = np.asarray(B, dtype=float)
        bound = float(np.max(1.0 / (B * (1 - B))) / 2)
    return DecompositionReport(
        residuals=residuals,
        gamma_max=worst(s.gamma[off]),
        alpha_max=worst(s.alpha),
        gamma_bound=bound,
    )


def numeric_rank(M, rel_tol: float = 1e-10) -> int:
    """Count singular values above ``rel_tol * sigma_1`` (0 for the zero matrix)."""
    sv = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int((sv > rel_tol * sv[0]).sum())


def community_indicator(labels, K: int | None = None) -> np.ndarray:
    """Orthonormal block indicator ``Theta`` with ``Theta[i, k] = n_k^{-1/2} 1{g_i = k}``."""
    g = np.asarray(labels, dtype=np.int64)
    if K is None:
        K = int(g.max())
    theta = np.zeros((g.size, K))
    theta[np.arange(g.size), g - 1] = 1.0
    return theta / np.sqrt(theta.sum(axis=0))


def low_rank_diagnostics(stack: PerturbationStack, labels, K: int | None = None, rel_tol: float = 1e-10):
    theta = community_indicator(labels, K)
    sv_bar = np.linalg.svd(stack.delta_bar, compute_uv=False)
    sv_hat = np.linalg.svd(stack.delta_hat, compute_uv=False)

    def rank(sv):
        return 0 if sv[0] == 0 else int((sv > rel_tol * sv[0]).sum())

    sigma = theta.T @ stack.delta_bar @ theta
    sigma_hat = theta.T @ stack.delta_hat @ theta
    return LowRankDiagnostics(
        singular_values_delta_bar=sv_bar,
        numeric_rank_delta_bar=rank(sv_bar),
        singular_values_delta_hat=sv_hat,
        numeric_rank_delta_hat=rank(sv_hat),
        sigma_norm=float(np.linalg.norm(sigma, 2)),
        sigma_hat_norm=float(np.linalg.norm(sigma_hat, 2)),
        delta_bar_norm=float(sv_bar[0]),
        delta_hat_norm=float(sv_hat[0]),
        a_check_norm=float(np.linalg.norm(stack.a_check, 2)),
        theta_used=theta,
    )
