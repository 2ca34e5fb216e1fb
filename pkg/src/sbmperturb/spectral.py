"""Trace and eigenvalue statistics of the perturbation stack."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import ClampedStack, DegenerateVariance, NoConvergence, NonSymmetric, ProbabilityOutOfRange
from .estimation import BlockEstimate
from .model import BlockModel
from .stack import PerturbationStack

VARIANCE_FLOOR = 1e-8


@dataclass(frozen=True)
class TraceReport:
    """Every trace component of both sum-of-squares decompositions.

    ``cross_*`` are ``tr(A* M)`` for ``M`` in (delta, delta_tilde, a_check);
    ``sq_*`` are ``tr(M^2)``. ``lambda1_ahat`` is None when the eigenvalue
    was not requested.
    """

    n: int
    tr_astar_sq: float
    tr_abar_sq: float
    tr_ahat_sq: float
    cross_simple: float
    cross_composite: float
    cross_bias: float
    sq_simple: float
    sq_composite: float
    eta: float
    eta_prime: float
    L_value: float
    tr_ahat_cube: float | None
    lambda1_ahat: float | None
    additivity_residual_simple: float
    additivity_residual_composite: float


@dataclass(frozen=True)
class StandardizedStatistics:
    chi_simple_cross: float
    chi_simple_sq: float
    chi_composite_sq: float
    z_composite_cross: float
    z_bias_cross: float
    z_astar_sq: float
    tw_lambda1: float | None
    z_lss: float
    df_chi: int

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in STATISTIC_NAMES}


STATISTIC_NAMES = (
    "chi_simple_cross",
    "chi_simple_sq",
    "chi_composite_sq",
    "z_composite_cross",
    "z_bias_cross",
    "z_astar_sq",
    "tw_lambda1",
    "z_lss",
)


def trace_product(M, N) -> float:
    """``tr(M N)`` as the entrywise sum of ``M_ij N_ji``."""
    return float(np.sum(M * np.asarray(N).T))


def trace_cube(M) -> float:
    """``tr(M^3)`` with a single dense product."""
    return float(np.sum((M @ M) * M.T))


def compute_L(P) -> float:
    """Finite-n fourth-moment sum ``sum_{i != j} (P^3 + (1 - P)^3) / (n^2 P (1 - P))``."""
    P = np.asarray(P, dtype=float)
    if not ((P > 0) & (P < 1)).all():
        raise ProbabilityOutOfRange("L needs every probability strictly inside (0, 1)")
    n = P.shape[0]
    m4 = (P**3 + (1 - P) ** 3) / (n * n * P * (1 - P))
    return float(m4.sum() - np.trace(m4))


def eta_statistics(B, B_hat, counts_n_uv, n: int) -> tuple[float, float]:
    """``eta`` and ``eta'`` summed over unordered block pairs ``u <= v``."""
    B = np.asarray(B, dtype=float)
    err = B - np.asarray(B_hat, dtype=float)
    var = B * (1 - B)
    iu = np.triu_indices(B.shape[0])
    w = np.asarray(counts_n_uv, dtype=float)[iu]
    eta = float(np.sum(w * err[iu] ** 2 / var[iu]))
    eta_prime = float(2.0 / n * np.sum(w * err[iu] * (1 - 2 * B[iu]) / var[iu]))
    return eta, eta_prime


def largest_eigenvalue(M, rel_tol: float = 1e-10, method: str = "auto") -> float:
    """Algebraically largest eigenvalue of a symmetric matrix.

    ``method`` is ``"dense"`` (LAPACK, top eigenvalue only), ``"lanczos"``
    (ARPACK implicitly restarted Lanczos from a fixed start vector) or
    ``"auto"`` (Lanczos above 256 rows). Both are deterministic given ``M``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.ndim != 2 or M.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    asym = float(np.abs(M - M.T).max()) if n else 0.0
    if asym > 1e-12:
        raise NonSymmetric(f"max asymmetry {asym:.3e} exceeds 1e-12")
    if method == "auto":
        method = "lanczos" if n > 256 else "dense"
    if method == "lanczos" and n >= 3:
        v0 = np.random.default_rng(0x5EED).standard_normal(n)
        try:
            vals = scipy.sparse.linalg.eigsh(
                M, k=1, which="LA", v0=v0, tol=rel_tol, maxiter=10 * n, return_eigenvectors=False
            )
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise NoConvergence(f"Lanczos did not converge within {10 * n} iterations") from exc
        return float(vals[0])
    if method not in ("dense", "lanczos"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    try:
        vals = scipy.linalg.eigh(M, eigvals_only=True, subset_by_index=[n - 1, n - 1])
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return float(vals[0])


def trace_report(
    stack: PerturbationStack,
    model: BlockModel,
    estimate: BlockEstimate,
    eigenvalue: bool = True,
    L_source: str = "true",
    cube: bool = True,
    L_value: float | None = None,
) -> TraceReport:
    """Compute all trace components, ``eta``, ``eta'``, ``L``, ``tr(A_hat^3)`` and ``lambda_1(A_hat)``.

    ``L_source`` selects the population ``P`` (``"true"``, simulation mode)
    or the plug-in ``P_hat`` (``"plugin"``, data mode) for ``L``. A
    precomputed ``L_value`` skips that sum; ``cube=False`` skips ``tr(A_hat^3)``.
    """
    if stack.clamp_applied:
        raise ClampedStack("trace identities are void for a clamped stack")
    if estimate.K != model.K:
        raise ValueError(f"estimate has K={estimate.K}, model has K={model.K}")
    s = stack
    n = s.n
    tr_astar_sq = trace_product(s.astar, s.astar)
    cross_simple = trace_product(s.astar, s.delta)
    cross_composite = trace_product(s.astar, s.delta_tilde)
    sq_simple = trace_product(s.delta, s.delta)
    sq_composite = trace_product(s.delta_tilde, s.delta_tilde)
    tr_abar_sq = trace_product(s.abar, s.abar)
    tr_ahat_sq = trace_product(s.ahat, s.ahat)
    eta, eta_prime = eta_statistics(model.B, estimate.B_hat, estimate.counts_n_uv, n)
    if L_value is not None:
        pass
    elif L_source == "true":
        L_value = compute_L(s.p_true)
    elif L_source == "plugin":
        L_value = compute_L(s.p_hat)
    else:
        raise ValueError(f"L_source must be 'true' or 'plugin', got {L_source!r}")
    return TraceReport(
        n=n,
        tr_astar_sq=tr_astar_sq,
        tr_abar_sq=tr_abar_sq,
        tr_ahat_sq=tr_ahat_sq,
        cross_simple=cross_simple,
        cross_composite=cross_composite,
        cross_bias=trace_product(s.astar, s.a_check),
        sq_simple=sq_simple,
        sq_composite=sq_composite,
        eta=eta,
        eta_prime=eta_prime,
        L_value=L_value,
        tr_ahat_cube=trace_cube(s.ahat) if cube else None,
        lambda1_ahat=largest_eigenvalue(s.ahat) if eigenvalue else None,
        additivity_residual_simple=abs(tr_abar_sq - (tr_astar_sq + 2 * cross_simple + sq_simple)),
        additivity_residual_composite=abs(tr_ahat_sq - (tr_astar_sq + 2 * cross_composite + sq_composite)),
    )


def standardize(report: TraceReport, n: int, K: int) -> StandardizedStatistics:
    """Scale the trace components to their reference laws.

    Raises
    ------
    DegenerateVariance
        If ``2L - 2 <= 1e-8`` (for instance ``P`` identically 1/2).
    """
    v = 2 * report.L_value - 2
    if v <= VARIANCE_FLOOR:
        raise DegenerateVariance(f"2L - 2 = {v:.3e} is not positive enough to standardize by")
    sd = math.sqrt(v)
    return StandardizedStatistics(
        chi_simple_cross=-(n / 2) * report.cross_simple,
        chi_simple_sq=(n / 2) * report.sq_simple,
        chi_composite_sq=(n / 2) * report.sq_composite,
        z_composite_cross=2 * report.cross_composite / sd,
        z_bias_cross=2 * report.cross_bias / sd,
        z_astar_sq=(report.tr_astar_sq - (n - 1)) / sd,
        tw_lambda1=None if report.lambda1_ahat is None else n ** (2 / 3) * (report.lambda1_ahat - 2),
        z_lss=None if report.tr_ahat_cube is None else report.tr_ahat_cube / math.sqrt(6),
        df_chi=K * (K + 1) // 2,
    )
