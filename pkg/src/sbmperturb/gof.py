"""Goodness-of-fit tests of ``H0: the network is a K0-block SBM`` and sequential selection of K.

The statistics are computed from the data alone: labels are estimated, ``B``
is replaced by its MLE, and ``A_hat`` is built with the plug-in probabilities
in both numerator and denominator.

* ``lambda1_tw``: ``n^{2/3} (lambda_1(A_hat) - 2)`` against TW1, upper tail.
* ``lss_normal``: ``tr(A_hat^3) / sqrt(6)`` against N(0, 1), two-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from .estimation import align_labels, estimate_block_matrix, estimate_labels
from .spectral import largest_eigenvalue, trace_cube
from .stack import plugin_normalized_adjacency

STATISTIC_KINDS = ("lambda1_tw", "lss_normal")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # not a pytest class

    statistic_kind: str
    value: float
    p_value: float
    reject: bool
    k0_tested: int
    label_mode: str
    alpha: float
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic_kind,
            "value": self.value,
            "p_value": self.p_value,
            "reject": self.reject,
            "k0": self.k0_tested,
            "label_mode": self.label_mode,
            "alpha": self.alpha,
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class KSelectionResult:
    """``k_hat`` is the first accepted K0, or ``kmax + 1`` when every test rejected."""

    k_hat: int
    trail: list


def p_value(statistic_kind: str, value: float) -> float:
    if statistic_kind == "lambda1_tw":
        return float(1.0 - dist.cdf(dist.tracy_widom_1(), value))
    if statistic_kind == "lss_normal":
        return float(min(1.0, 2.0 * (1.0 - dist.cdf(dist.standard_normal(), abs(value)))))
    raise ValueError(f"unknown statistic kind {statistic_kind!r}; expected one of {STATISTIC_KINDS}")


def statistic_value(statistic_kind: str, ahat) -> float:
    """The test statistic for a given plug-in normalized adjacency matrix."""
    ahat = np.asarray(ahat, dtype=float)
    n = ahat.shape[0]
    if statistic_kind == "lambda1_tw":
        return n ** (2.0 / 3.0) * (largest_eigenvalue(ahat) - 2.0)
    if statistic_kind == "lss_normal":
        return trace_cube(ahat) / math.sqrt(6.0)
    raise ValueError(f"unknown statistic kind {statistic_kind!r}; expected one of {STATISTIC_KINDS}")


def gof_test(
    A,
    K0: int,
    statistic_kind: str = "lss_normal",
    alpha: float = 0.05,
    label_mode: str = "spectral",
    labels=None,
    truth=None,
    seed=None,
    clamp_epsilon=None,
) -> TestOutcome:
    """Test whether ``A`` is consistent with a ``K0``-community SBM.

    Parameters
    ----------
    A : array_like
        Adjacency matrix.
    K0 : int
        Hypothesized number of communities.
    statistic_kind : {"lambda1_tw", "lss_normal"}
    alpha : float
        Level; ``reject`` is ``p_value < alpha``.
    label_mode : {"spectral", "oracle"}
        Oracle mode uses ``labels`` as given.
    truth : array_like, optional
        True labels; when given the misclustering rate is reported.
    seed : int, optional
        Seed for the k-means step of spectral clustering.
    """
    if K0 < 1:
        raise ValueError(f"K0 must be >= 1, got {K0}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if statistic_kind not in STATISTIC_KINDS:
        raise ValueError(f"unknown statistic kind {statistic_kind!r}; expected one of {STATISTIC_KINDS}")
    g = estimate_labels(A, K0, mode=label_mode, truth=labels, seed=seed)
    estimate = estimate_block_matrix(A, g, K0)
    ahat = plugin_normalized_adjacency(A, estimate, clamp_epsilon)
    value = statistic_value(statistic_kind, ahat)
    p = p_value(statistic_kind, value)
    diagnostics = {}
    if truth is not None and np.asarray(truth).max() == K0:
        diagnostics["misclustering_rate"] = align_labels(truth, g).misclustering_rate
    return TestOutcome(
        statistic_kind=statistic_kind,
        value=float(value),
        p_value=p,
        reject=p < alpha,
        k0_tested=int(K0),
        label_mode=label_mode,
        alpha=float(alpha),
        diagnostics=diagnostics,
    )


def estimate_num_communities(A, kmax: int, statistic_kind: str = "lss_normal", alpha: float = 0.05, seed=None):
    """Test K0 = 1, 2, ..., kmax with spectral labels and stop at the first acceptance."""
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    trail = []
    for k0 in range(1, kmax + 1):
        outcome = gof_test(A, k0, statistic_kind, alpha, label_mode="spectral", seed=seed)
        trail.append(outcome)
        if not outcome.reject:
            return KSelectionResult(k_hat=k0, trail=trail)
    return KSelectionResult(k_hat=kmax + 1, trail=trail)
