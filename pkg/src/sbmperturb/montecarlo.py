"""Replication engine: simulate, estimate, decompose, and compare to the reference laws."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import distributions as dist
from .errors import AllFlagged, DegenerateEstimate, IdentityViolation, TooManyFlagged
from .estimation import estimate_block_matrix, estimate_labels
from .model import BlockModel, balanced_sizes, build_model, oracle_labels, probability_matrix, sample_adjacency
from .seeding import derive_seed
from .spectral import STATISTIC_NAMES, TraceReport, compute_L, standardize, trace_report
from .stack import build_stack

# raw trace quantities that may be recorded alongside the standardized statistics
TRACE_NAMES = (
    "eta",
    "eta_prime",
    "cross_simple",
    "cross_composite",
    "cross_bias",
    "sq_simple",
    "sq_composite",
    "tr_astar_sq",
    "tr_ahat_sq",
    "tr_ahat_cube",
    "lambda1_ahat",
)
FLAG_BUDGET = 0.01


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    K: int
    B: tuple
    reps: int
    seed: int
    sizes: tuple | None = None
    label_mode: str = "oracle"
    statistics: tuple = STATISTIC_NAMES
    alpha: float = 0.05

    def __post_init__(self):
        if self.reps < 0:
            raise ValueError(f"reps must be >= 0, got {self.reps}")
        if not self.statistics:
            raise ValueError("at least one statistic is required")
        unknown = [s for s in self.statistics if s not in STATISTIC_NAMES and s not in TRACE_NAMES]
        if unknown:
            raise ValueError(f"unknown statistics {unknown}")
        if self.label_mode not in ("oracle", "spectral"):
            raise ValueError(f"label_mode must be 'oracle' or 'spectral', got {self.label_mode!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def model(self) -> BlockModel:
        sizes = balanced_sizes(self.n, self.K) if self.sizes is None else self.sizes
        model = build_model(self.K, np.array(self.B, dtype=float), sizes)
        if model.n != self.n:
            raise ValueError(f"community sizes sum to {model.n}, expected n={self.n}")
        return model

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "B": [list(map(float, row)) for row in self.B],
            "sizes": None if self.sizes is None else list(map(int, self.sizes)),
            "reps": self.reps,
            "seed": int(self.seed),
            "label_mode": self.label_mode,
            "statistics": list(self.statistics),
            "alpha": self.alpha,
        }


def benchmark_config(K: int = 2, reps: int = 1000, seed: int = 20240601, n: int | None = None, **kwargs):
    """The simulation setting: ``n = 200 K`` equal blocks, ``B = 0.1 (1 + 3 I(u == v))``."""
    n = 200 * K if n is None else n
    B = 0.1 * (1 + 3 * np.eye(K))
    return SimulationConfig(n=n, K=K, B=tuple(map(tuple, B)), reps=reps, seed=seed, **kwargs)


@dataclass(frozen=True)
class ReplicationTable:
    """One row per (replication, statistic); flagged replications carry NaN values."""

    rep: np.ndarray
    statistic: np.ndarray
    value: np.ndarray
    seed: np.ndarray
    flagged: np.ndarray
    config: SimulationConfig

    def __len__(self) -> int:
        return self.rep.size

    def values(self, name: str, include_flagged: bool = False) -> np.ndarray:
        mask = self.statistic == name
        if not include_flagged:
            mask &= ~self.flagged
        return self.value[mask]

    def n_flagged(self, name: str) -> int:
        return int((self.flagged & (self.statistic == name)).sum())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["rep", "statistic", "value", "seed"])
            for r, s, v, sd in zip(self.rep, self.statistic, self.value, self.seed):
                writer.writerow([int(r), s, "nan" if math.isnan(v) else repr(float(v)), int(sd)])


def audit_identities(report: TraceReport) -> None:
    """Check the exact finite-sample identities that hold under oracle labels."""
    n = report.n
    eta = report.eta
    checks = {
        "tr(ahat^2) = n - 1": (abs(report.tr_ahat_sq - (n - 1)), 1e-9 * n),
        "tr(astar delta) = -(2/n) eta": (abs(report.cross_simple + 2 * eta / n), 1e-10 * (1 + eta)),
        "tr(delta^2) = (2/n) eta": (abs(report.sq_simple - 2 * eta / n), 1e-10 * (1 + eta)),
        "simple additivity": (report.additivity_residual_simple, 1e-9 * n),
        "composite additivity": (report.additivity_residual_composite, 1e-9 * n),
    }
    for name, (err, tol) in checks.items():
        if not err <= tol:
            raise IdentityViolation(f"{name}: residual {err:.3e} exceeds {tol:.3e}")


def _one_replication(config, model, truth, P, L_value, r):
    seed_r = derive_seed(config.seed, r)
    names = config.statistics
    A = sample_adjacency(model, truth, seed_r)
    if config.label_mode == "oracle":
        labels = truth
    else:
        labels = estimate_labels(A, config.K, mode="spectral", seed=[seed_r, 1])
    estimate = estimate_block_matrix(A, labels, config.K)
    try:
        stack = build_stack(A, P, estimate)
    except DegenerateEstimate:
        return seed_r, None
    want_eig = "tw_lambda1" in names or "lambda1_ahat" in names
    want_cube = "z_lss" in names or "tr_ahat_cube" in names
    report = trace_report(stack, model, estimate, eigenvalue=want_eig, cube=want_cube, L_value=L_value)
    if config.label_mode == "oracle":
        audit_identities(report)
    stats = standardize(report, config.n, config.K).as_dict()
    values = [stats[s] if s in stats else getattr(report, s) for s in names]
    return seed_r, values


def run_replications(config: SimulationConfig, threads: int = 1) -> ReplicationTable:
    """Run ``config.reps`` independent replications.

    Replication ``r`` is driven entirely by ``derive_seed(config.seed, r)``, so
    the table does not depend on ``threads`` or execution order. A replication
    whose plug-in estimate is degenerate is flagged (NaN values); more than 1%
    flagged replications raises :class:`TooManyFlagged`.
    """
    model = config.model()
    truth = oracle_labels(model)
    P = probability_matrix(model, truth)
    L_value = compute_L(P)
    reps = range(config.reps)
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads > 1 and config.reps > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _one_replication(config, model, truth, P, L_value, r), reps))
    else:
        results = [_one_replication(config, model, truth, P, L_value, r) for r in reps]

    n_stat = len(config.statistics)
    n_bad = sum(vals is None for _, vals in results)
    if config.reps and n_bad > FLAG_BUDGET * config.reps:
        raise TooManyFlagged(f"{n_bad} of {config.reps} replications had degenerate estimates")
    value = np.array(
        [v for _, vals in results for v in (vals if vals is not None else [np.nan] * n_stat)], dtype=float
    )
    return ReplicationTable(
        rep=np.repeat(np.arange(config.reps, dtype=np.int64), n_stat),
        statistic=np.tile(np.array(config.statistics, dtype=object), config.reps),
        value=value,
        seed=np.repeat(np.array([s for s, _ in results], dtype=np.uint64), n_stat),
        flagged=np.repeat(np.array([vals is None for _, vals in results], dtype=bool), n_stat),
        config=config,
    )


def reference_law(statistic: str, K: int):
    """Limiting law of a standardized statistic; None for raw trace quantities."""
    if statistic.startswith("chi_"):
        return dist.chi_square(K * (K + 1) // 2)
    if statistic.startswith("z_"):
        return dist.standard_normal()
    if statistic == "tw_lambda1":
        return dist.tracy_widom_1()
    return None


def rejection_flags(statistic: str, values, law, alpha: float) -> np.ndarray:
    """Per-value rejection at level ``alpha`` using that statistic's tail convention."""
    F = dist.cdf(law, values)
    if law.kind == "standard_normal":
        p = 2 * np.minimum(F, 1 - F)
    else:
        p = 1 - F
    return np.asarray(p) < alpha


@dataclass(frozen=True)
class StatisticSummary:
    statistic: str
    reference: str | None
    ks: float | None
    mean: float
    var: float
    reject_rate: float | None
    flagged: int
    count: int

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "reference": self.reference,
            "ks": self.ks,
            "mean": self.mean,
            "var": self.var,
            "reject_rate": self.reject_rate,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class EmpiricalDistributionReport:
    alpha: float
    summaries: dict = field(default_factory=dict)

    def __getitem__(self, statistic: str) -> StatisticSummary:
        return self.summaries[statistic]


def summarize(table: ReplicationTable, alpha: float | None = None) -> EmpiricalDistributionReport:
    """Moments, KS distance to the reference law and rejection rate for each statistic."""
    config = table.config
    alpha = config.alpha if alpha is None else alpha
    out = {}
    for name in config.statistics:
        vals = table.values(name)
        flagged = table.n_flagged(name)
        if vals.size == 0:
            raise AllFlagged(f"no usable replications for {name}")
        law = reference_law(name, config.K)
        out[name] = StatisticSummary(
            statistic=name,
            reference=None if law is None else law.name,
            ks=None if law is None else dist.ks_distance(vals, law),
            mean=float(vals.mean()),
            var=float(vals.var(ddof=1)) if vals.size > 1 else 0.0,
            reject_rate=None if law is None else float(rejection_flags(name, vals, law, alpha).mean()),
            flagged=flagged,
            count=int(vals.size),
        )
    return EmpiricalDistributionReport(alpha=alpha, summaries=out)
