"""Perturbation decomposition and spectral statistics for stochastic block models."""

from .distributions import (
    ReferenceLaw,
    calibrate_tw1,
    cdf,
    chi_square,
    ks_distance,
    pdf,
    quantile,
    standard_normal,
    tracy_widom_1,
)
from .errors import *  # noqa: F401,F403
from .estimation import BlockEstimate, align_labels, estimate_block_matrix, estimate_labels
from .gof import TestOutcome, estimate_num_communities, gof_test
from .io import load_adjacency, load_labels, parse_config, preset_config, write_adjacency, write_labels
from .model import (
    BlockModel,
    build_model,
    check_assumptions,
    oracle_labels,
    benchmark_model,
    probability_matrix,
    sample_adjacency,
)
from .montecarlo import SimulationConfig, benchmark_config, run_replications, summarize
from .spectral import compute_L, largest_eigenvalue, standardize, trace_report
from .stack import PerturbationStack, build_stack, low_rank_diagnostics, verify_decompositions

__version__ = "0.1.0"
