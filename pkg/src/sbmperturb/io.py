"""File formats: simulation configs (JSON), edge lists, label files, and figure presets."""

from __future__ import annotations

import json
import warnings

import numpy as np

from .errors import DuplicateEdgeWarning, NodeIndexOutOfRange, ParseError, SchemaViolation, SelfLoop
from .montecarlo import SimulationConfig, benchmark_config
from .spectral import STATISTIC_NAMES

CONFIG_KEYS = {"n", "K", "B", "sizes", "balanced", "reps", "seed", "label_mode", "statistics", "alpha"}
REQUIRED_KEYS = ("n", "K", "B", "reps", "seed")

# figure id -> statistic plotted in that figure
FIGURES = {
    "fig1": "chi_simple_cross",
    "fig2": "z_composite_cross",
    "fig3": "z_bias_cross",
    "fig4": "chi_simple_sq",
    "fig5": "chi_composite_sq",
}
DEFAULT_SEED = 20240601


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def config_from_dict(raw: dict) -> SimulationConfig:
    """Validate a decoded config object against the strict schema."""
    if not isinstance(raw, dict):
        raise SchemaViolation("config must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise SchemaViolation(f"unknown config key(s): {', '.join(unknown)}")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise SchemaViolation(f"missing required key {key!r}")
    for key in ("n", "K", "reps", "seed"):
        if not _is_int(raw[key]):
            raise SchemaViolation(f"{key!r} must be an integer, got {raw[key]!r}")
    n, K = raw["n"], raw["K"]
    if K < 1:
        raise SchemaViolation(f"'K' must be >= 1, got {K}")
    if raw["reps"] < 0:
        raise SchemaViolation(f"'reps' must be >= 0, got {raw['reps']}")
    if not 0 <= raw["seed"] < 2**64:
        raise SchemaViolation("'seed' must be an unsigned 64-bit integer")

    B = raw["B"]
    if not (isinstance(B, list) and len(B) == K and all(isinstance(row, list) and len(row) == K for row in B)):
        raise SchemaViolation(f"'B' must be a {K}x{K} array of numbers")
    for u in range(K):
        for v in range(K):
            x = B[u][v]
            if not _is_number(x):
                raise SchemaViolation(f"B[{u}][{v}] is not a number: {x!r}")
            if not 0 < x < 1:
                raise SchemaViolation(f"B[{u}][{v}]={x} is not in (0, 1)")
            if B[v][u] != x:
                raise SchemaViolation(f"B is not symmetric: B[{u}][{v}]={x} but B[{v}][{u}]={B[v][u]}")

    sizes = raw.get("sizes")
    balanced = raw.get("balanced", sizes is None)
    if not isinstance(balanced, bool):
        raise SchemaViolation(f"'balanced' must be a boolean, got {balanced!r}")
    if sizes is not None:
        if balanced:
            raise SchemaViolation("'sizes' and 'balanced': true are mutually exclusive")
        if not (isinstance(sizes, list) and len(sizes) == K and all(_is_int(s) for s in sizes)):
            raise SchemaViolation(f"'sizes' must be a list of {K} integers")
        if any(s < 2 for s in sizes):
            raise SchemaViolation(f"every community size must be >= 2, got {sizes}")
        if sum(sizes) != n:
            raise SchemaViolation(f"'sizes' sum to {sum(sizes)}, expected n={n}")
        sizes = tuple(sizes)
    elif not balanced:
        raise SchemaViolation("'balanced': false requires explicit 'sizes'")
    elif n < 2 * K:
        raise SchemaViolation(f"n={n} is too small for {K} communities of size >= 2")

    label_mode = raw.get("label_mode", "oracle")
    if label_mode not in ("oracle", "spectral"):
        raise SchemaViolation(f"'label_mode' must be 'oracle' or 'spectral', got {label_mode!r}")
    statistics = raw.get("statistics", list(STATISTIC_NAMES))
    if not (isinstance(statistics, list) and statistics and all(isinstance(s, str) for s in statistics)):
        raise SchemaViolation("'statistics' must be a non-empty list of names")
    bad = [s for s in statistics if s not in STATISTIC_NAMES]
    if bad:
        raise SchemaViolation(f"unknown statistic(s) {bad}; choose from {list(STATISTIC_NAMES)}")
    alpha = raw.get("alpha", 0.05)
    if not (_is_number(alpha) and 0 < alpha < 1):
        raise SchemaViolation(f"'alpha' must be a number in (0, 1), got {alpha!r}")

    return SimulationConfig(
        n=n,
        K=K,
        B=tuple(tuple(float(x) for x in row) for row in B),
        reps=raw["reps"],
        seed=raw["seed"],
        sizes=sizes,
        label_mode=label_mode,
        statistics=tuple(statistics),
        alpha=float(alpha),
    )


def parse_config(path) -> SimulationConfig:
    """Read and validate a JSON simulation config.

    Raises
    ------
    ParseError
        Malformed JSON, with line and column.
    SchemaViolation
        Well-formed JSON that breaks the schema; the message names the field.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return config_from_dict(raw)


def preset_config(fig_id: str, n=None, K=None, reps=None, seed=None, label_mode=None) -> SimulationConfig:
    """Simulation settings behind each figure (n = 200 K, equal blocks, 1000 reps), with overrides."""
    if fig_id not in FIGURES:
        raise SchemaViolation(f"unknown figure {fig_id!r}; choose from {sorted(FIGURES)}")
    K = 2 if K is None else K
    return benchmark_config(
        K=K,
        n=n,
        reps=1000 if reps is None else reps,
        seed=DEFAULT_SEED if seed is None else seed,
        label_mode=label_mode or "oracle",
        statistics=(FIGURES[fig_id],),
    )


def load_adjacency(path) -> np.ndarray:
    """Read an edge list: ``n <N>`` on the first line, then 0-based ``i j`` pairs.

    Edges are symmetrized; a repeated edge (in either orientation) is kept
    once and reported with :class:`DuplicateEdgeWarning`.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = [(no, line.split()) for no, line in enumerate(lines, start=1) if line.strip() and not line.startswith("#")]
    if not body:
        raise ParseError(f"{path}: empty file, expected header 'n <N>'")
    no, head = body[0]
    if len(head) != 2 or head[0] != "n":
        raise ParseError(f"{path}:{no}: expected header 'n <N>', got {' '.join(head)!r}")
    try:
        n = int(head[1])
    except ValueError as exc:
        raise ParseError(f"{path}:{no}: node count {head[1]!r} is not an integer") from exc
    if n < 1:
        raise ParseError(f"{path}:{no}: node count must be positive")
    A = np.zeros((n, n), dtype=np.int8)
    duplicates = 0
    for no, parts in body[1:]:
        if len(parts) != 2:
            raise ParseError(f"{path}:{no}: expected 'i j', got {' '.join(parts)!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{no}: node indices must be integers") from exc
        if not (0 <= i < n and 0 <= j < n):
            raise NodeIndexOutOfRange(f"{path}:{no}: edge ({i}, {j}) outside 0..{n - 1}")
        if i == j:
            raise SelfLoop(f"{path}:{no}: self-loop on node {i}")
        if A[i, j]:
            duplicates += 1
        A[i, j] = A[j, i] = 1
    if duplicates:
        warnings.warn(f"{path}: {duplicates} duplicate edge(s) ignored", DuplicateEdgeWarning, stacklevel=2)
    return A


def write_adjacency(path, A) -> None:
    A = np.asarray(A)
    n = A.shape[0]
    rows, cols = np.nonzero(np.triu(A, k=1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {n}\n")
        for i, j in zip(rows, cols):
            fh.write(f"{i} {j}\n")


def load_labels(path) -> np.ndarray:
    """One 1-based integer label per line."""
    with open(path, encoding="utf-8") as fh:
        lines = [(no, line.strip()) for no, line in enumerate(fh, start=1) if line.strip()]
    try:
        labels = np.array([int(s) for _, s in lines], dtype=np.int64)
    except ValueError as exc:
        raise ParseError(f"{path}: labels must be integers ({exc})") from exc
    if labels.size and labels.min() < 1:
        raise ParseError(f"{path}: labels are 1-based")
    return labels


def write_labels(path, labels) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(f"{int(g)}\n" for g in labels)
