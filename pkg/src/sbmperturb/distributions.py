"""Reference laws for the spectral statistics: chi-square, standard normal, Tracy-Widom (beta = 1).

The Tracy-Widom CDF is read from an embedded grid on [-5, 3] with step 0.01
and interpolated with a monotone cubic. The grid was produced by
:func:`tw1_fredholm_cdf` and can be cross-checked against a GOE Monte Carlo
run with :func:`calibrate_tw1`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import airy, gammainc, ndtr

from .errors import EmptySample, InsufficientReps, InvalidLaw, ProbabilityOutOfRange
from .seeding import derive_seed
from .spectral import largest_eigenvalue

TW1_GRID_RESOURCE = "tw1_grid.txt"
TW1_GRID_VERSION = 1
TW1_LO, TW1_HI, TW1_STEP = -5.0, 3.0, 0.01


@dataclass(frozen=True)
class ReferenceLaw:
    """One of ``chi_square`` (with ``df``), ``standard_normal`` or ``tracy_widom_1``.

    ``provenance`` records where a Tracy-Widom CDF comes from: ``"grid"`` for the
    embedded table or ``"calibration"`` for a Monte Carlo run.
    """

    kind: str
    df: int | None = None
    provenance: str | None = None
    _calibration: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind == "chi_square":
            if self.df is None or int(self.df) != self.df or self.df < 1:
                raise InvalidLaw(f"chi_square needs a positive integer df, got {self.df!r}")
        elif self.kind == "tracy_widom_1":
            if self.provenance not in ("grid", "calibration"):
                raise InvalidLaw(f"unknown Tracy-Widom provenance {self.provenance!r}")
        elif self.kind != "standard_normal":
            raise InvalidLaw(f"unknown law kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind == "chi_square":
            return f"chi_square({self.df})"
        return self.kind


def chi_square(df: int) -> ReferenceLaw:
    return ReferenceLaw("chi_square", df=df)


def standard_normal() -> ReferenceLaw:
    return ReferenceLaw("standard_normal")


def tracy_widom_1() -> ReferenceLaw:
    return ReferenceLaw("tracy_widom_1", provenance="grid")


def tw1_fredholm_cdf(s: float, nodes: int = 80) -> float:
    """TW1 CDF as the Fredholm determinant ``det(I - K_s)`` on ``L^2(0, inf)``.

    ``K_s(x, y) = Ai(x + y + s)``, discretized by Gauss-Legendre quadrature on a
    window long enough for the Airy kernel to fall below double precision.
    """
    length = max(16.0 - s, 8.0)
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * length * (x + 1)
    sw = np.sqrt(0.5 * length * w)
    kernel = airy(x[:, None] + x[None, :] + s)[0]
    return float(np.linalg.det(np.eye(nodes) - sw[:, None] * kernel * sw[None, :]))


def tw1_grid_points() -> np.ndarray:
    count = int(round((TW1_HI - TW1_LO) / TW1_STEP)) + 1
    return np.round(TW1_LO + TW1_STEP * np.arange(count), 2)


def write_tw1_grid(path) -> None:
    """Regenerate the embedded grid file (lines of ``x cdf``)."""
    xs = tw1_grid_points()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# tracy-widom beta=1 cdf grid, version {TW1_GRID_VERSION}\n")
        fh.write("# columns: x cdf; Fredholm determinant, 80-node Gauss-Legendre\n")
        for x in xs:
            fh.write(f"{x:.2f} {tw1_fredholm_cdf(x):.15e}\n")


def read_tw1_grid(text: str) -> tuple[np.ndarray, np.ndarray]:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    arr = np.array(rows, dtype=float)
    xs, fs = arr[:, 0], arr[:, 1]
    if not (np.diff(xs) > 0).all():
        raise ValueError("TW1 grid x values must be strictly increasing")
    return xs, fs


@lru_cache(maxsize=1)
def _tw1_grid():
    text = resources.files("sbmperturb").joinpath("data").joinpath(TW1_GRID_RESOURCE).read_text(encoding="utf-8")
    xs, fs = read_tw1_grid(text)
    return xs, fs, PchipInterpolator(xs, fs, extrapolate=False)


def _tw1_cdf_grid(x):
    xs, fs, interp = _tw1_grid()
    x = np.asarray(x, dtype=float)
    out = interp(np.clip(x, xs[0], xs[-1]))
    lo_slope = (fs[1] - fs[0]) / (xs[1] - xs[0])
    hi_slope = (fs[-1] - fs[-2]) / (xs[-1] - xs[-2])
    out = np.where(x < xs[0], fs[0] + lo_slope * (x - xs[0]), out)
    out = np.where(x > xs[-1], fs[-1] + hi_slope * (x - xs[-1]), out)
    return np.clip(out, 0.0, 1.0)


def _tw1_pdf_grid(x):
    xs, _, interp = _tw1_grid()
    x = np.asarray(x, dtype=float)
    inside = (x >= xs[0]) & (x <= xs[-1])
    dens = interp.derivative()(np.clip(x, xs[0], xs[-1]))
    return np.where(inside, np.maximum(dens, 0.0), 0.0)


def _ecdf(sorted_sample, x):
    return np.searchsorted(sorted_sample, x, side="right") / sorted_sample.size


def cdf(law: ReferenceLaw, x):
    """CDF of ``law`` at ``x`` (scalar or array)."""
    if not isinstance(law, ReferenceLaw):
        raise InvalidLaw(f"expected a ReferenceLaw, got {type(law).__name__}")
    x = np.asarray(x, dtype=float)
    if law.kind == "standard_normal":
        out = ndtr(x)
    elif law.kind == "chi_square":
        out = np.where(x > 0, gammainc(law.df / 2.0, np.maximum(x, 0.0) / 2.0), 0.0)
    elif law.provenance == "calibration":
        out = _ecdf(law._calibration[0], x)
    else:
        out = _tw1_cdf_grid(x)
    return float(out) if out.ndim == 0 else out


def pdf(law: ReferenceLaw, x):
    """Density of ``law``; used for plot-ready reference curves."""
    x = np.asarray(x, dtype=float)
    if law.kind == "standard_normal":
        out = np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    elif law.kind == "chi_square":
        k = law.df / 2.0
        pos = np.maximum(x, 1e-300)
        out = np.where(x > 0, np.exp((k - 1) * np.log(pos) - pos / 2 - k * math.log(2) - math.lgamma(k)), 0.0)
    else:
        out = _tw1_pdf_grid(x)
    return float(out) if out.ndim == 0 else out


def support_window(law: ReferenceLaw) -> tuple[float, float]:
    """A bracket holding essentially all the mass of ``law``."""
    if law.kind == "standard_normal":
        return -40.0, 40.0
    if law.kind == "chi_square":
        return 0.0, law.df + 60.0 * math.sqrt(2 * law.df) + 200.0
    if law.provenance == "calibration":
        s = law._calibration[0]
        return float(s[0]) - 1.0, float(s[-1]) + 1.0
    return TW1_LO - 1.0, TW1_HI + 1.0


def quantile(law: ReferenceLaw, p: float, xtol: float = 1e-10) -> float:
    """Inverse CDF by bracketing root search."""
    if not 0.0 < p < 1.0:
        raise ProbabilityOutOfRange(f"quantile level must be in (0, 1), got {p}")
    if law.provenance == "calibration":
        s = law._calibration[0]
        return float(s[min(int(math.ceil(p * s.size)) - 1, s.size - 1)])
    lo, hi = support_window(law)
    return float(brentq(lambda x: cdf(law, x) - p, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))


@dataclass(frozen=True)
class TW1Calibration:
    """Sorted scaled edge eigenvalues of GOE draws and their empirical CDF."""

    m: int
    reps: int
    seed: int
    samples: np.ndarray
    cdf_values: np.ndarray

    def law(self) -> ReferenceLaw:
        return ReferenceLaw("tracy_widom_1", provenance="calibration", _calibration=(self.samples,))


def goe_edge_statistic(m: int, rng) -> float:
    """``m^{2/3} (lambda_1 - 2)`` for one GOE draw with off-diagonal variance 1/m, diagonal 2/m."""
    X = rng.standard_normal((m, m))
    G = (X + X.T) / math.sqrt(2.0 * m)
    return m ** (2.0 / 3.0) * (largest_eigenvalue(G) - 2.0)


def calibrate_tw1(m: int, reps: int, seed: int) -> TW1Calibration:
    """Monte Carlo TW1 from ``reps`` GOE matrices of size ``m``.

    Draw ``r`` uses its own stream seeded by ``derive_seed(seed, r)``, so the
    result does not depend on evaluation order.
    """
    if m < 200 or reps < 500:
        raise InsufficientReps(f"calibration needs m >= 200 and reps >= 500, got m={m}, reps={reps}")
    draws = np.array([goe_edge_statistic(m, np.random.default_rng(derive_seed(seed, r))) for r in range(reps)])
    samples = np.sort(draws)
    return TW1Calibration(m=m, reps=reps, seed=seed, samples=samples, cdf_values=np.arange(1, reps + 1) / reps)


def ks_distance(sample, law) -> float:
    """Kolmogorov-Smirnov distance ``sup |F_n - F|`` between a sample and a law.

    ``law`` is a :class:`ReferenceLaw` or any vectorized CDF callable. Both
    one-sided gaps are checked at every sample point.
    """
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise EmptySample("KS distance needs at least one observation")
    F = cdf(law, x) if isinstance(law, ReferenceLaw) else np.asarray(law(x), dtype=float)
    F = np.broadcast_to(F, x.shape)
    n = x.size
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(n) / n
    return float(max(upper.max(), lower.max(), 0.0))
