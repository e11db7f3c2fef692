"""
Integration-error benchmark: error versus point count per sampler.

Each trial draws a batch from one sampler, forms the equal-weight
quadrature estimate of an analytically integrable test function, and
records the absolute error.  Repeating over independent trials (random
points, or random shifts for the lattice and grid samplers) and taking
the spread across trials gives a direct estimate of the discretization
error of a collocation loss at that point count; fitting a line to the
log-log curve recovers each sampler's convergence rate.

The statistic of record is the standard deviation across trials.  The
Sobol sampler is deterministic, so its trial spread is identically zero;
for it the trial-mean absolute error (which is the discretization error
itself) is the comparable statistic, see `convergence_statistic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .lattice import GeneratingVector, fibonacci_number
from .merit import f_alpha, korobov_search
from .periodization import TransformChain
from .rng import derive_seed
from .samplers import SampleBatch, SamplerKind, sample
from .pinn import poisson_residual_surrogate

__all__ = [
    "Integrand",
    "BenchRecord",
    "SummaryRow",
    "SlopeFit",
    "builtin_integrands",
    "get_integrand",
    "lattice_for",
    "resolve_kind",
    "default_schedule",
    "run_bench",
    "summarize",
    "fit_slope",
    "convergence_statistic",
    "FIBONACCI_SCHEDULE",
]

FIBONACCI_SCHEDULE = (55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181)

RANDOMIZED_TAGS = frozenset({"mc", "lhs", "grid", "glt"})


@dataclass(frozen=True)
class Integrand:
    """Test function on [0, 1]^s with an analytically known integral."""

    name: str
    s: int
    fn: Callable[[np.ndarray], np.ndarray]
    exact_integral: float
    alpha: float
    periodic: bool

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.fn(points)


@dataclass(frozen=True)
class BenchRecord:
    integrand: str
    kind: str
    n: int
    trial: int
    seed: int
    abs_error: float


@dataclass(frozen=True)
class SummaryRow:
    integrand: str
    kind: str
    n: int
    mean: float
    std: float
    max: float


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log n, log statistic) points.

    ``residual`` is the root-mean-square vertical residual of the fit.
    """

    slope: float
    intercept: float
    residual: float


def builtin_integrands(s: int, mode_k: int = 2, surrogate_eps: float = 0.1) -> list[Integrand]:
    """Standard test functions in s dimensions.

    korobov2
        Product of the one-dimensional worst-case integrands F_2; the
        hardest periodic function with quadratic coefficient decay.
        Integral 1.
    prodsine
        prod sin(2*pi*x_k); analytic and periodic, integral 0.
    prodlinear
        prod x_k; smooth but not periodic (control case), integral 2^-s.
    poisson-residual
        Squared Poisson residual of the boundary-masked exact-solution
        shape scaled by (1 + eps): the loss integrand of a nearly
        converged solver.  Integral in closed form from sine and
        polynomial moments.
    """
    if s < 1:
        raise ValueError("need s >= 1")
    surrogate_fn, surrogate_exact = poisson_residual_surrogate(s, mode_k, surrogate_eps)
    return [
        Integrand("korobov2", s, lambda x: np.prod(f_alpha(2, x), axis=1),
                  exact_integral=1.0, alpha=2.0, periodic=True),
        Integrand("prodsine", s, lambda x: np.prod(np.sin(2.0 * np.pi * x), axis=1),
                  exact_integral=0.0, alpha=math.inf, periodic=True),
        Integrand("prodlinear", s, lambda x: np.prod(x, axis=1),
                  exact_integral=0.5**s, alpha=1.0, periodic=False),
        Integrand("poisson-residual", s, surrogate_fn,
                  exact_integral=surrogate_exact, alpha=2.0, periodic=True),
    ]


def get_integrand(name: str, s: int) -> Integrand:
    for ig in builtin_integrands(s):
        if ig.name == name:
            return ig
    names = [ig.name for ig in builtin_integrands(s)]
    raise ValueError(f"unknown integrand {name!r}; available: {names}")


_FIB_INDEX = {fibonacci_number(k): k for k in range(3, 47)}


@lru_cache(maxsize=None)
def lattice_for(n: int, s: int, alpha: int = 2) -> GeneratingVector:
    """Generating vector for n points in s dimensions.

    Fibonacci construction when s = 2 and n is a Fibonacci number,
    otherwise a merit search over Korobov-form candidates.
    """
    if s == 2 and n in _FIB_INDEX:
        return GeneratingVector(n=n, z=(1, fibonacci_number(_FIB_INDEX[n] - 1)))
    return korobov_search(n, s, alpha)


def resolve_kind(tag: str, n: int, s: int) -> SamplerKind:
    """SamplerKind instance for a tag at a specific point count."""
    if tag == "glt":
        return SamplerKind.good_lattice(lattice_for(n, s))
    if tag == "grid":
        m = round(n ** (1.0 / s))
        for cand in (m - 1, m, m + 1):
            if cand >= 1 and cand**s == n:
                return SamplerKind.uniform_grid(cand)
        raise ValueError(f"grid sampler needs n = m^s; {n} is not a perfect {s}-th power")
    if tag == "mc":
        return SamplerKind.uniform_random()
    if tag == "lhs":
        return SamplerKind.latin_hypercube()
    if tag == "sobol":
        return SamplerKind.sobol()
    raise ValueError(f"unknown sampler tag {tag!r}")


def default_schedule(tag: str, s: int, max_n: int = 4181) -> list[int]:
    """Point counts for one sampler: Fibonacci numbers for mc/lhs/glt,
    powers of two for Sobol, and the nearest m^s to each Fibonacci number
    for the grid."""
    fib = [n for n in FIBONACCI_SCHEDULE if n <= max_n]
    if tag in ("mc", "lhs", "glt"):
        return fib
    if tag == "sobol":
        out, n = [], 64
        while n <= max_n:
            out.append(n)
            n *= 2
        return out
    if tag == "grid":
        out = []
        for target in fib:
            m = max(2, round(target ** (1.0 / s)))
            best = min((m - 1, m, m + 1), key=lambda c: abs(c**s - target) if c >= 2 else math.inf)
            if best**s not in out:
                out.append(best**s)
        return out
    raise ValueError(f"unknown sampler tag {tag!r}")


def _quadrature(batch: SampleBatch, integrand: Integrand,
                transforms: TransformChain | None) -> float:
    if transforms is None:
        vals = integrand(batch.points)
    else:
        coords, weight = transforms.apply(batch.points)
        vals = integrand(coords) * weight
    return math.fsum(vals) / batch.n


def run_bench(integrand: Integrand,
              kinds: Sequence[str | SamplerKind],
              schedule: dict | Sequence[int] | None,
              trials: int,
              base_seed: int,
              transforms: TransformChain | None = None) -> list[BenchRecord]:
    """Absolute quadrature error per (kind, n, trial).

    ``kinds`` may hold tags or concrete SamplerKind values; ``schedule``
    is a list of n applied to every kind, a mapping from tag to its own
    list, or None for the per-kind defaults.  Each trial gets an
    independent sub-seed derived from (base_seed, kind, n, trial), so
    lattice and grid trials differ by their random shift and mc/lhs
    trials by their points.  Deterministic in all arguments.

    With a measure-preserving transform chain (identity, fold, or
    polynomial axes) the integrand is evaluated through the chain with
    its Jacobian weight; chains that change the target integral (mask,
    circle) are rejected.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if transforms is not None:
        if transforms.s != integrand.s:
            raise ValueError(f"chain is {transforms.s}-d, integrand is {integrand.s}-d")
        if not transforms.preserves_integral:
            raise ValueError(
                f"chain {transforms} changes the target integral; only id/fold/poly "
                "axes are meaningful here")

    tags = [k if isinstance(k, str) else k.tag for k in kinds]
    records = []
    for tag in tags:
        if isinstance(schedule, dict):
            ns = schedule[tag]
        elif schedule is None:
            ns = default_schedule(tag, integrand.s)
        else:
            ns = list(schedule)
        for n in ns:
            kind = resolve_kind(tag, n, integrand.s)
            for trial in range(trials):
                seed = derive_seed(base_seed, "bench", tag, n, trial)
                batch = sample(kind, n, integrand.s, seed)
                q = _quadrature(batch, integrand, transforms)
                records.append(BenchRecord(
                    integrand=integrand.name, kind=tag, n=n, trial=trial,
                    seed=seed, abs_error=abs(q - integrand.exact_integral)))
    return records


def summarize(records: Sequence[BenchRecord]) -> list[SummaryRow]:
    """Per-(integrand, kind, n) mean, population std, and max of the errors."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        groups.setdefault((rec.integrand, rec.kind, rec.n), []).append(rec.abs_error)
    rows = []
    for key in sorted(groups):
        errs = np.asarray(groups[key])
        rows.append(SummaryRow(integrand=key[0], kind=key[1], n=key[2],
                               mean=float(errs.mean()), std=float(errs.std()),
                               max=float(errs.max())))
    return rows


def convergence_statistic(row: SummaryRow) -> float:
    """The per-n statistic whose decay rate the benchmark compares.

    Randomized samplers use the trial standard deviation; the
    deterministic Sobol sequence has zero spread, so its own absolute
    error (the trial mean) plays the same role.
    """
    if row.kind in RANDOMIZED_TAGS:
        return row.std
    return row.mean


def fit_slope(ns: Sequence[int], stats: Sequence[float]) -> SlopeFit:
    """Least-squares slope of log(statistic) against log(n).

    Requires at least four distinct n values and strictly positive
    statistics.  The residual field reports the RMS misfit so callers
    can reject lines that do not describe the data.
    """
    ns = np.asarray(ns, dtype=np.float64)
    stats = np.asarray(stats, dtype=np.float64)
    if ns.shape != stats.shape:
        raise ValueError("n and statistic sequences differ in length")
    if np.unique(ns).size < 4:
        raise ValueError("need at least four distinct n values")
    if np.any(stats <= 0.0):
        raise ValueError("statistics must be positive to fit in log space")
    x, y = np.log(ns), np.log(stats)
    coeffs = np.polyfit(x, y, 1)
    pred = np.polyval(coeffs, x)
    rms = float(np.sqrt(np.mean((y - pred) ** 2)))
    return SlopeFit(slope=float(coeffs[0]), intercept=float(coeffs[1]), residual=rms)
