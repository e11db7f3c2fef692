"""
Korobov-space figure of merit P_alpha and generating-vector search.

``P_alpha(z, n)`` sums ``1/(max(1,|h_1|) * ... * max(1,|h_s|))^alpha`` over
the nonzero dual-lattice vectors ``h.z = 0 (mod n)``.  It is, up to a
constant, the worst-case quadrature error of the lattice rule over the
class of functions whose Fourier coefficients decay at rate alpha, so
smaller is better.

Two independent evaluation routes are provided.  For even alpha in
{2, 4, 6} the defining Fourier series collapses to a Bernoulli polynomial,
giving an exact O(n*s) formula; for any alpha > 1 a truncated-box
enumeration of the dual lattice gives an arbitrarily close lower bound.
The searches minimize the exact form over Korobov-shaped candidate
vectors ``(1, l, l^2 mod n, ...)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import GeneratingVector

__all__ = [
    "Smoothness",
    "MeritValue",
    "bernoulli_polynomial",
    "f_alpha",
    "p_alpha_exact",
    "p_alpha_bruteforce",
    "figure_of_merit",
    "korobov_search",
    "exhaustive_search_2d",
    "read_generator_table",
]

_EXACT_ALPHAS = (2, 4, 6)

# Leading factor of the closed form F_alpha(x) = 1 + c_alpha * B_alpha(x),
# i.e. c_alpha = -(-1)^(alpha/2) (2*pi)^alpha / alpha!.
_F_COEF = {
    2: 2.0 * np.pi**2,
    4: -(2.0 / 3.0) * np.pi**4,
    6: (4.0 / 45.0) * np.pi**6,
}


@dataclass(frozen=True)
class Smoothness:
    """Decay rate of Fourier coefficients; must exceed 1 for P_alpha to converge."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"smoothness must exceed 1, got {self.alpha}")

    @property
    def exact_mode(self) -> bool:
        """Whether the Bernoulli closed form applies (even integer alpha <= 6)."""
        return self.alpha in _EXACT_ALPHAS


@dataclass(frozen=True)
class MeritValue:
    """P_alpha of a generating vector, tagged with how smooth a class it scores."""

    p_alpha: float
    gv: GeneratingVector
    alpha: Smoothness


def _bernoulli_core(alpha: int, x: np.ndarray) -> np.ndarray:
    if alpha == 2:
        return x * x - x + 1.0 / 6.0
    if alpha == 4:
        return ((x - 2.0) * x + 1.0) * x * x - 1.0 / 30.0
    if alpha == 6:
        return (((x - 3.0) * x + 2.5) * x * x - 0.5) * x * x + 1.0 / 42.0
    raise ValueError(f"no closed form for alpha={alpha}; use 2, 4, or 6")


def bernoulli_polynomial(alpha: int, x):
    """Bernoulli polynomial B_alpha on [0, 1] for alpha in {2, 4, 6}.

    B_2(x) = x^2 - x + 1/6
    B_4(x) = x^4 - 2x^3 + x^2 - 1/30
    B_6(x) = x^6 - 3x^5 + (5/2)x^4 - (1/2)x^2 + 1/42
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("argument must lie in [0, 1]")
    out = _bernoulli_core(alpha, x)
    return out if out.ndim else float(out)


def f_alpha(alpha: int, x):
    """Worst-case one-dimensional integrand 1 + sum_{h!=0} exp(2*pi*i*h*x)/|h|^alpha.

    Evaluated through the Bernoulli closed form at the fractional part of
    ``x``; integrates to 1 over a unit period.  The fractional part is
    folded onto [0, 1/2] before the polynomial, which is exact for even
    alpha and makes evaluations at mirrored arguments agree bitwise
    whenever the arguments themselves are exact mirrors in floating point
    (as the residue grids r/n used by the merit evaluation are).
    """
    if alpha not in _EXACT_ALPHAS:
        raise ValueError(f"no closed form for alpha={alpha}; use 2, 4, or 6")
    xf = np.asarray(x, dtype=np.float64)
    xf = xf - np.floor(xf)
    xf = np.where(xf > 0.5, 1.0 - xf, xf)
    out = 1.0 + _F_COEF[alpha] * _bernoulli_core(alpha, xf)
    return out if out.ndim else float(out)


def _f_alpha_table(alpha: int, n: int) -> np.ndarray:
    """F_alpha at the grid points r/n for r = 0..n-1, via canonical residues.

    Using min(r, n-r) before the division makes merits of mirrored vectors
    (z_k <-> n - z_k) bitwise identical.
    """
    r = np.arange(n, dtype=np.int64)
    canon = np.minimum(r, n - r)
    return 1.0 + _F_COEF[alpha] * _bernoulli_core(alpha, canon / float(n))


def _merit_from_residues(residues: np.ndarray, table: np.ndarray, n: int) -> float:
    """-1 + (1/n) sum_j prod_k F_alpha(r_jk / n), accumulated with math.fsum."""
    vals = table[residues[:, 0]].copy()
    for k in range(1, residues.shape[1]):
        vals *= table[residues[:, k]]
    return math.fsum(vals) / n - 1.0


def p_alpha_exact(gv: GeneratingVector, alpha: int) -> MeritValue:
    """P_alpha via the Bernoulli closed form, exact up to roundoff.

    The dual-lattice sum equals ``-1 + (1/n) sum_j prod_k F_alpha(x_jk)``
    over the unshifted lattice points, because each Fourier mode of the
    product integrand aliases to 1 exactly when its index is dual.
    Cost O(n*s); the j-sum is compensated (math.fsum).
    """
    sm = Smoothness(float(alpha))
    if not sm.exact_mode:
        raise ValueError(f"exact evaluation needs alpha in {_EXACT_ALPHAS}, got {alpha}")
    table = _f_alpha_table(int(alpha), gv.n)
    value = _merit_from_residues(gv.residues(), table, gv.n)
    return MeritValue(p_alpha=value, gv=gv, alpha=sm)


def _residue_weights(zk: int, n: int, H: int, alpha: float) -> np.ndarray:
    """Bucket the box weights max(1,|h|)^(-alpha) by the residue of h*zk mod n."""
    h = np.arange(-H, H + 1, dtype=np.int64)
    w = np.maximum(1.0, np.abs(h).astype(np.float64)) ** (-alpha)
    rho = (h * (zk % n)) % n
    return np.bincount(rho, weights=w, minlength=n)


def _cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.size
    full = np.convolve(a, b)
    out = full[:n].copy()
    out[: n - 1] += full[n:]
    return out


def p_alpha_bruteforce(gv: GeneratingVector, alpha: float, box: int) -> float:
    """P_alpha truncated to dual vectors in the box |h_k| <= box.

    Every dual vector in the box contributes exactly once; the enumeration
    is organized by residue classes of ``h_k * z_k mod n`` so the cost is
    O(s*box + s*n^2) instead of O((2*box+1)^s).  The result is biased low
    by the dual vectors outside the box and is monotone nondecreasing in
    the box bound.  Valid for any alpha > 1.
    """
    H = int(box)
    if H < 1:
        raise ValueError("box bound must be >= 1")
    if float(alpha) <= 1:
        raise ValueError("alpha must exceed 1")
    n = gv.n
    if H * n >= 2**62:
        raise ValueError("box * n too large for exact residue arithmetic")
    parts = [_residue_weights(zk, n, H, float(alpha)) for zk in gv.z]
    acc = parts[0]
    for wk in parts[1:-1]:
        acc = _cyclic_convolve(acc, wk)
    if len(parts) == 1:
        total = float(acc[0])
    else:
        flip = parts[-1][(-np.arange(n)) % n]
        total = float(acc @ flip)
    return total - 1.0  # remove the h = 0 contribution


def figure_of_merit(gv: GeneratingVector, alpha: float, box: int = 10**4) -> MeritValue:
    """P_alpha by the best available route.

    Even alpha in {2, 4, 6} uses the exact closed form; any other
    alpha > 1 falls back to the truncated-box enumeration.
    """
    sm = Smoothness(float(alpha))
    if sm.exact_mode:
        return p_alpha_exact(gv, int(alpha))
    return MeritValue(p_alpha=p_alpha_bruteforce(gv, alpha, box), gv=gv, alpha=sm)


def _korobov_residues(n: int, s: int, l: int) -> np.ndarray:
    """Residue table of the candidate z = (1, l, l^2 mod n, ...)."""
    j = np.arange(n, dtype=np.int64)
    cols = np.empty((n, s), dtype=np.int64)
    cols[:, 0] = j
    for k in range(1, s):
        cols[:, k] = (cols[:, k - 1] * (l % n)) % n
    return cols


def _search_chunk(n: int, s: int, table: np.ndarray, ls) -> tuple[float, int]:
    best_p, best_l = math.inf, -1
    for l in ls:
        p = _merit_from_residues(_korobov_residues(n, s, l), table, n)
        if p < best_p:
            best_p, best_l = p, l
    return best_p, best_l


def korobov_search(n: int, s: int, alpha: int, workers: int = 1) -> GeneratingVector:
    """Minimize P_alpha over Korobov-shaped vectors (1, l, l^2 mod n, ...).

    All l in {1, ..., n-1} are scored with the exact closed form, cost
    O(n^2 * s) total.  Ties are broken toward the smallest l (mirrored
    candidates l and n - l score bitwise equal), so the result does not
    depend on the number of workers.

    Parameters
    ----------
    n : int
        Number of lattice points, at least 2.
    s : int
        Dimension, at least 2.
    alpha : int
        Smoothness; must be one of 2, 4, 6.
    workers : int
        Candidate range is split across this many threads.

    Returns
    -------
    GeneratingVector
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if s < 2:
        raise ValueError("need s >= 2")
    sm = Smoothness(float(alpha))
    if not sm.exact_mode:
        raise ValueError(f"search needs alpha in {_EXACT_ALPHAS}, got {alpha}")
    table = _f_alpha_table(int(alpha), n)
    candidates = range(1, n)
    if workers <= 1 or n <= 64:
        best_p, best_l = _search_chunk(n, s, table, candidates)
    else:
        chunks = np.array_split(np.asarray(candidates), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _search_chunk(n, s, table, c), chunks))
        # smallest merit wins; ties go to the smallest l
        best_p, best_l = min(results, key=lambda r: (r[0], r[1]))
    z = tuple(int(c) for c in _korobov_residues(n, s, best_l)[1, :])
    return GeneratingVector(n=n, z=z)


def exhaustive_search_2d(n: int, alpha: int) -> GeneratingVector:
    """Minimize P_alpha over every 2-d vector (1, z2), z2 = 1..n-1.

    At s = 2 the Korobov form already enumerates all such vectors, so this
    is a direct cross-check for `korobov_search`.  Guarded to n <= 1000.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if n > 1000:
        raise ValueError("exhaustive 2-d search is guarded to n <= 1000")
    sm = Smoothness(float(alpha))
    if not sm.exact_mode:
        raise ValueError(f"search needs alpha in {_EXACT_ALPHAS}, got {alpha}")
    table = _f_alpha_table(int(alpha), n)
    j = np.arange(n, dtype=np.int64)
    best_p, best_z2 = math.inf, -1
    for z2 in range(1, n):
        residues = np.stack([j, (j * z2) % n], axis=1)
        p = _merit_from_residues(residues, table, n)
        if p < best_p:
            best_p, best_z2 = p, z2
    return GeneratingVector(n=n, z=(1, best_z2))


def read_generator_table(path) -> list[MeritValue]:
    """Parse a generator table CSV (header s,n,z1,...,zs,alpha,p_alpha).

    Comment lines start with '#'.  Returns one MeritValue per data row,
    preserving file order.
    """
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("s,"):
                continue
            parts = line.split(",")
            s = int(parts[0])
            if len(parts) != s + 4:
                raise ValueError(f"malformed table row: {line!r}")
            gv = GeneratingVector(n=int(parts[1]),
                                  z=tuple(int(v) for v in parts[2:2 + s]))
            out.append(MeritValue(p_alpha=float(parts[-1]), gv=gv,
                                  alpha=Smoothness(float(parts[-2]))))
    return out
