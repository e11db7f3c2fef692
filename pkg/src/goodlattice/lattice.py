"""
Rank-1 lattice point sets and their number-theoretic diagnostics.

A rank-1 lattice with modulus ``n`` and generating vector ``z`` is the point
set ``{frac(j*z/n) : j = 0..n-1}`` in the unit cube.  Its quality for
equal-weight quadrature is governed by the dual lattice
``{h in Z^s : h.z = 0 (mod n)}``: the rule integrates the Fourier mode
``exp(2*pi*i*h.x)`` exactly to 0 unless ``h`` is dual, in which case the mode
aliases to 1.  This module provides point generation, dual-lattice queries,
the two-dimensional Fibonacci construction, the Zaremba index (minimum dual
product), and continued-fraction diagnostics that bracket it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "GeneratingVector",
    "LatticePointSet",
    "ContinuedFraction",
    "generate_points",
    "fibonacci_generating_vector",
    "fibonacci_number",
    "dual_lattice_contains",
    "character_sum",
    "min_product_dual",
    "continued_fraction",
    "zaremba_bracket",
]

# Largest modulus for which j*z_k stays well inside int64 during vectorized
# residue arithmetic (j, z_k < n, so products are < n^2 < 2^62).
_MAX_MODULUS = 2**31


@dataclass(frozen=True)
class GeneratingVector:
    """Modulus ``n`` and integer vector ``z`` defining a rank-1 lattice.

    Parameters
    ----------
    n : int
        Number of lattice points (the modulus), at least 2.
    z : tuple of int
        Generating vector; each component must lie in ``{0, ..., n-1}``.
    """

    n: int
    z: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(int(c) for c in self.z))
        if self.n < 2:
            raise ValueError(f"modulus must be >= 2, got {self.n}")
        if self.n >= _MAX_MODULUS:
            raise ValueError(f"modulus {self.n} exceeds supported range {_MAX_MODULUS}")
        if len(self.z) < 1:
            raise ValueError("generating vector must have at least one component")
        for c in self.z:
            if not 0 <= c < self.n:
                raise ValueError(f"component {c} outside {{0, ..., {self.n - 1}}}")

    @property
    def s(self) -> int:
        """Dimension of the lattice."""
        return len(self.z)

    def residues(self) -> np.ndarray:
        """Integer residue table ``(j * z_k) mod n`` of shape (n, s)."""
        j = np.arange(self.n, dtype=np.int64)[:, None]
        zz = np.asarray(self.z, dtype=np.int64)[None, :]
        return (j * zz) % self.n


@dataclass(frozen=True)
class LatticePointSet:
    """The ``n`` points of a (possibly shifted) rank-1 lattice.

    ``points[j]`` equals the componentwise fractional part of
    ``j*z/n + shift``; with zero shift the set is closed under addition
    modulo 1.
    """

    points: np.ndarray
    source: GeneratingVector
    shift: np.ndarray | None = None

    def __post_init__(self):
        self.points.setflags(write=False)
        if self.shift is not None:
            self.shift.setflags(write=False)


def generate_points(gv: GeneratingVector, shift=None) -> LatticePointSet:
    """Generate the lattice point set, optionally shifted modulo 1.

    Parameters
    ----------
    gv : GeneratingVector
    shift : array_like of shape (s,), optional
        Offset added to every point before reduction modulo 1.  All
        components must lie in [0, 1).

    Returns
    -------
    LatticePointSet
        Points indexed by j ascending, each coordinate in [0, 1).
    """
    base = gv.residues().astype(np.float64) / gv.n
    if shift is None:
        return LatticePointSet(points=base, source=gv)
    r = np.asarray(shift, dtype=np.float64)
    if r.shape != (gv.s,):
        raise ValueError(f"shift has shape {r.shape}, expected ({gv.s},)")
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise ValueError("shift components must lie in [0, 1)")
    pts = base + r
    pts -= np.floor(pts)
    return LatticePointSet(points=pts, source=gv, shift=r)


def fibonacci_number(k: int) -> int:
    """k-th Fibonacci number with F_1 = F_2 = 1."""
    if k < 1:
        raise ValueError("index must be >= 1")
    a, b = 1, 1
    for _ in range(k - 2):
        a, b = b, a + b
    return b if k >= 2 else a


def fibonacci_generating_vector(k: int) -> GeneratingVector:
    """Two-dimensional lattice with n = F_k and z = (1, F_{k-1}).

    Requires k >= 3 so that n >= 2.  Rejects k large enough that the
    modulus would leave the exactly-representable integer range instead
    of silently wrapping.
    """
    if k < 3:
        raise ValueError("need k >= 3 so that F_k >= 2")
    n = fibonacci_number(k)
    if n >= _MAX_MODULUS:
        raise ValueError(f"F_{k} = {n} exceeds supported modulus range")
    return GeneratingVector(n=n, z=(1, fibonacci_number(k - 1)))


def dual_lattice_contains(gv: GeneratingVector, h) -> bool:
    """Whether integer vector ``h`` satisfies ``h.z = 0 (mod n)``.

    Evaluated with Python integers, so arbitrarily large components are
    handled exactly.
    """
    h = [int(c) for c in h]
    if len(h) != gv.s:
        raise ValueError(f"h has length {len(h)}, expected {gv.s}")
    return sum(c * zc for c, zc in zip(h, gv.z)) % gv.n == 0


def character_sum(gv: GeneratingVector, h) -> complex:
    """Equal-weight average of exp(2*pi*i*h.x_j) over the unshifted lattice.

    The result is 1 when ``h`` is in the dual lattice and 0 otherwise, up
    to floating-point roundoff.
    """
    h = [int(c) for c in h]
    if len(h) != gv.s:
        raise ValueError(f"h has length {len(h)}, expected {gv.s}")
    hz = sum(c * zc for c, zc in zip(h, gv.z)) % gv.n
    theta = 2.0 * np.pi * ((np.arange(gv.n, dtype=np.int64) * hz) % gv.n) / gv.n
    re = math.fsum(np.cos(theta)) / gv.n
    im = math.fsum(np.sin(theta)) / gv.n
    return complex(re, im)


def min_product_dual(gv: GeneratingVector, box: int | None = None) -> int:
    """Zaremba index: minimum of prod(max(1, |h_k|)) over nonzero dual vectors.

    Searches the symmetric box ``|h_k| <= box`` by brute force, cost
    O((2*box+1)^(s-1)) after solving the first coordinate from the
    congruence.  The default box is ``n``, which is exhaustive in any
    dimension: ``(n, 0, ..., 0)`` is always dual with product ``n``, while
    any vector with a component beyond ``n`` in magnitude already has
    product exceeding ``n``.
    """
    H = gv.n if box is None else int(box)
    if H < 1:
        raise ValueError("box bound must be >= 1")
    n = gv.n
    z = [int(c) for c in gv.z]
    best = math.inf

    if gv.s == 1:
        m = n // math.gcd(z[0], n)
        if m <= H:
            best = float(m)
    else:
        g = math.gcd(z[0], n)
        m = n // g
        inv = pow(z[0] // g, -1, m) if m > 1 else 0
        side = 2 * H + 1
        tail_total = side ** (gv.s - 1)
        chunk = min(tail_total, 1 << 22)
        for start in range(0, tail_total, chunk):
            idx = np.arange(start, min(start + chunk, tail_total), dtype=np.int64)
            # decode flat index into tail coordinates (h_1, ..., h_{s-1})
            tail = np.empty((idx.size, gv.s - 1), dtype=np.int64)
            rem = idx
            for k in range(gv.s - 2, -1, -1):
                tail[:, k] = rem % side
                rem = rem // side
            tail -= H
            # h_0*z_0 = -tail.z_tail (mod n); reduce columnwise to avoid overflow
            tail_dot = np.zeros(idx.size, dtype=np.int64)
            for k in range(gv.s - 1):
                tail_dot = (tail_dot + (tail[:, k] % n) * (z[k + 1] % n)) % n
            solvable = tail_dot % g == 0
            if not solvable.any():
                continue
            tail = tail[solvable]
            if m > 1:
                b = ((-(tail_dot[solvable] // g)) % m * inv) % m
            else:
                b = np.zeros(tail.shape[0], dtype=np.int64)
            tail_w = np.prod(np.maximum(1, np.abs(tail)), axis=1).astype(np.float64)
            tail_nonzero = np.any(tail != 0, axis=1)
            # admissible h_0 closest to zero: b and b - m (others only increase |h_0|)
            for h0 in (b, b - m):
                sel = (np.abs(h0) <= H) & (tail_nonzero | (h0 != 0))
                if sel.any():
                    prod = np.maximum(1, np.abs(h0[sel])).astype(np.float64) * tail_w[sel]
                    best = min(best, float(prod.min()))
    if not math.isfinite(best):
        raise ValueError("no nonzero dual vector inside the search box")
    return int(round(best))


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients and convergents of a rational number.

    ``a[0]`` is the integer part; ``a[i] >= 1`` for ``i >= 1``.  Convergent
    ``i`` is the reduced fraction ``p_i/q_i`` built by the standard
    recurrences ``p_i = a_i*p_{i-1} + p_{i-2}``,
    ``q_i = a_i*q_{i-1} + q_{i-2}``.
    """

    a: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...] = field(repr=False)


def continued_fraction(z2: int, n: int) -> ContinuedFraction:
    """Continued-fraction expansion of z2/n with its convergents.

    Requires ``1 <= z2 < n`` and ``gcd(z2, n) = 1``; the final convergent
    then reproduces ``z2/n`` exactly.
    """
    z2, n = int(z2), int(n)
    if not 1 <= z2 < n:
        raise ValueError(f"need 1 <= z2 < n, got z2={z2}, n={n}")
    if math.gcd(z2, n) != 1:
        raise ValueError(f"z2={z2} and n={n} are not coprime")
    a = []
    num, den = z2, n
    while den:
        q, r = divmod(num, den)
        a.append(q)
        num, den = den, r
    # convergents: p_0 = a_0, p_1 = a_0*a_1 + 1; q_0 = 1, q_1 = a_1
    ps, qs = [], []
    for i, ai in enumerate(a):
        if i == 0:
            ps.append(ai)
            qs.append(1)
        elif i == 1:
            ps.append(ai * ps[0] + 1)
            qs.append(ai)
        else:
            ps.append(ai * ps[-1] + ps[-2])
            qs.append(ai * qs[-1] + qs[-2])
    conv = tuple(zip(ps, qs))
    assert conv[-1] == (z2, n)
    return ContinuedFraction(a=tuple(a), convergents=conv)


def zaremba_bracket(gv: GeneratingVector) -> tuple[Fraction, Fraction]:
    """Exact bracket on the Zaremba index from partial quotients.

    For a two-dimensional lattice with z = (1, z2) and gcd(z2, n) = 1, the
    minimum dual product lies in ``[n/(max a_i + 2), n/(max a_i)]`` where
    the maximum runs over the partial quotients with index >= 1.  Small
    partial quotients are therefore good, which is where the all-ones
    (Fibonacci) expansion comes from.
    """
    if gv.s != 2 or gv.z[0] != 1:
        raise ValueError("bracket requires a 2-d vector of the form (1, z2)")
    cf = continued_fraction(gv.z[1], gv.n)
    amax = max(cf.a[1:])
    return Fraction(gv.n, amax + 2), Fraction(gv.n, amax)
