"""
The five collocation-point strategies under one interface.

Uniformly random (Monte Carlo), uniformly spaced grid, Latin hypercube,
the Sobol sequence, and randomly shifted rank-1 lattices all produce a
`SampleBatch` of n points in [0, 1)^s through `sample`.  Batches are a
pure function of (kind, n, s, seed): rerunning with the same arguments is
bit-identical, and samplers drawing randomness use independent named
streams so no global state is involved.

Conventions worth knowing:

* The grid sampler is corner-anchored ({0, 1/m, ..., (m-1)/m} per axis)
  and, like the lattice sampler, gets a uniform random shift modulo 1
  unless an explicit shift is passed.  A shifted corner grid is the same
  point set as a shifted cell-centered grid, so only one anchoring is
  offered.
* The Sobol sequence is the classic unscrambled base-2 construction from
  published primitive-polynomial direction numbers (Joe and Kuo's table);
  point 0 is the origin.  It is deterministic, ignores the seed, and is
  limited to s <= 8 (the embedded table).  A skip-origin option returns
  points 1..n instead of 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import GeneratingVector, generate_points
from .rng import stream

__all__ = [
    "SamplerKind",
    "SampleBatch",
    "sample",
    "sobol_points",
    "lhs_points",
    "SOBOL_MAX_DIM",
]

SOBOL_MAX_DIM = 8

KIND_TAGS = ("mc", "grid", "lhs", "sobol", "glt")


@dataclass(frozen=True)
class SamplerKind:
    """Tagged sampler selector with the per-kind payload.

    ``tag`` is one of "mc", "grid", "lhs", "sobol", "glt".  A lattice
    kind carries its generating vector, a grid kind its points-per-axis
    count, the Sobol kind an optional skip-origin flag.
    """

    tag: str
    lattice: GeneratingVector | None = None
    grid_per_axis: int | None = None
    sobol_skip_origin: bool = False

    def __post_init__(self):
        if self.tag not in KIND_TAGS:
            raise ValueError(f"unknown sampler tag {self.tag!r}, expected one of {KIND_TAGS}")
        if self.tag == "glt" and self.lattice is None:
            raise ValueError("glt sampler needs a generating vector")
        if self.tag == "grid" and (self.grid_per_axis is None or self.grid_per_axis < 1):
            raise ValueError("grid sampler needs points-per-axis >= 1")

    @classmethod
    def uniform_random(cls) -> "SamplerKind":
        return cls(tag="mc")

    @classmethod
    def uniform_grid(cls, points_per_axis: int) -> "SamplerKind":
        return cls(tag="grid", grid_per_axis=int(points_per_axis))

    @classmethod
    def latin_hypercube(cls) -> "SamplerKind":
        return cls(tag="lhs")

    @classmethod
    def sobol(cls, skip_origin: bool = False) -> "SamplerKind":
        return cls(tag="sobol", sobol_skip_origin=skip_origin)

    @classmethod
    def good_lattice(cls, gv: GeneratingVector) -> "SamplerKind":
        return cls(tag="glt", lattice=gv)


@dataclass(frozen=True)
class SampleBatch:
    """n points in [0, 1)^s with the sampler and randomness that made them."""

    points: np.ndarray
    kind: SamplerKind
    seed: int
    shift: np.ndarray | None = None

    def __post_init__(self):
        self.points.setflags(write=False)
        if self.shift is not None:
            self.shift.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def s(self) -> int:
        return self.points.shape[1]


# ---------------------------------------------------------------------------
# Sobol direction numbers
#
# Primitive polynomial degrees, coefficient codes, and initial direction
# integers for dimensions 2..8, from the standard Joe-Kuo table
# (new-joe-kuo-6); dimension 1 is the van der Corput sequence in base 2.
_SOBOL_POLY = {
    2: (1, 0, (1,)),
    3: (2, 1, (1, 3)),
    4: (3, 1, (1, 3, 1)),
    5: (3, 2, (1, 1, 1)),
    6: (4, 1, (1, 1, 3, 3)),
    7: (4, 4, (1, 3, 5, 13)),
    8: (5, 2, (1, 1, 5, 5, 17)),
}

_SOBOL_BITS = 52  # direction integers scale by 2^-52, exact in a double


def _direction_integers(dim: int, nbits: int) -> np.ndarray:
    """First ``nbits`` direction integers V_k (already shifted to _SOBOL_BITS)."""
    V = np.zeros(nbits, dtype=np.uint64)
    if dim == 1:
        for k in range(nbits):
            V[k] = np.uint64(1) << np.uint64(_SOBOL_BITS - 1 - k)
        return V
    deg, a, m_init = _SOBOL_POLY[dim]
    for k in range(min(deg, nbits)):
        V[k] = np.uint64(m_init[k]) << np.uint64(_SOBOL_BITS - 1 - k)
    for k in range(deg, nbits):
        v = V[k - deg] ^ (V[k - deg] >> np.uint64(deg))
        for i in range(1, deg):
            if (a >> (deg - 1 - i)) & 1:
                v ^= V[k - i]
        V[k] = v
    return V


def _sobol_coordinates(indices: np.ndarray, dim: int) -> np.ndarray:
    nbits = max(1, int(indices.max()).bit_length()) if indices.size else 1
    V = _direction_integers(dim, nbits)
    acc = np.zeros(indices.shape, dtype=np.uint64)
    for bit in range(nbits):
        on = ((indices >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        acc[on] ^= V[bit]
    return acc.astype(np.float64) / float(1 << _SOBOL_BITS)


def sobol_points(n: int, s: int, seed: int = 0, skip_origin: bool = False) -> SampleBatch:
    """First n points of the base-2 Sobol sequence in s <= 8 dimensions.

    n must be a power of two.  Unscrambled and unshifted, so the result
    does not depend on the seed (it is recorded for provenance only).
    With ``skip_origin`` the points at indices 1..n are returned.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"Sobol point count must be a power of two, got {n}")
    if not 1 <= s <= SOBOL_MAX_DIM:
        raise ValueError(f"Sobol supports 1 <= s <= {SOBOL_MAX_DIM}, got {s}")
    start = 1 if skip_origin else 0
    indices = np.arange(start, start + n, dtype=np.uint64)
    pts = np.column_stack([_sobol_coordinates(indices, d) for d in range(1, s + 1)])
    kind = SamplerKind.sobol(skip_origin=skip_origin)
    return SampleBatch(points=pts, kind=kind, seed=int(seed))


def lhs_points(n: int, s: int, seed: int) -> SampleBatch:
    """Latin hypercube sample: one point per axis-aligned stratum of width 1/n.

    Axis k gets coordinates (pi(j) + u_j)/n from a seeded permutation pi
    and jitter u drawn on the stream ("lhs", k), so axes are independent.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    pts = np.empty((n, s), dtype=np.float64)
    for axis in range(s):
        rng = stream(seed, "lhs", axis)
        perm = rng.permutation(n)
        jitter = rng.random(n)
        pts[:, axis] = (perm + jitter) / n
    return SampleBatch(points=pts, kind=SamplerKind.latin_hypercube(), seed=int(seed))


def _grid_points(m: int, s: int) -> np.ndarray:
    n = m**s
    idx = np.arange(n, dtype=np.int64)
    pts = np.empty((n, s), dtype=np.float64)
    for k in range(s - 1, -1, -1):
        pts[:, k] = (idx % m) / m
        idx = idx // m
    return pts


def sample(kind: SamplerKind, n: int, s: int, seed: int, shift=None) -> SampleBatch:
    """Draw a batch of n collocation points in [0, 1)^s.

    Deterministic in (kind, n, s, seed).  The lattice and grid kinds are
    randomized by a uniform shift modulo 1 drawn from the stream
    ("shift",); pass ``shift`` explicitly (e.g. zeros) to override it.
    Other kinds reject an explicit shift.

    Raises ValueError when (n, s) is incompatible with the kind: the grid
    needs n = m^s, Sobol needs n a power of two and s <= 8, and the
    lattice kind needs n and s matching its generating vector.
    """
    if n < 1 or s < 1:
        raise ValueError("need n >= 1 and s >= 1")
    if shift is not None and kind.tag not in ("glt", "grid"):
        raise ValueError(f"sampler {kind.tag!r} does not take a shift")

    if kind.tag == "mc":
        pts = stream(seed, "mc").random((n, s))
        return SampleBatch(points=pts, kind=kind, seed=int(seed))

    if kind.tag == "lhs":
        batch = lhs_points(n, s, seed)
        return batch

    if kind.tag == "sobol":
        return sobol_points(n, s, seed=seed, skip_origin=kind.sobol_skip_origin)

    if kind.tag == "grid":
        m = kind.grid_per_axis
        if m**s != n:
            raise ValueError(f"grid kind with m={m} needs n = m^s = {m**s}, got {n}")
        r = _resolve_shift(shift, s, seed)
        pts = _grid_points(m, s) + r
        pts -= np.floor(pts)
        return SampleBatch(points=pts, kind=kind, seed=int(seed), shift=r)

    # glt
    gv = kind.lattice
    if gv.n != n or gv.s != s:
        raise ValueError(
            f"lattice kind has n={gv.n}, s={gv.s}; asked for n={n}, s={s}")
    r = _resolve_shift(shift, s, seed)
    ps = generate_points(gv, shift=r)
    return SampleBatch(points=ps.points, kind=kind, seed=int(seed), shift=r)


def _resolve_shift(shift, s: int, seed: int) -> np.ndarray:
    if shift is None:
        return stream(seed, "shift").random(s)
    r = np.asarray(shift, dtype=np.float64)
    if r.shape != (s,):
        raise ValueError(f"shift has shape {r.shape}, expected ({s},)")
    if np.any(r < 0.0) or np.any(r >= 1.0):
        raise ValueError("shift components must lie in [0, 1)")
    return r
