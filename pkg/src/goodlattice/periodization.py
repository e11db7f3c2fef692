"""
Transforms that make a loss integrand periodic on the sampling cube.

Lattice-rule error bounds need the integrand to extend periodically and
smoothly across the faces of the unit cube.  PDE losses usually do not,
so coordinates are mapped before evaluation: fold the time axis so the
initial face meets itself, embed a periodic space axis on the unit
circle, damp a Dirichlet axis to zero at its faces, or reweight by a
polynomial change of variables whose Jacobian vanishes at the ends.
Chains of per-axis transforms are plain data (`TransformChain`), applied
between any sampler's output and the loss, so every sampling strategy
can use the same tricks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "AxisTransform",
    "TransformChain",
    "time_fold",
    "circle_embed",
    "ic_blend",
    "dirichlet_mask",
    "polynomial_transform",
]

_TAGS = ("id", "fold", "circle", "mask", "poly")


def time_fold(t_hat):
    """Tent map of [0, 1] onto [0, 1]: 2*t for t < 1/2, else 2*(1 - t).

    Traversing the folded axis runs time forward then backward, so the
    composite loss takes equal values at t_hat = 0 and t_hat = 1 and
    extends continuously with period 1.
    """
    t = np.asarray(t_hat, dtype=np.float64)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ValueError("folded coordinate must lie in [0, 1]")
    out = np.where(t < 0.5, 2.0 * t, 2.0 * (1.0 - t))
    return out if out.ndim else float(out)


def circle_embed(x):
    """Map a periodic coordinate to (cos(2*pi*x), sin(2*pi*x)).

    The fractional part is taken first, so x = 0 and x = 1 land on the
    same point of the circle bitwise.
    """
    x = np.asarray(x, dtype=np.float64)
    xf = x - np.floor(x)
    c, s = np.cos(2.0 * np.pi * xf), np.sin(2.0 * np.pi * xf)
    if c.ndim:
        return c, s
    return float(c), float(s)


def ic_blend(t, u0_val, net_val):
    """Blend exp(-t)*u0 + (1 - exp(-t))*net, exact at t = 0.

    Pins the initial condition without a penalty term: at t = 0 the
    output is u0 bitwise, and the network takes over exponentially as t
    grows.
    """
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("blend time must be nonnegative")
    u0 = np.asarray(u0_val, dtype=np.float64)
    net = np.asarray(net_val, dtype=np.float64)
    if u0.shape != net.shape:
        raise ValueError(f"shape mismatch: u0 {u0.shape} vs net {net.shape}")
    w = np.exp(-t)
    out = w * u0 + (1.0 - w) * net
    return out if out.ndim else float(out)


def dirichlet_mask(x, masked_axes=None):
    """prod x_k*(1 - x_k) over the masked axes; exactly 0 on their faces.

    ``x`` has shape (..., s); the default masks every axis.  Maximum value
    is 4^-len(masked) at the center of the cube.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("coordinates must lie in [0, 1]")
    s = x.shape[-1]
    axes = range(s) if masked_axes is None else sorted(set(masked_axes))
    out = np.ones(x.shape[:-1], dtype=np.float64)
    for k in axes:
        if not 0 <= k < s:
            raise ValueError(f"masked axis {k} out of range for s={s}")
        out = out * (x[..., k] * (1.0 - x[..., k]))
    return out if out.ndim else float(out)


def polynomial_transform(z, degree: int = 3):
    """Monotone polynomial map of [0, 1] with vanishing endpoint derivative.

    Returns (y, dy/dz).  Degree 3 gives y = 3z^2 - 2z^3 with
    dy = 6z(1 - z); degree 5 gives y = 10z^3 - 15z^4 + 6z^5 with
    dy = 30z^2(1 - z)^2, whose second derivative also vanishes at both
    ends.  Reweighting an integrand by dy makes equal-weight quadrature
    of a non-periodic function behave as if it were periodic, at the
    cost of de-emphasizing the endpoint regions.
    """
    z = np.asarray(z, dtype=np.float64)
    if np.any(z < 0.0) or np.any(z > 1.0):
        raise ValueError("argument must lie in [0, 1]")
    if degree == 3:
        y = z * z * (3.0 - 2.0 * z)
        dy = 6.0 * z * (1.0 - z)
    elif degree == 5:
        y = z**3 * (10.0 + z * (-15.0 + 6.0 * z))
        dy = 30.0 * (z * (1.0 - z)) ** 2
    else:
        raise ValueError(f"unsupported transform degree {degree}; use 3 or 5")
    if y.ndim:
        return y, dy
    return float(y), float(dy)


@dataclass(frozen=True)
class AxisTransform:
    """One axis of a transform chain: id, fold, circle, mask, or poly."""

    tag: str
    degree: int | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown transform {self.tag!r}, expected one of {_TAGS}")
        if self.tag == "poly":
            if self.degree not in (3, 5):
                raise ValueError("polynomial transform degree must be 3 or 5")
        elif self.degree is not None:
            raise ValueError(f"{self.tag!r} transform takes no degree")

    @property
    def output_width(self) -> int:
        return 2 if self.tag == "circle" else 1

    def __str__(self) -> str:
        return f"poly{self.degree}" if self.tag == "poly" else self.tag


@dataclass(frozen=True)
class TransformChain:
    """Per-axis transforms applied between sampler output and the loss.

    Circle embedding widens its axis to two output columns, so the output
    dimension is s plus the number of circle axes.  `apply` also returns
    the pointwise weight factor accumulated from masks and polynomial
    Jacobians (1 everywhere for chains without them).
    """

    axes: tuple[AxisTransform, ...]

    def __post_init__(self):
        if any(not isinstance(a, AxisTransform) for a in self.axes):
            raise TypeError("chain axes must be AxisTransform instances")
        if sum(a.tag == "fold" for a in self.axes) > 1:
            raise ValueError("at most one axis (the time axis) may be folded")

    @classmethod
    def parse(cls, spec: str) -> "TransformChain":
        """Build a chain from a comma-separated spec like "fold,circle"."""
        axes = []
        for word in spec.split(","):
            word = word.strip().lower()
            if word in ("poly3", "poly5"):
                axes.append(AxisTransform(tag="poly", degree=int(word[-1])))
            else:
                axes.append(AxisTransform(tag=word))
        return cls(axes=tuple(axes))

    @property
    def s(self) -> int:
        return len(self.axes)

    @property
    def output_dim(self) -> int:
        return sum(a.output_width for a in self.axes)

    @property
    def preserves_integral(self) -> bool:
        """Whether sum of w*f(chain(x)) targets the same integral as f."""
        return all(a.tag in ("id", "fold", "poly") for a in self.axes)

    def apply(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Transform an (n, s) batch; returns (coordinates, weights)."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.s:
            raise ValueError(f"expected shape (n, {self.s}), got {pts.shape}")
        cols = []
        weight = np.ones(pts.shape[0], dtype=np.float64)
        for k, axis in enumerate(self.axes):
            x = pts[:, k]
            if axis.tag == "id":
                cols.append(x)
            elif axis.tag == "fold":
                cols.append(time_fold(x))
            elif axis.tag == "circle":
                c, s = circle_embed(x)
                cols.append(c)
                cols.append(s)
            elif axis.tag == "mask":
                cols.append(x)
                weight = weight * (x * (1.0 - x))
            else:  # poly
                y, dy = polynomial_transform(x, axis.degree)
                cols.append(y)
                weight = weight * dy
        return np.column_stack(cols), weight

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.axes)
