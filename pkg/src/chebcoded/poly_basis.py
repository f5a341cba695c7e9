"""Chebyshev polynomials of the first kind, their root grids, and the
n-point Gauss quadrature rule for the weight w(x) = 2/(pi*sqrt(1-x^2))
on [-1, 1].

Under this weight T_0/sqrt(2), T_1, T_2, ... are orthonormal, the roots
of T_n are cos((2i-1)pi/(2n)) for i = 1..n, and the quadrature weights
are all 2/n.  Everything here is a pure function of its arguments; grid
and rule values are frozen after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChebyshevGrid",
    "QuadratureRule",
    "cheb_T",
    "chebyshev_values",
    "cheb_grid",
    "quad_rule",
    "trig_lemma_check",
]

# Beyond this slack around [-1, 1] the trigonometric form is undefined and
# the three-term recurrence takes over.
_DOMAIN_SLACK = 1e-12


def cheb_T(k: int, x: float) -> float:
    """Evaluate T_k(x).

    On [-1, 1] (up to a tiny slack) uses cos(k*arccos(x)), which is
    uniformly stable on the interval; outside it falls back to the
    recurrence T_k = 2x*T_{k-1} - T_{k-2}.
    """
    if k < 0:
        raise ValueError(f"polynomial degree must be non-negative, got {k}")
    x = float(x)
    if abs(x) <= 1.0 + _DOMAIN_SLACK:
        return math.cos(k * math.acos(min(1.0, max(-1.0, x))))
    if k == 0:
        return 1.0
    t_prev, t = 1.0, x
    for _ in range(k - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t


def chebyshev_values(degrees, xs) -> np.ndarray:
    """Table of T_d(x) values, one row per degree, one column per point.

    Same evaluation strategy as :func:`cheb_T`, vectorized: trigonometric
    form for points inside [-1, 1], recurrence for points outside.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.ndim != 1:
        raise ValueError("degrees must be a 1-D sequence")
    if degrees.size and degrees.min() < 0:
        raise ValueError("polynomial degrees must be non-negative")
    xs = np.asarray(xs, dtype=np.float64).ravel()
    out = np.empty((degrees.size, xs.size))

    inside = np.abs(xs) <= 1.0 + _DOMAIN_SLACK
    if inside.any():
        theta = np.arccos(np.clip(xs[inside], -1.0, 1.0))
        out[:, inside] = np.cos(degrees[:, None] * theta[None, :])
    if not inside.all():
        xo = xs[~inside]
        kmax = int(degrees.max()) if degrees.size else 0
        table = np.empty((kmax + 1, xo.size))
        table[0] = 1.0
        if kmax >= 1:
            table[1] = xo
        for k in range(2, kmax + 1):
            table[k] = 2.0 * xo * table[k - 1] - table[k - 2]
        out[:, ~inside] = table[degrees]
    return out


@dataclass(frozen=True)
class ChebyshevGrid:
    """The n roots of T_n, stored in index order i = 1..n (strictly
    decreasing values cos((2i-1)pi/(2n)))."""

    n: int
    points: np.ndarray

    def __post_init__(self):
        self.points.setflags(write=False)


@dataclass(frozen=True)
class QuadratureRule:
    """n-node Gauss rule on the Chebyshev grid; exact for polynomials of
    degree < 2n under the weight 2/(pi*sqrt(1-x^2))."""

    n: int
    nodes: ChebyshevGrid
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)

    def apply(self, values) -> float:
        """Weighted sum over the nodes for per-node sample values."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n,):
            raise ValueError(f"expected {self.n} node values, got shape {values.shape}")
        return float(self.weights @ values)


def cheb_grid(n: int) -> ChebyshevGrid:
    """Grid of the n roots of T_n."""
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    points = np.cos((2.0 * i - 1.0) * math.pi / (2.0 * n))
    return ChebyshevGrid(n=n, points=points)


def quad_rule(n: int) -> QuadratureRule:
    """Quadrature rule on cheb_grid(n); all weights equal 2/n.

    n = 1 is allowed (single node 0, weight 2), which integrates any
    polynomial of degree < 2 exactly.
    """
    if n < 1:
        raise ValueError(f"rule size must be positive, got {n}")
    return QuadratureRule(n=n, nodes=cheb_grid(n), weights=np.full(n, 2.0 / n))


def trig_lemma_check(n: int, i: int) -> tuple[float, float]:
    """Compare the node-difference product against its closed form.

    Returns (lhs, rhs) where lhs = prod_{j != i} (rho_i - rho_j) computed
    directly over cheb_grid(n) and rhs = (-1)^(i-1) * 2^(1-n) * n /
    sin((2i-1)pi/(2n)).
    """
    if n < 2:
        raise ValueError(f"need at least two grid points, got n={n}")
    if not 1 <= i <= n:
        raise ValueError(f"index i={i} out of range [1, {n}]")
    points = cheb_grid(n).points
    diffs = points[i - 1] - np.delete(points, i - 1)
    lhs = float(np.prod(diffs))
    rhs = (-1.0) ** (i - 1) * 2.0 ** (1 - n) * n / math.sin((2 * i - 1) * math.pi / (2 * n))
    return lhs, rhs
