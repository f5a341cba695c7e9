"""Systematic Lagrange coded computing on the Chebyshev grid.

The master holds m data vectors, anchors them at the first m grid points
of cheb_grid(P) (so workers 1..m receive raw data), and sends every other
worker the Lagrange interpolant of the data evaluated at its own grid
point.  Workers apply a known polynomial map f; the fusion node recovers
f at the anchors from any K = (m-1)*deg(f)+1 outputs by interpolating in
either the Chebyshev basis (stable) or the monomial basis (baseline).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cheb_vandermonde import build_generator
from .linalg import as_matrix, lu_factor, lu_solve
from .poly_basis import cheb_grid

__all__ = [
    "LagrangeConfig",
    "PolyMap",
    "linear_map",
    "lagrange_encode",
    "worker_outputs",
    "lagrange_decode",
    "decode_generator",
    "check_survivors",
]

DECODE_BASES = ("chebyshev", "monomial")


@dataclass(frozen=True)
class LagrangeConfig:
    """m data points, P workers, input dimension, and the (caller-known)
    total degree of the worker map, which fixes the recovery threshold
    K = (m-1)*deg_f + 1."""

    m: int
    workers: int
    dim: int
    deg_f: int
    points: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"need at least one data point, got m={self.m}")
        if self.dim < 1:
            raise ValueError(f"input dimension must be positive, got {self.dim}")
        if self.deg_f < 1:
            raise ValueError(f"map degree must be at least 1, got {self.deg_f}")
        if self.m > self.workers:
            raise ValueError(f"m={self.m} data points exceed {self.workers} workers")
        if self.points is None:
            pts = cheb_grid(self.workers).points.copy()
        else:
            pts = np.array(self.points, dtype=np.float64).ravel()
        if pts.size != self.workers:
            raise ValueError(f"need {self.workers} evaluation points, got {pts.size}")
        if np.unique(pts).size != pts.size:
            raise ValueError("evaluation points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.threshold > self.workers:
            raise ValueError(
                f"threshold K={self.threshold} exceeds worker count {self.workers}"
            )

    @property
    def threshold(self) -> int:
        return (self.m - 1) * self.deg_f + 1

    @property
    def anchors(self) -> np.ndarray:
        """The first m grid points, in stored (decreasing) order."""
        return self.points[: self.m]


@dataclass(frozen=True)
class PolyMap:
    """Total polynomial map R^dim -> R^out_dim of the declared degree."""

    dim: int
    out_dim: int
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        out = np.asarray(self.fn(np.asarray(x, dtype=np.float64)), dtype=np.float64).ravel()
        if out.size != self.out_dim:
            raise ValueError(f"map produced {out.size} outputs, declared {self.out_dim}")
        return out


def linear_map(y) -> PolyMap:
    """f(X) = y^T X (degree 1, scalar output)."""
    y = np.asarray(y, dtype=np.float64).ravel()
    return PolyMap(dim=y.size, out_dim=1, fn=lambda x: np.atleast_1d(y @ x))


def lagrange_encode(config: LagrangeConfig, data) -> np.ndarray:
    """Encode m data vectors into P worker inputs.

    Workers 1..m receive their data vector unchanged; worker r > m gets
    g(rho_r) where g is the Lagrange interpolant through the anchors.
    """
    data = as_matrix(data)
    if data.shape != (config.m, config.dim):
        raise ValueError(
            f"data must be {config.m} vectors of dimension {config.dim}, got {data.shape}"
        )
    out = np.empty((config.workers, config.dim))
    out[: config.m] = data
    anchors = config.anchors
    for r in range(config.m, config.workers):
        x = config.points[r]
        # ratios[i, j] = (x - x_j) / (x_i - x_j), diagonal patched to 1
        diff_to_x = x - anchors
        spread = anchors[:, None] - anchors[None, :]
        np.fill_diagonal(spread, 1.0)
        ratios = diff_to_x[None, :] / spread
        np.fill_diagonal(ratios, 1.0)
        out[r] = np.prod(ratios, axis=1) @ data
    return out


def worker_outputs(config: LagrangeConfig, f: PolyMap, encoded) -> np.ndarray:
    """Apply the worker map to every encoded vector; row r is worker r+1."""
    encoded = as_matrix(encoded)
    if f.dim != config.dim:
        raise ValueError(f"map expects dimension {f.dim}, config has {config.dim}")
    return np.stack([f(row) for row in encoded])


def decode_generator(config: LagrangeConfig, basis: str) -> np.ndarray:
    """K x P interpolation generator on the grid in the chosen basis."""
    if basis not in DECODE_BASES:
        raise ValueError(f"unknown basis {basis!r}, expected one of {DECODE_BASES}")
    kind = "chebyshev" if basis == "chebyshev" else "monomial"
    return build_generator(kind, config.threshold, config.points)


def check_survivors(config: LagrangeConfig, survivors) -> tuple[int, ...]:
    surv = tuple(sorted(int(s) for s in survivors))
    if len(surv) != config.threshold:
        raise ValueError(f"decoder needs exactly {config.threshold} survivors, got {len(surv)}")
    if len(set(surv)) != len(surv):
        raise ValueError(f"survivor indices must be distinct, got {surv}")
    if surv and (surv[0] < 1 or surv[-1] > config.workers):
        raise ValueError(f"survivor indices {surv} out of range [1, {config.workers}]")
    return surv


def lagrange_decode(
    config: LagrangeConfig,
    f: PolyMap,
    survivors,
    outputs,
    basis: str = "chebyshev",
) -> np.ndarray:
    """Estimate f at the m anchors from K survivor outputs.

    Each output component is a degree-(K-1) polynomial of the grid
    coordinate; its coefficients are interpolated through the K survivor
    columns of the chosen generator (one factorization for all components)
    and then evaluated at the anchor columns.  Returns an (m, out_dim)
    array of estimates.
    """
    surv = check_survivors(config, survivors)
    outs = as_matrix(outputs)
    if outs.shape != (config.threshold, f.out_dim):
        raise ValueError(
            f"expected outputs of shape {(config.threshold, f.out_dim)}, got {outs.shape}"
        )
    order = np.argsort([int(s) for s in survivors], kind="stable")
    outs = outs[order]

    gen = decode_generator(config, basis)
    sub = gen[:, np.asarray(surv, dtype=np.int64) - 1]
    anchor_block = gen[:, : config.m]
    coeffs = lu_solve(lu_factor(sub.T), outs)  # (K, out_dim), one column per component
    return (coeffs.T @ anchor_block).T
