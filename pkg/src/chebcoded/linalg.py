"""Dense float64 linear algebra: products, LU solves with partial
pivoting, Frobenius/spectral condition numbers (the latter via cyclic
Jacobi on the Gram matrix), and a seeded counter-based Gaussian source.

Matrices are plain 2-D float64 ndarrays, validated finite at the public
entry points and treated as immutable once built.  ``Rng`` is the only
stateful object here; it is single-owner, and independent child streams
come from :meth:`Rng.spawn`.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SingularMatrixError",
    "SINGULAR_PIVOT_RTOL",
    "as_matrix",
    "matmul",
    "lu_factor",
    "lu_solve",
    "solve",
    "invert",
    "cond",
    "jacobi_singular_values",
    "Rng",
    "gaussian_matrix",
]

# A pivot below this fraction of ||a||_F means the elimination cannot
# continue reliably in float64.
SINGULAR_PIVOT_RTOL = 1e-14


class SingularMatrixError(ValueError):
    """Raised when LU elimination meets a pivot too small to trust."""

    def __init__(self, pivot_index: int, pivot: float, scale: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(
            f"singular matrix: pivot {pivot:.3e} at elimination step {pivot_index} "
            f"(threshold {SINGULAR_PIVOT_RTOL:.0e} * ||a||_F = {SINGULAR_PIVOT_RTOL * scale:.3e})"
        )


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("matrix entries must be finite")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {a.shape} times {b.shape}")
    return a @ b


def lu_factor(a) -> tuple[np.ndarray, np.ndarray]:
    """LU factorization with partial (row) pivoting.

    Returns (lu, perm) where lu packs the unit-lower and upper factors and
    perm is the row order applied to the input, i.e. a[perm] = L @ U.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {a.shape}")
    lu = a.copy()
    perm = np.arange(n)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        raise SingularMatrixError(0, 0.0, 0.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = lu[p, k]
        if abs(pivot) < SINGULAR_PIVOT_RTOL * scale:
            raise SingularMatrixError(k, float(pivot), scale)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1 :, k] /= pivot
        if k + 1 < n:
            lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm


def lu_solve(factors: tuple[np.ndarray, np.ndarray], rhs) -> np.ndarray:
    """Solve a @ x = rhs given ``factors`` from :func:`lu_factor`."""
    lu, perm = factors
    n = lu.shape[0]
    b = np.asarray(rhs, dtype=np.float64)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.shape[0] != n:
        raise ValueError(f"rhs has {b.shape[0]} rows, matrix has {n}")
    x = b[perm].copy()
    for k in range(1, n):
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):
        if k + 1 < n:
            x[k] -= lu[k, k + 1 :] @ x[k + 1 :]
        x[k] /= lu[k, k]
    return x[:, 0] if vector else x


def solve(a, rhs) -> np.ndarray:
    """Solve a @ x = rhs by LU with partial pivoting."""
    a = as_matrix(a)
    rhs_arr = np.asarray(rhs, dtype=np.float64)
    rows = rhs_arr.shape[0] if rhs_arr.ndim else -1
    if rhs_arr.ndim not in (1, 2) or rows != a.shape[0]:
        raise ValueError(f"rhs shape {rhs_arr.shape} does not match matrix {a.shape}")
    return lu_solve(lu_factor(a), rhs_arr)


def invert(a) -> np.ndarray:
    a = as_matrix(a)
    return solve(a, np.eye(a.shape[0]))


def _round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 rounds of disjoint index pairs covering
    every (p, q) exactly once per sweep."""
    players = list(range(n))
    if n % 2:
        players.append(-1)  # bye
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        top = players[: m // 2]
        bottom = players[m // 2 :][::-1]
        ps, qs = [], []
        for x, y in zip(top, bottom):
            if x >= 0 and y >= 0:
                ps.append(min(x, y))
                qs.append(max(x, y))
        rounds.append((np.asarray(ps, dtype=np.int64), np.asarray(qs, dtype=np.int64)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_singular_values(a, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of ``a`` via cyclic Jacobi on the Gram matrix a^T a.

    Each sweep visits every index pair once, in round-robin rounds of
    disjoint pairs; rotations within a round act on disjoint planes, so
    they commute and are applied together.  Sweeps stop when the
    off-diagonal Frobenius mass drops below ``tol * ||a^T a||_F`` (the
    norm is rotation-invariant, so it is fixed up front).  Returned
    values are sorted in decreasing order.
    """
    a = as_matrix(a)
    b = a.T @ a
    n = b.shape[0]
    if n == 0:
        return np.empty(0)
    gram_norm = float(np.linalg.norm(b))
    if gram_norm > 0.0 and n > 1:
        rounds = _round_robin_pairs(n)
        # rotations this small cannot lift the off-diagonal mass above the
        # stopping threshold, so skipping them is safe and prunes late sweeps
        skip_below = tol * gram_norm / (2.0 * n)
        for _ in range(max_sweeps):
            off = math.sqrt(max(0.0, float(np.sum(b * b)) - float(np.sum(np.diag(b) ** 2))))
            if off < tol * gram_norm:
                break
            for p_all, q_all in rounds:
                bpq = b[p_all, q_all]
                active = np.abs(bpq) > skip_below
                if not active.any():
                    continue
                p, q = p_all[active], q_all[active]
                bpq = bpq[active]
                with np.errstate(over="ignore", divide="ignore"):
                    tau = (b[q, q] - b[p, p]) / (2.0 * bpq)
                    sign = np.where(tau >= 0.0, 1.0, -1.0)
                    big = np.abs(tau) > 1e150
                    t = np.where(
                        big,
                        0.5 / np.where(big, tau, 1.0),  # tan shrinks as 1/(2 tau)
                        sign / (np.abs(tau) + np.sqrt(1.0 + np.minimum(np.abs(tau), 1e150) ** 2)),
                    )
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                row_p, row_q = b[p, :], b[q, :]  # fancy indexing copies
                b[p, :] = c[:, None] * row_p - s[:, None] * row_q
                b[q, :] = s[:, None] * row_p + c[:, None] * row_q
                col_p, col_q = b[:, p], b[:, q]
                b[:, p] = c[None, :] * col_p - s[None, :] * col_q
                b[:, q] = s[None, :] * col_p + c[None, :] * col_q
                # each pair's own entry is zeroed exactly by its own rotation
                b[p, q] = 0.0
                b[q, p] = 0.0
    eigs = np.clip(np.diag(b), 0.0, None)
    return np.sqrt(np.sort(eigs)[::-1])


def cond(a, norm: str = "spectral") -> float:
    """Condition number ||a|| * ||a^-1|| under the chosen norm.

    Returns math.inf for (numerically) singular input instead of raising,
    so sweeps over many submatrices can let one bad case dominate the
    worst-case statistic.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"condition number needs a square matrix, got {a.shape}")
    if norm == "frobenius":
        try:
            inv = invert(a)
        except SingularMatrixError:
            return math.inf
        return float(np.linalg.norm(a) * np.linalg.norm(inv))
    if norm == "spectral":
        sv = jacobi_singular_values(a)
        smin = float(sv[-1])
        if smin <= 0.0:
            return math.inf
        return float(sv[0]) / smin
    raise ValueError(f"unknown norm {norm!r}, expected 'spectral' or 'frobenius'")


_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arithmetic wraps mod 2^64.
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class Rng:
    """Counter-based SplitMix64 stream with Box-Muller normals.

    Output i of a stream with seed s is mix64(s + (i+1)*GOLDEN), so
    identical seeds replay identical sequences on any platform.  A single
    Rng must not be shared across threads; parallel users take child
    streams via :meth:`spawn` (child seed = mix64(seed XOR mix64(key + GOLDEN))).
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._count = 0

    def raw(self, count: int) -> np.ndarray:
        """Next ``count`` raw 64-bit words."""
        if count < 0:
            raise ValueError("count must be non-negative")
        idx = np.arange(self._count + 1, self._count + count + 1, dtype=np.uint64)
        self._count += count
        with np.errstate(over="ignore"):
            return _mix64((np.uint64(self.seed) + _GOLDEN * idx) & _MASK64)

    def uniforms(self, count: int) -> np.ndarray:
        """i.i.d. uniforms on [0, 1) with 53-bit resolution."""
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normals(self, count: int) -> np.ndarray:
        """i.i.d. standard normals via Box-Muller on consecutive pairs."""
        pairs = (count + 1) // 2
        raw = self.raw(2 * pairs)
        # u1 in (0, 1] so the log is finite; u2 in [0, 1).
        u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
        u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * math.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:count]

    def integers(self, count: int, bound: int) -> np.ndarray:
        """i.i.d. integers on [0, bound); floor of uniform * bound."""
        if bound < 1:
            raise ValueError("bound must be positive")
        vals = np.floor(self.uniforms(count) * bound).astype(np.int64)
        return np.minimum(vals, bound - 1)

    def spawn(self, key: int) -> "Rng":
        """Independent child stream for the given key."""
        with np.errstate(over="ignore"):
            k = _mix64(np.uint64(int(key) & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)
            child = _mix64(np.uint64(self.seed) ^ k)
        return Rng(int(child))


def gaussian_matrix(rng: Rng, rows: int, cols: int) -> np.ndarray:
    """Matrix of i.i.d. N(0, 1) entries drawn from ``rng`` in row-major order."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    return rng.normals(rows * cols).reshape(rows, cols)
