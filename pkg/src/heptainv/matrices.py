"""Banded construction of A_n, B_n, C_n and the rank-2 factors of A = BC + sigma U V^T.

All public entry accessors use 1-based indices ``1 <= i, j <= n`` to match
the matrix formulas; stored arrays are ordinary 0-based numpy arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Variant",
    "SystemSpec",
    "BandedMatrix",
    "RankTwoFactors",
    "build_a",
    "build_b",
    "build_c",
    "rank_two_factors",
    "multiply",
]

MIN_N = 7

_A_STENCIL = (56, -39, 12, -1)
_B_STENCIL = (6, -4, 1)


class Variant(enum.Enum):
    """The two corner choices of the seven-diagonal family."""

    TOEPLITZ = "toeplitz"
    NEAR = "near"

    @property
    def a0(self) -> int:
        return 56 if self is Variant.TOEPLITZ else 68

    @property
    def a1(self) -> int:
        return -39 if self is Variant.TOEPLITZ else -40

    @property
    def sigma(self) -> int:
        return 1 if self is Variant.TOEPLITZ else 2

    @property
    def b_corner(self) -> int:
        return 6 if self is Variant.TOEPLITZ else 7

    @classmethod
    def parse(cls, value: "Variant | str") -> "Variant":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class SystemSpec:
    n: int
    variant: Variant = Variant.TOEPLITZ

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if int(self.n) != self.n or self.n < MIN_N:
            raise ValueError(f"n must be an integer >= {MIN_N}, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def sigma(self) -> int:
        return self.variant.sigma

    @property
    def a0(self) -> int:
        return self.variant.a0

    @property
    def a1(self) -> int:
        return self.variant.a1

    @property
    def is_toeplitz(self) -> bool:
        return self.variant is Variant.TOEPLITZ


@dataclass(frozen=True, eq=False)
class BandedMatrix:
    """Symmetric banded matrix stored by diagonal offset.

    ``diagonals[k]`` is the k-th superdiagonal (length ``n - k``); the
    subdiagonals are implied by symmetry.
    """

    n: int
    half_bandwidth: int
    diagonals: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.diagonals) != self.half_bandwidth + 1:
            raise ValueError("need one array per offset 0..half_bandwidth")
        for k, diag in enumerate(self.diagonals):
            if diag.shape != (max(self.n - k, 0),):
                raise ValueError(f"diagonal {k} has shape {diag.shape}")
            diag.setflags(write=False)

    def entry(self, i: int, j: int):
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"({i}, {j}) outside 1..{self.n}")
        k = abs(i - j)
        if k > self.half_bandwidth:
            return self.diagonals[0].dtype.type(0)
        return self.diagonals[k][min(i, j) - 1]

    def to_dense(self, dtype=None) -> np.ndarray:
        dtype = self.diagonals[0].dtype if dtype is None else dtype
        out = np.zeros((self.n, self.n), dtype=dtype)
        for k, diag in enumerate(self.diagonals):
            idx = np.arange(self.n - k)
            out[idx, idx + k] = diag
            out[idx + k, idx] = diag
        return out

    def to_lapack_upper(self) -> np.ndarray:
        """Upper banded layout ``ab[u + i - j, j] = a[i, j]`` used by LAPACK."""
        u = self.half_bandwidth
        ab = np.zeros((u + 1, self.n))
        for k, diag in enumerate(self.diagonals):
            ab[u - k, k:] = diag
        return ab

    def __eq__(self, other):
        if not isinstance(other, BandedMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.half_bandwidth == other.half_bandwidth
            and all(np.array_equal(a, b) for a, b in zip(self.diagonals, other.diagonals))
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RankTwoFactors:
    sigma: int
    U: np.ndarray
    V: np.ndarray


def _toeplitz_band(n: int, stencil) -> list[np.ndarray]:
    return [np.full(max(n - k, 0), c, dtype=np.int64) for k, c in enumerate(stencil)]


def build_a(spec: SystemSpec) -> BandedMatrix:
    """Seven-diagonal A_n (Toeplitz or near-Toeplitz corners)."""
    n = spec.n
    diags = _toeplitz_band(n, _A_STENCIL)
    diags[0][[0, -1]] = spec.a0
    diags[1][[0, -1]] = spec.a1
    return BandedMatrix(n, 3, tuple(diags))


def build_b(spec: SystemSpec) -> BandedMatrix:
    """Pentadiagonal factor B_n with corner entries 6 (Toeplitz) or 7 (near)."""
    n = spec.n
    diags = _toeplitz_band(n, _B_STENCIL)
    diags[0][[0, -1]] = spec.variant.b_corner
    return BandedMatrix(n, 2, tuple(diags))


def build_c(n: int) -> BandedMatrix:
    """Tridiagonal C_n = tridiag(-1, 8, -1); any ``n >= 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    return BandedMatrix(n, 1, tuple(_toeplitz_band(n, (8, -1))))


def rank_two_factors(spec: SystemSpec) -> RankTwoFactors:
    n = spec.n
    U = np.zeros((n, 2), dtype=np.int64)
    V = np.zeros((n, 2), dtype=np.int64)
    U[0, 0], U[1, 0] = 4, -1
    U[n - 2, 1], U[n - 1, 1] = -1, 4
    V[0, 0] = V[n - 1, 1] = 1
    U.setflags(write=False)
    V.setflags(write=False)
    return RankTwoFactors(spec.sigma, U, V)


def multiply(matrix: BandedMatrix, x) -> np.ndarray:
    """Banded product ``matrix @ x`` for a vector or an (n, k) block.

    Integer inputs stay integer, so products with the builders are exact.
    """
    x = np.asarray(x)
    if x.shape[:1] != (matrix.n,):
        raise ValueError(f"expected leading dimension {matrix.n}, got {x.shape}")
    dtype = np.result_type(matrix.diagonals[0].dtype, x.dtype)
    diag0 = matrix.diagonals[0].reshape((-1,) + (1,) * (x.ndim - 1))
    y = (diag0 * x).astype(dtype, copy=False)
    for k in range(1, matrix.half_bandwidth + 1):
        if k >= matrix.n:
            break
        diag = matrix.diagonals[k].reshape((-1,) + (1,) * (x.ndim - 1))
        y[:-k] += diag * x[k:]
        y[k:] += diag * x[:-k]
    return y
