"""Closed-form inverse entries of C_n, B_n, D_n = B_n C_n and A_n.

Index arguments are 1-based and may be numpy arrays; they broadcast and the
result has the broadcast shape (a Python float for scalar input).

The inverse of A_n is assembled from D_n^{-1} by the rank-2 correction

    A^{-1} = D^{-1} - sigma D^{-1} U M^{-1} V^T D^{-1},   M = I + sigma V^T D^{-1} U,

which only needs D^{-1} on rows 1, n and columns 1, 2, n-1, n besides the
entry itself.  D^{-1} is centrosymmetric, so every entry is reduced to the
lower triangle ``i >= j`` before evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .matrices import SystemSpec, Variant
from .sequences import (
    alpha,
    binomial_moment_table,
    gamma,
    gamma_product_ratio,
    gamma_ratio,
)

__all__ = [
    "ToeplitzKernelCoefficients",
    "NearKernelCoefficients",
    "SchurMatrix",
    "c_inv_entry",
    "b_inv_entry",
    "d_inv_entry",
    "near_d_inv_last_row",
    "schur_m",
    "schur_m_exact",
    "schur_m_from_entries",
    "a_inv_entry",
    "inverse_rows",
    "assemble_inverse",
    "MAX_DENSE_N",
]

MAX_DENSE_N = 10_000
_INT64_SAFE_N = 30_000


def _finish(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _indices(n: int, *idx):
    arrs = np.broadcast_arrays(*(np.asarray(a) for a in idx))
    for a in arrs:
        if not np.issubdtype(a.dtype, np.integer):
            if np.any(a != np.floor(a)):
                raise IndexError("indices must be integers")
        if np.any(a < 1) or np.any(a > n):
            raise IndexError(f"index outside 1..{n}")
    dtype = np.int64 if n <= _INT64_SAFE_N else object
    return [a.astype(dtype) for a in arrs]


def _ints(x, n):
    # integer arithmetic wide enough for the quartic polynomials below
    return np.asarray(x).astype(np.int64 if n <= _INT64_SAFE_N else object)


@dataclass(frozen=True)
class ToeplitzKernelCoefficients:
    """eta and zeta_1..zeta_3 of the closed form of d^{-1}_{i,j}, ``i >= j``."""

    eta: Fraction
    zeta1: Fraction
    zeta2: Fraction
    zeta3: Fraction

    @classmethod
    def at(cls, n: int, i: int, j: int) -> "ToeplitzKernelCoefficients":
        if not 1 <= j <= i <= n:
            raise IndexError("need 1 <= j <= i <= n")
        eta = Fraction(-1, 6 * (n + 1) * (n + 2) * (n + 3))
        z1 = Fraction(j * (j + 1) * _zeta1_bracket(n, i, j), 6)
        z2 = Fraction((n + 1) * j * (n + 1 - j) * (n + 2 - j), 6)
        z3 = Fraction((n + 1) * j * (j + 1) * (n + 1 - j), 6)
        return cls(eta, z1, z2, z3)


@dataclass(frozen=True)
class NearKernelCoefficients:
    """delta, beta, epsilon of the near-Toeplitz B^{-1} entry and mu, nu_0..nu_3
    of the last row of D^{-1}."""

    delta: int
    beta: Fraction
    epsilon: int
    mu: Fraction
    nu0: int
    nu1: int
    nu2: int
    nu3: int

    @classmethod
    def at(cls, n: int, i: int, j: int) -> "NearKernelCoefficients":
        if not 1 <= j <= i <= n:
            raise IndexError("need 1 <= j <= i <= n")
        delta = n + 1 - i
        beta = Fraction(delta * j, 6 * (n + 1) * (n * n + 2 * n + 3))
        epsilon = 3 * (1 + delta * (n + 1)) * (1 + (i - j) * j)
        g_n, g_n1 = gamma(n), gamma(n + 1)
        mu = Fraction(1, 36 * g_n1 * (n + 1) * (n * n + 2 * n + 3))
        nu0 = n**3 + 3 * n * n + 5 * n + 3
        nu1 = 2 * (2 * n + 1) * g_n1 - (n + 1) * g_n - (n**3 + 3 * n * n + 4 * n + 2)
        nu2 = (4 * n * n + 5 * n - 3) * g_n1 - n * (n + 2) * g_n + 2 * n * n + 4 * n + 3
        nu3 = -2 * (2 * n + 1) * g_n1 + (n + 1) * g_n - (n + 1)
        return cls(delta, beta, epsilon, mu, nu0, nu1, nu2, nu3)


def _zeta1_bracket(n, i, j):
    # polynomial in braces of zeta_1 (without the j(j+1)/6 prefactor)
    return (
        (j - 3 * i - 1) * n**3
        + (6 * j + 6 * i * i - 12 * i - 4) * n**2
        + ((-3 * i * i - 3 * i + 10) * j - 3 * i**3 + 18 * i * i - 15 * i - 5) * n
        + (2 * i**3 - 3 * i * i - 3 * i + 5) * j
        - 5 * i**3
        + 12 * i * i
        - 6 * i
        - 2
    )


def c_inv_entry(n: int, i, j):
    """Entry of C_n^{-1}: ``gamma_j gamma_{n+1-i} / gamma_{n+1}`` for ``i >= j``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    i, j = _indices(n, i, j)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    return _finish(gamma_product_ratio((lo, n + 1 - hi), (n + 1,)))


def _b_lower(spec: SystemSpec, k, j):
    """B^{-1} entry formula for row ``k >= j``, continued polynomially in k and j.

    Both arguments may lie outside 1..n; the segment sums evaluate the
    formula at a few neighbouring points to take finite differences.
    """
    n = spec.n
    k, j = _ints(k, n), _ints(j, n)
    if spec.variant is Variant.TOEPLITZ:
        bracket = (k + 1) * (j - 1) * (n + 3) - k * (j + 2) * (n + 1)
        f1 = ((n + 1 - k) * (n + 2 - k)).astype(float)
        f2 = (j * (j + 1)).astype(float)
        return -f1 * f2 * bracket.astype(float) / (6.0 * (n + 1) * (n + 2) * (n + 3))
    delta = n + 1 - k
    bracket = 3 * (1 + delta * (n + 1)) * (1 + (k - j) * j) + (j * j - 1) * (2 * delta * delta + 1)
    f1 = (delta * j).astype(float)
    return f1 * bracket.astype(float) / (6.0 * (n + 1) * (n * n + 2 * n + 3))


def b_inv_entry(spec: SystemSpec, i, j):
    """Entry of B_n^{-1} (Toeplitz) or the corner-perturbed B~_n^{-1} (near)."""
    i, j = _indices(spec.n, i, j)
    return _finish(_b_lower(spec, np.maximum(i, j), np.minimum(i, j)))


def _reflect_lower(n, i, j):
    upper = i < j
    return np.where(upper, n + 1 - i, i), np.where(upper, n + 1 - j, j)


def _d_lower_closed(n: int, i, j):
    """Toeplitz d^{-1}_{i,j} for ``i >= j`` from the eta/zeta closed form."""
    i, j = _ints(i, n), _ints(j, n)
    jf = j.astype(float)
    t1 = gamma_product_ratio((j, n + 1 - i), (n + 1,)) / 36.0
    # the zeta_1 factor (gamma_{n+1-i} gamma_{i+1} - gamma_{n-i} gamma_i) / gamma_{n+1}
    # is identically 1, leaving eta * zeta_1 as a pure polynomial
    t2 = -(j * (j + 1)).astype(float) * _zeta1_bracket(n, i, j).astype(float)
    t2 = t2 / (36.0 * (n + 1) * (n + 2) * (n + 3))
    w2 = jf * (n + 1 - jf) * (n + 2 - jf)
    w3 = jf * (jf + 1) * (n + 1 - jf)
    t3 = w2 * gamma_ratio(n + 1 - i, n + 1) + w3 * gamma_ratio(i, n + 1)
    t3 = -t3 / (36.0 * (n + 2) * (n + 3))
    return t1 + t2 + t3


def _weighted_sum(poly, upto, table):
    """``sum_{k=1}^{upto} gamma_k poly(k) / gamma_upto`` for cubic ``poly``."""
    f0, f1, f2, f3 = (poly(upto - t) for t in range(4))
    r = table[:, upto.astype(np.int64)]
    return (
        f0 * r[0]
        + (f1 - f0) * r[1]
        + (f2 - 2.0 * f1 + f0) * r[2]
        + (f3 - 3.0 * f2 + 3.0 * f1 - f0) * r[3]
    )


def _d_lower_segmented(spec: SystemSpec, i, j):
    """d^{-1}_{i,j}, ``i >= j``, as the three-segment sum of c^{-1} b^{-1} products.

    With c^{-1}_{i,k} = gamma_k gamma_{n+1-i}/gamma_{n+1} for k <= i and
    gamma_i gamma_{n+1-k}/gamma_{n+1} for k > i, the sum splits into
    k in [1, i] (lower B formula, corrected on [1, j-1] where the upper
    formula applies) and k in [i+1, n] (substituting m = n+1-k).
    """
    n = spec.n
    i, j = _ints(i, n), _ints(j, n)
    table = binomial_moment_table(n)

    def lower(k):
        return _b_lower(spec, k, j)

    def upper_minus_lower(k):
        return _b_lower(spec, j, k) - _b_lower(spec, k, j)

    def reflected(m):
        return _b_lower(spec, n + 1 - m, j)

    s1 = _weighted_sum(lower, i, table)
    s2 = _weighted_sum(upper_minus_lower, j - 1, table)
    s3 = _weighted_sum(reflected, n - i, table)
    w1 = gamma_product_ratio((n + 1 - i, i), (n + 1,))
    w2 = gamma_product_ratio((n + 1 - i, j - 1), (n + 1,))
    w3 = gamma_product_ratio((i, n - i), (n + 1,))
    return w1 * s1 + w2 * s2 + w3 * s3


def _d_lower(spec: SystemSpec, i, j, method: str):
    if method == "closed":
        if spec.variant is not Variant.TOEPLITZ:
            raise ValueError("closed-form D^{-1} entries exist only for the Toeplitz variant")
        return _d_lower_closed(spec.n, i, j)
    if method == "segmented":
        return _d_lower_segmented(spec, i, j)
    raise ValueError(f"unknown method {method!r}")


def _default_method(spec: SystemSpec) -> str:
    return "closed" if spec.variant is Variant.TOEPLITZ else "segmented"


def d_inv_entry(spec: SystemSpec, i, j, method: str | None = None):
    """Entry of D_n^{-1} = C_n^{-1} B_n^{-1}.

    ``method="closed"`` (Toeplitz default) uses the eta/zeta closed form;
    ``method="segmented"`` (near default, available for both) evaluates the
    segment sums with the normalized moment table in O(1) per entry.
    """
    method = method or _default_method(spec)
    i, j = _indices(spec.n, i, j)
    i, j = _reflect_lower(spec.n, i, j)
    return _finish(_d_lower(spec, i, j, method))


def near_d_inv_last_row(n: int, j):
    """Near-Toeplitz d~^{-1}_{n,j} = mu (nu_3 j^3 + nu_2 j^2 + nu_1 j + nu_0 gamma_j).

    Every nu_k is divided by gamma_{n+1} before use.
    """
    SystemSpec(n, Variant.NEAR)
    (j,) = _indices(n, j)
    jf = j.astype(float)
    q = gamma_ratio(n, n + 1)
    e = gamma_product_ratio((), (n + 1,))
    nu0 = n**3 + 3 * n * n + 5 * n + 3
    nu1 = 2 * (2 * n + 1) - (n + 1) * q - (n**3 + 3 * n * n + 4 * n + 2) * e
    nu2 = (4 * n * n + 5 * n - 3) - n * (n + 2) * q + (2 * n * n + 4 * n + 3) * e
    nu3 = -2 * (2 * n + 1) + (n + 1) * q - (n + 1) * e
    poly = ((nu3 * jf + nu2) * jf + nu1) * jf + nu0 * gamma_ratio(j, n + 1)
    return _finish(poly / (36.0 * (n + 1) * (n * n + 2 * n + 3)))


@dataclass(frozen=True)
class SchurMatrix:
    """Symmetric 2x2 ``M = [[m11, m12], [m12, m11]]`` closing the rank-2 correction."""

    m11: float
    m12: float

    @property
    def det(self) -> float:
        return (self.m11 - self.m12) * (self.m11 + self.m12)

    @property
    def schur_sum(self) -> float:
        return self.m11 + self.m12

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m11]])


@lru_cache(maxsize=256)
def schur_m(spec: SystemSpec) -> SchurMatrix:
    """Closed-form Schur matrix, written with bounded gamma ratios only."""
    n = spec.n
    q = float(gamma_ratio(n, n + 1))
    q2 = float(gamma_ratio(n - 1, n + 1))
    e = float(gamma_product_ratio((), (n + 1,)))
    if spec.variant is Variant.TOEPLITZ:
        alpha_ratio = 4.0 * q - q2
        m11 = (
            1.0
            + (11 * n * n + 5 * n) / (36.0 * (n + 1) * (n + 2))
            + (alpha_ratio - (2.0 * e + 2.0 * n * q) / (n + 2)) / 36.0
        )
        m12 = (7 * n + 4) / (18.0 * (n + 1) * (n + 2)) - (2.0 * e + (n * e + q) / (n + 2)) / 18.0
    else:
        den = 9.0 * (n + 1) * (n * n + 2 * n + 3)
        tau11 = 3.0 * (n**3 + 3 * n * n + n + 1) - 3.0 * (n**3 + 3 * n * n + 4 * n + 2) * q - 3.0 * (n + 1) * e
        tau12 = 6.0 * (2 * n + 1) - 3.0 * (n + 1) * q - 3.0 * (n + 1) * ((n + 1) ** 2 + 1) * e
        m11 = 1.0 + tau11 / den
        m12 = tau12 / den
    return SchurMatrix(m11, m12)


def schur_m_exact(spec: SystemSpec) -> tuple[Fraction, Fraction]:
    """(m11, m12) as exact rationals, from the exact gamma and alpha integers."""
    n = spec.n
    g_n, g_n1 = gamma(n), gamma(n + 1)
    if spec.variant is Variant.TOEPLITZ:
        m11 = (
            1
            + Fraction(11 * n * n + 5 * n, 36 * (n + 1) * (n + 2))
            + Fraction(1, 36 * g_n1) * (alpha(n) - Fraction(2 + 2 * n * g_n, n + 2))
        )
        m12 = Fraction(7 * n + 4, 18 * (n + 1) * (n + 2)) - Fraction(1, 18 * g_n1) * (
            2 + Fraction(n + g_n, n + 2)
        )
    else:
        den = 9 * g_n1 * (n + 1) * (n * n + 2 * n + 3)
        tau11 = 3 * (n**3 + 3 * n * n + n + 1) * g_n1 - 3 * (n**3 + 3 * n * n + 4 * n + 2) * g_n - 3 * (n + 1)
        tau12 = 6 * (2 * n + 1) * g_n1 - 3 * (n + 1) * g_n - 3 * (n + 1) * ((n + 1) ** 2 + 1)
        m11 = 1 + Fraction(tau11, den)
        m12 = Fraction(tau12, den)
    return m11, m12


def schur_m_from_entries(spec: SystemSpec, method: str | None = None) -> np.ndarray:
    """``I + sigma V^T D^{-1} U`` assembled from individual D^{-1} entries."""
    n, s = spec.n, spec.sigma

    def d(i, j):
        return d_inv_entry(spec, i, j, method)

    return np.array(
        [
            [1 + s * (4 * d(1, 1) - d(1, 2)), s * (4 * d(1, n) - d(1, n - 1))],
            [s * (4 * d(n, 1) - d(n, 2)), 1 + s * (4 * d(n, n) - d(n, n - 1))],
        ]
    )


def _correction(spec, sm, d_1j, d_nj, d_i1, d_i2, d_im, d_in):
    # d_im is d^{-1}_{i,n-1}
    scale = spec.sigma / sm.det
    return scale * (
        (sm.m12 * d_nj - sm.m11 * d_1j) * (4.0 * d_i1 - d_i2)
        + (sm.m12 * d_1j - sm.m11 * d_nj) * (4.0 * d_in - d_im)
    )


def a_inv_entry(spec: SystemSpec, i, j, method: str | None = None):
    """Entry of A_n^{-1} (either variant) from D^{-1} entries and the Schur matrix."""
    n = spec.n
    i, j = _indices(n, i, j)
    i, j = np.maximum(i, j), np.minimum(i, j)

    def d(r, c):
        r, c = np.broadcast_arrays(r, c)
        r, c = _reflect_lower(n, r, c)
        return _d_lower(spec, r, c, method or _default_method(spec))

    one, last = np.ones_like(i), np.full_like(i, n)
    corr = _correction(
        spec,
        schur_m(spec),
        d(one, j),
        d(last, j),
        d(i, one),
        d(i, 2 * one),
        d(i, last - 1),
        d(i, last),
    )
    return _finish(d(i, j) + corr)


def _d_rows(spec: SystemSpec, rows: np.ndarray, method: str) -> np.ndarray:
    n = spec.n
    cols = np.arange(1, n + 1)
    I, J = np.meshgrid(rows, cols, indexing="ij")
    I, J = _reflect_lower(n, I, J)
    return np.asarray(_d_lower(spec, I, J, method), dtype=float)


def inverse_rows(spec: SystemSpec, rows, method: str | None = None) -> np.ndarray:
    """Full rows of A_n^{-1} for the given 1-based row indices, shape (len(rows), n)."""
    n = spec.n
    method = method or _default_method(spec)
    rows = np.atleast_1d(np.asarray(rows, dtype=np.int64))
    _indices(n, rows)
    d = _d_rows(spec, rows, method)
    edge = _d_rows(spec, np.array([1, n]), method)
    corr = _correction(
        spec,
        schur_m(spec),
        edge[0][None, :],
        edge[1][None, :],
        d[:, :1],
        d[:, 1:2],
        d[:, n - 2 : n - 1],
        d[:, n - 1 : n],
    )
    return d + corr


def assemble_inverse(spec: SystemSpec, method: str | None = None, block: int = 256) -> np.ndarray:
    """Dense A_n^{-1} from the explicit formula, exactly symmetric."""
    n = spec.n
    if n > MAX_DENSE_N:
        raise ValueError(f"dense assembly limited to n <= {MAX_DENSE_N}, got {n}")
    out = np.empty((n, n))
    for start in range(1, n + 1, block):
        rows = np.arange(start, min(start + block, n + 1))
        out[rows - 1] = inverse_rows(spec, rows, method)
    lower = np.tril(out)
    return lower + np.tril(lower, -1).T
