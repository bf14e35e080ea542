"""Integer sequences gamma_k, alpha_k and their floating-point ratio forms.

The pair is defined by ``(4 + sqrt(15))**k = alpha_k + gamma_k * sqrt(15)``::

    gamma_0 = 0, gamma_1 = 1, gamma_k = 8 gamma_{k-1} - gamma_{k-2}
    alpha_k = 4 gamma_k - gamma_{k-1},  alpha_0 = 1

``gamma_k`` grows like ``7.873**k`` and leaves the double range near
``k = 340``, so floating-point consumers only ever see ratios built by
:func:`gamma_product_ratio`.  The exact integer table is kept for
validation and for identities that must hold with zero remainder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np

__all__ = [
    "R1",
    "GammaTable",
    "gamma",
    "alpha",
    "gamma_ratio",
    "gamma_product_ratio",
    "gamma_moment_sum",
    "gamma_moment_closed_form",
    "binomial_moment_table",
]


def _r1_split() -> tuple[float, float]:
    with localcontext() as ctx:
        ctx.prec = 50
        exact = Decimal(4) + Decimal(15).sqrt()
        hi = float(exact)
        lo = float(exact - Decimal(hi))
    return hi, lo


#: dominant root 4 + sqrt(15), with its low-order correction
R1, _R1_LO = _r1_split()
_LOG_R1_CORR = float(np.log1p(_R1_LO / R1))
_TWO_SQRT15 = 2.0 * float(Decimal(15).sqrt())


@dataclass(frozen=True)
class GammaTable:
    """Exact gamma_k, alpha_k and the moment prefix sums for k <= max_index.

    ``moment_prefix[m][p]`` holds ``sum_{k=1}^{p} k**m gamma_k`` for
    ``m in {0, 1, 2, 3}``; ``moment_prefix[m][0] == 0``.
    """

    max_index: int
    gamma: tuple[int, ...] = field(repr=False)
    alpha: tuple[int, ...] = field(repr=False)
    moment_prefix: tuple[tuple[int, ...], ...] = field(repr=False)

    @classmethod
    def build(cls, max_index: int) -> "GammaTable":
        if max_index < 1:
            raise ValueError(f"max_index must be positive, got {max_index}")
        g = [0, 1]
        for _ in range(2, max_index + 1):
            g.append(8 * g[-1] - g[-2])
        a = [1] + [4 * g[k] - g[k - 1] for k in range(1, max_index + 1)]
        prefix = []
        for m in range(4):
            acc = [0]
            for k in range(1, max_index + 1):
                acc.append(acc[-1] + k**m * g[k])
            prefix.append(tuple(acc))
        return cls(max_index, tuple(g), tuple(a), tuple(prefix))

    def _check(self, k: int, lo: int = 0, hi: int | None = None) -> None:
        hi = self.max_index if hi is None else hi
        if not lo <= k <= hi:
            raise IndexError(f"index {k} outside [{lo}, {hi}]")

    def gamma_at(self, k: int) -> int:
        self._check(k)
        return self.gamma[k]

    def alpha_at(self, k: int) -> int:
        self._check(k)
        return self.alpha[k]

    def moment_sum(self, p: int, m: int) -> int:
        """``sum_{k=1}^p k**m gamma_k``, checked against its closed form."""
        if m not in (0, 1, 2, 3):
            raise ValueError(f"moment order must be 0..3, got {m}")
        self._check(p, 1, self.max_index - 1)
        direct = self.moment_prefix[m][p]
        closed = gamma_moment_closed_form(p, m, self.gamma[p], self.gamma[p + 1])
        if closed != direct:  # pragma: no cover - would mean a broken identity
            raise ArithmeticError(f"closed form mismatch at p={p}, m={m}")
        return direct


@lru_cache(maxsize=8)
def _table(size: int) -> GammaTable:
    return GammaTable.build(size)


def _shared_table(k: int) -> GammaTable:
    size = 64
    while size < k + 2:
        size *= 2
    return _table(size)


def gamma(k: int) -> int:
    """Exact ``gamma_k`` from the integer recurrence."""
    k = int(k)
    if k < 0:
        raise IndexError(f"gamma index must be >= 0, got {k}")
    return _shared_table(k).gamma[k]


def alpha(k: int) -> int:
    """Exact ``alpha_k = 4 gamma_k - gamma_{k-1}`` (``alpha_0 = 1``)."""
    k = int(k)
    if k < 0:
        raise IndexError(f"alpha index must be >= 0, got {k}")
    return _shared_table(k).alpha[k]


def gamma_moment_closed_form(p: int, m: int, g_p: int, g_p1: int) -> int:
    """Closed form of ``sum_{k=1}^p k**m gamma_k`` from ``gamma_p`` and ``gamma_{p+1}``.

    Uses exact integer division; a nonzero remainder raises.
    """
    if m == 0:
        num, den = g_p1 - g_p - 1, 6
    elif m == 1:
        num, den = p * g_p1 - (p + 1) * g_p, 6
    elif m == 2:
        num, den = (3 * p * p + 1) * g_p1 - (3 * p * p + 6 * p + 4) * g_p - 1, 18
    elif m == 3:
        num, den = (p**3 + p) * g_p1 - (p**3 + 3 * p * p + 4 * p + 2) * g_p, 6
    else:
        raise ValueError(f"moment order must be 0..3, got {m}")
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"inexact division in moment closed form (p={p}, m={m})")
    return q


def gamma_moment_sum(p: int, m: int) -> int:
    """``sum_{k=1}^p k**m gamma_k`` for ``m in {0, 1, 2, 3}``."""
    p = int(p)
    if p < 1:
        raise IndexError(f"p must be >= 1, got {p}")
    return _shared_table(p + 1).moment_sum(p, m)


def _r1_pow(x):
    # r1**x with the representation error of r1 compensated
    x = np.asarray(x, dtype=float)
    return np.power(R1, x) * np.exp(x * _LOG_R1_CORR)


def gamma_product_ratio(numer, denom=()):
    """Overflow-free ``prod(gamma_a for a in numer) / prod(gamma_c for c in denom)``.

    Indices may be numpy arrays (broadcast together) or real numbers; the
    real-index extension ``gamma_x = (r1**x - r1**-x) / (2 sqrt 15)`` is used.
    Each factor is written as ``r1**a (1 - r1**(-2a)) / (2 sqrt 15)`` so only
    the net exponent ``sum(numer) - sum(denom)`` reaches ``pow``.
    """
    numer = [np.asarray(a, dtype=float) for a in numer]
    denom = [np.asarray(c, dtype=float) for c in denom]
    expo = sum(numer, np.zeros(())) - sum(denom, np.zeros(()))
    out = _r1_pow(expo)
    for a in numer:
        out = out * -np.expm1(-2.0 * a * np.log(R1) - 2.0 * a * _LOG_R1_CORR)
    for c in denom:
        out = out / -np.expm1(-2.0 * c * np.log(R1) - 2.0 * c * _LOG_R1_CORR)
    scale = len(denom) - len(numer)
    if scale:
        out = out * _TWO_SQRT15**scale
    return out[()] if out.ndim == 0 else out


def gamma_ratio(a, b):
    """``gamma_a / gamma_b`` without forming either value (``b >= 1``)."""
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    if np.any(a_arr < 0) or np.any(b_arr < 1):
        raise IndexError("gamma_ratio needs a >= 0 and b >= 1")
    return gamma_product_ratio((a,), (b,))


def _build_moment_table(size: int) -> np.ndarray:
    # rows p = 0..3; column u holds sum_{t=0}^{u-1} gamma_{u-t} C(t, p) / gamma_u
    table = np.zeros((4, size + 1))
    if size >= 1:
        table[0, 1] = 1.0
    ratios = gamma_ratio(np.arange(1, size), np.arange(2, size + 1))
    for u in range(1, size):
        q = ratios[u - 1]
        prev = table[:, u]
        table[0, u + 1] = 1.0 + q * prev[0]
        table[1:, u + 1] = q * (prev[1:] + prev[:-1])
    table.setflags(write=False)
    return table


@lru_cache(maxsize=4)
def _moment_table(size: int) -> np.ndarray:
    return _build_moment_table(size)


def binomial_moment_table(size: int) -> np.ndarray:
    """Normalized binomial moments ``R[p, u]`` for ``u = 0..size``.

    ``R[p, u] = sum_{k=1}^{u} gamma_k C(u - k, p) / gamma_u`` with
    ``R[:, 0] = 0``.  Entries are bounded (all terms positive, ratio of
    consecutive gammas below 1/4), so a weighted sum
    ``sum_{k=1}^{u} gamma_k P(k)`` of a cubic ``P`` equals
    ``gamma_u * sum_p Delta_p R[p, u]`` with ``Delta_p`` the backward
    differences of ``P`` at ``u``.
    """
    cap = 256
    while cap < size:
        cap *= 2
    return _moment_table(cap)[:, : size + 1]
