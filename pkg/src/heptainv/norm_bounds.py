"""Inverse norms of A_n and the closed-form upper bounds on them.

For both variants the i-th row sum of the (positive) inverse is

    sum_j d^{-1}_{i,j} - sigma * pi2 * g(i) / (m11 + m12),
    g(i) = 4 (d^{-1}_{i,n} + d^{-1}_{i,1}) - (d^{-1}_{i,n-1} + d^{-1}_{i,2}),

which gives ``|A^{-1}|_inf <= pi1 + sigma pi2 pi3 / (m11 + m12)`` with
pi1 = |D^{-1}|_inf, pi2 the last row sum of D^{-1} and pi3 = max g.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .inverse import _d_rows, _default_method, b_inv_entry, d_inv_entry, inverse_rows, schur_m
from .matrices import SystemSpec, Variant
from .sequences import gamma, gamma_product_ratio, gamma_ratio
from .solver import _cached_solver

__all__ = [
    "BoundBreakdown",
    "exact_inverse_norm",
    "inverse_row_sums",
    "bound_value",
    "bound_value_exact",
    "bound_breakdown",
    "c_inverse_norm",
    "g_closed_form",
    "g_from_entries",
    "pi2_closed_form",
    "pi2_closed_form_exact",
    "norm_sweep",
]


def _norm_order(p) -> float:
    if isinstance(p, str):
        p = p.strip().lower()
        p = math.inf if p in ("inf", "infinity", "∞") else float(p)
    if p not in (1, 2, math.inf):
        raise ValueError(f"norm order must be 1, 2 or inf, got {p!r}")
    return float(p)


def inverse_row_sums(spec: SystemSpec, method: str = "explicit", block: int = 256) -> np.ndarray:
    """Row sums of A_n^{-1} (all n of them).

    ``explicit`` sums the closed-form entries of rows 1..ceil(n/2) and mirrors
    the rest by centrosymmetry; ``structured`` applies the O(n) solver to a
    vector of ones.
    """
    n = spec.n
    if method == "structured":
        return _cached_solver(spec).solve(np.ones(n))
    if method != "explicit":
        raise ValueError(f"unknown method {method!r}")
    half = (n + 1) // 2
    sums = np.empty(n)
    for start in range(1, half + 1, block):
        rows = np.arange(start, min(start + block, half + 1))
        sums[rows - 1] = inverse_rows(spec, rows).sum(axis=1)
    sums[half:] = sums[: n - half][::-1]
    return sums


def exact_inverse_norm(spec: SystemSpec, p=math.inf, method: str = "explicit") -> float:
    """Max row sum of A_n^{-1}.

    The inverse is entrywise positive and symmetric, so the 1- and inf-norms
    coincide and both are the largest row sum; for ``p = 2`` the same value
    is returned as a certified upper bound (|X|_2 <= sqrt(|X|_1 |X|_inf)).
    """
    _norm_order(p)
    return float(np.max(inverse_row_sums(spec, method)))


def bound_value_exact(spec: SystemSpec) -> Fraction:
    n = spec.n
    if spec.variant is Variant.TOEPLITZ:
        return (
            Fraction((n + 1) ** 2 * (n + 3) ** 2, 2304)
            + Fraction((n + 1) ** 2, 432)
            + Fraction(n + 4, 24)
        )
    return Fraction((n + 1) ** 2 * ((n + 1) ** 2 + 14), 2304)


def bound_value(spec: SystemSpec) -> float:
    """Closed-form upper bound on |A_n^{-1}|_p, p in {1, 2, inf}."""
    return float(bound_value_exact(spec))


def c_inverse_norm(n: int) -> float:
    """|C_n^{-1}|_inf from the gamma row sums (never above 1/6)."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    i = np.arange(1, (n + 1) // 2 + 1)
    # sum_{k<=p} gamma_k = (gamma_{p+1} - gamma_p - 1) / 6, scaled by gamma_{n+1}
    left = (
        gamma_product_ratio((n + 1 - i, i + 1), (n + 1,))
        - gamma_product_ratio((n + 1 - i, i), (n + 1,))
        - gamma_ratio(n + 1 - i, n + 1)
    )
    right = (
        gamma_product_ratio((i, n + 1 - i), (n + 1,))
        - gamma_product_ratio((i, n - i), (n + 1,))
        - gamma_ratio(i, n + 1)
    )
    return float(np.max((left + right) / 6.0))


def g_closed_form(spec: SystemSpec, x):
    """g(x) (Toeplitz) or g~(x) (near) on the real interval [1, n]."""
    n = spec.n
    x = np.asarray(x, dtype=float)
    if spec.variant is Variant.TOEPLITZ:
        tail = 1.0 - gamma_ratio(x, n + 1) - gamma_ratio(n + 1 - x, n + 1)
        out = (6 * n + 10) * tail / (36.0 * (n + 2)) + x * (n + 1 - x) / (6.0 * (n + 2))
    else:
        out = (
            4.0 / 3.0 * gamma_product_ratio((x, n + 1 - x), (n + 1,))
            - gamma_product_ratio((x, n - x), (n + 1,)) / 6.0
            - gamma_product_ratio((x - 1, n + 1 - x), (n + 1,)) / 6.0
            - (gamma_ratio(x, n + 1) + gamma_ratio(n + 1 - x, n + 1)) / 6.0
        )
    return float(out) if out.ndim == 0 else out


def g_from_entries(spec: SystemSpec, i):
    """``4 (d_{i,n} + d_{i,1}) - (d_{i,n-1} + d_{i,2})`` from D^{-1} entries."""
    n = spec.n
    i = np.asarray(i)

    def d(c):
        return d_inv_entry(spec, i, np.full_like(i, c))

    return 4 * (d(n) + d(1)) - (d(n - 1) + d(2))


def pi2_closed_form(spec: SystemSpec) -> float:
    """Last row sum of D^{-1} in closed form."""
    n = spec.n
    q = float(gamma_ratio(n, n + 1))
    e = float(gamma_product_ratio((), (n + 1,)))
    if spec.variant is Variant.TOEPLITZ:
        return 1.0 / 216 + n * (7 * n + 1) / 432.0 - (n * n + n + 2) * (q + e) / 432.0
    inner = (2 * n * n + n + 1) * (1.0 - e) / 6.0 + n * n * e / 4.0 - (n * n + 2 * n + 2) * q / 12.0
    return inner / 36.0


def pi2_closed_form_exact(spec: SystemSpec) -> Fraction:
    n = spec.n
    g_n, g_n1 = gamma(n), gamma(n + 1)
    if spec.variant is Variant.TOEPLITZ:
        return Fraction(1, 216) + Fraction(n * (7 * n + 1), 432) - Fraction((n * n + n + 2) * (g_n + 1), 432 * g_n1)
    inner = Fraction((2 * n * n + n + 1) * (g_n1 - 1), 6) + Fraction(n * n, 4) - Fraction((n * n + 2 * n + 2) * g_n, 12)
    return inner / (36 * g_n1)


def _pi1_bound(spec: SystemSpec) -> float:
    n = spec.n
    if spec.variant is Variant.TOEPLITZ:
        return (n + 1) ** 2 * (n + 3) ** 2 / 2304.0
    return (n + 1) ** 2 * ((n + 1) ** 2 + 8) / 2304.0


def _pi2_bound(spec: SystemSpec) -> float:
    n = spec.n
    if spec.variant is Variant.TOEPLITZ:
        return (55 * n * n + 7 * n + 14) / 3456.0
    return (31 * n * n + 14 * n + 15) / 3456.0


def _pi3_bound(spec: SystemSpec) -> float:
    if spec.variant is Variant.TOEPLITZ:
        return (spec.n + 4) / 24.0
    return 31.0 / (48.0 * math.sqrt(15.0))


def _abs_row_sums(rows_fn, n, block=256):
    out = np.empty(n)
    for start in range(1, n + 1, block):
        rows = np.arange(start, min(start + block, n + 1))
        out[rows - 1] = np.abs(rows_fn(rows)).sum(axis=1)
    return out


_TIE_RTOL = 1e-12


def _dominates(upper: float, lower: float) -> bool:
    # values reached by different routes may tie at the maximizer
    return upper >= lower - _TIE_RTOL * abs(lower)


@dataclass(frozen=True)
class BoundBreakdown:
    """Terms of the inverse-norm bound next to their computed counterparts.

    ``pi1``, ``pi2_bound`` and ``pi3_bound`` are closed-form estimates of
    ``pi1_exact`` (= |D^{-1}|_inf), ``pi2`` (last row sum of D^{-1}, closed
    form; ``pi2_direct`` is the plain sum) and ``pi3`` (g at (n+1)/2;
    ``pi3_discrete`` is the largest g over integer rows).
    ``composite = pi1_exact + sigma pi2 pi3 / schur_sum`` bounds the exact
    norm; ``chain_bound`` replaces every term by its estimate, using
    ``schur_sum > 1`` (Toeplitz) or ``>= 5/4`` (near).
    """

    variant: str
    n: int
    pi1: float
    pi1_exact: float
    b_inv_norm: float
    c_inv_norm: float
    pi2: float
    pi2_direct: float
    pi2_bound: float
    pi3: float
    pi3_discrete: float
    pi3_argmax: int
    pi3_bound: float
    schur_sum: float
    composite: float
    chain_bound: float
    bound: float
    exact_norm: float

    def dominance(self) -> dict[str, bool]:
        return {
            "pi1 >= |D^-1|_inf": _dominates(self.pi1, self.pi1_exact),
            "pi2 closed form == direct sum": abs(self.pi2 - self.pi2_direct) <= 1e-12 * self.pi2_direct,
            "pi2_bound >= pi2": _dominates(self.pi2_bound, self.pi2),
            "pi3 >= max_i g(i)": _dominates(self.pi3, self.pi3_discrete),
            "pi3_bound >= pi3": _dominates(self.pi3_bound, self.pi3),
            "composite >= exact_norm": _dominates(self.composite, self.exact_norm),
            "chain_bound >= composite": _dominates(self.chain_bound, self.composite),
            "bound >= exact_norm": self.bound >= self.exact_norm,
        }

    def as_dict(self) -> dict:
        return asdict(self)


def bound_breakdown(spec: SystemSpec) -> BoundBreakdown:
    n = spec.n
    method = _default_method(spec)
    d_norm = float(np.max(_abs_row_sums(lambda r: _d_rows(spec, r, method), n)))
    cols = np.arange(1, n + 1)
    b_norm = float(
        np.max(_abs_row_sums(lambda r: b_inv_entry(spec, r[:, None], cols[None, :]), n))
    )
    pi2_direct = float(np.sum(d_inv_entry(spec, np.full(n, n), cols)))
    g_int = g_from_entries(spec, cols)
    argmax = int(np.argmax(g_int)) + 1
    pi3 = g_closed_form(spec, (n + 1) / 2.0)
    pi2 = pi2_closed_form(spec)
    sm = schur_m(spec)
    composite = d_norm + spec.sigma * pi2 * pi3 / sm.schur_sum
    schur_floor = 1.0 if spec.variant is Variant.TOEPLITZ else 1.25
    chain = _pi1_bound(spec) + spec.sigma * _pi2_bound(spec) * _pi3_bound(spec) / schur_floor
    return BoundBreakdown(
        variant=spec.variant.value,
        n=n,
        pi1=_pi1_bound(spec),
        pi1_exact=d_norm,
        b_inv_norm=b_norm,
        c_inv_norm=c_inverse_norm(n),
        pi2=pi2,
        pi2_direct=pi2_direct,
        pi2_bound=_pi2_bound(spec),
        pi3=pi3,
        pi3_discrete=float(g_int[argmax - 1]),
        pi3_argmax=argmax,
        pi3_bound=_pi3_bound(spec),
        schur_sum=sm.schur_sum,
        composite=composite,
        chain_bound=chain,
        bound=bound_value(spec),
        exact_norm=exact_inverse_norm(spec),
    )


def _workers() -> int:
    raw = os.environ.get("HEPTAINV_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"HEPTAINV_THREADS must be an integer, got {raw!r}") from None
    return min(8, os.cpu_count() or 1)


def norm_sweep(variant, n_values, method: str = "structured", workers: int | None = None):
    """(n, exact_norm, bound) for every n, in the order given."""
    variant = Variant.parse(variant)

    def row(n):
        spec = SystemSpec(int(n), variant)
        return int(n), exact_inverse_norm(spec, method=method), bound_value(spec)

    workers = workers or _workers()
    if workers == 1:
        return [row(n) for n in n_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(row, n_values))
