"""Desk-scale reference computations used to check the explicit formulas.

Nothing here uses the closed forms: the dense inverse comes from LAPACK's
partial-pivot LU, leading minors from exact rational elimination, and the
sequence identities from the integer recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .inverse import assemble_inverse, c_inv_entry, schur_m, schur_m_from_entries
from .matrices import BandedMatrix, SystemSpec, Variant, build_a, build_b, build_c, rank_two_factors
from .norm_bounds import bound_value, c_inverse_norm, exact_inverse_norm
from .sequences import GammaTable, gamma_moment_closed_form

__all__ = [
    "MAX_ORACLE_N",
    "MAX_MINOR_N",
    "VerificationReport",
    "DenseInverse",
    "dense_invert",
    "relative_error",
    "leading_minors",
    "exact_solve",
    "stencil_constants",
    "stencil_constants_check",
    "sequence_identity_errors",
    "full_suite",
]

MAX_ORACLE_N = 2048
MAX_MINOR_N = 512
REL_FLOOR = 1e-300


@dataclass
class VerificationReport:
    case: dict
    check: str
    max_abs_error: float
    max_rel_error: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        """JSON record with the ``{case, check, max_abs_error, max_rel_error, pass}`` keys."""
        return {
            "case": self.case,
            "check": self.check,
            "max_abs_error": self.max_abs_error,
            "max_rel_error": self.max_rel_error,
            "pass": bool(self.passed),
        }


@dataclass(frozen=True)
class DenseInverse:
    inverse: np.ndarray
    residual: float  # |M X - I|_inf


def dense_invert(matrix) -> DenseInverse:
    """Inverse by partial-pivot LU, with the residual ``|M X - I|_inf``.

    Raises ``np.linalg.LinAlgError`` when a pivot vanishes to working
    precision.
    """
    if isinstance(matrix, BandedMatrix):
        matrix = matrix.to_dense(float)
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n > MAX_ORACLE_N:
        raise ValueError(f"dense oracle limited to n <= {MAX_ORACLE_N}, got {n}")
    lu, piv = lu_factor(m, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= n * np.finfo(float).eps * max(pivots.max(), np.abs(m).max()):
        raise np.linalg.LinAlgError("matrix is singular to working precision")
    inv = lu_solve((lu, piv), np.eye(n))
    resid = float(np.max(np.abs(m @ inv - np.eye(n)).sum(axis=1)))
    return DenseInverse(inv, resid)


def relative_error(approx, reference) -> tuple[float, float]:
    """(max abs error, max entrywise relative error) with a tiny denominator floor."""
    approx = np.asarray(approx, dtype=float)
    reference = np.asarray(reference, dtype=float)
    diff = np.abs(approx - reference)
    rel = diff / np.maximum(np.abs(reference), REL_FLOOR)
    return float(diff.max(initial=0.0)), float(rel.max(initial=0.0))


def _rational_elimination(spec: SystemSpec, rhs=None):
    """Symmetric banded elimination of A_n without pivoting, in exact rationals.

    Returns the pivots and, when ``rhs`` is given, the exact solution of
    ``A x = rhs`` (each float of ``rhs`` taken at its exact binary value).
    """
    n = spec.n
    a = build_a(spec)
    w = a.half_bandwidth
    # rows[r][k] = current entry (r, r + k) of the trailing block, k = 0..w
    rows = [[Fraction(int(a.diagonals[k][r])) if r + k < n else Fraction(0) for k in range(w + 1)] for r in range(n)]
    b = None if rhs is None else [Fraction(float(v)) for v in rhs]
    pivots = []
    for r in range(n):
        pivot = rows[r][0]
        pivots.append(pivot)
        if pivot == 0:
            return pivots + [Fraction(0)] * (n - r - 1), None
        for s in range(1, w + 1):
            if r + s >= n:
                break
            factor = rows[r][s] / pivot
            if factor == 0:
                continue
            for k in range(0, w + 1 - s):
                rows[r + s][k] -= factor * rows[r][s + k]
            if b is not None:
                b[r + s] -= factor * b[r]
    if b is None:
        return pivots, None
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = b[r] - sum(rows[r][k] * x[r + k] for k in range(1, w + 1) if r + k < n)
        x[r] = acc / rows[r][0]
    return pivots, x


def leading_minors(spec: SystemSpec) -> list[int]:
    """Exact determinants of the k x k leading blocks of A_n, k = 1..n.

    The k-th minor is the product of the first k pivots, so a non-positive
    pivot shows up as a non-positive minor instead of an exception.
    """
    if spec.n > MAX_MINOR_N:
        raise ValueError(f"leading minors limited to n <= {MAX_MINOR_N}, got {spec.n}")
    pivots, _ = _rational_elimination(spec)
    out = []
    det = Fraction(1)
    for p in pivots:
        det *= p
        if det.denominator != 1:  # pragma: no cover - determinants of integer matrices
            raise ArithmeticError("non-integer determinant")
        out.append(int(det))
    return out


def exact_solve(spec: SystemSpec, rhs) -> np.ndarray:
    """Solution of ``A_n x = rhs`` by exact rational elimination, rounded once.

    Unlike a floating-point LU, whose forward error grows with
    cond(A) ~ n^4, the result is the correctly rounded exact solution.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (spec.n,):
        raise ValueError(f"rhs must have shape ({spec.n},), got {rhs.shape}")
    if not np.all(np.isfinite(rhs)):
        raise ValueError("rhs has non-finite entries")
    if spec.n > MAX_MINOR_N:
        raise ValueError(f"exact solve limited to n <= {MAX_MINOR_N}, got {spec.n}")
    _, x = _rational_elimination(spec, rhs)
    if x is None:  # pragma: no cover - A_n is positive definite
        raise np.linalg.LinAlgError("zero pivot in exact elimination")
    return np.array([float(v) for v in x])


def stencil_constants() -> dict[str, float]:
    a = math.sqrt(4.0 - math.sqrt(15.0))
    s = math.sqrt(15.0)
    b, c, d = (6 + s) * a, (9 + 2 * s) * a, (4 + s) * a
    return {"a": a, "b": b, "c": c, "d": d}


def stencil_constants_check(tol: float = 1e-12) -> VerificationReport:
    """Factor constants of the interior stencil and the corner margin."""
    k = stencil_constants()
    a, b, c, d = k["a"], k["b"], k["c"], k["d"]
    targets = {
        "a^2+b^2+c^2+d^2": (a * a + b * b + c * c + d * d, 56.0),
        "ab+bc+cd": (a * b + b * c + c * d, 39.0),
        "ac+bd": (a * c + b * d, 12.0),
        "ad": (a * d, 1.0),
    }
    abs_err = max(abs(v - t) for v, t in targets.values())
    rel_err = max(abs(v - t) / abs(t) for v, t in targets.values())
    margin = d * d - (1 + c * d) ** 2 / (12 + c * c + d * d)
    details = {name: v for name, (v, _) in targets.items()}
    details.update(k)
    details["margin"] = margin
    return VerificationReport(
        case={"variant": "near", "n": None},
        check="stencil_constants",
        max_abs_error=abs_err,
        max_rel_error=rel_err,
        passed=bool(abs_err <= tol and margin > 0),
        details=details,
    )


def sequence_identity_errors(max_k: int) -> dict[str, int]:
    """Count violations of the integer identities for indices up to ``max_k``.

    Checked from a fresh table (not the shared cache): the recurrence,
    ``4 <= gamma_{k+1}/gamma_k <= 8``, the moment closed forms against the
    prefix sums, ``alpha_k - alpha_{k-2} = 30 gamma_{k-1}`` and
    ``gamma_k = alpha_{k-1} + 4 gamma_{k-1}``.
    """
    t = GammaTable.build(max_k + 1)
    g, a = t.gamma, t.alpha
    fails = {"recurrence": 0, "ratio_range": 0, "moments": 0, "alpha_diff": 0, "alpha_gamma": 0}
    for k in range(2, max_k + 1):
        fails["recurrence"] += g[k] + g[k - 2] != 8 * g[k - 1]
        fails["alpha_diff"] += a[k] - a[k - 2] != 30 * g[k - 1]
    for k in range(1, max_k + 1):
        fails["ratio_range"] += not (4 * g[k] <= g[k + 1] <= 8 * g[k])
        fails["alpha_gamma"] += g[k] != a[k - 1] + 4 * g[k - 1]
        for m in range(4):
            try:
                closed = gamma_moment_closed_form(k, m, g[k], g[k + 1])
            except ArithmeticError:
                closed = None
            fails["moments"] += closed != t.moment_prefix[m][k]
    return {name: int(v) for name, v in fails.items()}


def _report(spec, check, abs_err, rel_err, passed, **details):
    return VerificationReport(
        case={"variant": spec.variant.value, "n": spec.n},
        check=check,
        max_abs_error=float(abs_err),
        max_rel_error=float(rel_err),
        passed=bool(passed),
        details=details,
    )


def _case_reports(spec: SystemSpec) -> list[VerificationReport]:
    n = spec.n
    out = []

    # decomposition, exact integers
    a = build_a(spec).to_dense()
    f = rank_two_factors(spec)
    bc = build_b(spec).to_dense() @ build_c(n).to_dense() + f.sigma * (f.U @ f.V.T)
    resid = int(np.max(np.abs(a - bc)))
    out.append(_report(spec, "decomposition", resid, resid, resid == 0))

    oracle = dense_invert(a)
    out.append(
        _report(spec, "oracle_residual", oracle.residual, oracle.residual, oracle.residual <= 1e-10 * n)
    )

    explicit = assemble_inverse(spec)
    abs_err, rel_err = relative_error(explicit, oracle.inverse)
    out.append(_report(spec, "inverse_equivalence", abs_err, rel_err, rel_err <= 1e-9))

    minors = leading_minors(spec) if n <= MAX_MINOR_N else None
    min_entry = float(explicit.min())
    minors_ok = minors is None or all(m > 0 for m in minors)
    out.append(
        _report(
            spec,
            "positivity",
            0.0,
            0.0,
            minors_ok and min_entry > 0,
            min_inverse_entry=min_entry,
            minors_positive=minors_ok,
        )
    )

    sm = schur_m(spec)
    direct = schur_m_from_entries(spec)
    abs_err, rel_err = relative_error([sm.m11, sm.m12], [direct[0, 0], direct[0, 1]])
    ok = sm.m11 > sm.m12 > 0 and sm.det > 0 and rel_err <= 1e-12
    if spec.variant is Variant.NEAR:
        ok = ok and sm.schur_sum >= 1.25
    out.append(_report(spec, "schur", abs_err, rel_err, ok, m11=sm.m11, m12=sm.m12, det=sm.det))

    exact = exact_inverse_norm(spec)
    bound = bound_value(spec)
    excess = max(0.0, exact - bound)
    out.append(
        _report(spec, "bound_dominance", excess, excess / bound, exact <= bound, exact_norm=exact, bound=bound)
    )

    inf_norm = float(np.abs(oracle.inverse).sum(axis=1).max())
    one_norm = float(np.abs(oracle.inverse).sum(axis=0).max())
    gap = abs(inf_norm - one_norm)
    rel_gap = gap / inf_norm
    exact_gap = abs(exact - inf_norm) / inf_norm
    out.append(
        _report(spec, "norm_equality", gap, max(rel_gap, exact_gap), max(rel_gap, exact_gap) <= 1e-9)
    )

    fails = sequence_identity_errors(n + 1)
    out.append(_report(spec, "sequence_identities", sum(fails.values()), 0.0, not any(fails.values()), **fails))

    c_oracle = dense_invert(build_c(n)).inverse
    idx = np.arange(1, n + 1)
    c_explicit = c_inv_entry(n, idx[:, None], idx[None, :])
    abs_err, rel_err = relative_error(c_explicit, c_oracle)
    c_norm = c_inverse_norm(n)
    out.append(
        _report(spec, "c_inverse", abs_err, rel_err, rel_err <= 1e-12 and c_norm <= 1 / 6, c_inverse_norm=c_norm)
    )
    return out


def full_suite(
    n_list: Iterable[int], variants: Sequence[Variant | str] = (Variant.TOEPLITZ, Variant.NEAR)
) -> list[VerificationReport]:
    """Every oracle check for every (variant, n); an empty ``n_list`` gives ``[]``."""
    n_list = [int(n) for n in n_list]
    if not n_list:
        return []
    specs = [SystemSpec(n, v) for v in variants for n in n_list]
    bad = [s.n for s in specs if s.n > MAX_ORACLE_N]
    if bad:
        raise ValueError(f"oracle suite limited to n <= {MAX_ORACLE_N}, got {bad[0]}")
    reports = [stencil_constants_check()]
    for spec in specs:
        reports.extend(_case_reports(spec))
    return reports
