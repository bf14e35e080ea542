"""O(n) solves with A_n through A = BC + sigma U V^T, and the beam fixed point.

D^{-1} v is two banded Cholesky solves (B then C); the rank-2 term is
closed with the 2x2 Schur matrix built from the same solves.

The Cholesky factor of B is filled in from its closed form instead of the
LAPACK recurrence.  B is a squared second difference, so its pivots tend
to 1 only like 1 + 4/k; rounding errors in the recurrence are not damped
and the computed pivots drift until the factorization breaks down
(around k = 3.6e5 in double precision).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from .matrices import SystemSpec, Variant, build_a, build_c, multiply, rank_two_factors

__all__ = [
    "StructuredSolver",
    "b_cholesky_factor",
    "solve",
    "BeamProblem",
    "FixedPointTrace",
    "beam_fixed_point",
    "contraction_predictor",
    "exact_contraction_rate",
]


def _banded_cholesky(matrix):
    try:
        factor = cholesky_banded(matrix.to_lapack_upper(), lower=False)
    except LinAlgError as exc:
        raise LinAlgError(f"banded factor of order {matrix.n} is not positive definite") from exc
    if not np.all(factor[-1] > 0):
        raise LinAlgError("non-positive pivot in banded Cholesky factor")
    return factor


def b_cholesky_factor(spec: SystemSpec) -> np.ndarray:
    """Upper Cholesky factor of B_n in LAPACK banded layout (3 x n).

    With B = L diag(p) L^T, the leading minors of B (corner 6 or 7 at the
    top, interior 6) are

        Toeplitz: (k+1)(k+2)^2(k+3)/12,   near: (k+1)(k+2)(k^2+3k+3)/6,

    which gives p_k, L_{k+1,k} = -2k/(k+2) or -2k(k+1)/(k^2+3k+3), and
    L_{k+2,k} = 1/p_k.  Only the last pivot sees the (n, n) corner.
    """
    n = spec.n
    k = np.arange(1, n + 1, dtype=float)
    if spec.variant is Variant.TOEPLITZ:
        piv = (k + 2) / k * ((k + 3) / (k + 1))
        l1 = -2 * k / (k + 2)
    else:
        q = k * k + 3 * k + 3
        piv = (k + 2) / k * (q / (k * k + k + 1))
        l1 = -2 * k * ((k + 1) / q)
        piv[-1] += spec.variant.b_corner - 6
    root = np.sqrt(piv)
    ab = np.zeros((3, n))
    ab[2] = root
    ab[1, 1:] = (l1 * root)[:-1]
    ab[0, 2:] = (root[:-2] / piv[:-2])  # L_{k+2,k} sqrt(p_k) = 1 / sqrt(p_k)
    return ab


class StructuredSolver:
    """Factored form of A_n for repeated solves.

    Factorization is O(n); every :meth:`solve` is O(n) per right-hand side.
    """

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self._b = b_cholesky_factor(spec)
        if not np.all(self._b[-1] > 0):  # pragma: no cover - closed-form pivots are positive
            raise LinAlgError("non-positive pivot in the factor of B")
        self._c = _banded_cholesky(build_c(spec.n))
        factors = rank_two_factors(spec)
        self.sigma = factors.sigma
        self._dinv_u = self.apply_dinv(factors.U.astype(float))
        n = spec.n
        # V selects rows 1 and n
        self.schur = np.eye(2) + self.sigma * self._dinv_u[[0, n - 1], :]

    def apply_dinv(self, v: np.ndarray) -> np.ndarray:
        """``D^{-1} v = C^{-1} (B^{-1} v)``."""
        y = cho_solve_banded((self._b, False), v, check_finite=False)
        return cho_solve_banded((self._c, False), y, check_finite=False)

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        n = self.spec.n
        if rhs.shape[:1] != (n,):
            raise ValueError(f"right-hand side must have leading dimension {n}, got {rhs.shape}")
        if not np.all(np.isfinite(rhs)):
            raise ValueError("right-hand side has non-finite entries")
        y = self.apply_dinv(rhs)
        w = np.linalg.solve(self.schur, y[[0, n - 1]])
        return y - self.sigma * (self._dinv_u @ w)


@lru_cache(maxsize=16)
def _cached_solver(spec: SystemSpec) -> StructuredSolver:
    return StructuredSolver(spec)


def solve(spec: SystemSpec, rhs) -> np.ndarray:
    """Solve ``A_n x = rhs`` in O(n); ``rhs`` may be (n,) or (n, k)."""
    return _cached_solver(spec).solve(rhs)


@dataclass(frozen=True)
class BeamProblem:
    """Clamped beam ``EI u'''' = f(x, u)`` on (0, 1) with n interior nodes x_i = i h.

    ``c_ei`` multiplies ``h**4 f`` on the right-hand side; with the interior
    stencil equal to ``6 h**4`` times the fourth-difference operator, EI = 1
    corresponds to ``c_ei = 6``.
    """

    n: int
    forcing: Callable[[np.ndarray, np.ndarray], np.ndarray]
    c_ei: float = 6.0
    lipschitz: Optional[float] = None
    variant: Variant = Variant.NEAR

    def __post_init__(self):
        if self.c_ei <= 0:
            raise ValueError("c_ei must be positive")
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        SystemSpec(self.n, self.variant)

    @property
    def spec(self) -> SystemSpec:
        return SystemSpec(self.n, self.variant)

    @property
    def h(self) -> float:
        return 1.0 / (self.n + 1)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(1, self.n + 1) * self.h

    def rhs(self, u: np.ndarray) -> np.ndarray:
        f = np.broadcast_to(np.asarray(self.forcing(self.grid, u), dtype=float), (self.n,))
        if not np.all(np.isfinite(f)):
            raise ValueError("forcing returned non-finite values")
        return self.h**4 * self.c_ei * f


@dataclass
class FixedPointTrace:
    iterates: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    converged: bool = False
    predicted_rate: Optional[float] = None

    @property
    def iterations(self) -> int:
        return len(self.iterates) - 1

    @property
    def solution(self) -> np.ndarray:
        return self.iterates[-1]

    def rate_estimates(self, floor: float = 0.0) -> np.ndarray:
        """Step quotients ``|u^{l+1} - u^l| / |u^l - u^{l-1}|`` (steps above ``floor``)."""
        s = np.asarray(self.steps, dtype=float)
        if s.size < 2:
            return np.empty(0)
        prev, nxt = s[:-1], s[1:]
        keep = (prev > floor) & (nxt > floor)
        return nxt[keep] / prev[keep]


def beam_fixed_point(
    problem: BeamProblem,
    u0=None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> FixedPointTrace:
    """Iterate ``A u^l = h^4 C_EI f(x, u^{l-1})`` until the step drops below ``tol``.

    Each iteration also records the nonlinear residual
    ``|A u^l - h^4 C_EI f(x, u^l)|_inf``; since the next step equals
    ``A^{-1}`` applied to that residual, the iteration also stops once
    ``bound * residual <= tol`` (a certified bound on the next step).
    Running out of iterations is reported through ``converged=False``.
    """
    # local import: norm_bounds depends on this module
    from .norm_bounds import bound_value

    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    spec = problem.spec
    a = build_a(spec)
    solver = _cached_solver(spec)
    inv_bound = bound_value(spec)
    u = np.zeros(problem.n) if u0 is None else np.array(u0, dtype=float)
    if u.shape != (problem.n,):
        raise ValueError(f"u0 must have shape ({problem.n},)")
    trace = FixedPointTrace(iterates=[u.copy()])
    if problem.lipschitz is not None:
        trace.predicted_rate = contraction_predictor(problem)

    rhs = problem.rhs(u)
    for _ in range(max_iter):
        u_new = solver.solve(rhs)
        rhs = problem.rhs(u_new)
        step = float(np.max(np.abs(u_new - u)))
        resid = float(np.max(np.abs(multiply(a, u_new) - rhs)))
        trace.iterates.append(u_new)
        trace.steps.append(step)
        trace.residuals.append(resid)
        u = u_new
        if step <= tol or inv_bound * resid <= tol:
            trace.converged = True
            break
    return trace


def contraction_predictor(problem: BeamProblem) -> float:
    """``rho = h^4 C_EI L * bound`` using the closed-form inverse-norm bound."""
    from .norm_bounds import bound_value

    if problem.lipschitz is None:
        raise ValueError("contraction prediction needs the Lipschitz constant")
    return problem.h**4 * problem.c_ei * problem.lipschitz * bound_value(problem.spec)


def exact_contraction_rate(problem: BeamProblem) -> float:
    """``h^4 C_EI L |A^{-1}|_inf`` with the computed inverse norm."""
    from .norm_bounds import exact_inverse_norm

    if problem.lipschitz is None:
        raise ValueError("contraction prediction needs the Lipschitz constant")
    return problem.h**4 * problem.c_ei * problem.lipschitz * exact_inverse_norm(problem.spec)
