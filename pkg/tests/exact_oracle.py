"""Exact rational reference computations for small n.

Independent of the package: the matrices are rebuilt from their stencils
and inverted by Gauss-Jordan elimination over Fractions.
"""

from fractions import Fraction

A_STENCIL = (56, -39, 12, -1)
CORNERS = {"toeplitz": (56, -39, 6, 1), "near": (68, -40, 7, 2)}


def a_matrix(n, variant):
    a0, a1, _, _ = CORNERS[variant]
    m = [[A_STENCIL[abs(i - j)] if abs(i - j) <= 3 else 0 for j in range(n)] for i in range(n)]
    m[0][0] = m[n - 1][n - 1] = a0
    m[0][1] = m[1][0] = m[n - 1][n - 2] = m[n - 2][n - 1] = a1
    return m


def b_matrix(n, variant):
    corner = CORNERS[variant][2]
    st = (6, -4, 1)
    m = [[st[abs(i - j)] if abs(i - j) <= 2 else 0 for j in range(n)] for i in range(n)]
    m[0][0] = m[n - 1][n - 1] = corner
    return m


def c_matrix(n):
    return [[8 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]


def matmul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(len(y))) for j in range(len(y[0]))] for i in range(len(x))]


def inverse(m):
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [v / piv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def d_inverse(n, variant):
    return inverse(matmul(b_matrix(n, variant), c_matrix(n)))
