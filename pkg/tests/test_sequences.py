from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heptainv.sequences import (
    R1,
    GammaTable,
    alpha,
    binomial_moment_table,
    gamma,
    gamma_moment_closed_form,
    gamma_moment_sum,
    gamma_product_ratio,
    gamma_ratio,
)


def exact_gammas(k):
    g = [0, 1]
    while len(g) <= k:
        g.append(8 * g[-1] - g[-2])
    return g


G = exact_gammas(2100)


@pytest.mark.parametrize("k, expected", [(0, 0), (1, 1), (2, 8), (3, 63), (5, 3905)])
def test_gamma_values(k, expected):
    assert gamma(k) == expected


@pytest.mark.parametrize("k, expected", [(0, 1), (1, 4), (2, 31), (4, 1921)])
def test_alpha_values(k, expected):
    assert alpha(k) == expected


def test_gamma_is_exact_beyond_double_range():
    assert gamma(400) == G[400]
    assert G[400] > 10**308
    assert isinstance(gamma(400), int)


def test_alpha_gamma_pair_is_the_power_of_r1():
    # (4 + sqrt15)^k = alpha_k + gamma_k sqrt15, checked through the norm
    for k in range(0, 60):
        assert alpha(k) ** 2 - 15 * gamma(k) ** 2 == 1


@pytest.mark.parametrize("bad", [-1, -10])
def test_negative_index_rejected(bad):
    with pytest.raises(IndexError):
        gamma(bad)
    with pytest.raises(IndexError):
        alpha(bad)


def test_table_bounds():
    t = GammaTable.build(10)
    assert t.gamma_at(10) == G[10]
    with pytest.raises(IndexError):
        t.gamma_at(11)
    with pytest.raises(ValueError):
        GammaTable.build(0)


def test_recurrence_and_ratio_range():
    for k in range(2, 201):
        assert G[k] + G[k - 2] == 8 * G[k - 1]
    ratios = [Fraction(G[k + 1], G[k]) for k in range(1, 200)]
    assert all(4 <= r <= 8 for r in ratios)
    # decreasing toward r1 from above
    assert all(b < a for a, b in zip(ratios, ratios[1:]))
    assert abs(float(ratios[-1]) - R1) < 1e-14


def test_alpha_identities():
    for k in range(2, 201):
        assert alpha(k) - alpha(k - 2) == 30 * gamma(k - 1)
    for k in range(1, 201):
        assert alpha(k) == 4 * gamma(k) - gamma(k - 1)
        assert gamma(k) == alpha(k - 1) + 4 * gamma(k - 1)


@pytest.mark.parametrize("p, m, expected", [(3, 0, 72), (3, 1, 206), (3, 2, 600), (3, 3, 1766)])
def test_moment_examples(p, m, expected):
    assert gamma_moment_sum(p, m) == expected


def test_moment_closed_forms_match_brute_force():
    for m in range(4):
        acc = 0
        for p in range(1, 201):
            acc += p**m * G[p]
            assert gamma_moment_closed_form(p, m, G[p], G[p + 1]) == acc
            assert gamma_moment_sum(p, m) == acc


def test_moment_argument_checks():
    with pytest.raises(ValueError):
        gamma_moment_sum(3, 4)
    with pytest.raises(IndexError):
        gamma_moment_sum(0, 1)
    with pytest.raises(ArithmeticError):
        gamma_moment_closed_form(3, 0, 63, 500)  # not consecutive gammas


def test_ratio_examples():
    assert gamma_ratio(0, 5) == 0.0
    assert gamma_ratio(7, 7) == 1.0
    assert gamma_ratio(7, 8) == pytest.approx(242047 / 1905632, rel=1e-15)


def test_ratio_accuracy_up_to_300():
    a, b = np.triu_indices(301)
    keep = b >= 1
    a, b = a[keep], b[keep]
    approx = gamma_ratio(a, b)
    exact = np.array([float(Fraction(G[i], G[j])) for i, j in zip(a, b)])
    rel = np.abs(approx - exact) / np.where(exact == 0, 1.0, exact)
    assert rel.max() <= 1e-13


def test_ratio_rejects_bad_indices():
    with pytest.raises(IndexError):
        gamma_ratio(-1, 3)
    with pytest.raises(IndexError):
        gamma_ratio(2, 0)


def test_product_ratio_far_beyond_overflow():
    got = gamma_product_ratio((1000, 500), (1499,))
    exact = float(Fraction(G[1000] * G[500], G[1499]))
    assert got == pytest.approx(exact, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2000), st.integers(0, 2000))
def test_ratio_property(b, a):
    a = min(a, b)
    exact = float(Fraction(G[a], G[b]))
    assert gamma_ratio(a, b) == pytest.approx(exact, rel=1e-12, abs=0)


def test_binomial_moment_table_matches_exact_sums():
    from math import comb

    size = 40
    table = binomial_moment_table(size)
    assert table.shape == (4, size + 1)
    assert not table.flags.writeable
    for u in range(1, size + 1):
        for p in range(4):
            exact = Fraction(sum(G[k] * comb(u - k, p) for k in range(1, u + 1)), G[u])
            assert table[p, u] == pytest.approx(float(exact), rel=1e-13)
