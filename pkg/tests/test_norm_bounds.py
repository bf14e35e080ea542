import math
from fractions import Fraction as F

import numpy as np
import pytest

from heptainv.inverse import assemble_inverse
from heptainv.matrices import SystemSpec
from heptainv.norm_bounds import (
    bound_breakdown,
    bound_value,
    bound_value_exact,
    c_inverse_norm,
    exact_inverse_norm,
    g_closed_form,
    g_from_entries,
    inverse_row_sums,
    norm_sweep,
    pi2_closed_form,
    pi2_closed_form_exact,
)

import exact_oracle

VARIANTS = ["toeplitz", "near"]

# exact max row sums of A^{-1} from rational inversion
EXACT_NORMS = {
    ("toeplitz", 7): F(7033, 2927),
    ("toeplitz", 8): F(15883, 4343),
    ("toeplitz", 9): F(4727491, 850088),
    ("near", 7): F(56, 31),
    ("near", 8): F(12367, 4401),
    ("near", 9): F(3851, 880),
}


def test_bound_examples():
    t7 = bound_value(SystemSpec(7, "toeplitz"))
    assert bound_value_exact(SystemSpec(7, "toeplitz")) == F(6400, 2304) + F(64, 432) + F(11, 24)
    assert t7 == pytest.approx(3.38426, abs=1e-5)
    assert bound_value(SystemSpec(7, "near")) == pytest.approx(64 * 78 / 2304, rel=1e-15)
    assert bound_value(SystemSpec(7, "near")) == pytest.approx(2.16667, abs=1e-5)
    assert bound_value(SystemSpec(10, "near")) == pytest.approx(7.08984, abs=1e-5)


@pytest.mark.parametrize("key", sorted(EXACT_NORMS))
def test_exact_norm_frozen(key):
    variant, n = key
    spec = SystemSpec(n, variant)
    for method in ("explicit", "structured"):
        assert exact_inverse_norm(spec, method=method) == pytest.approx(float(EXACT_NORMS[key]), rel=1e-12)
    assert exact_inverse_norm(spec) <= bound_value(spec)


def test_exact_norm_matches_exact_oracle_row_sums():
    for variant in VARIANTS:
        for n in (10, 13):
            inv = exact_oracle.inverse(exact_oracle.a_matrix(n, variant))
            exact = max(sum(row) for row in inv)
            assert exact_inverse_norm(SystemSpec(n, variant)) == pytest.approx(float(exact), rel=1e-12)


def test_norm_orders():
    spec = SystemSpec(7, "toeplitz")
    v = exact_inverse_norm(spec, math.inf)
    assert exact_inverse_norm(spec, 1) == v
    assert exact_inverse_norm(spec, "inf") == v
    assert exact_inverse_norm(spec, 2) == v
    x = assemble_inverse(spec)
    assert np.linalg.norm(x, 2) <= v
    assert np.abs(x).sum(axis=0).max() == pytest.approx(np.abs(x).sum(axis=1).max(), rel=1e-14)
    with pytest.raises(ValueError):
        exact_inverse_norm(spec, 3)
    with pytest.raises(ValueError):
        inverse_row_sums(spec, method="guess")


def test_near_norm_is_smaller():
    for n in (7, 20, 64):
        assert exact_inverse_norm(SystemSpec(n, "near")) < exact_inverse_norm(SystemSpec(n, "toeplitz"))


def test_row_sum_maximizer_is_central():
    for variant in VARIANTS:
        for n in (7, 8, 31, 64, 101):
            sums = inverse_row_sums(SystemSpec(n, variant))
            centre = {math.ceil(n / 2), n // 2 + 1}
            best = max(sums[i - 1] for i in centre)
            assert best == pytest.approx(sums.max(), rel=1e-13)
            assert int(np.argmax(sums)) + 1 in centre


def test_explicit_and_structured_row_sums_agree():
    for variant in VARIANTS:
        for n in (50, 300, 700):
            spec = SystemSpec(n, variant)
            np.testing.assert_allclose(
                inverse_row_sums(spec, "explicit"), inverse_row_sums(spec, "structured"), rtol=1e-9
            )


def test_c_inverse_norm():
    assert c_inverse_norm(1) == pytest.approx(1 / 8, rel=1e-15)
    assert c_inverse_norm(7) == pytest.approx(320 / 1921, rel=1e-14)
    v = c_inverse_norm(200)
    assert 1 / 6 - 1e-12 <= v <= 1 / 6
    assert all(c_inverse_norm(n) <= 1 / 6 for n in range(1, 2001))
    with pytest.raises(ValueError):
        c_inverse_norm(0)


def test_c_inverse_norm_matches_exact_oracle():
    for n in (1, 2, 3, 6, 9):
        inv = exact_oracle.inverse(exact_oracle.c_matrix(n))
        assert c_inverse_norm(n) == pytest.approx(float(max(sum(r) for r in inv)), rel=1e-14)


@pytest.mark.parametrize("variant", VARIANTS)
def test_pi2_closed_form_is_the_exact_last_row_sum(variant):
    for n in (7, 8, 9, 12):
        d = exact_oracle.d_inverse(n, variant)
        assert pi2_closed_form_exact(SystemSpec(n, variant)) == sum(d[n - 1])
    assert pi2_closed_form_exact(SystemSpec(7, "toeplitz")) == F(3065, 3842)
    assert pi2_closed_form_exact(SystemSpec(7, "near")) == F(906, 1921)


@pytest.mark.parametrize("variant", VARIANTS)
def test_pi2_float_matches_direct_sum(variant):
    for n in list(range(7, 40)) + [100, 200, 300]:
        bd_direct = float(np.sum(_last_row(SystemSpec(n, variant))))
        assert pi2_closed_form(SystemSpec(n, variant)) == pytest.approx(bd_direct, rel=1e-12)


def _last_row(spec):
    from heptainv.inverse import d_inv_entry

    j = np.arange(1, spec.n + 1)
    return d_inv_entry(spec, np.full(spec.n, spec.n), j)


@pytest.mark.parametrize("variant", VARIANTS)
def test_g_closed_form_matches_entries(variant):
    for n in (7, 8, 33, 200):
        spec = SystemSpec(n, variant)
        i = np.arange(1, n + 1)
        np.testing.assert_allclose(g_closed_form(spec, i), g_from_entries(spec, i), rtol=1e-11)


def test_pi3_values():
    t = bound_breakdown(SystemSpec(7, "toeplitz"))
    assert t.pi3 <= 11 / 24
    assert t.pi3_argmax == 4
    near = bound_breakdown(SystemSpec(7, "near"))
    assert near.pi3 <= 31 / (48 * math.sqrt(15)) == pytest.approx(0.16675, abs=1e-5)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", [7, 8, 9, 16, 31, 33, 64, 100, 128])
def test_breakdown_dominance(variant, n):
    bd = bound_breakdown(SystemSpec(n, variant))
    flags = bd.dominance()
    assert all(flags.values()), {k: v for k, v in flags.items() if not v}
    assert bd.as_dict()["n"] == n
    assert bd.pi2 == pytest.approx(bd.pi2_direct, rel=1e-12)


def test_toeplitz_pi2_exceeds_the_naive_quadratic():
    # the quadratic (n+1)^2/432 is below the actual last-row sum, the
    # intermediate (55n^2+7n+14)/3456 is not
    for n in (7, 50, 500):
        bd = pi2_closed_form(SystemSpec(n, "toeplitz"))
        assert bd > (n + 1) ** 2 / 432
        assert bd <= (55 * n * n + 7 * n + 14) / 3456


def test_norm_sweep_rows_and_threads(monkeypatch):
    ns = [7, 20, 9, 64]
    rows = norm_sweep("near", ns, workers=3)
    assert [r[0] for r in rows] == ns
    monkeypatch.setenv("HEPTAINV_THREADS", "1")
    assert norm_sweep("near", ns) == rows
    for n, exact, bound in rows:
        assert exact <= bound
        assert exact == pytest.approx(exact_inverse_norm(SystemSpec(n, "near")), rel=1e-9)
    monkeypatch.setenv("HEPTAINV_THREADS", "many")
    with pytest.raises(ValueError):
        norm_sweep("near", ns)


def test_bound_is_quartic():
    for variant in VARIANTS:
        a = bound_value(SystemSpec(1000, variant))
        b = bound_value(SystemSpec(2000, variant))
        assert math.log2(b / a) == pytest.approx(4.0, abs=0.01)
