import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heptainv.matrices import (
    BandedMatrix,
    SystemSpec,
    Variant,
    build_a,
    build_b,
    build_c,
    multiply,
    rank_two_factors,
)

import exact_oracle

VARIANTS = ["toeplitz", "near"]


def test_spec_fields():
    t = SystemSpec(7, "toeplitz")
    n = SystemSpec(7, Variant.NEAR)
    assert (t.a0, t.a1, t.sigma, t.variant.b_corner) == (56, -39, 1, 6)
    assert (n.a0, n.a1, n.sigma, n.variant.b_corner) == (68, -40, 2, 7)
    assert t.is_toeplitz and not n.is_toeplitz
    assert SystemSpec(7, "NEAR").variant is Variant.NEAR


@pytest.mark.parametrize("n", [6, 0, -3, 7.5])
def test_small_or_fractional_n_rejected(n):
    with pytest.raises(ValueError):
        SystemSpec(n)


def test_unknown_variant_rejected():
    with pytest.raises(ValueError):
        SystemSpec(7, "circulant")


def test_a_entries():
    a = build_a(SystemSpec(7, "toeplitz"))
    assert a.entry(1, 1) == 56
    assert build_a(SystemSpec(7, "near")).entry(1, 2) == -40
    assert a.entry(4, 1) == -1
    assert a.entry(1, 5) == 0 and a.entry(5, 1) == 0
    with pytest.raises(IndexError):
        a.entry(4, 8)
    assert a.half_bandwidth == 3
    row = a.to_dense()[3]
    assert list(row) == [-1, 12, -39, 56, -39, 12, -1]


def test_b_entries():
    assert build_b(SystemSpec(7, "toeplitz")).entry(1, 1) == 6
    assert build_b(SystemSpec(7, "near")).entry(1, 1) == 7
    for v in VARIANTS:
        b = build_b(SystemSpec(7, v))
        assert b.entry(2, 4) == 1
        assert b.entry(7, 7) == b.entry(1, 1)


def test_c_entries():
    c3 = build_c(3)
    assert list(np.diag(c3.to_dense())) == [8, 8, 8]
    assert c3.entry(1, 3) == 0
    assert build_c(1).to_dense().tolist() == [[8]]
    with pytest.raises(ValueError):
        build_c(0)


def test_rank_two_factors():
    assert rank_two_factors(SystemSpec(7, "toeplitz")).sigma == 1
    assert rank_two_factors(SystemSpec(7, "near")).sigma == 2
    f = rank_two_factors(SystemSpec(7, "near"))
    assert f.U[:, 0].tolist() == [4, -1, 0, 0, 0, 0, 0]
    assert f.U[:, 1].tolist() == [0, 0, 0, 0, 0, -1, 4]
    assert f.V[:, 0].tolist() == [1, 0, 0, 0, 0, 0, 0]
    assert f.V[:, 1].tolist() == [0, 0, 0, 0, 0, 0, 1]
    assert not f.U.flags.writeable


@pytest.mark.parametrize("variant", VARIANTS)
def test_decomposition_exact(variant):
    for n in range(7, 129):
        spec = SystemSpec(n, variant)
        f = rank_two_factors(spec)
        a = build_a(spec).to_dense()
        rhs = build_b(spec).to_dense() @ build_c(n).to_dense() + f.sigma * f.U @ f.V.T
        assert a.dtype.kind == "i"
        assert np.array_equal(a, rhs)


@pytest.mark.parametrize("variant", VARIANTS)
def test_builders_match_independent_stencils(variant):
    for n in (7, 8, 11):
        spec = SystemSpec(n, variant)
        assert build_a(spec).to_dense().tolist() == exact_oracle.a_matrix(n, variant)
        assert build_b(spec).to_dense().tolist() == exact_oracle.b_matrix(n, variant)
        assert build_c(n).to_dense().tolist() == exact_oracle.c_matrix(n)


@settings(max_examples=40, deadline=None)
@given(st.integers(7, 200), st.sampled_from(VARIANTS))
def test_symmetry_and_centrosymmetry(n, variant):
    spec = SystemSpec(n, variant)
    for m in (build_a(spec), build_b(spec), build_c(n)):
        d = m.to_dense()
        assert np.array_equal(d, d.T)
        assert np.array_equal(d, d[::-1, ::-1])
        i, j = np.indices(d.shape)
        assert np.all(d[np.abs(i - j) > m.half_bandwidth] == 0)


def test_multiply_examples():
    assert multiply(build_c(3), np.ones(3, dtype=int)).tolist() == [7, 6, 7]
    e1 = np.zeros(7, dtype=int)
    e1[0] = 1
    assert multiply(build_b(SystemSpec(7)), e1).tolist() == [6, -4, 1, 0, 0, 0, 0]
    row_sums = multiply(build_a(SystemSpec(7)), np.ones(7, dtype=int))
    assert row_sums[3] == 0
    assert row_sums.tolist() == build_a(SystemSpec(7)).to_dense().sum(axis=1).tolist()


def test_multiply_keeps_integers_exact():
    x = np.arange(1, 31, dtype=np.int64) * 10**9
    a = build_a(SystemSpec(30, "near"))
    y = multiply(a, x)
    assert y.dtype.kind == "i"
    assert y.tolist() == (a.to_dense().astype(object) @ x.astype(object)).tolist()


@pytest.mark.parametrize("variant", VARIANTS)
def test_multiply_matches_dense_for_blocks(variant):
    rng = np.random.default_rng(3)
    spec = SystemSpec(40, variant)
    x = rng.standard_normal((40, 3))
    for m in (build_a(spec), build_b(spec), build_c(40)):
        np.testing.assert_allclose(multiply(m, x), m.to_dense() @ x, rtol=1e-13, atol=1e-12)


def test_multiply_dimension_mismatch():
    with pytest.raises(ValueError):
        multiply(build_c(5), np.ones(4))


def test_lapack_layout_round_trip():
    a = build_a(SystemSpec(9, "near"))
    ab = a.to_lapack_upper()
    dense = a.to_dense()
    u = a.half_bandwidth
    for i in range(9):
        for j in range(i, min(9, i + u + 1)):
            assert ab[u + i - j, j] == dense[i, j]


def test_banded_matrix_is_immutable_and_validated():
    a = build_a(SystemSpec(7))
    with pytest.raises(ValueError):
        a.diagonals[0][0] = 1
    with pytest.raises(ValueError):
        BandedMatrix(3, 1, (np.ones(3),))
    with pytest.raises(ValueError):
        BandedMatrix(3, 1, (np.ones(3), np.ones(3)))
    assert build_a(SystemSpec(7)) == a
    assert build_a(SystemSpec(7, "near")) != a
