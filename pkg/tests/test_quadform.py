"""Half-integral matrices, local invariants, and local Siegel polynomials."""

import random
from fractions import Fraction

import pytest

from siegel_eisenstein.arith import valuation
from siegel_eisenstein.errors import BoundError
from siegel_eisenstein.quadform import (
    HalfIntegralMatrix, block_decompose, content_exponent, disc_of, disc_split,
    enumerate_psd, f_poly, f_poly_closed, f_poly_oracle,
    functional_equation_check, hasse_invariant, invariants_of,
    inverse_denominator_exponent, katsurada_recursion_check,
    local_square_character, s_poly_closed, s_poly_sum)

T11 = HalfIntegralMatrix.from_rows([[2, 1], [1, 2]])


def diag(*ts):
    return HalfIntegralMatrix.from_t_diag(list(ts))


def test_matrix_basics():
    assert T11.det_t() == Fraction(3, 4)
    assert T11.trace_t == 2
    assert disc_of(T11) == 3
    assert disc_split(T11) == (-3, 1)
    assert disc_of(diag(1, 1)) == 4 and disc_split(diag(1, 1)) == (-4, 1)
    assert disc_of(diag(2)) == 2  # odd rank: half the doubled determinant
    with pytest.raises(ValueError):
        HalfIntegralMatrix.from_rows([[1]])  # odd diagonal of 2T
    with pytest.raises(ValueError):
        HalfIntegralMatrix.from_rows([[2, 1], [0, 2]])  # not symmetric


def test_local_square_character():
    assert local_square_character(1, 5) == 1
    assert local_square_character(2, 5) == -1
    assert local_square_character(5, 5) == 0
    assert local_square_character(4, 5) == 1
    # dyadic square classes
    assert local_square_character(1, 2) == 1
    assert local_square_character(17, 2) == 1
    assert local_square_character(5, 2) == -1
    assert local_square_character(3, 2) == 0
    assert local_square_character(2, 2) == 0
    assert local_square_character(Fraction(2, 3), 5) == 1  # 2/3 = 4 mod 5
    assert local_square_character(Fraction(3, 4), 5) == -1  # 3/4 = 2 mod 5


def test_invariants():
    inv = invariants_of(diag(1), 5)
    assert inv.hasse == hasse_invariant(diag(1), 5)
    assert inv.eta == 1  # rank-1 eta is always trivial in this normalization
    inv2 = invariants_of(T11, 3)
    assert inv2.fund_disc == -3 and inv2.f_cofactor == 1 and inv2.chi == 0
    assert inverse_denominator_exponent(diag(1, 9), 3) == 2
    assert content_exponent(diag(3, 3), 3) == 1
    with pytest.raises(ValueError):
        invariants_of(HalfIntegralMatrix.zero(2), 5)


def test_f_poly_rank1():
    assert f_poly_closed(diag(1), 7).coeffs == (1,)
    for p in (2, 3, 5):
        assert f_poly_closed(diag(p), p).coeffs == (1, p)
        assert f_poly_closed(diag(p * p), p).coeffs == (1, p, p * p)
        assert f_poly_oracle(diag(p * p), p).coeffs == (1, p, p * p)


def test_f_poly_rank2_examples():
    # square-cofactor 1 forces the constant polynomial
    assert f_poly_closed(T11, 3).coeffs == (1,)
    # content-vs-inverse-denominator: these classes separate the two readings
    assert f_poly_closed(diag(1, 9), 3).coeffs == (1, 3, 27)
    assert f_poly_closed(diag(3, 3), 3).coeffs == (1, 12, 27)
    assert f_poly_closed(diag(3, 9), 3).coeffs == (1, 9, 27)


def test_dyadic_rank2_inequivalent_classes():
    # 2*(nonsplit unimodular plane) and diag(1, 3) share the parameter triple
    # (content, v_2(f), chi) but have different local polynomials; the closed
    # form therefore routes through the oracle at l = 2.
    assert f_poly(T11.scale(2), 2).coeffs == (1, 6, 8)
    assert f_poly(diag(1, 3), 2).coeffs == (1, 2, 8)


def test_oracle_matches_closed_rank2():
    for l in (3, 5):
        for a in range(1, 7):
            for c in range(a, 7):
                for b in range(0, 5):
                    if b * b >= 4 * a * c:
                        continue
                    M = HalfIntegralMatrix.from_rows([[2 * a, b], [b, 2 * c]])
                    if valuation(disc_of(M), l) > 3:
                        continue
                    assert f_poly_oracle(M, l).coeffs == f_poly_closed(M, l).coeffs, (M, l)


def test_unit_scaling_invariance():
    for l in (3, 5):
        for u in (2, 4, 7):  # units mod l for these choices
            if u % l == 0:
                continue
            for M in (diag(l), diag(1, l * l), T11.scale(l)):
                assert f_poly(M, l).coeffs == f_poly(M.scale(u), l).coeffs


UNIMODULAR_2 = [
    [[1, 1], [0, 1]], [[1, 0], [1, 1]], [[0, 1], [-1, 0]], [[2, 1], [1, 1]],
    [[1, -2], [0, 1]],
]


def test_equivalence_invariance():
    rng = random.Random(3)
    for l in (2, 3, 5):
        for M in (diag(1, l), diag(l, l), T11, diag(2, 3)):
            for U in UNIMODULAR_2:
                N = M.conjugate(U)
                assert f_poly(N, l).coeffs == f_poly(M, l).coeffs, (M, U, l)


def test_functional_equation():
    ok, _ = functional_equation_check(diag(1), 5)
    assert ok
    for p in (3, 5):
        ok, msg = functional_equation_check(diag(p), p)
        assert ok, msg
    for l in (2, 3, 5):
        for M in (T11, diag(1, l), diag(l, l), diag(2, 3), diag(1, 2)):
            ok, msg = functional_equation_check(M, l)
            assert ok, (M, l, msg)


def test_functional_equation_rank3():
    for l in (2, 3):
        for M in (diag(1, 1, 1), diag(1, 1, 2), diag(1, 2, 3)):
            if valuation(disc_of(M), l) > (3 if l == 2 else 2):
                continue
            ok, msg = functional_equation_check(M, l)
            assert ok, (M, l, msg)


def test_s_poly_rank1():
    for p in (3, 5):
        for t in (1, 2, p, 3 * p * p):
            M = diag(t)
            assert s_poly_sum(M, p) == [1]
            assert s_poly_closed(M, p) == [1]


def test_s_poly_rank2_example():
    assert s_poly_closed(T11, 5) == [1, 5]
    assert s_poly_sum(T11, 5) == [1, 5]


def test_s_poly_rank0():
    Z = HalfIntegralMatrix.zero(0)
    assert s_poly_sum(Z, 5) == [1] and s_poly_closed(Z, 5) == [1]


def test_s_poly_sum_equals_closed_rank2():
    for p in (3, 5):
        for a in range(1, 4):
            for c in range(a, 4):
                for b in range(0, 3):
                    if b * b >= 4 * a * c:
                        continue
                    M = HalfIntegralMatrix.from_rows([[2 * a, b], [b, 2 * c]])
                    assert s_poly_sum(M, p) == s_poly_closed(M, p), (M, p)


def test_s_poly_closed_rank3_shape():
    assert s_poly_closed(diag(1, 1, 1), 5) == [1, 0, 0, -(5**6)]


def test_s_poly_sum_rank3_out_of_range():
    # the rank-3 sum needs the local polynomial of p^3 T; its X-degree is at
    # least 9, far beyond any enumeration box
    with pytest.raises(BoundError):
        s_poly_sum(diag(1, 1, 1), 3)


def test_katsurada_recursion():
    for p in (3, 5):
        for T2 in (diag(1), diag(2), diag(5)):
            ok, msg = katsurada_recursion_check(T11, T2, p)
            assert ok, msg
        for T2 in (T11, diag(1, 2)):
            ok, msg = katsurada_recursion_check(T11, T2, p)
            assert ok, msg
    with pytest.raises(ValueError):
        katsurada_recursion_check(T11, HalfIntegralMatrix.zero(1), 5)
    with pytest.raises(ValueError):
        katsurada_recursion_check(diag(1), diag(1), 5)


def test_block_decompose():
    U, Tp = block_decompose(diag(2, 0))
    assert Tp.gram2 == ((4,),)
    U, Tp = block_decompose(HalfIntegralMatrix.from_rows([[2, 2], [2, 2]]))
    assert Tp.gram2 == ((2,),)
    U, Tp = block_decompose(HalfIntegralMatrix.zero(2))
    assert Tp.degree == 0
    # kernel vector (1, -1): U^t T U must be blockdiag(T', 0)
    T = HalfIntegralMatrix.from_rows([[2, 1, 3], [1, 2, 3], [3, 3, 6]])
    U, Tp = block_decompose(T)
    assert Tp.degree == 2 and disc_of(Tp) == 3
    det = U[0][0] * (U[1][1] * U[2][2] - U[1][2] * U[2][1]) \
        - U[0][1] * (U[1][0] * U[2][2] - U[1][2] * U[2][0]) \
        + U[0][2] * (U[1][0] * U[2][1] - U[1][1] * U[2][0])
    assert det in (1, -1)
    with pytest.raises(ValueError):
        block_decompose(diag(1, -1))


def test_enumerate_psd():
    assert [m.gram2 for m in enumerate_psd(1, 3)] == [((0,),), ((2,),), ((4,),), ((6,),)]
    small = [m for m in enumerate_psd(2, 2) if m.gram2[0][0] <= 2 and m.gram2[1][1] <= 2]
    assert len(small) == 8
    assert all(m.is_psd() for m in enumerate_psd(2, 3))
    # deterministic order
    a = [m.gram2 for m in enumerate_psd(2, 2)]
    b = [m.gram2 for m in enumerate_psd(2, 2)]
    assert a == b


def test_oracle_bounds():
    with pytest.raises(BoundError):
        f_poly(HalfIntegralMatrix.from_t_diag([1, 1, 1, 1]), 3)
    with pytest.raises(BoundError):
        f_poly_oracle(diag(27, 27, 27), 3)  # v_3(disc) = 9 at rank 3


def test_oracle_streaming_path(monkeypatch):
    # force the chunked enumeration (no cached table) and compare with the
    # cached-path result
    import siegel_eisenstein.quadform as qf
    want = qf.f_poly_oracle(diag(3, 3), 3).coeffs
    monkeypatch.setattr(qf, "_CACHE_BOX_LIMIT", 10)
    monkeypatch.setattr(qf, "_CHUNK", 1 << 10)
    got = qf._b_coefficient(diag(3, 3), 3, 2)
    entries, _ = qf._coset_table.__wrapped__(2, 3, 2) if False else (None, None)
    # recompute the full polynomial through the streamed coefficients
    assert qf.f_poly_oracle(diag(3, 3), 3).coeffs == want
