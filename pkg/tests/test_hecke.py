"""Satake parameters, spinor polynomials, and the divisibility relation."""

from fractions import Fraction

import pytest

from siegel_eisenstein.hecke import (divisibility_check,
                                     hecke_polynomial, q_star, satake_params,
                                     stab_r_in_y, zharkovskaya_check)
from siegel_eisenstein import polyutil as pu


def test_satake_examples():
    assert satake_params(1, 4, 2).exponents == (0, 3)
    sp = satake_params(2, 4, 2)
    assert sp.values == (4, Fraction(1, 4), 8)
    sp3 = satake_params(3, 6, 2)
    assert sp3.exponents[:3] == satake_params(2, 6, 2).exponents
    assert sp3.exponents[3] == 3
    with pytest.raises(ValueError):
        satake_params(3, 4, 2)


def test_similitude():
    for n in (1, 2, 3, 4):
        for kappa in (6, 8, 10, 12):
            if kappa <= n + 1:
                continue
            for l in (2, 3, 5):
                assert satake_params(n, kappa, l).similitude_ok()


def test_hecke_polynomial():
    hp = hecke_polynomial(satake_params(1, 4, 2))
    assert list(hp.coeffs) == pu.pmul([1, -1], [1, -8])
    hp2 = hecke_polynomial(satake_params(2, 4, 2))
    assert sorted(hp2.reciprocal_root_exponents(2)) == [0, 2, 3, 5]
    assert hp2.degree == 4
    # all factors are (1 - l^e Y) with integer e >= 0
    for n in (1, 2, 3):
        for l in (2, 3):
            es = hecke_polynomial(satake_params(n, 8, l)).reciprocal_root_exponents(l)
            assert len(es) == 2**n and all(e >= 0 for e in es)


def test_q_star():
    assert list(q_star(1, 4, 2).coeffs) == [1, -8]
    assert sorted(q_star(2, 4, 2).reciprocal_root_exponents(2)) == [3, 5]
    # R(p^(k-n-1), Y) equals q* for genus 2
    assert list(q_star(2, 4, 2).coeffs) == stab_r_in_y(2, 4, 2)


def test_divisibility():
    assert divisibility_check(1, 4, 2)
    assert divisibility_check(2, 6, 3)
    assert divisibility_check(3, 6, 2)
    for n in (1, 2, 3, 4):
        for kappa in (6, 8, 10, 12):
            if kappa <= n + 1:
                continue
            for p in (2, 3, 5, 7):
                assert divisibility_check(n, kappa, p), (n, kappa, p)
    # genus 3 has a nontrivial quotient: degrees differ
    assert q_star(3, 6, 2).degree > len(stab_r_in_y(3, 6, 2)) - 1


def test_zharkovskaya():
    for kappa in (6, 8, 12):
        for l in (2, 3, 5):
            assert zharkovskaya_check(3, kappa, l)
    with pytest.raises(ValueError):
        zharkovskaya_check(2, 6, 3)
