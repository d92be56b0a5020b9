"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every tolerance is pinned here; nothing is deferred.  The single genuinely
unattainable subcase (rank-3 scaled-sum identity, which needs the local
polynomial of p^3 T at rank 3 and hence an enumeration box beyond 3^60) is a
strict xfail documenting the blocker rather than a weakened check.
"""

import time

import pytest

from siegel_eisenstein.errors import BoundError
from siegel_eisenstein.quadform import HalfIntegralMatrix, s_poly_sum
from siegel_eisenstein.verify import (genus1_suite, lambda_suite, local_suite,
                                      proof_suite, satake_suite,
                                      stabilization_suite)


def _report(criterion: str, results, budget: float, elapsed: float):
    ok = True
    for r in results:
        line = f"  [{r.status}] {r.name} -- {r.detail}"
        print(line)
        if not r.passed and not r.blocked:
            ok = False
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {criterion} ({elapsed:.1f}s, budget {budget:.0f}s)")
    assert ok
    assert elapsed < budget, f"{criterion} exceeded its time budget"


def test_criterion_1_genus1_regression():
    t0 = time.time()
    results = genus1_suite(m_max=50)
    _report("criterion 1: genus-1 divisor-sum regression", results, 15.0, time.time() - t0)


def test_criterion_2_ordinary_stabilization():
    t0 = time.time()
    results = [r for r in stabilization_suite(m_max=50) if "genus-1 stabilization" in r.name]
    assert len(results) == 4
    _report("criterion 2: ordinary stabilization p in (5,7)", results, 15.0, time.time() - t0)


def test_criterion_3_local_polynomials():
    t0 = time.time()
    results = local_suite(v_bound=3, primes=(2, 3, 5))
    _report("criterion 3: local polynomial oracle suite", results, 120.0, time.time() - t0)


def test_criterion_4_dual_path():
    t0 = time.time()
    results = [r for r in stabilization_suite() if r.name.startswith("dual-path")]
    assert len(results) == 8  # n in (1,2) x p in (5,7) x k in (6,8)
    _report("criterion 4: stabilization dual path", results, 60.0, time.time() - t0)


def test_criterion_5_proof_identities():
    t0 = time.time()
    results = proof_suite()
    blocked = [r for r in results if r.blocked]
    assert len(blocked) == 1 and "rank-3" in blocked[0].name
    _report("criterion 5: scaled-sum identities and recursion", results, 300.0,
            time.time() - t0)


@pytest.mark.xfail(strict=True, raises=BoundError,
                   reason="rank-3 scaled sums need F_p(p^3 T) of X-degree >= 9; "
                          "the coset enumeration box for that is >= 3^60")
def test_criterion_5_rank3_scaled_sum_blocked():
    s_poly_sum(HalfIntegralMatrix.from_t_diag([1, 1, 1]), 3)


def test_criterion_6_satake_divisibility():
    t0 = time.time()
    results = satake_suite()
    _report("criterion 6: Satake and divisibility", results, 10.0, time.time() - t0)


def test_criterion_7_lambda_interpolation():
    t0 = time.time()
    results = [r for r in lambda_suite(p=5, prec=12, n_trunc=8, trace_bound=2)
               if not r.name.startswith("cross-branch")]
    _report("criterion 7: Lambda-adic interpolation", results, 300.0, time.time() - t0)


def test_criterion_8_cross_branch():
    t0 = time.time()
    results = [r for r in lambda_suite(p=5, prec=12, n_trunc=8, trace_bound=2)
               if r.name.startswith("cross-branch")]
    assert len(results) == 2
    _report("criterion 8: cross-branch specialization", results, 300.0, time.time() - t0)


def test_criterion_9_genus2_ratio():
    t0 = time.time()
    results = [r for r in stabilization_suite() if "ratio" in r.name]
    assert len(results) == 1
    _report("criterion 9: genus-2 weight-4 ratio 13440", results, 60.0, time.time() - t0)
