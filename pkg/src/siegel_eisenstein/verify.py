"""Named verification suites driving the package's acceptance checks.

Each suite returns a list of CheckResult records; the CLI renders them and
the test suite asserts on them.  Checks are exact identities (no floating
point anywhere); the lambda suite works at declared p-adic certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import CharacterSpec, valuation
from .errors import BoundError
from .quadform import (HalfIntegralMatrix, disc_of, enumerate_psd,
                       f_poly_closed, f_poly_oracle, functional_equation_check,
                       invariants_of, katsurada_recursion_check, s_poly_closed,
                       s_poly_sum)
from .eisenstein import (EisensteinSpec, constant_term, eisenstein_expansion,
                         fourier_coeff, fourier_coeff_chi, scaled_support,
                         stabilization_polys, stabilize_via_operator,
                         stabilize_via_qstar, stabilized_coeff)
from .hecke import (divisibility_check, hecke_polynomial, satake_params,
                    zharkovskaya_check)
from .lambda_adic import LambdaElement, LambdaFamily


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    blocked: bool = False

    @property
    def status(self) -> str:
        return "BLOCKED" if self.blocked else ("PASS" if self.passed else "FAIL")


def _rank2_family(max_diag: int = 9, max_off: int = 5):
    out = []
    for a in range(1, max_diag + 1):
        for c in range(a, max_diag + 1):
            for b in range(0, max_off + 1):
                if b * b >= 4 * a * c:
                    continue
                out.append(HalfIntegralMatrix.from_rows([[2 * a, b], [b, 2 * c]]))
    return out


def _rank1_family(l: int, vmax: int = 3):
    units = [1, 2, 3, 7, 11]
    out = []
    for u in units:
        if u % l == 0:
            continue
        for e in range(vmax + 1):
            out.append(HalfIntegralMatrix.from_t_diag([u * l**e]))
    return out


def local_suite(v_bound: int = 3, primes=(2, 3, 5)) -> list[CheckResult]:
    """Oracle vs closed form, functional equation, and degree law for all
    sampled half-integral matrices of rank <= 2 with v_l(disc) <= v_bound."""
    out = []
    for l in primes:
        n_cmp = n_fe = 0
        okc = okf = okd = True
        detail = ""
        for T in _rank1_family(l) + _rank2_family():
            if valuation(disc_of(T), l) > v_bound:
                continue
            oracle = f_poly_oracle(T, l)
            closed = f_poly_closed(T, l)
            if oracle.coeffs != closed.coeffs:
                okc = False
                detail = f"oracle/closed mismatch at {T}"
                break
            n_cmp += 1
            fe, msg = functional_equation_check(T, l, poly=oracle)
            if not fe:
                okf = False
                detail = f"functional equation fails at {T}: {msg}"
                break
            n_fe += 1
            inv = invariants_of(T, l)
            want = 2 * inv.v_f if T.degree % 2 == 0 else inv.v_disc
            if oracle.degree != want:
                okd = False
                detail = f"degree law fails at {T}"
                break
        out.append(CheckResult("local", f"oracle-vs-closed l={l}", okc,
                               detail or f"{n_cmp} matrices"))
        out.append(CheckResult("local", f"functional-equation l={l}", okf,
                               detail or f"{n_fe} matrices"))
        out.append(CheckResult("local", f"degree-law l={l}", okd, detail or "ok"))
    # rank-3 oracle: functional equation on small-discriminant instances
    mats3 = [HalfIntegralMatrix.from_t_diag(list(d))
             for d in [(1, 1, 1), (1, 1, 2), (1, 1, 3), (1, 2, 3), (1, 1, 4), (1, 2, 2)]]
    mats3.append(HalfIntegralMatrix.from_rows([[2, 1, 0], [1, 2, 1], [0, 1, 2]]))
    n3 = 0
    ok3 = True
    detail = ""
    for l in (2, 3):
        for T in mats3:
            if valuation(disc_of(T), l) > (3 if l == 2 else 2):
                continue
            fe, msg = functional_equation_check(T, l)
            if not fe:
                ok3 = False
                detail = f"{T} at l={l}: {msg}"
                break
            n3 += 1
    out.append(CheckResult("local", "functional-equation rank-3", ok3,
                           detail or f"{n3} matrices"))
    return out


def _sigma(k: int, m: int) -> int:
    return sum(d**k for d in range(1, m + 1) if m % d == 0)


def _sigma_p(k: int, m: int, p: int) -> int:
    return sum(d**k for d in range(1, m + 1) if m % d == 0 and d % p)


def genus1_suite(m_max: int = 50) -> list[CheckResult]:
    """Degree-1 regression: q-expansions against divisor sums."""
    out = []
    consts = {4: Fraction(1, 240), 6: Fraction(-1, 504), 8: Fraction(1, 480)}
    for kappa, c in consts.items():
        spec = EisensteinSpec(1, kappa)
        ok = constant_term(spec) == c
        ok = ok and all(fourier_coeff(spec, HalfIntegralMatrix.from_t_diag([m]))
                        == _sigma(kappa - 1, m) for m in range(1, m_max + 1))
        out.append(CheckResult("stab", f"genus-1 weight-{kappa} divisor sums", ok,
                               f"m <= {m_max}, constant {c}"))
    return out


def stabilization_suite(m_max: int = 50) -> list[CheckResult]:
    out = []
    # ordinary stabilization at genus 1
    for p in (5, 7):
        for kappa in (4, 6):
            ok = True
            c = stabilized_coeff(1, kappa, p, HalfIntegralMatrix.zero(1))
            zeta_p = (1 - Fraction(p) ** (kappa - 1)) * Fraction(-1, kappa) * _bern(kappa)
            ok = ok and c == zeta_p / 2
            ok = ok and all(stabilized_coeff(1, kappa, p, HalfIntegralMatrix.from_t_diag([m]))
                            == _sigma_p(kappa - 1, m, p) for m in range(1, m_max + 1))
            ok = ok and stabilized_coeff(1, kappa, p, HalfIntegralMatrix.from_t_diag([p])) == 1
            out.append(CheckResult("stab", f"genus-1 stabilization p={p} k={kappa}", ok,
                                   f"sigma sums m <= {m_max}, A_p = 1"))
    # dual-path and q*-path agreement, semi-ordinarity
    for n in (1, 2):
        for p in (5, 7):
            for kappa in (6, 8):
                targets = enumerate_psd(n, 3)
                src = eisenstein_expansion(
                    EisensteinSpec(n, kappa), 3 * p**n,
                    support=scaled_support(targets, p, n))
                op = stabilize_via_operator(n, kappa, p, src)
                ok = all(op.coefficient(T) == stabilized_coeff(n, kappa, p, T)
                         for T in targets)
                deg = 2**n - 2 + (1 if n == 1 else 0)
                src2 = eisenstein_expansion(
                    EisensteinSpec(n, kappa), 3 * p**deg,
                    support=scaled_support(targets, p, deg))
                qs = stabilize_via_qstar(n, kappa, p, src2)
                ok = ok and all(qs.coefficient(T) == stabilized_coeff(n, kappa, p, T)
                                for T in targets)
                ok = ok and all(stabilized_coeff(n, kappa, p, T.scale(p))
                                == stabilized_coeff(n, kappa, p, T) for T in targets)
                out.append(CheckResult(
                    "stab", f"dual-path n={n} p={p} k={kappa}", ok,
                    f"{len(targets)} matrices; operator, q*-operator, closed form, A_pT = A_T"))
    # stabilization polynomials: reflection and divisibility
    ok = all(stabilization_polys(n, p).check_reflection()
             and stabilization_polys(n, p).check_divisibility()
             for n in (1, 2, 3, 4) for p in (3, 5, 7))
    out.append(CheckResult("stab", "stabilization polynomials", ok,
                           "reflection identity and P(X,1) | R(X,1), n <= 4"))
    # the classical genus-2 ratio
    T = HalfIntegralMatrix.from_rows([[2, 1], [1, 2]])
    ratio = fourier_coeff(EisensteinSpec(2, 4), T) / constant_term(EisensteinSpec(2, 4))
    out.append(CheckResult("stab", "genus-2 weight-4 ratio", ratio == 13440,
                           f"A_T/A_0 = {ratio} at disc 3"))
    return out


def _bern(k: int) -> Fraction:
    from .arith import bernoulli
    return bernoulli(k)


def proof_suite() -> list[CheckResult]:
    """Scaled-sum identities: sum vs closed form (rank <= 2), the rank-lowering
    recursion (rank 3 and 4), and the documented rank-3 scaled-sum blocker."""
    out = []
    for p in (3, 5):
        mats = ([HalfIntegralMatrix.from_t_diag([t]) for t in (1, 2, p, 2 * p, p * p)]
                + [M for M in _rank2_family(4, 3)])
        ok = all(s_poly_sum(T, p) == s_poly_closed(T, p) for T in mats)
        out.append(CheckResult("proof", f"scaled-sum vs closed p={p} rank<=2", ok,
                               f"{len(mats)} matrices, exact polynomial equality"))
    T1s = [HalfIntegralMatrix.from_rows([[2, 1], [1, 2]]),
           HalfIntegralMatrix.from_t_diag([1, 1])]
    T2s_r1 = [HalfIntegralMatrix.from_t_diag([t]) for t in (1, 2, 3, 5)]
    T2s_r2 = [HalfIntegralMatrix.from_t_diag([1, 2]),
              HalfIntegralMatrix.from_rows([[2, 1], [1, 2]])]
    cnt = 0
    ok = True
    detail = ""
    for p in (3, 5):
        for T1 in T1s:
            for T2 in T2s_r1 + T2s_r2:
                good, msg = katsurada_recursion_check(T1, T2, p)
                if not good:
                    ok = False
                    detail = msg
                    break
                cnt += 1
    out.append(CheckResult("proof", "rank-lowering recursion r=3,4", ok,
                           detail or f"{cnt} block instances, p in (3, 5)"))
    # rank-3 scaled sums need the local polynomial of p^3 T (X-degree >= 9);
    # the enumeration box for that is l**(6*10) -- out of any desk-scale budget
    try:
        s_poly_sum(HalfIntegralMatrix.from_t_diag([1, 1, 1]), 3)
        out.append(CheckResult("proof", "scaled-sum vs closed rank-3", True, "unexpectedly computed"))
    except BoundError as e:
        out.append(CheckResult("proof", "scaled-sum vs closed rank-3", False,
                               f"out of enumeration range: {e}", blocked=True))
    return out


def satake_suite() -> list[CheckResult]:
    out = []
    ok = all(satake_params(n, kappa, l).similitude_ok()
             for n in (1, 2, 3, 4) for kappa in (6, 8, 10, 12) if kappa > n + 1
             for l in (2, 3, 5))
    out.append(CheckResult("satake", "similitude normalization", ok, "n <= 4, k <= 12"))
    ok = all(zharkovskaya_check(3, kappa, l) for kappa in (6, 8, 10, 12) for l in (2, 3))
    out.append(CheckResult("satake", "odd-genus spinor factorization", ok, "n = 3"))
    cnt = 0
    ok = True
    for n in (1, 2, 3, 4):
        for kappa in (6, 8, 10, 12):
            if kappa <= n + 1:
                continue
            for p in (2, 3, 5, 7):
                if not divisibility_check(n, kappa, p):
                    ok = False
                cnt += 1
    out.append(CheckResult("satake", "reduced-polynomial divisibility", ok,
                           f"{cnt} (n, k, p) triples"))
    ok = True
    for n in (1, 2, 3):
        for l in (2, 3):
            es = hecke_polynomial(satake_params(n, 8, l)).reciprocal_root_exponents(l)
            if len(es) != 2**n or any(e < 0 for e in es):
                ok = False
    out.append(CheckResult("satake", "spinor splitting into (1 - l^e Y)", ok, "n <= 3"))
    return out


def lambda_suite(p: int = 5, prec: int = 12, n_trunc: int = 8,
                 trace_bound: int = 2) -> list[CheckResult]:
    out = []
    weights = {0: (4, 8), 2: (6, 10)}
    for n in (1, 2):
        for a in (0, 2):
            fam = LambdaFamily(n, a, p, prec, n_trunc)
            mats = enumerate_psd(n, trace_bound)
            ok = True
            worst = prec
            for T in mats:
                fr = fam.coefficient(T)
                for kappa in weights[a]:
                    got = fr.specialize(kappa)
                    want = stabilized_coeff(n, kappa, p, T)
                    diff = got - want
                    v = diff.valuation_lower_bound() if not diff.is_zero else diff.abs_prec
                    worst = min(worst, v)
                    if not (diff.is_zero or v >= fr.num.m_eff - 2):
                        ok = False
            out.append(CheckResult("lambda", f"specialization n={n} a={a}", ok,
                                   f"{len(mats)} matrices, 2 weights, agreement to v >= {worst}"))
            exp = fam.expansion(trace_bound)
            ok = all(isinstance(v, LambdaElement) for _, v in exp.items_sorted())
            out.append(CheckResult("lambda", f"cleared-expansion n={n} a={a}", ok,
                                   "all entries integral Lambda elements"))
    # cross-branch: kappa not congruent to a, omega^(2a-2kappa) nontrivial
    for n in (1, 2):
        a = 0
        fam = LambdaFamily(n, a, p, prec, n_trunc)
        kappa = 5
        chi = CharacterSpec.teichmuller_power(a - kappa, p)
        spec = EisensteinSpec(n, kappa, chi)
        mats = enumerate_psd(n, trace_bound)
        if len(mats) < 4:
            mats = enumerate_psd(n, trace_bound + 2)
        ok = True
        worst = prec
        for T in mats:
            fr = fam.coefficient(T)
            got = fr.specialize(kappa)
            want = fourier_coeff_chi(spec, T, prec)
            diff = got - want
            v = diff.valuation_lower_bound() if not diff.is_zero else diff.abs_prec
            worst = min(worst, v)
            if not (diff.is_zero or v >= fr.num.m_eff - 2):
                ok = False
        out.append(CheckResult("lambda", f"cross-branch n={n} k={kappa}", ok,
                               f"{len(mats)} matrices, Nebentypus omega^{(a - kappa) % (p - 1)}, v >= {worst}"))
    return out


SUITES = {
    "local": lambda: local_suite(),
    "stab": lambda: genus1_suite() + stabilization_suite(),
    "proof": lambda: proof_suite(),
    "satake": lambda: satake_suite(),
    "lambda": lambda: lambda_suite(),
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        out = []
        for key in ("local", "stab", "proof", "satake", "lambda"):
            out += SUITES[key]()
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()
