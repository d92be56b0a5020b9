"""Half-integral symmetric matrices and local Siegel-series polynomials.

A matrix T with integer diagonal and half-integer off-diagonal entries is
stored through its doubled Gram matrix G = 2T (integer, even diagonal), which
keeps enumeration and hashing over the integers.  The local polynomial
attached to (T, l) is computed in closed form for rank <= 2 and by a
brute-force character-sum oracle for rank <= 3: cosets R of symmetric
l-denominator matrices are enumerated, e_l(tr(TR)) summed exactly in the
cyclotomic integers, and the quotient by the explicit rational cofactor
recovered as an integer polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

import numpy as np

from .arith import (factor, fundamental_discriminant_decompose, hilbert_symbol,
                    is_prime, valuation)
from .errors import BoundError, IntegralityError
from . import polyutil as pu

# Enumeration budgets for the oracle (number of coset representatives).
ORACLE_BOX_BUDGET = 450_000_000
_CACHE_BOX_LIMIT = 17_000_000
_CHUNK = 1 << 21


@dataclass(frozen=True)
class HalfIntegralMatrix:
    """Half-integral symmetric matrix, stored as G = 2T."""

    gram2: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.gram2)
        for i, row in enumerate(self.gram2):
            if len(row) != n:
                raise ValueError("matrix must be square")
            if row[i] % 2:
                raise ValueError("diagonal of 2T must be even")
            for j in range(n):
                if self.gram2[i][j] != self.gram2[j][i]:
                    raise ValueError("matrix must be symmetric")

    @classmethod
    def from_rows(cls, rows) -> "HalfIntegralMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def zero(cls, n: int) -> "HalfIntegralMatrix":
        return cls.from_rows([[0] * n for _ in range(n)])

    @classmethod
    def from_t_diag(cls, diag) -> "HalfIntegralMatrix":
        n = len(diag)
        return cls.from_rows([[2 * diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def degree(self) -> int:
        return len(self.gram2)

    @property
    def trace_t(self) -> int:
        return sum(self.gram2[i][i] for i in range(self.degree)) // 2

    def det_gram2(self) -> int:
        return _int_det([list(r) for r in self.gram2])

    def det_t(self) -> Fraction:
        return Fraction(self.det_gram2(), 2**self.degree)

    def rank(self) -> int:
        return _frac_rank([[Fraction(x) for x in row] for row in self.gram2])

    def is_nondegenerate(self) -> bool:
        return self.degree == 0 or self.det_gram2() != 0

    def is_psd(self) -> bool:
        """T >= 0 via all principal minors of G being nonnegative."""
        n = self.degree
        from itertools import combinations
        for k in range(1, n + 1):
            for idx in combinations(range(n), k):
                sub = [[self.gram2[i][j] for j in idx] for i in idx]
                if _int_det(sub) < 0:
                    return False
        return True

    def scale(self, c: int) -> "HalfIntegralMatrix":
        return HalfIntegralMatrix.from_rows([[c * x for x in row] for row in self.gram2])

    def conjugate(self, U) -> "HalfIntegralMatrix":
        """U^t T U for an integer matrix U (columns as the new basis)."""
        n = self.degree
        G = self.gram2
        GU = [[sum(G[i][k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        out = [[sum(U[k][i] * GU[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        return HalfIntegralMatrix.from_rows(out)

    def block_with(self, other: "HalfIntegralMatrix") -> "HalfIntegralMatrix":
        n, m = self.degree, other.degree
        rows = [list(r) + [0] * m for r in self.gram2]
        rows += [[0] * n + list(r) for r in other.gram2]
        return HalfIntegralMatrix.from_rows(rows)

    def t_entries(self) -> list[list[Fraction]]:
        return [[Fraction(x, 2) for x in row] for row in self.gram2]

    def to_json(self):
        return [list(r) for r in self.gram2]

    @classmethod
    def from_json(cls, rows):
        return cls.from_rows(rows)

    def __str__(self):
        return "[" + "; ".join(",".join(str(x) for x in r) for r in self.gram2) + "]"


def _int_det(m) -> int:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    det = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            det += (-1) ** j * m[0][j] * _int_det(minor)
    return det


def _frac_rank(m) -> int:
    m = [row[:] for row in m]
    rows, cols = len(m), len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


def _frac_inverse(m):
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# Discriminant data and local invariants


def disc_of(T: HalfIntegralMatrix) -> int:
    """2**(2*floor(r/2)) * det T, an integer, for nondegenerate T of degree r."""
    r = T.degree
    if r == 0:
        return 1
    d = Fraction(2) ** (2 * (r // 2)) * T.det_t()
    assert d.denominator == 1, "discriminant must be integral"
    if d == 0:
        raise ValueError("degenerate matrix has no discriminant")
    return int(d)


def disc_split(T: HalfIntegralMatrix) -> tuple[int, int]:
    """(fundamental discriminant, square cofactor) of (-1)**(r/2) * disc, even rank."""
    r = T.degree
    if r % 2:
        raise ValueError("discriminant splitting needs even rank")
    if r == 0:
        return 1, 1
    return fundamental_discriminant_decompose((-1) ** (r // 2) * disc_of(T))


def local_square_character(x, l: int) -> int:
    """1 / -1 / 0 according as Q_l(sqrt(x)) is Q_l, unramified, or ramified."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("nonzero argument required")
    v = valuation(x, l)
    u = x / Fraction(l) ** v
    if v % 2:
        return 0
    if l == 2:
        um = u.numerator * pow(u.denominator, -1, 8) % 8
        return {1: 1, 5: -1, 3: 0, 7: 0}[um]
    um = u.numerator * pow(u.denominator, -1, l) % l
    return 1 if pow(um, (l - 1) // 2, l) == 1 else -1


def _diagonalize(T: HalfIntegralMatrix) -> list[Fraction]:
    """Diagonal entries of a rational congruence-diagonalization of T."""
    n = T.degree
    m = T.t_entries()
    diag = []
    for i in range(n):
        if m[i][i] == 0:
            j = next((k for k in range(i + 1, n) if m[k][k] != 0), None)
            if j is not None:
                m[i], m[j] = m[j], m[i]
                for row in m:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next(k for k in range(i + 1, n) if m[i][k] != 0)
                for k in range(i, n):
                    m[i][k] += m[j][k]
                for row in m:
                    row[i] += row[j]
        piv = m[i][i]
        assert piv != 0
        for j in range(i + 1, n):
            f = m[i][j] / piv
            if f:
                for k in range(i, n):
                    m[j][k] -= f * m[i][k]
                for row in m:
                    row[j] -= f * row[i]
        diag.append(piv)
    return diag


def hasse_invariant(T: HalfIntegralMatrix, l: int) -> int:
    """Hasse invariant over Q_l in Kitaoka's normalization.

    Product of (a_i, a_j)_l over i <= j (diagonal factors included) for any
    rational diagonalization diag(a_1..a_r); the odd-rank functional-equation
    suite pins this convention.
    """
    diag = _diagonalize(T)
    h = 1
    for i in range(len(diag)):
        for j in range(i, len(diag)):
            h *= hilbert_symbol(diag[i], diag[j], l)
    return h


def inverse_denominator_exponent(T: HalfIntegralMatrix, l: int) -> int:
    """Least m with l**m * T^{-1} half-integral over Z_l."""
    n = T.degree
    inv = _frac_inverse(T.t_entries())
    m = 0
    for i in range(n):
        for j in range(i, n):
            x = inv[i][j] if i == j else 2 * inv[i][j]
            if x:
                m = max(m, -valuation(x, l))
    return m


def content_exponent(T: HalfIntegralMatrix, l: int) -> int:
    """Largest c with T in l**c * Sym^*(Z_l), i.e. the minimal Jordan valuation."""
    c = None
    for i in range(T.degree):
        for j in range(i, T.degree):
            x = T.gram2[i][j] if i != j else T.gram2[i][i] // 2
            if x:
                v = valuation(x, l)
                c = v if c is None else min(c, v)
    if c is None:
        raise ValueError("zero matrix has no content exponent")
    return c


@dataclass(frozen=True)
class LocalInvariants:
    degree: int
    prime: int
    disc: int
    v_disc: int
    chi: int | None            # chi_l((-1)**(r/2) disc), even rank
    fund_disc: int | None      # even rank
    f_cofactor: int | None     # even rank
    v_f: int | None            # even rank
    hasse: int
    eta: int | None            # odd rank
    inv_denom_exp: int


def invariants_of(T: HalfIntegralMatrix, l: int) -> LocalInvariants:
    if not T.is_nondegenerate():
        raise ValueError("invariants need a nondegenerate matrix")
    r = T.degree
    D = disc_of(T)
    h = hasse_invariant(T, l) if r else 1
    if r % 2 == 0:
        d0, f0 = disc_split(T)
        return LocalInvariants(r, l, D, valuation(D, l), local_square_character((-1) ** (r // 2) * D, l),
                               d0, f0, valuation(f0, l) if f0 else 0, h, None,
                               inverse_denominator_exponent(T, l))
    det = T.det_t()
    eta = h * hilbert_symbol(det, (-1) ** ((r - 1) // 2) * det, l) * hilbert_symbol(-1, -1, l) ** ((r * r - 1) // 8)
    return LocalInvariants(r, l, D, valuation(D, l), None, None, None, None, h, eta,
                           inverse_denominator_exponent(T, l))


# ---------------------------------------------------------------------------
# Local polynomials: closed forms


@dataclass(frozen=True)
class LocalPolynomial:
    """The polynomial factor of the local series at l; constant term 1."""

    prime: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        assert self.coeffs and self.coeffs[0] == 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x):
        return pu.peval(list(self.coeffs), x)

    def to_json(self):
        return {"l": self.prime, "coeffs": list(self.coeffs)}


def f_poly_closed(T: HalfIntegralMatrix, l: int) -> LocalPolynomial:
    """Closed form for rank <= 2.

    Rank 1: sum of (lX)^i up to the valuation of the entry.  Rank 2, odd l:
    the classical two-index formula in the inverse-denominator exponent, v_l
    of the square cofactor, and the local square-class character.  Rank 2 at
    l = 2 is routed through the coset-sum oracle: the two-index formula is
    provably wrong there (2-adically inequivalent forms such as the doubled
    nonsplit unimodular plane and diag(1, 3) share all three parameters but
    have different local polynomials).
    """
    r = T.degree
    if r > 2:
        raise ValueError("closed form only for rank <= 2")
    if r == 0:
        return LocalPolynomial(l, (1,))
    if not T.is_nondegenerate():
        raise ValueError("nondegenerate matrix required")
    if r == 1:
        t = T.gram2[0][0] // 2
        v = valuation(t, l)
        return LocalPolynomial(l, tuple(l**i for i in range(v + 1)))
    if l == 2:
        return f_poly_oracle(T, 2)
    D = disc_of(T)
    _, f0 = disc_split(T)
    vf = valuation(f0, l) if f0 != 0 else 0
    chi = local_square_character(-T.det_t(), l)
    # upper index = the content exponent (minimal Jordan valuation); the
    # inverse-denominator reading fails oracle verification, e.g. diag(1, 9)
    iota = content_exponent(T, l)
    coeffs = [0] * (2 * vf + 2)
    for i in range(iota + 1):
        ci = l ** (2 * i)
        for j in range(vf - i + 1):
            coeffs[i + 2 * j] += ci * l ** (3 * j)
        if chi:
            for j in range(vf - i):
                coeffs[i + 2 * j + 1] -= chi * ci * l ** (3 * j + 1)
    coeffs = pu.trim(coeffs)
    assert len(coeffs) - 1 == 2 * vf, "degree law violated in rank-2 closed form"
    return LocalPolynomial(l, tuple(coeffs))


# ---------------------------------------------------------------------------
# Local polynomials: character-sum oracle


@cache
def _valuation_table(l: int, cap: int):
    """valuation_table[x % l**cap] = min(v_l(x), cap); one gather per array."""
    mod = l**cap
    tab = np.zeros(mod, dtype=np.int16)
    step = l
    v = 1
    while step <= mod:
        tab[::step] = min(v, cap)
        step *= l
        v += 1
    tab[0] = cap
    return tab


def _vec_valuation(arr, l: int, cap: int):
    """Vectorized l-adic valuation capped at `cap`; zeros get the cap."""
    tab = _valuation_table(l, cap)
    return tab[np.abs(arr) % (l**cap)]


def _profile_vmu(entries, l: int, m: int, r: int):
    """Sum of max(0, m - a_i) over the elementary-divisor valuations a_i of the
    symmetric matrix with the given entries mod l**m.

    Minor valuations from representatives are exact below m + (sum of the
    smaller divisor valuations), which is all the capped profile needs.
    """
    if r == 1:
        (x,) = entries
        a1 = _vec_valuation(x, l, m)
        return (m - a1).astype(np.int16)
    if r == 2:
        x, y, z = entries
        a1 = np.minimum(np.minimum(_vec_valuation(x, l, m), _vec_valuation(y, l, m)),
                        _vec_valuation(z, l, m)).astype(np.int16)
        vd = _vec_valuation(x * z - y * y, l, 2 * m).astype(np.int16)
        a2 = np.clip(vd - a1, 0, m)
        a2 = np.where(a1 >= m, m, a2)
        return (2 * m - a1 - a2).astype(np.int16)
    assert r == 3
    x11, x12, x13, x22, x23, x33 = entries
    a1 = None
    for t in entries:
        vt = _vec_valuation(t, l, m).astype(np.int16)
        a1 = vt if a1 is None else np.minimum(a1, vt)
    co11 = x22 * x33 - x23 * x23
    co12 = x12 * x33 - x13 * x23
    co13 = x12 * x23 - x13 * x22
    minors = (co11, co12, co13, x11 * x33 - x13 * x13, x11 * x22 - x12 * x12,
              x11 * x23 - x12 * x13)
    v2 = None
    for mi in minors:
        vm = _vec_valuation(mi, l, 2 * m).astype(np.int16)
        v2 = vm if v2 is None else np.minimum(v2, vm)
    det = x11 * co11 - x12 * co12 + x13 * co13
    v3 = _vec_valuation(det, l, 3 * m).astype(np.int16)
    a2 = np.clip(v2 - a1, 0, m)
    a2 = np.where(a1 >= m, m, a2)
    a3 = np.clip(v3 - a1 - a2, 0, m)
    a3 = np.where(a2 >= m, m, a3)
    return (3 * m - a1 - a2 - a3).astype(np.int16)


def _entry_coeffs(T: HalfIntegralMatrix):
    """Coefficients c_e with tr(T A) = sum c_e A_e over the upper triangle."""
    n = T.degree
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(T.gram2[i][i] // 2 if i == j else T.gram2[i][j])
    return out


@cache
def _coset_table(r: int, l: int, m: int):
    """Filtered enumeration of Sym_r(Z/l^m): rows with profile-valuation == m.

    Returns (entry_arrays, count); cached only for small boxes.
    """
    ne = r * (r + 1) // 2
    mod = l**m
    box = mod**ne
    assert box <= _CACHE_BOX_LIMIT
    kept = []
    for start in range(0, box, _CHUNK):
        rest = np.arange(start, min(start + _CHUNK, box), dtype=np.int64)
        entries = []
        for _ in range(ne):
            entries.append(rest % mod)
            rest = rest // mod
        keep = _profile_vmu(entries, l, m, r) == m
        kept.append(tuple(e[keep].astype(np.int32) for e in entries))
    out = tuple(np.concatenate([part[e] for part in kept]) for e in range(ne))
    return out, int(out[0].shape[0])


def _cyclotomic_fold(counts: list[int], l: int, m: int) -> int:
    """Reduce sum(counts[t] * zeta^t) mod the l^m-th cyclotomic polynomial and
    assert the result is a rational integer."""
    mod = l**m
    step = mod // l
    vec = list(counts) + [0] * (mod - len(counts))
    for t in range(step):
        top = vec[(l - 1) * step + t]
        if top:
            for i in range(l - 1):
                vec[i * step + t] -= top
    if any(vec[j] for j in range(1, (l - 1) * step)):
        raise IntegralityError("non-integer character sum in local series oracle")
    return vec[0]


def _b_coefficient(T: HalfIntegralMatrix, l: int, m: int,
                   budget: int = ORACLE_BOX_BUDGET) -> int:
    """m-th power-series coefficient of the local coset sum b_l(T; X)."""
    if m == 0:
        return 1
    r = T.degree
    ne = r * (r + 1) // 2
    mod = l**m
    box = mod**ne
    if box > budget:
        raise BoundError(f"local series enumeration bound exceeded (box {box})")
    cf = [c % mod for c in _entry_coeffs(T)]
    counts = np.zeros(mod, dtype=np.int64)
    if box <= _CACHE_BOX_LIMIT:
        entries, _ = _coset_table(r, l, m)
        t = np.zeros(entries[0].shape, dtype=np.int64)
        for c, e in zip(cf, entries):
            if c:
                t += c * e.astype(np.int64)
        counts += np.bincount(t % mod, minlength=mod)
    else:
        for start in range(0, box, _CHUNK):
            idx = np.arange(start, min(start + _CHUNK, box), dtype=np.int64)
            entries = []
            rest = idx
            for _ in range(ne):
                entries.append(rest % mod)
                rest = rest // mod
            vmu = _profile_vmu(entries, l, m, r)
            keep = vmu == m
            t = np.zeros(int(keep.sum()), dtype=np.int64)
            for c, e in zip(cf, entries):
                if c:
                    t += c * e[keep]
            counts += np.bincount(t % mod, minlength=mod)
    return _cyclotomic_fold([int(x) for x in counts], l, m)


def _cofactor_polys(r: int, l: int, chi: int):
    """(numerator multiplier, denominator) with b = F * den-free form:
    F = b * num / den as power series."""
    den = [1, -1]
    for i in range(1, r // 2 + 1):
        den = pu.pmul(den, [1, 0, -(l ** (2 * i))])
    if r % 2 == 0:
        num = [1, -chi * l ** (r // 2)]
    else:
        num = [1]
    return num, den


def f_poly_oracle(T: HalfIntegralMatrix, l: int, sanity_terms: int = 1,
                  budget: int = ORACLE_BOX_BUDGET) -> LocalPolynomial:
    """Brute-force local polynomial via the coset character sum.

    Enumerates symmetric cosets with bounded denominator, sums e_l(tr(TR))
    exactly in Z[zeta], divides out the explicit rational cofactor, and
    checks that the quotient is an integer polynomial of the forced degree.
    """
    if not is_prime(l):
        raise ValueError("l must be prime")
    r = T.degree
    if r == 0:
        return LocalPolynomial(l, (1,))
    if not T.is_nondegenerate():
        raise ValueError("nondegenerate matrix required")
    if r > 3:
        raise BoundError("local polynomial out of oracle range (rank > 3)")
    inv = invariants_of(T, l)
    if r == 3 and inv.v_disc > 4:
        # at rank 3 the enumeration box explodes with the valuation
        raise BoundError(f"local series oracle bound exceeded (v_l(disc) = {inv.v_disc})")
    if r % 2 == 0:
        d_f = 2 * inv.v_f
        chi = inv.chi
    else:
        d_f = inv.v_disc
        chi = 0
    ne = r * (r + 1) // 2
    upto = d_f + max(sanity_terms, 0)
    # sanity coefficients are a redundant guard; drop them rather than pay an
    # l**ne-times larger enumeration box
    while upto > d_f and (l**upto) ** ne > _CACHE_BOX_LIMIT:
        upto -= 1
    b = [_b_coefficient(T, l, m, budget) for m in range(upto + 1)]
    num, den = _cofactor_polys(r, l, chi)
    series = pu.series_div_monic1(pu.pmul(b, num), den, upto + 1)
    for m in range(d_f + 1, upto + 1):
        if series[m] != 0:
            raise IntegralityError("local series quotient is not a polynomial of the forced degree")
    coeffs = pu.trim(series[:d_f + 1])
    if not coeffs or coeffs[0] != 1:
        raise IntegralityError("local polynomial constant term is not 1")
    if len(coeffs) - 1 != d_f:
        raise IntegralityError("degree law violated in oracle quotient")
    return LocalPolynomial(l, tuple(coeffs))


@cache
def _f_poly_cached(gram2: tuple, l: int) -> LocalPolynomial:
    T = HalfIntegralMatrix(gram2)
    if T.degree <= 2:
        return f_poly_closed(T, l)
    if T.degree == 3:
        return f_poly_oracle(T, l)
    raise BoundError("local polynomial out of oracle range (rank > 3)")


def f_poly(T: HalfIntegralMatrix, l: int) -> LocalPolynomial:
    """Local polynomial dispatcher: closed form for rank <= 2, oracle for rank 3.

    Results are memoized per (matrix, prime); both paths are pure.
    """
    return _f_poly_cached(T.gram2, l)


# ---------------------------------------------------------------------------
# Functional equation and scaled-sum identities


def functional_equation_check(T: HalfIntegralMatrix, l: int,
                              poly: LocalPolynomial | None = None) -> tuple[bool, str]:
    """Laurent-identity check of the reflection symmetry of the local polynomial."""
    inv = invariants_of(T, l)
    r = T.degree
    F = list((poly or f_poly(T, l)).coeffs)
    d = len(F) - 1
    if r % 2 == 0:
        if d != 2 * inv.v_f:
            return False, f"degree {d} != 2*v_l(f) = {2 * inv.v_f}"
        for j in range(d + 1):
            # c_j * l^{(r+1)(v_f - j)} == c_{d-j}
            lhs = Fraction(F[j]) * Fraction(l) ** ((r + 1) * (inv.v_f - j))
            if lhs != F[d - j]:
                return False, f"even-rank reflection fails at coefficient {j}"
        return True, "ok"
    if d != inv.v_disc:
        return False, f"degree {d} != v_l(disc) = {inv.v_disc}"
    half = (r + 1) // 2
    for j in range(d + 1):
        # c_j * l^{half*d - j(r+1)} == eta * c_{d-j}
        lhs = Fraction(F[j]) * Fraction(l) ** (half * d - j * (r + 1))
        if lhs != inv.eta * F[d - j]:
            return False, f"odd-rank reflection fails at coefficient {j} (eta={inv.eta})"
    return True, "ok"


def _sig_monomials(r: int, p: int):
    """The r scaled monomials p^{j(2r-j+1)/2} X^j, j = 1..r."""
    return [pu.pshift([p ** (j * (2 * r - j + 1) // 2)], j) for j in range(1, r + 1)]


def s_poly_sum(T: HalfIntegralMatrix, p: int) -> list[int]:
    """Alternating elementary-symmetric combination of the local polynomials of
    the p-scalings of T, as a polynomial in X."""
    if p == 2 or not is_prime(p):
        raise ValueError("odd prime required")
    r = T.degree
    if r == 0:
        return [1]
    if not T.is_nondegenerate():
        raise ValueError("nondegenerate matrix required")
    e = pu.elementary_symmetric_polys(_sig_monomials(r, p))
    acc = []
    for m in range(r + 1):
        Fm = list(f_poly(T.scale(p ** (r - m)), p).coeffs)
        term = pu.pmul(e[m], Fm)
        acc = pu.padd(acc, term if m % 2 == 0 else pu.pneg(term))
    return acc


def stab_r_poly_x1(r: int, p: int) -> list[int]:
    """Product over j of (1 - p^{j(2r-j+1)/2} X^j), i.e. the Y=1 slice."""
    out = [1]
    for j in range(1, r + 1):
        out = pu.pmul(out, [1] + [0] * (j - 1) + [-(p ** (j * (2 * r - j + 1) // 2))])
    return out


def stab_p_poly_x1(r: int, p: int) -> list[int]:
    """(1 - p^r X) * prod_i (1 - p^{2r-2i+1} X^2) at Y = 1."""
    out = [1, -(p**r)]
    for i in range(1, r // 2 + 1):
        out = pu.pmul(out, [1, 0, -(p ** (2 * r - 2 * i + 1))])
    return out


def s_poly_closed(T: HalfIntegralMatrix, p: int) -> list[int]:
    """Closed form of the scaled sum: (R/P)(X,1), times (1 - chi p^{r/2} X) for
    even rank.  The division must be exact over the integers."""
    if p == 2 or not is_prime(p):
        raise ValueError("odd prime required")
    r = T.degree
    if r == 0:
        return [1]
    if not T.is_nondegenerate():
        raise ValueError("nondegenerate matrix required")
    quot = pu.pdiv_exact(stab_r_poly_x1(r, p), stab_p_poly_x1(r, p))
    if any(isinstance(c, Fraction) for c in quot):
        raise IntegralityError("inexact division in closed scaled sum")
    if r % 2 == 0:
        chi = local_square_character((-1) ** (r // 2) * disc_of(T), p)
        quot = pu.pmul(quot, [1, -chi * p ** (r // 2)])
    return quot


def katsurada_recursion_check(T1: HalfIntegralMatrix, T2: HalfIntegralMatrix,
                              p: int) -> tuple[bool, str]:
    """Rank-lowering recursion for the scaled sums (Katsurada): compares the
    degree-r sum of blockdiag(T1, T2) with the degree-(r-2) sum of T2 at p^2 X.

    The degree-(r-2) side uses the genuine local-polynomial sum whenever the
    rank is <= 2; the degree-r side uses the closed form (rank-3 scalings are
    outside any enumeration budget).
    """
    if T1.degree != 2:
        raise ValueError("T1 must have degree 2")
    if p == 2 or not is_prime(p):
        raise ValueError("odd prime required")
    T = T1.block_with(T2)
    r = T.degree
    if r > 4:
        raise BoundError("recursion check limited to rank <= 4")
    if not T.is_nondegenerate():
        raise ValueError("blockdiag(T1, T2) must be nondegenerate")
    S_T = s_poly_closed(T, p)
    S_T2 = s_poly_sum(T2, p) if T2.degree <= 2 else s_poly_closed(T2, p)
    S_T2_scaled = pu.psubst_scaled(S_T2, p * p)
    cof_num = pu.pmul(
        [1] + [0] * (r - 2) + [-(p ** ((r - 1) * (r + 2) // 2))],
        [1] + [0] * (r - 1) + [-(p ** (r * (r + 1) // 2))])
    if r % 2 == 0:
        chi_T = local_square_character((-1) ** (r // 2) * disc_of(T), p)
        chi_T2 = local_square_character((-1) ** (r // 2 - 1) * disc_of(T2), p)
        lhs = pu.pmul(S_T, pu.pmul([1, -chi_T2 * p ** (r // 2 + 1)], [1, 0, -(p ** (r + 1))]))
        rhs = pu.pmul(S_T2_scaled, pu.pmul([1, -chi_T * p ** (r // 2)], cof_num))
    else:
        lhs = pu.pmul(S_T, [1, 0, -(p ** (r + 2))])
        rhs = pu.pmul(S_T2_scaled, cof_num)
    if lhs != rhs:
        return False, f"recursion mismatch for {T1} + {T2} at p={p}: {lhs} vs {rhs}"
    return True, "ok"


# ---------------------------------------------------------------------------
# Block decomposition and enumeration


def _smith_with_right_transform(M):
    """Smith form S = U M V over Z; returns (diag_count_nonzero, V)."""
    m = [row[:] for row in M]
    n = len(m)
    k = len(m[0]) if n else 0
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    def col_op(j1, j2, f):  # col j2 -= f * col j1
        for row in m:
            row[j2] -= f * row[j1]
        for row in V:
            row[j2] -= f * row[j1]

    def col_swap(j1, j2):
        for row in m:
            row[j1], row[j2] = row[j2], row[j1]
        for row in V:
            row[j1], row[j2] = row[j2], row[j1]

    def row_op(i1, i2, f):
        m[i2] = [a - f * b for a, b in zip(m[i2], m[i1])]

    def row_swap(i1, i2):
        m[i1], m[i2] = m[i2], m[i1]

    t = 0
    while t < min(n, k):
        piv = None
        best = None
        for i in range(t, n):
            for j in range(t, k):
                if m[i][j] and (best is None or abs(m[i][j]) < best):
                    best = abs(m[i][j])
                    piv = (i, j)
        if piv is None:
            break
        while True:
            i0, j0 = piv
            row_swap(t, i0)
            col_swap(t, j0)
            done = True
            for i in range(t + 1, n):
                f = m[i][t] // m[t][t]
                if f:
                    row_op(t, i, f)
                if m[i][t]:
                    done = False
            for j in range(t + 1, k):
                f = m[t][j] // m[t][t]
                if f:
                    col_op(t, j, f)
                if m[t][j]:
                    done = False
            if done:
                break
            piv = None
            best = None
            for i in range(t, n):
                for j in range(t, k):
                    if m[i][j] and (best is None or abs(m[i][j]) < best):
                        best = abs(m[i][j])
                        piv = (i, j)
        t += 1
    rank = sum(1 for i in range(min(n, k)) if m[i][i] != 0)
    return rank, V


def block_decompose(T: HalfIntegralMatrix):
    """Unimodular U with U^t T U = blockdiag(T', 0), T' positive definite.

    T must be positive semidefinite.  The kernel lattice is produced by a
    Smith normal form of G, whose right transform is the unimodular completion.
    """
    n = T.degree
    if n == 0:
        return [], T
    if not T.is_psd():
        raise ValueError("matrix must be positive semidefinite")
    rank, V = _smith_with_right_transform([list(r) for r in T.gram2])
    # columns of V at positions >= rank span the kernel; keep rank-part first
    U = [[V[i][j] for j in range(n)] for i in range(n)]
    Tc = T.conjugate(U)
    for i in range(rank, n):
        for j in range(n):
            assert Tc.gram2[i][j] == 0 and Tc.gram2[j][i] == 0
    Tp = HalfIntegralMatrix.from_rows([row[:rank] for row in Tc.gram2[:rank]])
    assert Tp.degree == 0 or Tp.is_nondegenerate()
    return U, Tp


def enumerate_psd(n: int, trace_bound: int) -> list[HalfIntegralMatrix]:
    """All positive-semidefinite half-integral T of degree n with tr T <= bound,
    in a deterministic order."""
    if n > 4:
        raise BoundError("enumeration limited to degree <= 4")
    if trace_bound < 0:
        raise ValueError("negative trace bound")
    diags = []

    def gen_diag(prefix, remaining):
        if len(prefix) == n:
            diags.append(tuple(prefix))
            return
        for t in range(remaining + 1):
            gen_diag(prefix + [t], remaining - t)

    gen_diag([], trace_bound)
    out = []
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for diag in sorted(diags):
        bounds = []
        for (i, j) in pairs:
            b = math.isqrt(4 * diag[i] * diag[j])
            bounds.append(b)

        def fill(idx, entries):
            if idx == len(pairs):
                rows = [[0] * n for _ in range(n)]
                for i in range(n):
                    rows[i][i] = 2 * diag[i]
                for (pi, pj), v in zip(pairs, entries):
                    rows[pi][pj] = rows[pj][pi] = v
                M = HalfIntegralMatrix.from_rows(rows)
                if M.is_psd():
                    out.append(M)
                return
            for v in range(-bounds[idx], bounds[idx] + 1):
                fill(idx + 1, entries + [v])

        fill(0, [])
    return out
