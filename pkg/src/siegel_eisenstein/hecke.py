"""Satake parameters of the Eisenstein series and spinor Hecke polynomials.

Parameters are powers of l and are tracked through their exponents; the
degree-2^n spinor polynomial factors completely into (1 - l^e Y) with
nonnegative integer exponents e.  The reduced polynomial obtained by removing
the trivial pair of factors is divisible by the Y=variable slice of the
stabilization R-polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import IntegralityError
from . import polyutil as pu


@dataclass(frozen=True)
class SatakeParams:
    """(psi_0, ..., psi_n) at l, stored as exponents: psi_i = l**exp[i]."""

    genus: int
    weight: int
    prime: int
    exponents: tuple[int, ...]

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(self.prime) ** e for e in self.exponents)

    def similitude_ok(self) -> bool:
        n = self.genus
        total = 2 * self.exponents[0] + sum(self.exponents[1:])
        return total == n * self.weight - n * (n + 1) // 2

    def to_json(self):
        return {"n": self.genus, "kappa": self.weight, "l": self.prime,
                "psi": list(self.exponents)}


def satake_params(n: int, kappa: int, l: int) -> SatakeParams:
    """Exponent tuple: the even-genus closed form, extended to odd genus by
    the spinor factorization recursion with psi_n = l^(kappa - n)."""
    if kappa <= n + 1:
        raise ValueError("weight must exceed genus + 1")
    if n == 1:
        return SatakeParams(1, kappa, l, (0, kappa - 1))
    if n % 2 == 0:
        h = n // 2
        e0 = h * (kappa - h) - h * (h + 1) // 2
        exps = [e0]
        exps += [-kappa + h + i for i in range(1, h + 1)]
        exps += [kappa - n + i - 1 for i in range(h + 1, n + 1)]
        return SatakeParams(n, kappa, l, tuple(exps))
    prev = satake_params(n - 1, kappa, l)
    return SatakeParams(n, kappa, l, prev.exponents + (kappa - n,))


@dataclass(frozen=True)
class HeckePolynomial:
    """Spinor Hecke polynomial with exact rational coefficients, degree 2^n."""

    coeffs: tuple

    def __post_init__(self):
        assert self.coeffs and self.coeffs[0] == 1

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, y):
        return pu.peval(list(self.coeffs), y)

    def reciprocal_root_exponents(self, l: int) -> list[int]:
        """Exponents e of the factorization into (1 - l^e Y); raises if the
        polynomial does not split that way."""
        rem = [Fraction(c) for c in self.coeffs]
        out = []
        guard = self.degree * 64
        e = 0
        while len(rem) > 1:
            if e > guard:
                raise IntegralityError("spinor polynomial does not split into (1 - l^e Y) factors")
            q, r = pu.pdivmod_frac(rem, [1, -(Fraction(l) ** e)])
            if not r:
                out.append(e)
                rem = q
            else:
                e += 1
        return out

    def to_json(self):
        return {"coeffs": [str(Fraction(c)) for c in self.coeffs]}


def _spinor_exponents(params: SatakeParams) -> list[int]:
    e = params.exponents
    n = params.genus
    out = []
    for r in range(n + 1):
        for sub in combinations(range(1, n + 1), r):
            out.append(e[0] + sum(e[i] for i in sub))
    return out


def hecke_polynomial(params: SatakeParams) -> HeckePolynomial:
    """(1 - psi_0 Y) prod over subsets (1 - psi_0 psi_{i_1} ... psi_{i_r} Y)."""
    l = params.prime
    poly = [Fraction(1)]
    for e in _spinor_exponents(params):
        poly = pu.pmul(poly, [1, -(Fraction(l) ** e)])
    coeffs = tuple(int(c) if Fraction(c).denominator == 1 else c for c in poly)
    return HeckePolynomial(coeffs)


def q_star(n: int, kappa: int, p: int) -> HeckePolynomial:
    """Spinor polynomial with the trivial factor pair removed.

    Genus 1: Q/(1-Y) = 1 - p^(kappa-1) Y.  Higher genus: divide by
    (1 - p^h Y)(1 - Y) with h = [n/2](kappa - [n/2]) - [n/2]([n/2]+1)/2;
    the division must be exact.
    """
    params = satake_params(n, kappa, p)
    Q = hecke_polynomial(params)
    if n == 1:
        den = [1, -1]
    else:
        h = (n // 2) * (kappa - n // 2) - (n // 2) * (n // 2 + 1) // 2
        den = pu.pmul([1, -(Fraction(p) ** h)], [1, -1])
    quot = pu.pdiv_exact(list(Q.coeffs), den)
    coeffs = tuple(int(c) if Fraction(c).denominator == 1 else c for c in quot)
    return HeckePolynomial(coeffs)


def stab_r_in_y(n: int, kappa: int, p: int) -> list[int]:
    """R(p^(kappa-n-1), Y) as a polynomial in Y."""
    out = [1]
    for j in range(1, n + 1):
        out = pu.pmul(out, [1, -(p ** (j * (2 * n - j + 1) // 2 + j * (kappa - n - 1)))])
    return out


def divisibility_check(n: int, kappa: int, p: int) -> bool:
    """Exact divisibility of the reduced spinor polynomial by R(p^(kappa-n-1), Y)."""
    if kappa <= n + 1:
        raise ValueError("weight must exceed genus + 1")
    q = list(q_star(n, kappa, p).coeffs)
    r = stab_r_in_y(n, kappa, p)
    _, rem = pu.pdivmod_frac(q, r)
    return not rem


def zharkovskaya_check(n: int, kappa: int, l: int) -> bool:
    """Odd-genus spinor factorization: Q^(n)(Y) = Q^(n-1)(Y) * Q^(n-1)(l^(kappa-n) Y)."""
    if n % 2 == 0 or n < 3:
        raise ValueError("odd genus >= 3 required")
    Qn = list(hecke_polynomial(satake_params(n, kappa, l)).coeffs)
    Qm = list(hecke_polynomial(satake_params(n - 1, kappa, l)).coeffs)
    scaled = pu.psubst_scaled(Qm, Fraction(l) ** (kappa - n))
    return pu.pmul(Qm, scaled) == Qn
