"""Exact arithmetic groundwork.

Classical number-theoretic symbols (Kronecker, Hilbert), fundamental
discriminants, Bernoulli numbers and Dirichlet L-values at nonpositive
integers, and fixed-precision p-adic integers with Teichmueller lifts and the
p-adic logarithm.  Rational numbers are stdlib Fractions throughout; p-adic
values carry their precision explicitly and mixed-precision arithmetic
truncates to the smaller precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cache

from .errors import BoundError, UnsupportedDomainError

FACTOR_BOUND = 10**7


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def factor(m: int, bound: int = FACTOR_BOUND) -> list[tuple[int, int]]:
    """Factor m >= 1 by trial division; [(prime, exponent)] in ascending order."""
    if m < 1:
        raise ValueError("factor() expects a positive integer")
    out = []
    d = 2
    while d * d <= m:
        if d > bound:
            raise BoundError(f"factorization bound exceeded ({d} > {bound})")
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        if m > bound * bound:
            raise BoundError(f"factorization bound exceeded (cofactor {m})")
        out.append((m, 1))
    return out


def squarefree_split(m: int) -> tuple[int, int]:
    """m = s * f**2 with s squarefree (sign carried by s); m nonzero."""
    s, f = (1 if m > 0 else -1), 1
    for q, e in factor(abs(m)):
        if e % 2:
            s *= q
        f *= q ** (e // 2)
    return s, f


def valuation(x, l: int) -> int:
    """l-adic valuation of a nonzero int or Fraction."""
    if isinstance(x, Fraction):
        return valuation(x.numerator, l) - valuation(x.denominator, l)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % l == 0:
        x //= l
        v += 1
    return v


def _kronecker_any(a: int, n: int) -> int:
    """Kronecker symbol (a|n) for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    k = 1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def kronecker_symbol(d: int, m: int) -> int:
    """Value at m of the Kronecker character attached to d.

    d must be a fundamental discriminant or 1; completely multiplicative in m,
    zero exactly when gcd(d, m) > 1.
    """
    if d % 4 not in (0, 1):
        raise ValueError(f"{d} is not congruent to 0 or 1 mod 4")
    return _kronecker_any(d, m)


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d == 0 or d % 4 not in (0, 1):
        return False
    s, f = squarefree_split(d)
    if d % 4 == 1:
        return f == 1
    q = d // 4
    return q % 4 in (2, 3) and squarefree_split(q)[1] == 1


def fundamental_discriminant_decompose(D: int) -> tuple[int, int]:
    """Write D = d * f**2 with d a fundamental discriminant (or 1); unique."""
    if D == 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not congruent to 0 or 1 mod 4")
    s, f = squarefree_split(D)
    if s % 4 == 1:
        return s, f
    # s = 2,3 mod 4 forces f even, and 4s is fundamental
    assert f % 2 == 0
    return 4 * s, f // 2


def _unit_and_val(x: Fraction, l: int) -> tuple[int, Fraction]:
    v = valuation(x, l)
    return v, x / Fraction(l) ** v


def _unit_mod(u: Fraction, mod: int) -> int:
    return u.numerator * pow(u.denominator, -1, mod) % mod


def hilbert_symbol(a, b, l: int) -> int:
    """Hilbert symbol (a, b)_l over Q_l, by the standard local formulas."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert_symbol requires nonzero arguments")
    alpha, u = _unit_and_val(a, l)
    beta, v = _unit_and_val(b, l)
    if l == 2:
        um, vm = _unit_mod(u, 8), _unit_mod(v, 8)
        eps = lambda x: (x - 1) // 2 % 2
        om = lambda x: (x * x - 1) // 8 % 2
        e = eps(um) * eps(vm) + alpha * om(vm) + beta * om(um)
        return -1 if e % 2 else 1
    res = 1
    if alpha % 2 and beta % 2 and l % 4 == 3:
        res = -res
    if beta % 2:
        res *= _kronecker_any(_unit_mod(u, l), l)
    if alpha % 2:
        res *= _kronecker_any(_unit_mod(v, l), l)
    return res


@cache
def bernoulli(k: int) -> Fraction:
    """k-th Bernoulli number, convention B_1 = -1/2."""
    if k < 0:
        raise ValueError("negative index")
    if k == 0:
        return Fraction(1)
    acc = Fraction(0)
    for j in range(k):
        acc += math.comb(k + 1, j) * bernoulli(j)
    return -acc / (k + 1)


@cache
def _bernoulli_poly_coeffs(k: int) -> tuple[Fraction, ...]:
    # B_k(x) = sum_j C(k, j) B_j x^(k-j)
    return tuple(math.comb(k, j) * bernoulli(j) for j in range(k + 1))


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for j, c in enumerate(_bernoulli_poly_coeffs(k)):
        acc += c * x ** (k - j)
    return acc


# ---------------------------------------------------------------------------
# p-adic integers at fixed precision


@dataclass(frozen=True)
class PadicInt:
    """An integer mod p**prec.  Mixed-precision arithmetic truncates to the
    smaller precision; division is only by units."""

    p: int
    prec: int
    value: int

    def __post_init__(self):
        assert self.prec >= 1
        object.__setattr__(self, "value", self.value % self.p**self.prec)

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def _pair(self, other):
        if isinstance(other, int):
            other = PadicInt(self.p, self.prec, other)
        if other.p != self.p:
            raise ValueError("mixed primes")
        prec = min(self.prec, other.prec)
        return other, prec

    def __add__(self, other):
        other, prec = self._pair(other)
        return PadicInt(self.p, prec, self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        return PadicInt(self.p, self.prec, -self.value)

    def __sub__(self, other):
        other, prec = self._pair(other)
        return PadicInt(self.p, prec, self.value - other.value)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other, prec = self._pair(other)
        return PadicInt(self.p, prec, self.value * other.value)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(self.p, self.prec, pow(self.value, e, self.modulus))

    def inverse(self) -> "PadicInt":
        if self.value % self.p == 0:
            raise ZeroDivisionError("not a p-adic unit")
        return PadicInt(self.p, self.prec, pow(self.value, -1, self.modulus))

    def unit_div(self, other) -> "PadicInt":
        other, _ = self._pair(other)
        return self * other.inverse()

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def valuation_ge(self, k: int) -> bool:
        k = min(k, self.prec)
        return self.value % self.p**k == 0

    def valuation(self) -> int:
        """Valuation of the residue; equals prec when indistinguishable from 0."""
        if self.value == 0:
            return self.prec
        return min(valuation(self.value, self.p), self.prec)

    def truncate(self, prec: int) -> "PadicInt":
        return PadicInt(self.p, min(prec, self.prec), self.value)

    def to_json(self):
        return {"p": self.p, "precision": self.prec, "value": self.value}

    @classmethod
    def from_json(cls, d):
        return cls(d["p"], d["precision"], d["value"])


@dataclass(frozen=True)
class PadicNumber:
    """Element of Q_p with capped-relative precision.

    `val` is the valuation and `unit` a lift of the unit part mod p**rel.
    A value indistinguishable from zero has val=None and carries its absolute
    precision in `rel`.
    """

    p: int
    val: int | None
    unit: int
    rel: int

    @property
    def is_zero(self) -> bool:
        return self.val is None

    @property
    def abs_prec(self) -> int:
        return self.rel if self.is_zero else self.val + self.rel

    @classmethod
    def zero(cls, p: int, abs_prec: int) -> "PadicNumber":
        return cls(p, None, 0, abs_prec)

    @classmethod
    def from_lift(cls, p: int, lift: int, abs_prec: int, shift: int = 0) -> "PadicNumber":
        """Value lift * p**shift known mod p**(abs_prec + shift)."""
        lift %= p ** max(abs_prec, 0)
        if lift == 0 or abs_prec <= 0:
            return cls.zero(p, abs_prec + shift)
        v = valuation(lift, p)
        if v >= abs_prec:
            return cls.zero(p, abs_prec + shift)
        unit = (lift // p**v) % p ** (abs_prec - v)
        return cls(p, v + shift, unit, abs_prec - v)

    @classmethod
    def from_rational(cls, q, p: int, rel: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, rel)
        v = valuation(q, p)
        u = q / Fraction(p) ** v
        unit = u.numerator * pow(u.denominator, -1, p**rel) % p**rel
        return cls(p, v, unit, rel)

    def _lift_pair(self, other):
        if isinstance(other, (int, Fraction)):
            other = PadicNumber.from_rational(other, self.p, self.rel + 2)
        if other.p != self.p:
            raise ValueError("mixed primes")
        return other

    def __add__(self, other):
        other = self._lift_pair(other)
        ap = min(self.abs_prec, other.abs_prec)
        shift = min(x.val for x in (self, other) if not x.is_zero) if not (self.is_zero and other.is_zero) else 0
        shift = min(shift, 0)
        # work with lifts of value / p**shift, known mod p**(ap - shift)
        m = ap - shift
        if m <= 0:
            return PadicNumber.zero(self.p, ap)
        tot = 0
        for x in (self, other):
            if not x.is_zero:
                tot += x.unit * self.p ** (x.val - shift)
        return PadicNumber.from_lift(self.p, tot, m, shift)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PadicNumber(self.p, self.val, (-self.unit) % self.p**self.rel, self.rel)

    def __sub__(self, other):
        other = self._lift_pair(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift_pair(other)
        if self.is_zero or other.is_zero:
            # v(xy) >= abs_prec(zero factor) + val(other); conservative on double zero
            zs = [x for x in (self, other) if x.is_zero]
            vother = sum(x.val for x in (self, other) if not x.is_zero)
            return PadicNumber.zero(self.p, sum(z.rel for z in zs) + vother)
        rel = min(self.rel, other.rel)
        unit = self.unit * other.unit % self.p**rel
        return PadicNumber(self.p, self.val + other.val, unit, rel)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of (indistinguishable-from-)zero")
        return PadicNumber(self.p, -self.val, pow(self.unit, -1, self.p**self.rel), self.rel)

    def __truediv__(self, other):
        other = self._lift_pair(other)
        return self * other.inverse()

    def valuation_lower_bound(self) -> int:
        return self.abs_prec if self.is_zero else self.val

    def to_padic_int(self, prec: int) -> PadicInt:
        if self.is_zero:
            return PadicInt(self.p, min(prec, max(self.rel, 1)), 0)
        if self.val < 0:
            raise ValueError("negative valuation")
        prec = min(prec, self.abs_prec)
        return PadicInt(self.p, prec, self.unit * self.p**self.val)

    def to_json(self):
        if self.is_zero:
            return {"p": self.p, "zero": True, "precision": self.rel}
        return {"p": self.p, "valuation": self.val, "unit": self.unit, "precision": self.rel}

    @classmethod
    def from_json(cls, d):
        if d.get("zero"):
            return cls.zero(d["p"], d["precision"])
        return cls(d["p"], d["valuation"], d["unit"], d["precision"])


def padic_from_rational(q, p: int, prec: int) -> PadicInt:
    """Embed a rational with p-free denominator as a PadicInt mod p**prec."""
    q = Fraction(q)
    if q.denominator % p == 0:
        raise ValueError("denominator divisible by p")
    return PadicInt(p, prec, q.numerator * pow(q.denominator, -1, p**prec))


def teichmuller(x: int, p: int, prec: int) -> PadicInt:
    """The (p-1)-th root of unity congruent to x mod p, for odd p."""
    if p == 2 or not is_prime(p):
        raise UnsupportedDomainError("teichmuller lift needs an odd prime")
    if x % p == 0:
        raise ValueError("x must be prime to p")
    mod = p**prec
    y = x % mod
    for _ in range(prec + 2):
        y2 = pow(y, p, mod)
        if y2 == y:
            break
        y = y2
    assert pow(y, p, mod) == y
    return PadicInt(p, prec, y)


def _log_series_terms(p: int, prec: int) -> int:
    # need k - v_p(k) >= prec for all dropped k
    k = prec
    while k - int(math.log(max(k, 2), p)) < prec + 1:
        k += 1
    return k


def padic_log(u: PadicInt, prec: int | None = None) -> PadicInt:
    """log of u in 1 + pZ_p (odd p), exact partial sums with guard digits."""
    p = u.p
    if p == 2:
        raise UnsupportedDomainError("p-adic log implemented for odd p")
    prec = min(prec or u.prec, u.prec)
    if u.value % p != 1 % p or (u.value - 1) % p != 0:
        raise ValueError("argument must be congruent to 1 mod p")
    t = u.value - 1
    if t == 0:
        return PadicInt(p, prec, 0)
    K = _log_series_terms(p, prec)
    acc = Fraction(0)
    tk = 1
    for k in range(1, K + 1):
        tk *= t
        term = Fraction(tk, k)
        acc += term if k % 2 else -term
    return PadicNumber.from_rational(acc, p, prec + 2).to_padic_int(prec)


def padic_exp(v: PadicInt, prec: int | None = None) -> PadicInt:
    """exp of v with v_p(v) >= 1 (odd p), exact partial sums."""
    p = v.p
    if p == 2:
        raise UnsupportedDomainError("p-adic exp implemented for odd p")
    prec = min(prec or v.prec, v.prec)
    if v.value % p != 0:
        raise ValueError("argument must be divisible by p")
    K = (prec * (p - 1)) // (p - 2) + 3
    acc = Fraction(0)
    num = 1
    fact = 1
    for k in range(K + 1):
        if k:
            num *= v.value
            fact *= k
        acc += Fraction(num, fact)
    return PadicNumber.from_rational(acc, p, prec + 2).to_padic_int(prec)


def s_of(x: PadicInt, prec: int | None = None) -> PadicInt:
    """s with (1+p)**s = x for x in 1 + pZ_p: log(x)/log(1+p).

    The division by log(1+p) = p*unit consumes one digit of precision.
    """
    p = x.p
    prec = min(prec or x.prec - 1, x.prec - 1)
    if prec < 1:
        raise ValueError("insufficient precision for s()")
    l1 = padic_log(x, prec + 1)
    l2 = padic_log(PadicInt(p, prec + 1, 1 + p), prec + 1)
    assert l2.value % p == 0 and (l2.value // p) % p != 0
    mod = p**prec
    s = (l1.value // p) * pow(l2.value // p, -1, mod) % mod
    return PadicInt(p, prec, s)


def angle_bracket(x: int, p: int, prec: int) -> PadicInt:
    """<x> = x / omega(x), the 1-unit part of x in Z_p^x."""
    return PadicInt(p, prec, x) * teichmuller(x, p, prec).inverse()


# ---------------------------------------------------------------------------
# Dirichlet characters of the supported shapes


@dataclass(frozen=True)
class CharacterSpec:
    """A Dirichlet character: (Kronecker d / *) times omega**b at an odd prime p.

    The quadratic part is always kept prime to p; products with p | d are
    normalized through the prime-discriminant splitting d = p* d' together
    with (p*/.) = omega**((p-1)/2).  Rational-valued characters have b = 0.
    """

    disc: int = 1
    teich_pow: int = 0
    p: int = 0

    def __post_init__(self):
        if self.disc != 1 and not is_fundamental_discriminant(self.disc):
            raise ValueError(f"{self.disc} is not a fundamental discriminant")
        if self.teich_pow:
            assert self.p >= 3 and self.disc % self.p != 0

    @classmethod
    def trivial(cls) -> "CharacterSpec":
        return cls()

    @classmethod
    def kronecker(cls, d: int) -> "CharacterSpec":
        return cls(disc=d)

    @classmethod
    def teichmuller_power(cls, b: int, p: int) -> "CharacterSpec":
        if p == 2 or not is_prime(p):
            raise UnsupportedDomainError("Teichmueller characters need an odd prime")
        b %= p - 1
        return cls(disc=1, teich_pow=b, p=p if b else 0)

    @classmethod
    def kronecker_times_teichmuller(cls, d: int, b: int, p: int) -> "CharacterSpec":
        if p == 2 or not is_prime(p):
            raise UnsupportedDomainError("Teichmueller characters need an odd prime")
        if d % p == 0:
            p_star = p if p % 4 == 1 else -p
            d2 = d // p_star
            assert is_fundamental_discriminant(d2) or d2 == 1
            d = d2
            b = b + (p - 1) // 2
        b %= p - 1
        if d == 1 and b == 0:
            return cls.trivial()
        return cls(disc=d, teich_pow=b, p=p if b else 0)

    @property
    def is_trivial(self) -> bool:
        return self.disc == 1 and self.teich_pow == 0

    @property
    def is_rational(self) -> bool:
        return self.teich_pow == 0

    @property
    def conductor(self) -> int:
        c = abs(self.disc)
        if self.teich_pow:
            c *= self.p
        return c

    def sign(self) -> int:
        """Value at -1."""
        s = 1 if self.disc > 0 else -1
        if self.teich_pow % 2:
            s = -s
        return s

    def squared(self) -> "CharacterSpec":
        if self.teich_pow:
            return CharacterSpec.teichmuller_power(2 * self.teich_pow, self.p)
        return CharacterSpec.trivial()

    def value(self, n: int) -> int:
        """Value at n for rational-valued characters."""
        if not self.is_rational:
            raise ValueError("character is not rational-valued; use padic_value")
        return kronecker_symbol(self.disc, n)

    def value_at_prime(self, q: int) -> int:
        """Rational value at a prime q; zero when q divides the conductor."""
        if self.teich_pow and q == self.p:
            return 0
        return kronecker_symbol(self.disc, q)

    def padic_value(self, n: int, p: int, prec: int) -> PadicInt:
        """Value at n embedded in Z_p (zero when gcd(n, conductor) > 1)."""
        if self.teich_pow:
            assert p == self.p
        if math.gcd(n, self.conductor) > 1:
            return PadicInt(p, prec, 0)
        v = kronecker_symbol(self.disc, n)
        out = PadicInt(p, prec, v)
        if self.teich_pow:
            out = out * teichmuller(n % p**prec, p, prec) ** self.teich_pow
        return out

    def to_json(self):
        return {"disc": self.disc, "teich_pow": self.teich_pow, "p": self.p}

    @classmethod
    def from_json(cls, d):
        return cls(d["disc"], d["teich_pow"], d["p"])


def generalized_bernoulli(k: int, chi: CharacterSpec, p: int | None = None,
                          prec: int | None = None):
    """B_{k,chi} by the conductor sum f**(k-1) * sum_a chi(a) B_k(a/f).

    Rational for rational-valued chi; a PadicNumber when chi carries a
    Teichmueller power (then p and prec are required).  Exactly zero on
    parity mismatch chi(-1) != (-1)**k, except (k, chi) = (1, trivial).
    """
    if k == 0:
        raise ValueError("k must be positive")
    f = chi.conductor
    parity_ok = chi.sign() == (-1) ** k
    if chi.is_rational:
        if not parity_ok and not (k == 1 and chi.is_trivial):
            return Fraction(0)
        acc = Fraction(0)
        for a in range(1, f + 1):
            va = chi.value(a)
            if va:
                acc += va * bernoulli_poly(k, Fraction(a, f))
        return Fraction(f) ** (k - 1) * acc
    p = chi.p if p is None else p
    assert p == chi.p and prec is not None
    if not parity_ok:
        return PadicNumber.zero(p, prec)
    guard = prec + 3
    acc = PadicNumber.zero(p, guard)
    for a in range(1, f + 1):
        w = chi.padic_value(a, p, guard)
        if w.value == 0:
            continue
        ratl = PadicNumber.from_rational(Fraction(f) ** (k - 1) * bernoulli_poly(k, Fraction(a, f)), p, guard)
        acc = acc + ratl * PadicNumber.from_lift(p, w.value, guard)
    return acc


def dirichlet_L_neg(k: int, chi: CharacterSpec, remove_p: bool = False,
                    p: int | None = None, prec: int | None = None):
    """L(1-k, chi) = -B_{k,chi}/k, optionally with the Euler factor at p removed
    (multiplication by 1 - chi(p) p**(k-1))."""
    if k < 1:
        raise ValueError("k must be positive")
    B = generalized_bernoulli(k, chi, p=p, prec=prec)
    if isinstance(B, Fraction):
        L = -B / k
        if remove_p:
            assert p is not None
            L *= 1 - chi.value_at_prime(p) * Fraction(p) ** (k - 1)
        return L
    L = B * PadicNumber.from_rational(Fraction(-1, k), B.p, B.rel)
    if remove_p:
        L = L * PadicNumber.from_rational(1 - chi.value_at_prime(B.p) * Fraction(B.p) ** (k - 1), B.p, B.rel)
    return L


def rational_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_str(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))
