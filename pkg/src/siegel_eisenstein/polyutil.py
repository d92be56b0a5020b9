"""Dense polynomial helpers over exact coefficient rings.

Polynomials are plain lists of coefficients in ascending degree.  Everything
here is ring-generic (int, Fraction, p-adic elements) as long as the scalars
support + and *; the zero polynomial is the empty list.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import IntegralityError


def trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def padd(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append(x + y)
    return trim(out)


def pneg(a):
    return [-x for x in a]


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def pscale(a, c):
    if c == 0:
        return []
    return trim([c * x for x in a])


def peval(a, x):
    """Horner evaluation; works for any scalar x supporting + and *."""
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pshift(a, k):
    """Multiply by X^k."""
    if not a:
        return []
    return [0] * k + list(a)


def psubst_scaled(a, c):
    """a(c*X): coefficient j scaled by c^j."""
    return trim([coef * c**j for j, coef in enumerate(a)])


def pdivmod_frac(a, b):
    """Quotient and remainder over Fraction coefficients."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(trim(r)) >= len(b):
        r = trim(r)
        d = len(r) - len(b)
        c = r[-1] / b[-1]
        q[d] = c
        for i, bc in enumerate(b):
            r[i + d] -= c * bc
    return trim(q), trim(r)


def pdiv_exact(a, b):
    """Exact division; raises IntegralityError on a nonzero remainder."""
    q, r = pdivmod_frac(a, b)
    if r:
        raise IntegralityError("inexact polynomial division")
    out = []
    for c in q:
        if c.denominator == 1:
            out.append(int(c))
        else:
            out.append(c)
    return out


def series_div_monic1(num, den, prec):
    """Power-series quotient num/den mod X^prec where den[0] == 1.

    Stays in the coefficient ring of num (no true divisions happen).
    """
    assert den and den[0] == 1
    out = []
    for m in range(prec):
        c = num[m] if m < len(num) else 0
        for j in range(1, min(m, len(den) - 1) + 1):
            c = c - den[j] * out[m - j]
        out.append(c)
    return out


def elementary_symmetric_polys(items):
    """e_0..e_n of a list of polynomials (each item a coefficient list)."""
    n = len(items)
    e = [[1]] + [[] for _ in range(n)]
    for it in items:
        for m in range(n, 0, -1):
            e[m] = padd(e[m], pmul(e[m - 1], it))
    return e


# Bivariate polynomials as {(deg_x, deg_y): coeff} dicts.

def btrim(d):
    return {k: v for k, v in d.items() if v != 0}


def bmul(a, b):
    out = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + x * y
    return btrim(out)


def bprod(factors):
    out = {(0, 0): 1}
    for f in factors:
        out = bmul(out, f)
    return out


def beval(d, x, y):
    acc = 0
    for (i, j), c in d.items():
        acc += c * x**i * y**j
    return acc


def b_to_univariate_in_x(d, y):
    """Collapse Y by substituting the scalar y; returns an X-coefficient list."""
    if not d:
        return []
    out = [0] * (1 + max(i for (i, _) in d))
    for (i, j), c in d.items():
        out[i] += c * y**j
    return trim(out)
