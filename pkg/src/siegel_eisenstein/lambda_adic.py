"""One-variable Iwasawa-algebra machinery.

Branch power series interpolating Dirichlet L-values with the Euler factor at
p removed are rebuilt to finite (p, X)-precision by Newton interpolation over
exact rationals at the weights of one congruence class mod p-1; the truncated
series is certified empirically against held-out weights, including one
outside the interpolation class.  On top of that sit the Lambda-adic Fourier
coefficients: products of composed branch series and local polynomials
evaluated at (1+X)^s(<l>)-arguments, with denominators tracked as an explicit
multiset of factors of the clearing polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import (CharacterSpec, PadicInt, PadicNumber, angle_bracket,
                    dirichlet_L_neg, factor, is_prime, padic_from_rational,
                    s_of, teichmuller, valuation)
from .errors import CertificationError, UnsupportedDomainError
from .quadform import (HalfIntegralMatrix, block_decompose, disc_of,
                       disc_split, enumerate_psd, f_poly)
from .eisenstein import QExpansion


@dataclass(frozen=True)
class LambdaElement:
    """Truncated Iwasawa-algebra element: coefficients mod (p^prec, X^n_trunc).

    `m_eff` certifies the p-adic accuracy of evaluations at points of positive
    valuation; arithmetic carries the minimum of the operand certificates.
    """

    p: int
    prec: int
    n_trunc: int
    coeffs: tuple[int, ...]
    m_eff: int

    def __post_init__(self):
        assert len(self.coeffs) == self.n_trunc
        mod = self.p**self.prec
        object.__setattr__(self, "coeffs", tuple(c % mod for c in self.coeffs))

    @classmethod
    def constant(cls, c: int | PadicInt, p: int, prec: int, n_trunc: int,
                 m_eff: int | None = None) -> "LambdaElement":
        if isinstance(c, PadicInt):
            c = c.value
        return cls(p, prec, n_trunc, (c,) + (0,) * (n_trunc - 1), m_eff if m_eff is not None else prec)

    @classmethod
    def from_coeffs(cls, coeffs, p: int, prec: int, n_trunc: int,
                    m_eff: int | None = None) -> "LambdaElement":
        cs = list(coeffs)[:n_trunc]
        cs += [0] * (n_trunc - len(cs))
        return cls(p, prec, n_trunc, tuple(cs), m_eff if m_eff is not None else prec)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _pair(self, other: "LambdaElement"):
        assert self.p == other.p and self.n_trunc == other.n_trunc
        return min(self.prec, other.prec), min(self.m_eff, other.m_eff)

    def __add__(self, other):
        prec, meff = self._pair(other)
        return LambdaElement(self.p, prec, self.n_trunc,
                             tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), meff)

    def __sub__(self, other):
        prec, meff = self._pair(other)
        return LambdaElement(self.p, prec, self.n_trunc,
                             tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), meff)

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt)):
            c = other.value if isinstance(other, PadicInt) else other
            return LambdaElement(self.p, self.prec, self.n_trunc,
                                 tuple(c * a for a in self.coeffs), self.m_eff)
        prec, meff = self._pair(other)
        mod = self.p**prec
        out = [0] * self.n_trunc
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(self.n_trunc - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = (out[i + j] + a * b) % mod
        return LambdaElement(self.p, prec, self.n_trunc, tuple(out), meff)

    __rmul__ = __mul__

    def eval_int(self, x: int) -> PadicInt:
        """Horner evaluation at an integer point (mod p^prec; accuracy m_eff)."""
        mod = self.p**self.prec
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % mod
        return PadicInt(self.p, self.prec, acc)

    def eval_certified(self, x: int) -> PadicNumber:
        """Evaluation at a point of positive valuation, trimmed to the certificate."""
        return PadicNumber.from_lift(self.p, self.eval_int(x).value, min(self.m_eff, self.prec))

    def with_m_eff(self, m_eff: int) -> "LambdaElement":
        return LambdaElement(self.p, self.prec, self.n_trunc, self.coeffs, m_eff)

    def to_json(self):
        return {"p": self.p, "precision": self.prec, "x_trunc": self.n_trunc,
                "m_eff": self.m_eff, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, d):
        return cls(d["p"], d["precision"], d["x_trunc"], tuple(d["coeffs"]), d["m_eff"])


def compose(f: LambdaElement, u: LambdaElement) -> LambdaElement:
    """f(u(X)) mod (p^prec, X^n) for u with u(0) of positive valuation."""
    if u.coeffs[0] % u.p != 0:
        raise ValueError("composition needs u(0) divisible by p")
    prec = min(f.prec, u.prec)
    meff = min(f.m_eff, u.m_eff)
    acc = LambdaElement.constant(0, f.p, prec, f.n_trunc)
    for c in reversed(f.coeffs):
        acc = acc * u + LambdaElement.constant(c, f.p, prec, f.n_trunc)
    return acc.with_m_eff(meff)


def one_plus_x_pow(s: PadicInt, prec: int, n_trunc: int) -> LambdaElement:
    """(1+X)^s = sum C(s, k) X^k; the binomials land in Z_p."""
    p = s.p
    vfact = sum(valuation(k, p) for k in range(1, n_trunc) if k % p == 0)
    guard = prec + vfact + 1
    if s.prec < guard:
        raise ValueError(f"need s at precision >= {guard}")
    mod = p**guard
    out = [1]
    num = 1
    fact = 1
    for k in range(1, n_trunc):
        num = num * ((s.value - (k - 1)) % mod) % mod
        fact *= k
        vk = valuation(fact, p) if fact % p == 0 else 0
        assert num % p**vk == 0, "binomial coefficient not p-integral"
        c = (num // p**vk) * pow(fact // p**vk, -1, mod) % mod
        out.append(c % p**prec)
    # evaluations at points of valuation >= 1 are X-truncation limited
    return LambdaElement.from_coeffs(out, p, prec, n_trunc, m_eff=min(prec, n_trunc))


# ---------------------------------------------------------------------------
# Branch series


@dataclass(frozen=True)
class BranchSeries:
    """Truncation of the one-branch p-adic L power series.

    phi interpolates the L-values (times X on the trivial branch); psi is
    phi/X exactly on the trivial branch, represented downstream through a
    denominator atom rather than an actual division.
    """

    xi: CharacterSpec
    b: int
    p: int
    phi: LambdaElement
    trivial_branch: bool
    is_zero: bool

    @property
    def m_eff(self) -> int:
        return self.phi.m_eff

    def psi_value(self, kappa_arg: int) -> PadicNumber:
        """Psi at the exact point (1+p)^k - 1 (dividing by it on the trivial branch)."""
        val = self.phi.eval_certified(kappa_arg)
        if self.trivial_branch:
            val = val / PadicNumber.from_rational(kappa_arg, self.p, self.phi.prec)
        return val


def _newton_monomial(nodes, values):
    """Monomial coefficients of the interpolating polynomial, exactly."""
    n = len(nodes)
    dd = [list(values)]
    for order in range(1, n):
        prev = dd[-1]
        dd.append([(prev[i + 1] - prev[i]) / (nodes[i + order] - nodes[i])
                   for i in range(n - order)])
    lead = [row[0] for row in dd]  # f[x_0..x_k]
    poly = [Fraction(0)]
    for k in range(n - 1, -1, -1):
        # poly <- lead[k] + (X - x_k) * poly
        shifted = [Fraction(0)] + poly
        scaled = [-nodes[k] * c for c in poly] + [Fraction(0)]
        poly = [a + b for a, b in zip(shifted, scaled)]
        poly[0] += lead[k]
    return poly


def branch_l_value(k: int, xi: CharacterSpec, b: int, p: int, prec: int):
    """L-value with the Euler factor at p removed for weight k on branch xi*omega^b.

    Rational when k is in the branch class; p-adic otherwise.
    """
    if (k - b) % (p - 1) == 0:
        return dirichlet_L_neg(k, xi, remove_p=True, p=p)
    chi = CharacterSpec.kronecker_times_teichmuller(xi.disc, b - k, p)
    return dirichlet_L_neg(k, chi, remove_p=True, p=p, prec=prec)


def build_branch(xi: CharacterSpec, b: int, p: int, prec: int, n_trunc: int,
                 guard_nodes: int = 4, holdouts: int = 2,
                 require_m_eff: int = 4) -> BranchSeries:
    """Newton-interpolated branch series with empirical certification.

    Nodes are x_k = (1+p)^k - 1 for n_trunc + guard_nodes weights k > 1 in the
    class k = b mod (p-1).  The monomial coefficients of the exact rational
    interpolant must be p-integral; the certificate m_eff is the worst p-adic
    error over held-out weights (two in-class, one out-of-class).
    """
    if p == 2 or not is_prime(p):
        raise UnsupportedDomainError("branch series need an odd prime")
    if not xi.is_rational:
        raise ValueError("the branch character xi must be quadratic")
    if xi.disc % p == 0:
        raise ValueError("xi must be prime to p (normalize first)")
    b %= p - 1
    trivial = xi.is_trivial and b == 0
    if xi.sign() * (-1) ** b != 1:
        # odd branch: every interpolation value vanishes by Bernoulli parity
        zero = LambdaElement.constant(0, p, prec, n_trunc, m_eff=prec)
        return BranchSeries(xi, b, p, zero, trivial, True)
    ks = []
    j = 0
    while len(ks) < n_trunc + guard_nodes:
        k = b + (p - 1) * j
        j += 1
        if k > 1:
            ks.append(k)
    nodes = [Fraction((1 + p) ** k - 1) for k in ks]
    values = []
    for k in ks:
        L = dirichlet_L_neg(k, xi, remove_p=True, p=p)
        values.append(((1 + p) ** k - 1) * L if trivial else L)
    mono = _newton_monomial(nodes, values)
    coeffs = []
    for c in mono[:n_trunc]:
        if valuation(c, p) < 0 if c else False:
            raise CertificationError("p divides an interpolation denominator")
        coeffs.append(padic_from_rational(c, p, prec).value)
    phi = LambdaElement.from_coeffs(coeffs, p, prec, n_trunc)
    if phi.is_zero() and not trivial:
        return BranchSeries(xi, b, p, phi.with_m_eff(prec), trivial, True)
    # certification at held-out weights
    errors = []
    held = [b + (p - 1) * (j + 1 + t) for t in range(holdouts)]
    for k in held:
        x = (1 + p) ** k - 1
        approx = phi.eval_int(x)
        target = dirichlet_L_neg(k, xi, remove_p=True, p=p)
        if trivial:
            target = target * x
        diff = PadicNumber.from_lift(p, approx.value, prec) - Fraction(target)
        errors.append(diff.valuation_lower_bound())
    # one weight outside the class: cross-checks the interpolation against
    # independently computed p-adic L-values
    k_off = max(held) + 1
    x = (1 + p) ** k_off - 1
    target_off = branch_l_value(k_off, xi, b, p, prec)
    if trivial:
        target_off = target_off * Fraction(x)
    diff = PadicNumber.from_lift(p, phi.eval_int(x).value, prec) - target_off
    errors.append(diff.valuation_lower_bound())
    m_eff = min(min(errors), prec)
    if m_eff < require_m_eff:
        raise CertificationError(
            f"held-out branch error p-valuation {m_eff} below required {require_m_eff}")
    return BranchSeries(xi, b, p, phi.with_m_eff(m_eff), trivial, False)


# ---------------------------------------------------------------------------
# Clearing polynomial and denominator atoms


def atom_poly(kind: str, index: int, p: int, prec: int, n_trunc: int) -> LambdaElement:
    """The clearing-polynomial factor: (1+p)^-j (1+X) - 1 or its quadratic sibling."""
    mod = p**prec
    if kind == "lin":
        u = pow(1 + p, -index, mod)
        return LambdaElement.from_coeffs([u - 1, u], p, prec, n_trunc)
    if kind == "quad":
        u = pow(1 + p, -2 * index, mod)
        return LambdaElement.from_coeffs([u - 1, 2 * u, u], p, prec, n_trunc)
    raise ValueError(kind)


def atom_value(kind: str, index: int, p: int, kappa: int) -> int:
    """Exact integer value of the atom at X = (1+p)^kappa - 1."""
    if kind == "lin":
        return (1 + p) ** (kappa - index) - 1
    if kind == "quad":
        return (1 + p) ** (2 * kappa - 2 * index) - 1
    raise ValueError(kind)


def b_poly_atoms(n: int) -> list[tuple[str, int]]:
    return ([("quad", i) for i in range(1, n // 2 + 1)]
            + [("lin", j) for j in range(n // 2 + 1)])


def b_poly(n: int, p: int, prec: int, n_trunc: int) -> LambdaElement:
    """The pole-clearing polynomial: product of all denominator atoms.

    Checked against its second factored form
    X * prod_i ((1+p)^-i (1+X) - 1)^2 * ((1+p)^-i (1+X) + 1).
    """
    out = LambdaElement.constant(1, p, prec, n_trunc)
    for kind, idx in b_poly_atoms(n):
        out = out * atom_poly(kind, idx, p, prec, n_trunc)
    alt = LambdaElement.from_coeffs([0, 1], p, prec, n_trunc)
    mod = p**prec
    for i in range(1, n // 2 + 1):
        lin = atom_poly("lin", i, p, prec, n_trunc)
        u = pow(1 + p, -i, mod)
        plus = LambdaElement.from_coeffs([u + 1, u], p, prec, n_trunc)
        alt = alt * lin * lin * plus
    assert out.coeffs == alt.coeffs, "clearing polynomial factorizations disagree"
    return out


@dataclass(frozen=True)
class FracLambda:
    """Lambda element divided by an explicit multiset of clearing-factor atoms."""

    num: LambdaElement
    atoms: tuple[tuple[str, int], ...]

    def __mul__(self, other: "FracLambda") -> "FracLambda":
        return FracLambda(self.num * other.num, tuple(sorted(self.atoms + other.atoms)))

    def specialize(self, kappa: int, epsilon_order: int = 1) -> PadicNumber:
        """Value at X = (1+p)^kappa - 1 (tame specialization only)."""
        if epsilon_order != 1:
            raise UnsupportedDomainError(
                "wild characters of order p^m >= p require ramified p-adic extensions")
        p = self.num.p
        x = (1 + p) ** kappa - 1
        val = self.num.eval_certified(x)
        for kind, idx in self.atoms:
            val = val / PadicNumber.from_rational(atom_value(kind, idx, p, kappa), p, self.num.prec)
        return val

    def cleared(self, n: int) -> LambdaElement:
        """Multiply by the full clearing polynomial: all atoms cancel exactly."""
        remaining = list(b_poly_atoms(n))
        for a in self.atoms:
            remaining.remove(a)
        out = self.num
        for kind, idx in remaining:
            out = out * atom_poly(kind, idx, out.p, out.prec, out.n_trunc)
        return out

    def to_json(self):
        d = self.num.to_json()
        d["den_atoms"] = [list(a) for a in self.atoms]
        return d


# ---------------------------------------------------------------------------
# The Lambda-adic family


class LambdaFamily:
    """Interpolated coefficient family at (genus n, branch exponent a, prime p).

    Branch series are built once and shared; coefficients come out as
    FracLambda values whose denominators are atoms of the clearing polynomial.
    """

    def __init__(self, n: int, a: int, p: int, prec: int = 12, n_trunc: int = 8,
                 guard_nodes: int = 4):
        if p == 2 or not is_prime(p):
            raise UnsupportedDomainError("the interpolation prime must be odd")
        self.n = n
        self.a = a % (p - 1)
        self.p = p
        self.prec = prec
        self.n_trunc = n_trunc
        self.guard_nodes = guard_nodes
        self._branches: dict = {}
        self._args: dict = {}

    def branch(self, disc: int, b: int) -> BranchSeries:
        """Branch series for (Kronecker disc) * omega^b, normalized prime to p."""
        spec = CharacterSpec.kronecker_times_teichmuller(disc, b, self.p)
        key = (spec.disc, spec.teich_pow)
        if key not in self._branches:
            xi = CharacterSpec.kronecker(key[0]) if key[0] != 1 else CharacterSpec.trivial()
            self._branches[key] = build_branch(xi, key[1], self.p, self.prec,
                                               self.n_trunc, self.guard_nodes)
        return self._branches[key]

    def _one(self) -> LambdaElement:
        return LambdaElement.constant(1, self.p, self.prec, self.n_trunc)

    def _local_argument(self, l: int, r: int) -> LambdaElement:
        """omega^a(l) l^-(r+1) (1+X)^s(<l>) as a Lambda element."""
        key = (l, r)
        if key not in self._args:
            p, prec = self.p, self.prec
            vfact = sum(valuation(k, p) for k in range(1, self.n_trunc) if k % p == 0)
            work = prec + vfact + 2
            s_l = s_of(angle_bracket(l, p, work + 1), work)
            series = one_plus_x_pow(s_l, prec, self.n_trunc)
            unit = teichmuller(l, p, prec) ** self.a * PadicInt(p, prec, l ** (r + 1)).inverse()
            self._args[key] = series * unit
        return self._args[key]

    def coefficient(self, T: HalfIntegralMatrix) -> FracLambda:
        """The interpolated coefficient at T >= 0 as a FracLambda."""
        n, a, p = self.n, self.a, self.p
        if T.degree != n:
            raise ValueError("matrix degree must equal the genus")
        _, Tp = block_decompose(T)
        r = Tp.degree
        e2 = (r + 1) // 2 - (n + 1) // 2
        mod = p**self.prec
        two = pow(2, e2, mod) if e2 >= 0 else pow(pow(2, -e2, mod), -1, mod)
        num = self._one() * two
        atoms: list = []
        for i in range(r // 2 + 1, n // 2 + 1):
            br = self.branch(1, 2 * a - 2 * i)
            if br.is_zero:
                return FracLambda(LambdaElement.constant(0, p, self.prec, self.n_trunc,
                                                         m_eff=br.m_eff), ())
            num = num * compose(br.phi, atom_poly("quad", i, p, self.prec, self.n_trunc))
            if br.trivial_branch:
                atoms.append(("quad", i))
        if r % 2 == 0:
            d0, f0 = disc_split(Tp) if r else (1, 1)
            br = self.branch(d0, a - r // 2)
            if br.is_zero:
                return FracLambda(LambdaElement.constant(0, p, self.prec, self.n_trunc,
                                                         m_eff=br.m_eff), ())
            num = num * compose(br.phi, atom_poly("lin", r // 2, p, self.prec, self.n_trunc))
            if br.trivial_branch:
                atoms.append(("lin", r // 2))
            support = f0
        else:
            support = abs(disc_of(Tp))
        for l, _ in factor(support):
            if l == p:
                continue
            arg = self._local_argument(l, r)
            F = f_poly(Tp, l)
            acc = LambdaElement.constant(0, p, self.prec, self.n_trunc)
            for c in reversed(F.coeffs):
                acc = acc * arg + LambdaElement.constant(c, p, self.prec, self.n_trunc)
            num = num * acc
        return FracLambda(num, tuple(sorted(atoms)))

    def expansion(self, trace_bound: int, cleared: bool = True) -> QExpansion:
        """Lambda-adic q-expansion; cleared multiplies every entry by the
        clearing polynomial so all values are genuine Lambda elements."""
        coeffs = {}
        for T in enumerate_psd(self.n, trace_bound):
            fr = self.coefficient(T)
            coeffs[T.gram2] = fr.cleared(self.n) if cleared else fr
        meta = {"kind": "lambda-adic", "genus": self.n, "branch": self.a,
                "p": self.p, "precision": self.prec, "x_trunc": self.n_trunc,
                "cleared": cleared}
        return QExpansion(meta, trace_bound, coeffs)


def a_T_lambda(n: int, a: int, T: HalfIntegralMatrix, p: int, prec: int = 12,
               n_trunc: int = 8, family: LambdaFamily | None = None) -> FracLambda:
    fam = family or LambdaFamily(n, a, p, prec, n_trunc)
    return fam.coefficient(T)


def lambda_eisenstein(n: int, a: int, p: int, trace_bound: int, prec: int = 12,
                      n_trunc: int = 8, family: LambdaFamily | None = None) -> QExpansion:
    fam = family or LambdaFamily(n, a, p, prec, n_trunc)
    return fam.expansion(trace_bound)
