"""Fourier coefficients of Siegel Eisenstein series and their p-stabilization.

Coefficients are computed per matrix from the closed product formula: a power
of 2, a string of zeta/L-values at negative integers, and local polynomial
factors at the primes dividing the discriminant data of the nondegenerate
block.  The semi-ordinary stabilization is available both as its closed form
(Euler factors at p removed, local product restricted away from p) and as the
action of a linear combination of U_p powers on a q-expansion; the two must
agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (CharacterSpec, PadicNumber, dirichlet_L_neg, factor,
                    is_prime)
from .errors import BoundError, UnsupportedDomainError
from .quadform import (HalfIntegralMatrix, block_decompose, disc_of,
                       disc_split, enumerate_psd, f_poly)
from . import polyutil as pu


@dataclass(frozen=True)
class EisensteinSpec:
    """Genus, weight and Nebentypus of a Siegel Eisenstein series."""

    genus: int
    weight: int
    character: CharacterSpec = field(default_factory=CharacterSpec.trivial)

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be >= 1")
        if self.weight <= self.genus + 1:
            raise ValueError("weight must exceed genus + 1")
        if self.character.sign() != (-1) ** self.weight:
            raise ValueError("character parity must match the weight")

    @property
    def level(self) -> int:
        return self.character.conductor

    def to_json(self):
        return {"genus": self.genus, "weight": self.weight,
                "character": self.character.to_json()}


def _two_power(n: int, r: int) -> Fraction:
    return Fraction(2) ** ((r + 1) // 2 - (n + 1) // 2)


def _zeta_string(n: int, r: int, kappa: int, chi_sq: CharacterSpec,
                 remove_p: bool, p: int | None, prec: int | None):
    """Product of L(1-2k+2i, chi^2) over i = floor(r/2)+1 .. floor(n/2)."""
    out: object = Fraction(1)
    for i in range(r // 2 + 1, n // 2 + 1):
        out = out * dirichlet_L_neg(2 * kappa - 2 * i, chi_sq, remove_p=remove_p,
                                    p=p, prec=prec)
    return out


def _local_product(Tp: HalfIntegralMatrix, kappa: int, chi: CharacterSpec,
                   skip_p: int | None, prec: int | None):
    """Product of F_l(T'; chi(l) l^(kappa-r-1)) over l dividing the square
    cofactor (even rank) or the discriminant (odd rank), skipping l = p."""
    r = Tp.degree
    if r == 0:
        return Fraction(1)
    if r % 2 == 0:
        _, f0 = disc_split(Tp)
        support = f0
    else:
        support = abs(disc_of(Tp))
    out: object = Fraction(1)
    for l, _ in factor(support):
        if l == skip_p:
            continue
        x: object = Fraction(l) ** (kappa - r - 1)
        if not chi.is_trivial:
            if chi.is_rational:
                x = chi.value(l) * x
            else:
                w = chi.padic_value(l, chi.p, prec)
                x = PadicNumber.from_lift(chi.p, w.value * l ** (kappa - r - 1), prec)
        out = out * f_poly(Tp, l).eval(x)
    return out


def _kronecker_L_factor(Tp: HalfIntegralMatrix, kappa: int, chi: CharacterSpec,
                        remove_p: bool, p: int | None, prec: int | None):
    """L(1 - kappa + r/2, (d/.) chi) for even rank r with fundamental d."""
    r = Tp.degree
    d0, _ = disc_split(Tp)
    if chi.is_trivial:
        twisted = CharacterSpec.kronecker(d0)
    elif chi.is_rational:
        raise UnsupportedDomainError("quadratic Nebentypus twists are not supported")
    else:
        twisted = CharacterSpec.kronecker_times_teichmuller(d0, chi.teich_pow, chi.p)
    return dirichlet_L_neg(kappa - r // 2, twisted, remove_p=remove_p, p=p, prec=prec)


def _coefficient(n: int, kappa: int, T: HalfIntegralMatrix, chi: CharacterSpec,
                 remove_p: bool, p: int | None, prec: int | None):
    if T.degree != n:
        raise ValueError("matrix degree must equal the genus")
    _, Tp = block_decompose(T)
    r = Tp.degree
    val: object = _two_power(n, r)
    val = val * _zeta_string(n, r, kappa, chi.squared(), remove_p, p, prec)
    if r % 2 == 0:
        val = val * _kronecker_L_factor(Tp, kappa, chi, remove_p, p, prec)
    val = val * _local_product(Tp, kappa, chi, p if remove_p else None, prec)
    if isinstance(val, PadicNumber) or chi.is_rational:
        return val
    return PadicNumber.from_rational(val, chi.p, prec)


def constant_term(spec: EisensteinSpec, prec: int | None = None):
    """Coefficient at T = 0: the power of 2 times L(1-k, chi) prod L(1-2k+2i, chi^2)."""
    chi = spec.character
    zero = HalfIntegralMatrix.zero(spec.genus)
    return _coefficient(spec.genus, spec.weight, zero, chi, False, None, prec)


def fourier_coeff(spec: EisensteinSpec, T: HalfIntegralMatrix) -> Fraction:
    """Level-1 coefficient at T >= 0 (trivial character, even weight)."""
    if not spec.character.is_trivial:
        raise ValueError("fourier_coeff is the level-1 path; use fourier_coeff_chi")
    if spec.weight % 2:
        raise ValueError("level-1 series need even weight")
    return _coefficient(spec.genus, spec.weight, T, CharacterSpec.trivial(),
                        False, None, None)


def fourier_coeff_chi(spec: EisensteinSpec, T: HalfIntegralMatrix,
                      prec: int) -> PadicNumber:
    """Coefficient at T for a Teichmueller-power Nebentypus of conductor p.

    Requires chi^2 nontrivial; values are embedded in Q_p at the given
    precision.  The local product runs over l != p and the L-values carry
    their Euler factors at p removed (vacuously, as p divides the conductor).
    """
    chi = spec.character
    if chi.is_rational:
        raise ValueError("fourier_coeff_chi needs a Teichmueller-power character")
    if chi.squared().is_trivial:
        raise UnsupportedDomainError("chi^2 must be nontrivial for this coefficient formula")
    return _coefficient(spec.genus, spec.weight, T, chi, True, chi.p, prec)


def stabilized_coeff(n: int, kappa: int, p: int, T: HalfIntegralMatrix) -> Fraction:
    """Closed form of the semi-ordinary stabilized coefficient at T.

    The zeta/L string has its Euler factors at p removed and the local product
    skips l = p; at T = 0 this is the stabilized constant term.
    """
    if p == 2 or not is_prime(p):
        raise UnsupportedDomainError("stabilization requires an odd prime")
    if kappa % 2 or kappa <= n + 1:
        raise ValueError("weight must be even and exceed genus + 1")
    return _coefficient(n, kappa, T, CharacterSpec.trivial(), True, p, None)


# ---------------------------------------------------------------------------
# q-expansions and the U_p operator


@dataclass
class QExpansion:
    """Formal q-expansion: finite map from half-integral matrices to values.

    `bound` is the trace bound the index set was enumerated to.  Reading past
    the bound, or a missing index inside it, raises; there are no silent
    zeros.
    """

    spec: dict
    bound: int
    coeffs: dict

    def coefficient(self, T: HalfIntegralMatrix):
        if T.trace_t > self.bound:
            raise BoundError(f"index trace {T.trace_t} exceeds expansion bound {self.bound}")
        try:
            return self.coeffs[T.gram2]
        except KeyError:
            raise BoundError(f"insufficient index bound: no coefficient at {T}") from None

    def items_sorted(self):
        def key(g):
            M = HalfIntegralMatrix(g)
            return (M.trace_t, tuple(M.gram2[i][i] for i in range(M.degree)), g)
        return [(HalfIntegralMatrix(g), self.coeffs[g]) for g in sorted(self.coeffs, key=key)]

    def map_values(self, fn, spec=None) -> "QExpansion":
        return QExpansion(spec or dict(self.spec), self.bound,
                          {g: fn(v) for g, v in self.coeffs.items()})


def eisenstein_expansion(spec: EisensteinSpec, trace_bound: int,
                         support=None, prec: int | None = None) -> QExpansion:
    """Expansion of the Eisenstein series itself.

    `support` may restrict the index set to an explicit list of matrices
    (still recorded under the same trace bound); by default every positive
    semidefinite index up to the bound is materialized.
    """
    mats = support if support is not None else enumerate_psd(spec.genus, trace_bound)
    coeffs = {}
    for T in mats:
        if spec.character.is_trivial:
            coeffs[T.gram2] = fourier_coeff(spec, T)
        else:
            coeffs[T.gram2] = fourier_coeff_chi(spec, T, prec)
    meta = {"kind": "eisenstein", **spec.to_json()}
    return QExpansion(meta, trace_bound, coeffs)


def stabilized_expansion(n: int, kappa: int, p: int, trace_bound: int,
                         support=None) -> QExpansion:
    mats = support if support is not None else enumerate_psd(n, trace_bound)
    coeffs = {T.gram2: stabilized_coeff(n, kappa, p, T) for T in mats}
    meta = {"kind": "stabilized", "genus": n, "weight": kappa, "p": p}
    return QExpansion(meta, trace_bound, coeffs)


def u_pn_apply(expansion: QExpansion, p: int) -> QExpansion:
    """U_p action on expansions: new coefficient at T is the old one at pT.

    The index bound shrinks by a factor of p; missing scaled indices raise.
    """
    new_bound = expansion.bound // p
    out = {}
    for g in expansion.coeffs:
        T = HalfIntegralMatrix(g)
        if T.trace_t <= new_bound:
            out[g] = expansion.coefficient(T.scale(p))
    meta = dict(expansion.spec)
    meta["u_p_applied"] = meta.get("u_p_applied", 0) + 1
    return QExpansion(meta, new_bound, out)


def stabilization_scalars(n: int, kappa: int, p: int) -> tuple[list, Fraction]:
    """Elementary-symmetric operator weights and the closed scaling constant.

    Returns (s, c) with s[m] the m-th elementary symmetric function of
    p^(j(2n-j+1)/2 + j(kappa-n-1)), j = 1..n, and c = P(X,1)/R(X,1) at
    X = p^(kappa-n-1).
    """
    sig = [p ** (j * (2 * n - j + 1) // 2 + j * (kappa - n - 1)) for j in range(1, n + 1)]
    s = [1]
    for x in sig:
        s = [1] + [s[m] + x * s[m - 1] for m in range(1, len(s))] + [x * s[-1]]
        s = s[:n + 1] if len(s) > n + 1 else s
    while len(s) < n + 1:
        s.append(0)
    X = Fraction(p) ** (kappa - n - 1)
    P = (1 - p**n * X) * _prod(1 - p ** (2 * n - 2 * i + 1) * X**2 for i in range(1, n // 2 + 1))
    R = _prod(1 - p ** (j * (2 * n - j + 1) // 2) * X**j for j in range(1, n + 1))
    return s, P / R


def _prod(it):
    out = Fraction(1)
    for x in it:
        out *= x
    return out


def stabilize_via_operator(n: int, kappa: int, p: int,
                           source: QExpansion) -> QExpansion:
    """Stabilization as an operator: the reflected R-polynomial in U_p, scaled
    by P/R at X = p^(kappa-n-1).  The source expansion must contain every
    p^j-scaled index, j <= n, of the targets."""
    if p == 2 or not is_prime(p):
        raise UnsupportedDomainError("stabilization requires an odd prime")
    s, c = stabilization_scalars(n, kappa, p)
    new_bound = source.bound // p**n
    out = {}
    for g in source.coeffs:
        T = HalfIntegralMatrix(g)
        if T.trace_t > new_bound:
            continue
        acc = Fraction(0)
        for m in range(n + 1):
            term = s[m] * source.coefficient(T.scale(p ** (n - m)))
            acc = acc + (term if m % 2 == 0 else -term)
        out[g] = c * acc
    meta = {"kind": "stabilized-operator", "genus": n, "weight": kappa, "p": p}
    return QExpansion(meta, new_bound, out)


def stabilize_via_qstar(n: int, kappa: int, p: int, source: QExpansion) -> QExpansion:
    """Alternate stabilization through the reduced spinor Hecke polynomial.

    Applies the reflected Q*-polynomial in U_p and scales by P(X,1)/Q*(1);
    must reproduce stabilize_via_operator exactly.
    """
    from .hecke import q_star  # local import; hecke depends on nothing here

    if p == 2 or not is_prime(p):
        raise UnsupportedDomainError("stabilization requires an odd prime")
    q = q_star(n, kappa, p).coeffs
    deg = len(q) - 1
    X = Fraction(p) ** (kappa - n - 1)
    P = (1 - p**n * X) * _prod(1 - p ** (2 * n - 2 * i + 1) * X**2 for i in range(1, n // 2 + 1))
    qs1 = sum(q)
    c = P / qs1
    new_bound = source.bound // p**deg
    out = {}
    for g in source.coeffs:
        T = HalfIntegralMatrix(g)
        if T.trace_t > new_bound:
            continue
        acc = Fraction(0)
        for k in range(deg + 1):
            acc += q[k] * source.coefficient(T.scale(p ** (deg - k)))
        out[g] = c * acc
    meta = {"kind": "stabilized-qstar", "genus": n, "weight": kappa, "p": p}
    return QExpansion(meta, new_bound, out)


def scaled_support(targets, p: int, max_power: int) -> list[HalfIntegralMatrix]:
    """All p^j T for T in targets and j <= max_power, deduplicated, for
    building operator sources without materializing a full dense bound."""
    seen = {}
    for T in targets:
        for j in range(max_power + 1):
            S = T.scale(p**j)
            seen[S.gram2] = S
    return list(seen.values())


@dataclass(frozen=True)
class StabilizationPolys:
    """The bivariate stabilization polynomials and the reflected form."""

    n: int
    p: int
    P: dict
    R: dict
    R_reflected: dict

    def check_reflection(self) -> bool:
        n = self.n
        ref = {(i, n - j): c for (i, j), c in self.R.items()}
        return ref == self.R_reflected

    def check_divisibility(self) -> bool:
        Rx = pu.b_to_univariate_in_x(self.R, 1)
        Px = pu.b_to_univariate_in_x(self.P, 1)
        q, rem = pu.pdivmod_frac(Rx, Px)
        return not rem


def stabilization_polys(n: int, p: int) -> StabilizationPolys:
    P = pu.bprod([{(0, 0): 1, (1, 1): -(p**n)}]
                 + [{(0, 0): 1, (2, 1): -(p ** (2 * n - 2 * i + 1))} for i in range(1, n // 2 + 1)])
    R = pu.bprod([{(0, 0): 1, (j, 1): -(p ** (j * (2 * n - j + 1) // 2))} for j in range(1, n + 1)])
    Rr = pu.bprod([{(0, 1): 1, (j, 0): -(p ** (j * (2 * n - j + 1) // 2))} for j in range(1, n + 1)])
    return StabilizationPolys(n, p, P, R, Rr)
