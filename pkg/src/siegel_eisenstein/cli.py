"""Command-line interface.

Subcommands: coeff, stabilize, satake, lambda, verify.  Configuration
precedence is flags > environment (prefix SIEGEL_) > defaults.  Exit codes:
0 success, 1 verification failure, 2 usage error, 3 scope/bounds error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .arith import PadicNumber, rational_to_str
from .errors import BoundError, CertificationError, IntegralityError, UnsupportedDomainError
from .quadform import HalfIntegralMatrix, enumerate_psd
from .eisenstein import (EisensteinSpec, QExpansion, eisenstein_expansion,
                         fourier_coeff, scaled_support, stabilize_via_operator,
                         stabilized_coeff)
from .hecke import divisibility_check, hecke_polynomial, q_star, satake_params
from .lambda_adic import FracLambda, LambdaElement, LambdaFamily
from .verify import run_suite

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SCOPE = 0, 1, 2, 3


def _env_default(name: str, fallback=None, cast=int):
    raw = os.environ.get(f"SIEGEL_{name.upper()}")
    if raw is None:
        return fallback
    return cast(raw)


def parse_matrix(text: str) -> HalfIntegralMatrix:
    """Rows of 2T, semicolon-separated; entries comma-separated."""
    try:
        rows = [[int(x) for x in row.split(",")] for row in text.split(";")]
        return HalfIntegralMatrix.from_rows(rows)
    except (ValueError, IndexError) as e:
        raise argparse.ArgumentTypeError(f"bad matrix {text!r}: {e}") from None


def encode_value(v):
    if isinstance(v, (int, Fraction)):
        return rational_to_str(Fraction(v))
    if isinstance(v, (PadicNumber, LambdaElement, FracLambda)):
        return v.to_json()
    raise TypeError(type(v))


def expansion_document(exp: QExpansion) -> dict:
    return {"spec": exp.spec, "bound": exp.bound,
            "entries": [{"G": T.to_json(), "value": encode_value(v)}
                        for T, v in exp.items_sorted()]}


def _emit(doc: dict, fmt: str):
    if fmt == "json":
        print(json.dumps(doc, indent=2, default=str))
        return
    entries = doc.get("entries", [])
    head = {k: v for k, v in doc.items() if k != "entries"}
    for k, v in head.items():
        print(f"# {k}: {v}")
    if entries:
        width = max(len(_fmt_matrix(e["G"])) for e in entries)
        for e in entries:
            print(f"{_fmt_matrix(e['G']):<{width}}  {_fmt_value(e['value'])}")


def _fmt_matrix(rows) -> str:
    return "[" + "; ".join(",".join(str(x) for x in r) for r in rows) + "]"


def _fmt_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, dict) and "valuation" in v:
        return f"{v['unit']}*{v['p']}^{v['valuation']} + O({v['p']}^{v['valuation'] + v['precision']})"
    if isinstance(v, dict) and "zero" in v:
        return f"O({v['p']}^{v['precision']})"
    if isinstance(v, dict) and "coeffs" in v:
        return "[" + ", ".join(str(c) for c in v["coeffs"]) + f"] mod ({v['p']}^{v['m_eff']}, X^{v['x_trunc']})"
    return str(v)


def _coeff_worker(args):
    n, kappa, g = args
    return g, fourier_coeff(EisensteinSpec(n, kappa), HalfIntegralMatrix(g))


def cmd_coeff(args) -> int:
    spec = EisensteinSpec(args.genus, args.weight)
    if args.matrix is not None:
        doc = {"spec": spec.to_json(),
               "entries": [{"G": args.matrix.to_json(),
                            "value": encode_value(fourier_coeff(spec, args.matrix))}]}
        _emit(doc, args.format)
        return EXIT_OK
    mats = enumerate_psd(args.genus, args.trace_bound)
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            pairs = list(ex.map(_coeff_worker,
                                [(args.genus, args.weight, T.gram2) for T in mats]))
        coeffs = dict(pairs)
    else:
        coeffs = {T.gram2: fourier_coeff(spec, T) for T in mats}
    exp = QExpansion({"kind": "eisenstein", **spec.to_json()}, args.trace_bound, coeffs)
    _emit(expansion_document(exp), args.format)
    return EXIT_OK


def cmd_stabilize(args) -> int:
    n, kappa, p = args.genus, args.weight, args.p
    bound = args.trace_bound
    targets = (enumerate_psd(n, bound) if args.matrix is None else [args.matrix])
    src = eisenstein_expansion(EisensteinSpec(n, kappa), bound * p**n,
                               support=scaled_support(targets, p, n))
    op = stabilize_via_operator(n, kappa, p, src)
    closed = {T.gram2: stabilized_coeff(n, kappa, p, T) for T in targets}
    agree = all(op.coefficient(T) == closed[T.gram2] for T in targets)
    exp = QExpansion({"kind": "stabilized", "genus": n, "weight": kappa, "p": p,
                      "paths_agree": agree}, bound, closed)
    _emit(expansion_document(exp), args.format)
    return EXIT_OK if agree else EXIT_VERIFY


def cmd_satake(args) -> int:
    doc = {"params": [], "divisibility": []}
    params = satake_params(args.genus, args.weight, args.p)
    doc["params"] = params.to_json()
    doc["hecke_polynomial"] = hecke_polynomial(params).to_json()
    doc["reduced_polynomial"] = q_star(args.genus, args.weight, args.p).to_json()
    doc["divisibility"] = divisibility_check(args.genus, args.weight, args.p)
    _emit(doc, args.format)
    return EXIT_OK if doc["divisibility"] else EXIT_VERIFY


def cmd_lambda(args) -> int:
    fam = LambdaFamily(args.genus, args.a, args.p, args.pprec, args.xprec)
    exp = fam.expansion(args.trace_bound, cleared=not args.raw)
    doc = expansion_document(exp)
    doc["branch_certificates"] = {
        f"disc={k[0]},b={k[1]}": br.m_eff for k, br in fam._branches.items()}
    _emit(doc, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite)
    failed = 0
    for r in results:
        print(f"[{r.status}] {r.suite}: {r.name} -- {r.detail}")
        if not r.passed and not r.blocked:
            failed += 1
    blocked = sum(1 for r in results if r.blocked)
    print(f"# {len(results)} checks, {failed} failed, {blocked} blocked")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="siegel",
        description="Exact Siegel Eisenstein Fourier coefficients, semi-ordinary "
                    "p-stabilization, and Lambda-adic interpolation")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, weight=True):
        sp.add_argument("--genus", type=int, default=_env_default("genus", 1))
        if weight:
            sp.add_argument("--weight", type=int, default=_env_default("weight", 4))
        sp.add_argument("--format", choices=("json", "table"),
                        default=_env_default("format", "table", str))
        sp.add_argument("--trace-bound", type=int, default=_env_default("trace_bound", 3))
        sp.add_argument("--matrix", type=parse_matrix, default=None,
                        help="rows of 2T, e.g. '2,1;1,2'")
        sp.add_argument("--jobs", type=int, default=_env_default("jobs", 1))

    sp = sub.add_parser("coeff", help="Fourier coefficients at level 1")
    common(sp)
    sp.set_defaults(fn=cmd_coeff)

    sp = sub.add_parser("stabilize", help="semi-ordinary p-stabilized expansion (both paths)")
    common(sp)
    sp.add_argument("--p", type=int, default=_env_default("p", 5))
    sp.set_defaults(fn=cmd_stabilize)

    sp = sub.add_parser("satake", help="Satake parameters and spinor Hecke polynomial")
    common(sp)
    sp.add_argument("--p", type=int, default=_env_default("p", 2))
    sp.set_defaults(fn=cmd_satake)

    sp = sub.add_parser("lambda", help="Lambda-adic coefficient family")
    common(sp, weight=False)
    sp.add_argument("--p", type=int, default=_env_default("p", 5))
    sp.add_argument("--a", type=int, default=_env_default("a", 0))
    sp.add_argument("--pprec", type=int, default=_env_default("pprec", 12))
    sp.add_argument("--xprec", type=int, default=_env_default("xprec", 8))
    sp.add_argument("--raw", action="store_true",
                    help="emit coefficients with denominator atoms instead of clearing them")
    sp.set_defaults(fn=cmd_lambda)

    sp = sub.add_parser("verify", help="run a named verification suite")
    sp.add_argument("--suite", choices=("local", "stab", "proof", "satake", "lambda", "all"),
                    default="all")
    sp.add_argument("--p", type=int, default=_env_default("p", 5))
    sp.add_argument("--a", type=int, default=_env_default("a", 0))
    sp.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (BoundError, UnsupportedDomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCOPE
    except (ValueError, IntegralityError, CertificationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
