"""``serrehom`` command line.

Exit codes: 0 success, 2 input error, 3 precision failure, 4 internal
invariant violation.  JSON output is sorted and newline-terminated so repeated
runs are byte-identical; timing is only included with ``--timing``.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from . import __version__
from .class_poly import MAX_ABS_D, default_precision, hilbert_class_poly
from .errors import PrecisionError, SerreHomError
from .gmodules import (conductor_quotient_module, decompose_C2, free_module,
                       maximal_order_module, order_module, rationalize, unit_module)
from .lattice_tori import CMCurve, hom_torus, maximal_order_isogeny, res_torus
from .modfile import parse_module
from .quad_orders import ImQuadField, QuadOrder, purely_imaginary_generator
from .twisted_ring import GaloisGroup, TwistedRing

EXIT_OK, EXIT_INPUT, EXIT_PRECISION, EXIT_INTERNAL = 0, 2, 3, 4

BUILTIN_MODULES = {
    "regular": free_module,
    "unit": unit_module,
    "order": order_module,
    "maximal": maximal_order_module,
    "maximal-quotient": conductor_quotient_module,
}


class InputError(Exception):
    pass


class InvariantViolation(Exception):
    pass


def _order_from_args(args) -> QuadOrder:
    if args.D is not None:
        if args.d is not None or args.f is not None:
            raise InputError("give either -D or --d/--f, not both")
        if -args.D > MAX_ABS_D:
            raise InputError(f"|D| exceeds {MAX_ABS_D}")
        return QuadOrder.from_discriminant(args.D)
    if args.d is None:
        raise InputError("a discriminant is required (-D or --d/--f)")
    return ImQuadField(args.d).order(args.f or 1)


def _emit(args, command: str, inputs: dict, outputs: dict, text: str, started: float,
          precision: Optional[int] = None) -> None:
    if args.json:
        env = {"command": command, "inputs": inputs, "outputs": outputs,
               "version": __version__, "precision": precision}
        if args.timing:
            env["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
        sys.stdout.write(json.dumps(env, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        if args.timing:
            text += f"\ntime: {time.perf_counter() - started:.3f}s"
        sys.stdout.write(text.rstrip("\n") + "\n")
    sys.stdout.flush()


# ----------------------------------------------------------------------------
# commands

def order_info(o: QuadOrder) -> dict:
    return {"d": str(o.field.d), "f": str(o.f), "D": str(o.disc),
            "fundamental_D": str(o.field.disc), "maximal": o.is_maximal,
            "index_in_maximal": str(o.f),
            "basis": [b.to_json() for b in o.basis],
            "alpha": purely_imaginary_generator(o).to_json()}


def cmd_order_info(args) -> int:
    t0 = time.perf_counter()
    o = _order_from_args(args)
    out = order_info(o)
    alpha = purely_imaginary_generator(o)
    text = (f"order: Z + {o.f}*w in Q(sqrt({o.field.d}))\n"
            f"d={o.field.d} f={o.f} D={o.disc}\n"
            f"fundamental discriminant: {o.field.disc}\n"
            f"purely imaginary generator: {alpha}\n"
            f"[O_F:O]={o.f}" + (" (maximal)" if o.is_maximal else ""))
    _emit(args, "order-info", {"D": str(o.disc)}, out, text, t0)
    return EXIT_OK


def cmd_max_isogeny(args) -> int:
    t0 = time.perf_counter()
    o = _order_from_args(args)
    prec = args.prec or default_precision()
    e = CMCurve.from_order(o, args.action or "conj")
    cert = maximal_order_isogeny(e, certify_j=args.certify_j, precision_bits=prec, threads=args.threads)
    cert.alpha = purely_imaginary_generator(o)
    if not cert.ok:
        failed = sorted(k for k, v in cert.checks.items() if not v)
        raise InvariantViolation(f"certificate checks failed: {failed}")
    text = (f"E : CM by order of discriminant {o.disc} (conductor {o.f})\n"
            f"E': CM by the maximal order (discriminant {o.field.disc})\n"
            f"isogeny E' -> E of degree {cert.degree}, kernel "
            + (" x ".join(f"Z/{d}" for d in cert.kernel.invariants) or "trivial"))
    if args.certify_j:
        text += (f"\nj(E) = {cert.j_target}, j(E') = {cert.j_source}"
                 f"\nH_{o.disc}(j(E)) check: {'pass' if cert.checks['H_target'] else 'FAIL'}"
                 f"\nH_{o.field.disc}(j(E')) check: {'pass' if cert.checks['H_source'] else 'FAIL'}")
    _emit(args, "max-isogeny", {"D": str(o.disc), "certify_j": bool(args.certify_j),
                                "action": e.action},
          cert.to_json(), text, t0, prec if args.certify_j else None)
    return EXIT_OK


def _load_module(args, ring: TwistedRing):
    spec = args.module
    if spec in BUILTIN_MODULES:
        return BUILTIN_MODULES[spec](ring)
    try:
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read module file: {exc}") from exc
    return parse_module(text, ring=ring.coeff_ring, group=ring.group)


def cmd_hom(args) -> int:
    t0 = time.perf_counter()
    o = _order_from_args(args)
    action = args.action or "conj"
    group = GaloisGroup(args.group_order, action)
    e = CMCurve.from_order(o, action, group.order)
    ring = e.ring
    m = _load_module(args, ring)
    res = hom_torus(m, e)
    torus = res.torus
    equals_e = bool(torus is not None and torus.dim == 1 and not res.components.invariants
                    and torus.lattice == e.as_torus().lattice)
    equals_res = bool(torus is not None and group.order == 2 and torus == res_torus(e))
    out = {"dimension": res.dim, "components": res.components.to_json(),
           "torus": torus.to_json() if torus else None,
           "descent": {"present": bool(torus and torus.descent is not None),
                       "involution": bool(torus is None or torus.descent_is_involution()),
                       "stabilizes": bool(torus is None or torus.descent_stabilizes())},
           "equals_E": equals_e, "equals_Res_E": equals_res}
    if group.order == 2:
        dec = decompose_C2(rationalize(m))
        out["decomposition"] = {"r": dec.r, "r_prime": dec.r_prime}
    comps = " x ".join(f"Z/{d}" for d in res.components.invariants) or "trivial"
    text = (f"Hom(M, E) for M = {args.module}, D = {o.disc}, action {action}\n"
            f"dimension: {res.dim}\ncomponent group: {comps}\n"
            f"descent: {'present' if out['descent']['present'] else 'none'}"
            f" (stabilizes lattice: {out['descent']['stabilizes']})")
    if equals_e:
        text += "\nequals E"
    if equals_res:
        text += "\nequals Res E"
    if "decomposition" in out:
        text += f"\ndecomposition: r={out['decomposition']['r']} r'={out['decomposition']['r_prime']}"
    _emit(args, "hom", {"D": str(o.disc), "module": args.module, "action": action}, out, text, t0)
    return EXIT_OK


def cmd_class_poly(args) -> int:
    t0 = time.perf_counter()
    prec = args.prec or default_precision()
    H = hilbert_class_poly(args.D, prec, threads=args.threads)
    out = H.to_json()
    out["degree"] = H.degree
    _emit(args, "class-poly", {"D": str(args.D)}, out, f"H_{args.D}(x) = {H}", t0, H.precision)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest
    t0 = time.perf_counter()
    results = run_selftest()
    failed = [name for name, ok in results if not ok]
    text = "\n".join(f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in results)
    _emit(args, "selftest", {}, {"results": {n: ok for n, ok in results}}, text, t0)
    return EXIT_INTERNAL if failed else EXIT_OK


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="serrehom", description="Lattice computations for Hom(M, E) with CM curves.")
    p.add_argument("--version", action="version", version=f"serrehom {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON envelope")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    common.add_argument("--threads", type=int, default=None, help="worker threads for class polynomials")

    disc = argparse.ArgumentParser(add_help=False)
    disc.add_argument("-D", type=int, default=None, help="discriminant of the order")
    disc.add_argument("--d", type=int, default=None, help="squarefree d < 0 of the field")
    disc.add_argument("--f", type=int, default=None, help="conductor")

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("order-info", parents=[common, disc], help="describe an order")
    s.set_defaults(func=cmd_order_info)

    s = sub.add_parser("max-isogeny", parents=[common, disc], help="isogeny from a maximal-order curve")
    s.add_argument("--certify-j", action="store_true", help="check j-invariants against class polynomials")
    s.add_argument("--prec", type=int, default=None, help="working precision in bits")
    s.add_argument("--action", choices=("conj", "trivial"), default=None)
    s.set_defaults(func=cmd_max_isogeny)

    s = sub.add_parser("hom", parents=[common, disc], help="lattice model of Hom(M, E)")
    s.add_argument("--module", required=True,
                   help="module file, or one of: " + ", ".join(BUILTIN_MODULES))
    s.add_argument("--action", choices=("conj", "trivial"), default=None)
    s.add_argument("--group-order", type=int, default=2, choices=(1, 2))
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("class-poly", parents=[common], help="Hilbert class polynomial")
    s.add_argument("-D", type=int, required=True)
    s.add_argument("--prec", type=int, default=None, help="working precision in bits")
    s.set_defaults(func=cmd_class_poly)

    s = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except PrecisionError as exc:
        sys.stderr.write(f"precision failure: {exc}\n")
        return EXIT_PRECISION
    except (InvariantViolation, AssertionError) as exc:
        sys.stderr.write(f"internal invariant violated: {exc}\n")
        return EXIT_INTERNAL
    except (InputError, SerreHomError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
