"""Command line entry point.

Subcommands: check, normalize, mc, translate, sem-eval, sep-demo.
Exit codes: 0 success, 1 type errors, 2 I/O error, 3 parse error,
4 totality error (CTL on a non-total structure), 5 untranslatable formula.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import mulogic, reduce, setmodel
from .check import NMTypeError, check_theory
from .mulogic import (
    FormulaError, KripkeStructure, TotalityError, UntranslatableError,
    ctl_eval, dec, enc, mc_mu, mu_pretty, parse_ctl_formula, parse_mu_formula,
    separation_demo,
)
from .surface import ParseError, parse_term, parse_theory, pretty_print

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_TOTALITY = 4
EXIT_UNTRANSLATABLE = 5

DEFAULT_FUEL = 10_000
DEFAULT_MORPHISM_BOUND = 8
DEFAULT_DEPTH = 6


def default_fuel() -> int:
    env = os.environ.get("NMDEKL_FUEL")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_FUEL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nmdekl",
                                 description="three-layer trace-knowledge "
                                             "checker and model-checking "
                                             "bridge")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fuel", type=int, default=None,
                       help="reduction step budget")
        p.add_argument("--format", choices=["human", "machine"],
                       default="human")

    p = sub.add_parser("check", help="type-check a theory file")
    p.add_argument("path")
    common(p)

    p = sub.add_parser("normalize", help="normalize a term")
    p.add_argument("term")
    common(p)

    p = sub.add_parser("mc", help="model-check a formula on a structure")
    p.add_argument("kripke")
    p.add_argument("formula")
    p.add_argument("--state", default=None)
    common(p)

    p = sub.add_parser("translate", help="translate between formula languages")
    p.add_argument("direction", choices=["enc", "dec"])
    p.add_argument("formula")
    common(p)

    p = sub.add_parser("sem-eval", help="evaluate a term in a set model")
    p.add_argument("instance")
    p.add_argument("term")
    p.add_argument("--morphism-bound", type=int,
                   default=DEFAULT_MORPHISM_BOUND)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    common(p)

    p = sub.add_parser("sep-demo", help="run the two-model separation demo")
    common(p)
    return ap


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def cmd_check(args) -> int:
    source = _read(args.path)
    try:
        theory = parse_theory(source)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    report = check_theory(theory, fuel=args.fuel or default_fuel())
    for r in report.results:
        if args.format == "machine":
            print(f"{r.label} {'ok' if r.ok else 'error'} {r.kind}")
        elif r.ok:
            print(f"{r.label}: ok")
        else:
            print(f"{r.label}: {r.error.kind}: {r.error.message}")
    return EXIT_OK if report.ok else EXIT_TYPE


def cmd_normalize(args) -> int:
    try:
        t = parse_term(args.term)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    out = reduce.normalize(t, args.fuel or default_fuel())
    if isinstance(out, reduce.FuelExhausted):
        print(f"FUEL-EXHAUSTED after {out.steps_used} steps: "
              f"{pretty_print(out.partial)}")
    else:
        print(pretty_print(out.term))
    return EXIT_OK


_CTL_MARKERS = set(mulogic._CTL_UNARY) | {"E", "A", "["}


def _is_ctl(formula: str) -> bool:
    try:
        toks = mulogic._f_tokens(formula)
    except FormulaError:
        return False
    return any(t in _CTL_MARKERS for t in toks)


def cmd_mc(args) -> int:
    try:
        M = KripkeStructure.load(args.kripke)
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as e:
        print(f"parse error in structure file: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if _is_ctl(args.formula):
            sat = ctl_eval(M, parse_ctl_formula(args.formula))
        else:
            sat = mc_mu(M, parse_mu_formula(args.formula))
    except FormulaError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except TotalityError as e:
        print(f"totality error: {e}", file=sys.stderr)
        return EXIT_TOTALITY
    if args.state is not None:
        print("true" if args.state in sat else "false")
    else:
        print(" ".join(sorted(sat)))
    return EXIT_OK


def cmd_translate(args) -> int:
    try:
        if args.direction == "enc":
            phi = parse_mu_formula(args.formula)
            print(pretty_print(enc(phi)))
        else:
            term = parse_term(args.formula)
            print(mu_pretty(dec(term)))
    except (FormulaError, ParseError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except UntranslatableError as e:
        print(f"untranslatable: {e}", file=sys.stderr)
        return EXIT_UNTRANSLATABLE
    return EXIT_OK


def render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, frozenset):
        return "{" + ", ".join(sorted(render_value(x) for x in v)) + "}"
    if isinstance(v, setmodel.FuncTable):
        inner = "; ".join(f"{render_value(a)} -> {render_value(b)}"
                          for a, b in v.pairs)
        return "{" + inner + "}"
    if isinstance(v, tuple):
        return "path(" + ", ".join("|".join(g) for g in v) + ")"
    return str(v)


def cmd_sem_eval(args) -> int:
    try:
        inst = setmodel.SetModelInstance.load(args.instance,
                                              bound=args.morphism_bound)
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as e:
        print(f"parse error in instance file: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        t = parse_term(args.term)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        value = setmodel.eval_term(inst, (), t)
    except setmodel.FragmentError as e:
        print(f"fragment error: {e}", file=sys.stderr)
        return EXIT_TYPE
    print(render_value(value))
    return EXIT_OK


def cmd_sep_demo(args) -> int:
    _, _, phi_desc, report = separation_demo()
    yn = "yes" if report.underlying_equal else "no"
    print(f"underlying_equal: {yn}")
    print(f"phi: M1={str(report.phi_m1).lower()} "
          f"M2={str(report.phi_m2).lower()}")
    print(f"sampled mu-agreement: {report.samples_agreeing}/"
          f"{report.samples_total}")
    if args.format == "human":
        print(f"phi is {phi_desc} at tau0 = {report.tau0}")
    return EXIT_OK if report.ok else EXIT_TYPE


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "check": cmd_check,
        "normalize": cmd_normalize,
        "mc": cmd_mc,
        "translate": cmd_translate,
        "sem-eval": cmd_sem_eval,
        "sep-demo": cmd_sep_demo,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
