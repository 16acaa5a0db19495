"""Command-line front end: ``fca <subcommand> ...``.

Exit codes: 0 success, 1 constraint failure or no valid automaton,
2 malformed input, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from . import constraints, discrimination, groups, matrixrep, rules
from .errors import (
    FCAError,
    MissingAssignment,
    NoSolution,
    NotNormal,
    NotUnitary,
    NullSpaceDimension,
    OrderingMismatch,
)
from .serialization import canonical_dumps, parse_assignment

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _parse_params(text: str | None) -> dict:
    if not text:
        return {}
    if text.startswith("@"):
        data = _load_json(text[1:])
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed --params JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("--params must be a JSON object")
    return data


def _emit(payload, out_path: str | None) -> None:
    text = canonical_dumps(payload) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _case(args) -> str:
    if not args.group:
        raise InputError("--group is required")
    try:
        return rules.normalize_case(args.group)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _rule_from_args(args) -> rules.LocalRule:
    if getattr(args, "rule", None):
        try:
            return rules.LocalRule.from_json(_load_json(args.rule))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid rule JSON: {exc}") from exc
    if args.family is None:
        raise InputError("give --rule or --group with --family")
    return rules.family_rule(_case(args), args.family, _parse_params(args.params))


def _template_from_args(args) -> rules.LocalRule:
    if getattr(args, "rule", None):
        try:
            return rules.LocalRule.from_json(_load_json(args.rule))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid rule JSON: {exc}") from exc
    case = _case(args)
    kind = args.template
    if kind == "support":
        return rules.support_template(case)
    np_flag = None if kind == "default" else kind == "np"
    return rules.case_template(case, np_flag)


# subcommands ------------------------------------------------------------------


def cmd_derive(args) -> int:
    template = _template_from_args(args)
    system = constraints.derive_constraints(template, anchored=not args.all_pairs)
    _emit(system.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.system:
        try:
            system = constraints.ConstraintSystem.from_json(_load_json(args.system))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"invalid system JSON: {exc}") from exc
    else:
        system = constraints.derive_constraints(_template_from_args(args))
    if args.assign:
        try:
            assignments = [parse_assignment(_load_json(args.assign))]
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    elif args.group and args.family is not None:
        case = _case(args)
        if args.samples:
            rng = random.Random(os.environ.get("FCA_SEED", "0"))
            params = [rules.random_family_params(case, args.family, rng) for _ in range(args.samples)]
        else:
            params = [_parse_params(args.params)]
        names = system.variables()
        assignments = []
        for p in params:
            values = rules.family_values(case, args.family, p)
            full = {n: 0j for n in names}
            full.update(values)
            assignments.append(full)
    else:
        raise InputError("give --assign or --group/--family")
    reports = [constraints.verify_solution(system, a, args.tol) for a in assignments]
    payload = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
    _emit(payload, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_unitary(args) -> int:
    rule = _rule_from_args(args)
    U = matrixrep.synthesize_unitary(rule, tol=args.tol)
    _emit(U.to_json(), args.out)
    return EXIT_OK


def _load_matrix(path: str) -> matrixrep.EvolutionMatrix:
    try:
        return matrixrep.EvolutionMatrix.from_json(_load_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid matrix JSON in {path}: {exc}") from exc


def cmd_blocks(args) -> int:
    if args.u:
        U = _load_matrix(args.u)
        scheme = args.scheme or args.group
    else:
        U = matrixrep.synthesize_unitary(_rule_from_args(args), tol=args.tol)
        scheme = args.scheme or _case(args)
    if not scheme:
        raise InputError("--scheme is required with --u")
    blocks = matrixrep.sector_blocks(U, rules.normalize_case(scheme))
    payload = {
        k: ([[[float(z.real), float(z.imag)] for z in row] for row in v] if hasattr(v, "shape") else v)
        for k, v in blocks.items()
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_discriminate(args) -> int:
    if args.u0 and args.u1:
        U0, U1 = _load_matrix(args.u0), _load_matrix(args.u1)
    elif args.group and args.family is not None:
        U0, U1 = discrimination.linearized_pair(_rule_from_args(args))
    else:
        raise InputError("give --u0/--u1 or --group/--family")
    Ut = discrimination.relative_unitary(U0, U1)
    report = discrimination.analyze(Ut, tol=args.tol, parity_restricted=args.parity_restricted)
    _emit(report.to_json(emit_polygon=args.emit_polygon), args.out)
    return EXIT_OK


def cmd_regular(args) -> int:
    try:
        offsets = [x.strip() for x in args.offsets.split(",") if x.strip()]
        if args.base.upper() == "Z":
            if args.quotient is None:
                raise InputError("--quotient is required for base Z")
            spec = groups.QuotientSpec("Z", int(args.quotient))
            offsets = [int(x) for x in offsets]
        else:
            if not args.kernel:
                raise InputError("--kernel is required for a finite base")
            kernel = [x.strip() for x in args.kernel.split(",") if x.strip()]
            spec = groups.QuotientSpec(groups.build_group(args.base), kernel)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit({"regular": groups.is_regular(offsets, spec)}, args.out)
    return EXIT_OK


# parser ---------------------------------------------------------------------------


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fca", description="Fermionic cellular automaton toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol=1e-10):
        p.add_argument("--tol", type=_positive_float, default=tol)
        p.add_argument("--out", help="write JSON here instead of stdout")

    def rule_flags(p):
        p.add_argument("--group", help="case study: z2xz2 or z5")
        p.add_argument("--family", type=int)
        p.add_argument("--params", help="family parameters as JSON (or @file)")
        p.add_argument("--rule", help="rule JSON file")

    p = sub.add_parser("derive", help="derive the CAR-preservation system")
    common(p)
    p.add_argument("--group")
    p.add_argument("--rule", help="symbolic rule JSON file")
    p.add_argument("--template", choices=["default", "np", "general", "support"], default="default")
    p.add_argument("--all-pairs", action="store_true", help="do not reduce to pairs at the identity")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("verify", help="check an assignment against a system")
    common(p)
    p.add_argument("--system")
    p.add_argument("--assign")
    rule_flags(p)
    p.add_argument("--template", choices=["default", "np", "general", "support"], default="default")
    p.add_argument("--samples", type=int, default=0, help="random family draws (seeded by FCA_SEED)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("unitary", help="synthesize the evolution unitary")
    common(p)
    rule_flags(p)
    p.set_defaults(func=cmd_unitary)

    p = sub.add_parser("blocks", help="named sector blocks of a unitary")
    common(p)
    rule_flags(p)
    p.add_argument("--u", help="matrix JSON file")
    p.add_argument("--scheme", help="z2xz2 or z5")
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("discriminate", help="relative unitary eigenvalue analysis")
    common(p)
    rule_flags(p)
    p.add_argument("--u0")
    p.add_argument("--u1")
    p.add_argument("--parity-restricted", action="store_true")
    p.add_argument("--emit-polygon", action="store_true")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("regular", help="wrapping-lemma regularity of a quotient")
    common(p)
    p.add_argument("--base", default="Z")
    p.add_argument("--offsets", required=True, help="comma-separated neighborhood offsets")
    p.add_argument("--quotient", type=int, help="modulus n for base Z")
    p.add_argument("--kernel", help="comma-separated kernel elements for a finite base")
    p.set_defaults(func=cmd_regular)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, MissingAssignment, OrderingMismatch, NotNormal) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoSolution, NullSpaceDimension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NotUnitary as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (KeyError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FCAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
