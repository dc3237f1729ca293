"""Command-line interface.

Exit codes are shared by every subcommand: 0 for an affirmative verdict
(true, equivalent, definable, all checks passed), 1 for a negative one,
2 for usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import diagram
from .algebra import DEFINABLE, certificate_problems, close, decide_definability, load_certificate
from .errors import NonrigidError
from .model import MODES, RIGID, Model, ModelParams, fixture, load_model, random_model, validate_model
from .reproduce import verify_paper
from .semantics import first_difference, order_labels, satisfies, truth_set
from .syntax import parse_formula, parse_signature, print_formula

OK, NEGATIVE, ERROR = 0, 1, 2

SIG_HELP = (
    "signature as 'props;booleans;modalities', each a comma list. Seeds are "
    "prop names and optionally true/false; booleans are not, or; modalities "
    "are R[n], D[n], @[n]. Example: 'p;not,or;R[Ann],@[Ann]'"
)


class UsageError(Exception):
    pass


def _model(args: argparse.Namespace) -> Model:
    if args.fixture and args.model:
        raise UsageError("give either --model or --fixture, not both")
    if args.fixture:
        return fixture(args.fixture)
    if not args.model:
        raise UsageError("a model is required (--model PATH or --fixture NAME)")
    try:
        return load_model(args.model)
    except OSError as exc:
        raise UsageError(f"cannot read model: {exc}") from exc


def cmd_check(args: argparse.Namespace) -> int:
    m = _model(args)
    holds = satisfies(m, (args.world, args.agent), parse_formula(args.formula))
    print("true" if holds else "false")
    return OK if holds else NEGATIVE


def cmd_truthset(args: argparse.Namespace) -> int:
    m = _model(args)
    phi = parse_formula(args.formula)
    t = truth_set(m, phi)
    if args.format == "json":
        print(json.dumps({"formula": print_formula(phi), "order": order_labels(m), "bits": t.to_string()}))
    else:
        sys.stdout.write(diagram.render(m, t))
    return OK


def cmd_equiv(args: argparse.Namespace) -> int:
    m = _model(args)
    phi, psi = parse_formula(args.formula_a), parse_formula(args.formula_b)
    diff = first_difference(m, phi, psi)
    if args.format == "json":
        print(json.dumps({"equivalent": diff is None, "differ_at": list(diff) if diff else None}))
    elif diff is None:
        print("equivalent")
    else:
        print(f"differ at ({diff.world},{diff.agent})")
    return OK if diff is None else NEGATIVE


def cmd_closure(args: argparse.Namespace) -> int:
    m = _model(args)
    try:
        sig = parse_signature(args.sig)
    except ValueError as exc:
        raise UsageError(f"bad --sig: {exc}") from exc
    if args.target is None:
        if args.out:
            raise UsageError("--out needs --target")
        fam = close(m, sig)
        if args.format == "json":
            print(json.dumps({
                "order": order_labels(m),
                "family": [{"bits": t.to_string(), "witness": print_formula(f)} for t, f in fam.witness.items()],
            }, indent=2))
        else:
            print(f"family size {len(fam)}")
            for t, f in fam.witness.items():
                print(f"{t.to_string()}  {print_formula(f)}")
        return OK

    cert = decide_definability(m, parse_formula(args.target), sig)
    if args.out:
        Path(args.out).write_text(cert.dumps(), encoding="utf-8")
    if args.format == "json":
        print(cert.dumps(), end="")
    elif cert.verdict == DEFINABLE:
        print(f"DEFINABLE; witness {print_formula(cert.witness)}")
    else:
        print(f"UNDEFINABLE; family size {len(cert.family)}")
    return OK if cert.verdict == DEFINABLE else NEGATIVE


def cmd_verify_cert(args: argparse.Namespace) -> int:
    try:
        cert = load_certificate(args.certificate)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load certificate: {exc}") from exc
    problems = certificate_problems(cert)
    if problems:
        for p in problems:
            print(f"FAIL {p}")
        return NEGATIVE
    print(f"OK {cert.verdict}")
    return OK


def cmd_verify_paper(args: argparse.Namespace) -> int:
    checks = verify_paper(seed=args.seed)
    passed = all(c.passed for c in checks)
    if args.json or args.format == "json":
        print(json.dumps({
            "passed": passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail, "seconds": round(c.seconds, 4)} for c in checks],
        }, indent=2))
    else:
        for c in checks:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail} ({c.seconds:.2f}s)")
    return OK if passed else NEGATIVE


def cmd_gen(args: argparse.Namespace) -> int:
    params = ModelParams(args.worlds, args.agents, args.names, args.props, args.mode, args.with_se)
    m = random_model(params, args.seed)
    problems = validate_model(m)
    if problems:  # generator bug; never expected
        raise NonrigidError("generated model is invalid: " + "; ".join(problems))
    text = m.dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", metavar="PATH", help="model JSON file")
    common.add_argument("--fixture", choices=["M_DR", "M_RD"], help="use a built-in model instead of a file")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="nonrigid", description="Model checker for de re / de dicto knowledge with nonrigid names.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="does a formula hold at (world, agent)?")
    p.add_argument("formula")
    p.add_argument("world")
    p.add_argument("agent")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("truthset", parents=[common], help="print the truth set of a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_truthset)

    p = sub.add_parser("equiv", parents=[common], help="compare two formulas on a model")
    p.add_argument("formula_a")
    p.add_argument("formula_b")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("closure", parents=[common], help="close a signature; optionally decide a target", description=SIG_HELP)
    p.add_argument("--sig", required=True, help=SIG_HELP)
    p.add_argument("--target", help="formula whose definability to decide")
    p.add_argument("--out", metavar="PATH", help="write the certificate JSON here")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("verify-cert", parents=[common], help="re-check a certificate file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("verify-paper", parents=[common], help="run every reproduction check")
    p.add_argument("--json", action="store_true", help="machine-readable report with timings")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("gen", parents=[common], help="generate a random model")
    p.add_argument("--worlds", type=int, default=4)
    p.add_argument("--agents", type=int, default=2)
    p.add_argument("--names", type=int, default=1)
    p.add_argument("--props", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default=RIGID)
    p.add_argument("--with-se", action="store_true", help="declare the self name 'se' (agent-specific mode only)")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, NonrigidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
