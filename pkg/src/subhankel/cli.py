"""Command-line front end: ``subhankel <command> [options]``.

Reports go to standard output (text or JSON); diagnostics and usage errors go
to standard error.  Exit status is 0 for pass, pass-up-to-sign and
constant-ratio with ratio +-1; 1 for any other outcome that was computed;
2 for unsupported problems and usage errors.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
import time

from . import legendre, orthopoly, space, weyl
from .errors import SubHankelError
from .parsing import parse_poly
from .report import (CONSTANT_RATIO, FAIL, PASS, PASS_UP_TO_SIGN, UNSUPPORTED,
                     to_json_value)

COMMANDS = ("invariants", "verify-lie", "verify-invariance", "verify-ml", "verify-bfun",
            "verify-orthopoly", "polarize", "verify-polarized-bfun")


class UsageError(Exception):
    pass


def exit_code(status, ratio=None):
    if status in (PASS, PASS_UP_TO_SIGN):
        return 0
    if status == CONSTANT_RATIO:
        return 0 if ratio is not None and abs(ratio) == 1 else 1
    if status == UNSUPPORTED:
        return 2
    return 1


def _combine(reports):
    """Overall status of several :class:`IdentityReport` objects."""
    statuses = [rep.status for rep in reports]
    if all(s == PASS for s in statuses):
        return PASS
    if all(s in (PASS, PASS_UP_TO_SIGN) for s in statuses):
        return PASS_UP_TO_SIGN
    return FAIL


def _summary(rep):
    return {"name": rep.name, "status": rep.status, "checked": rep.checked,
            "failures": rep.failures[:5]}


# command handlers: each returns (status, ratio_or_None, details) -----------------

def cmd_invariants(args):
    inv = space.invariants(args.r)
    details = {
        "P1": inv.P1, "P2": inv.P2, "Q1": inv.Q1, "Q2": inv.Q2,
        "weights": {name: [w.s1, w.s2] for name, w in inv.weights.items()},
        "q1_normalization": inv.q1_norm,
    }
    return PASS, None, details


def cmd_verify_lie(args):
    reps = [space.verify_structure_constants(args.r), space.verify_determinant_characters(args.r)]
    return _combine(reps), None, {"checks": [_summary(r) for r in reps]}


def cmd_verify_invariance(args):
    inv = space.invariants(args.r)
    reps = [space.verify_infinitesimal_invariance(P, inv.weights[name], inv.side(name), args.r)
            for name, P in inv.items()]
    reps.append(space.verify_group_invariance(args.r, args.samples, args.seed))
    return _combine(reps), None, {"checks": [_summary(r) for r in reps]}


def _ml_status(status):
    return PASS if status == legendre.EXACT_PASS else status


def cmd_verify_ml(args):
    if args.us is not None:
        rep = legendre.verify_ml_pointwise(args.r, args.us, args.samples, args.seed)
    else:
        rep = legendre.verify_ml_closed_form(args.r, args.direction)
    details = dict(rep.details)
    details["constant"] = rep.constant
    details["expected_constant"] = rep.expected_constant
    return _ml_status(rep.status), None, details


def cmd_verify_bfun(args):
    rep = weyl.b_function_check(args.r)
    return rep.status, rep.details.get("ratio"), _b_details(rep)


def _b_details(rep):
    keep = ("r", "k", "b", "b_factored", "predicted", "predicted_factored", "ratio",
            "base_terms", "operator_terms", "diagnostic", "witness")
    details = {k: rep.details[k] for k in keep if k in rep.details}
    if rep.failures:
        details["failures"] = rep.failures
    return details


def cmd_verify_orthopoly(args):
    family = args.family or "all"
    if family.lower() == "all" or args.n is None:
        idents = None if family.lower() == "all" else [orthopoly.identity_key(family)]
        r_values = [args.r] if args.r_given else range(2, 6)
        rows = orthopoly.ratio_table(idents, r_values, range(0, 4) if args.n is None else [args.n],
                                     jobs=args.jobs)
        constant = orthopoly.constant_in_n(rows)
        if all(row["status"] == orthopoly.EQUAL for row in rows):
            status = PASS
        elif all(row["status"] != orthopoly.MISMATCH for row in rows):
            status = CONSTANT_RATIO
        else:
            status = FAIL
        details = {"rows": rows,
                   "constant_in_n": [{"family": f, "r": r, "constant": c}
                                     for (f, r), c in constant.items()]}
        unit = {row["ratio"] for row in rows} <= {"1", "-1"}
        return status, (1 if unit else None), details
    rep = orthopoly.verify_identity(family, args.r, args.n)
    status = {orthopoly.EQUAL: PASS, orthopoly.CONSTANT_RATIO: CONSTANT_RATIO}.get(rep.status, FAIL)
    return status, rep.ratio, rep.to_dict()


def cmd_polarize(args):
    if args.poly is not None:
        f = parse_poly(args.poly)
        F = weyl.polarize(f, args.prefix)
        return PASS, None, {"f": f, "polarization": F, "variables": list(F.ctx.names)}
    F, H, pairing = weyl.polarization_tower(args.r, args.k)
    ok, constant = weyl.ml_pointwise_check(F, H, pairing, samples=args.samples, seed=args.seed)[:2]
    details = {"r": args.r, "k": args.k, "polarization": F,
               "transform": {"coefficient": H.coefficient,
                             "factors": [[b, str(e)] for b, e in H.factors]},
               "pairing": pairing, "pointwise_constant": constant}
    return (PASS if ok else FAIL), None, details


def cmd_verify_polarized_bfun(args):
    rep = weyl.polarized_b_function_check(args.r, args.k)
    return rep.status, rep.details.get("ratio"), _b_details(rep)


HANDLERS = {
    "invariants": cmd_invariants,
    "verify-lie": cmd_verify_lie,
    "verify-invariance": cmd_verify_invariance,
    "verify-ml": cmd_verify_ml,
    "verify-bfun": cmd_verify_bfun,
    "verify-orthopoly": cmd_verify_orthopoly,
    "polarize": cmd_polarize,
    "verify-polarized-bfun": cmd_verify_polarized_bfun,
}


# argument parsing ---------------------------------------------------------------

def _weight(text):
    try:
        s1, s2 = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 's1,s2', got {text!r}") from None
    return (s1, s2)


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-r", type=int, default=None, help="matrix size (at least 2)")
    common.add_argument("--samples", type=_positive, default=None,
                        help="number of random samples for pointwise checks")
    common.add_argument("--seed", type=int, default=space.DEFAULT_SEED,
                        help=f"random seed (default {space.DEFAULT_SEED})")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", help="also write the JSON report to this file")
    common.add_argument("--timing", action="store_true",
                        help="include elapsed milliseconds in the report")

    parser = argparse.ArgumentParser(
        prog="subhankel",
        description="Exact checks for sub-Hankel invariants, transforms and b-functions.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub.add_parser("invariants", parents=[common], help="print P1, P2, Q1, Q2")
    sub.add_parser("verify-lie", parents=[common],
                   help="structure constants and determinant characters")
    sub.add_parser("verify-invariance", parents=[common],
                   help="infinitesimal and group relative invariance")
    p = sub.add_parser("verify-ml", parents=[common], help="multiplicative Legendre transforms")
    p.add_argument("--us", type=_weight, help="weight pair 's1,s2' for the pointwise check")
    p.add_argument("--direction", choices=("P-to-Q", "Q-to-P"), default="P-to-Q")
    sub.add_parser("verify-bfun", parents=[common], help="b-function of K against Q1(d)")
    p = sub.add_parser("verify-orthopoly", parents=[common],
                       help="sub-Hankel determinant identities for recurrence families")
    p.add_argument("--family", help=f"one of {', '.join(orthopoly.IDENTITIES)}, or 'all'")
    p.add_argument("-n", type=int, default=None, help="index shift (omit for n = 0..3)")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes for grids")
    p = sub.add_parser("polarize", parents=[common],
                       help="polarize a polynomial, or build the polarization tower of P1")
    p.add_argument("--poly", help="polynomial to polarize, e.g. 'x1^2*x2'")
    p.add_argument("--prefix", default=None, help="name prefix for the new variables")
    p.add_argument("-k", type=int, default=1, help="number of polarizations")
    p = sub.add_parser("verify-polarized-bfun", parents=[common],
                       help="b-function of the k-fold polarization of P1")
    p.add_argument("-k", type=int, default=1, help="number of polarizations")
    return parser


def _validate(args):
    args.r_given = args.r is not None
    needs_r = not (args.command == "polarize" and args.poly is not None)
    needs_r = needs_r and not (args.command == "verify-orthopoly" and not args.r_given)
    if needs_r and args.r is None:
        raise UsageError(f"{args.command} needs -r")
    if args.r is not None and args.r < 2:
        raise UsageError(f"-r must be at least 2, got {args.r}")
    if args.command == "verify-orthopoly" and args.n is not None:
        if args.n < 0:
            raise UsageError(f"-n must be non-negative, got {args.n}")
        if args.r is None:
            raise UsageError("a single identity needs -r")
    if getattr(args, "k", 0) < 0:
        raise UsageError(f"-k must be non-negative, got {args.k}")
    if args.samples is None:
        args.samples = 100 if args.command == "verify-invariance" else 10
    if args.command == "verify-orthopoly" and args.family:
        try:
            if args.family.lower() != "all":
                orthopoly.identity_key(args.family)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


def _request(args):
    keys = ("r", "n", "k", "family", "us", "direction", "poly", "samples", "seed")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def render_text(report):
    lines = [f"{report['command']}: {report['status']}"]
    if "elapsed_ms" in report:
        lines.append(f"elapsed_ms: {report['elapsed_ms']}")
    details = report["details"]
    rows = details.get("rows") if isinstance(details, dict) else None
    if rows is not None:
        lines.append(f"{'family':<18} {'r':>2} {'n':>2}  {'status':<15} ratio")
        for row in rows:
            lines.append(f"{row['family']:<18} {row['r']:>2} {row['n']:>2}  "
                         f"{row['status']:<15} {row['ratio'] if row['ratio'] is not None else '-'}")
        details = {k: v for k, v in details.items() if k not in ("rows", "constant_in_n")}
    for key, value in details.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run the command and return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
    except UsageError as exc:
        print(f"subhankel: error: {exc}", file=stderr)
        return 2
    start = time.perf_counter()
    try:
        status, ratio, details = HANDLERS[args.command](args)
    except SubHankelError as exc:
        print(f"subhankel: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    except ValueError as exc:
        print(f"subhankel: error: {exc}", file=stderr)
        return 2
    report = {"command": args.command, "request": _request(args), "status": status,
              "details": details}
    report = to_json_value(report)
    if args.timing:
        report["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    text = json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    stdout.write(text if args.format == "json" else render_text(report))
    return exit_code(status, ratio)


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
