"""Command-line entry point.

Exit status: 0 when every checked claim holds, 1 when a claim is falsified,
2 on bad usage or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import harness
from .fieldcore import ApSpec, PrimeFieldCtx, is_kth_residue, least_nonresidue_in_ap
from .polyring import root_multiplicity
from .stepanov import (
    StepanovError,
    SystemSpec,
    common_roots_oracle,
    derive_params,
    build_constraint_system,
    literal_constraint_system,
    same_row_space,
    solve_auxiliary,
    within_lemma_range,
)
from .svdet import SVMatrixSpec, block_constant_check, hankel_binom_det, verify_sv_identity

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _prime_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")


def _global_options(parser: argparse.ArgumentParser, defaults: bool):
    def d(value):
        return value if defaults else argparse.SUPPRESS
    parser.add_argument("--seed", type=int, default=d(0), help="RNG seed for randomized scans")
    parser.add_argument("--jobs", type=int, default=d(None),
                        help="worker processes (default: $STEPANOV_JOBS or 1)")
    parser.add_argument("--format", choices=harness.FORMATS, default=d("json"), dest="fmt")
    parser.add_argument("--out", default=d(None), metavar="PATH", help="write the report here")


def _scan_options(sub: argparse.ArgumentParser):
    sub.add_argument("--primes", type=_prime_range, default=(5, 1000), metavar="LO..HI")
    sub.add_argument("--k", default="prime", metavar="{prime,all,K}",
                     help="which k | p-1 to test: prime divisors, all divisors, or one fixed k")
    sub.add_argument("--b", type=_int_list, default=[1], metavar="B[,B...]")
    sub.add_argument("--c", type=_int_list, default=[1], metavar="C[,C...]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonresidue",
        description="Exact checks of square-root bounds on least k-th power non-residues.")
    _global_options(parser, defaults=True)
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs.required = True
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, defaults=False)

    def add(name, help_text):
        return subs.add_parser(name, help=help_text, parents=[common])

    sp = add("residue", "test whether a is a k-th power residue mod p")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)

    sp = add("least-nonresidue", "least k-th power non-residue in b*n + c, against the bound")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--b", type=int, default=1)
    sp.add_argument("--c", type=int, default=1)

    sp = add("scan-theorem", "least non-residue vs 7/sqrt5 b sqrt((p-1)/k) + 4b + c")
    _scan_options(sp)

    sp = add("scan-corollary", "longest runs vs 7/sqrt5 sqrt((p-1)/k) + 4")
    _scan_options(sp)
    sp.add_argument("--classes", default="residue,nonresidue",
                    help="comma list from residue, nonresidue, coset")

    sp = add("scan-lemma", "auxiliary-polynomial bound on random systems")
    _scan_options(sp)
    sp.add_argument("--samples", type=int, default=3, help="systems per prime")
    sp.add_argument("--t-max", type=int, default=120, help="skip k with (p-1)/k above this")

    sp = add("stepanov-build", "construct F for one system and check its root multiplicities")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--shifts", type=_int_list, required=True)
    sp.add_argument("--targets", type=_int_list, required=True)
    sp.add_argument("--compare-literal", action="store_true",
                    help="also report whether the binomial-free closed-form rows span the same space")

    sp = add("sv-verify", "check det(V) = C prod (a_i - a_j)^(D^2)")
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--points", type=_int_list, required=True, help="use --points=-3,5 for negatives")
    sp.add_argument("--p", type=int, help="also check C != 0 mod p")
    sp.add_argument("--cross-check", action="store_true", help="recompute det by CRT")

    sp = add("hankel", "binomial Hankel determinant vs its closed form")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)

    sp = add("block-constant", "product of diagonal block determinants vs C")
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    return parser


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return str(value)


def _render_record(record: dict, fmt: str) -> str:
    record = _jsonable(record)
    if fmt == "json":
        return json.dumps(record, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    flat = {k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in record.items()}
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_residue(args):
    ctx = PrimeFieldCtx(args.p)
    res = is_kth_residue(args.a, args.k, ctx)
    return {"p": args.p, "k": args.k, "a": args.a % args.p, "residue": res}, True


def _cmd_least(args):
    ctx = PrimeFieldCtx(args.p)
    if args.k < 2:
        raise UsageError("k must be at least 2")
    c = args.c % args.p
    found = least_nonresidue_in_ap(ctx, args.k, ApSpec(args.b, c))
    t = (args.p - 1) // args.k
    holds = harness.within_sqrt_bound(found.value, 4 * args.b + c, args.b, t)
    return {"p": args.p, "k": args.k, "b": args.b, "c": c, "t": t,
            "index": found.index, "value": found.value,
            "bound": harness.sqrt_bound_floor(4 * args.b + c, args.b, t),
            "bound_real": round(harness.theorem_bound(args.b, c, t), 6),
            "holds": holds}, holds


def _scan_config(args, **extra) -> harness.ScanConfig:
    if args.k in ("prime", "all"):
        k_mode, fixed_k = args.k, None
    else:
        try:
            k_mode, fixed_k = "fixed", int(args.k)
        except ValueError:
            raise UsageError(f"--k must be prime, all, or an integer, got {args.k!r}")
    return harness.ScanConfig(
        primes=args.primes, k_mode=k_mode, fixed_k=fixed_k,
        ap_grid=[(b, c) for b in args.b for c in args.c],
        seed=args.seed, jobs=args.jobs, fmt=args.fmt, output=args.out, **extra)


def _run_scan(kind, config):
    report = harness.run_scan(kind, config)
    text = harness.write_report(report, config.fmt, config.output)
    if not config.output:
        sys.stdout.write(text)
    else:
        s = report["summary"]
        print(f"{kind}: {s['rows']} rows, {s['violations']} violations -> {config.output}",
              file=sys.stderr)
    return report["summary"]["violations"] == 0


def _cmd_stepanov(args):
    ctx = PrimeFieldCtx(args.p)
    spec = SystemSpec(ctx, args.t, tuple(args.shifts), tuple(args.targets))
    params = derive_params(spec.t, spec.r)
    if not params.feasible:
        raise UsageError(f"r={spec.r} infeasible for t={spec.t}; "
                         f"largest feasible r is {params.largest_feasible_r}")
    aux = solve_auxiliary(spec, params)
    roots = common_roots_oracle(spec)
    mults = [root_multiplicity(aux.F, a) for a in roots]
    out = {
        "p": ctx.p, "t": spec.t, "r": spec.r,
        "params": {k: getattr(params, k) for k in ("M", "s", "d", "D", "T", "N")},
        "constraints": params.n_constraints, "unknowns": params.n_unknowns,
        "nullity": aux.nullity,
        "G": [list(g) for g in aux.g_coeffs],
        "F": list(aux.F.coeffs), "deg_F": aux.F.degree,
        "roots": list(roots), "multiplicities": mults,
        "multiplicity_ok": all(m >= params.M for m in mults),
        "count_bound": aux.F.degree // params.M,
    }
    ok = out["multiplicity_ok"] and len(roots) <= out["count_bound"]
    if within_lemma_range(spec.t, spec.r):
        lemma_ok = len(roots) * (spec.r - 1) <= 2 * spec.t + 3 * (spec.r - 1)
        out["lemma_bound"] = round(2 * spec.t / (spec.r - 1) + 3, 6)
        out["lemma_ok"] = lemma_ok
        ok = ok and (lemma_ok or spec.r % 2 == 1)
    if args.compare_literal:
        derived = build_constraint_system(spec, params)
        literal = literal_constraint_system(spec, params)
        out["literal_rows_same_space"] = same_row_space(derived, literal, ctx.p)
    return out, ok


def _cmd_sv(args):
    spec = SVMatrixSpec(args.T, args.d, args.r, tuple(args.points))
    rep = verify_sv_identity(spec, p=args.p, cross_check=args.cross_check)
    out = {"T": spec.T, "d": spec.d, "r": spec.r, "points": list(spec.points),
           "det": rep.det_value, "predicted": rep.predicted, "C": rep.constant_C,
           "match": rep.match}
    if args.p is not None:
        out["C_nonzero_mod_p"] = rep.C_nonzero_mod_p
    return out, rep.match


def _cmd_hankel(args):
    rep = hankel_binom_det(args.n, args.m, args.l)
    return {"n": args.n, "m": args.m, "l": args.l, "direct": rep.direct,
            "closed_form": rep.closed_form, "match": rep.match}, rep.match


def _cmd_block(args):
    rep = block_constant_check(args.T, args.d, args.r)
    return {"T": args.T, "d": args.d, "r": args.r,
            "block_dets": list(rep.direct_dets),
            "product_of_H_dets": rep.product_of_H_dets, "C": rep.C,
            "ends_are_one": rep.ends_are_one, "match": rep.match}, rep.match


_RECORD_COMMANDS = {
    "residue": _cmd_residue,
    "least-nonresidue": _cmd_least,
    "stepanov-build": _cmd_stepanov,
    "sv-verify": _cmd_sv,
    "hankel": _cmd_hankel,
    "block-constant": _cmd_block,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "scan-theorem":
            ok = _run_scan("theorem", _scan_config(args))
        elif args.command == "scan-corollary":
            classes = tuple(c.strip() for c in args.classes.split(",") if c.strip())
            ok = _run_scan("corollary", _scan_config(args, classes=classes))
        elif args.command == "scan-lemma":
            ok = _run_scan("lemma", _scan_config(args, samples_per_prime=args.samples,
                                                 t_max=args.t_max))
        else:
            record, ok = _RECORD_COMMANDS[args.command](args)
            _emit(_render_record(record, args.fmt), args.out)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"nonresidue {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nonresidue {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StepanovError as exc:
        print(f"nonresidue {args.command}: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK if ok else EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
