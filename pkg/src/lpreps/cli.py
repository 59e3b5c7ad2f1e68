"""Command-line front end.

Every subcommand reads a function specification (``--spec file.json`` or a
corpus key via ``--corpus``), builds a name, runs one operator and checks
its output against the exact oracle.  Artifacts are JSON (or CSV for
tables) and embed the library version, the seed and a hash of the
normalised manifest.

Exit codes: 0 success, 1 bad manifest or arguments, 2 contract violation,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import CORPUS_KEYS, build_corpus
from .dyadic import parse_literal
from .entropy import (
    CompactClass,
    certify_aa_cover,
    entropy_table,
    fk_cover,
)
from .moduli import Modulus, search_modulus
from .names import BudgetExceeded, InvariantViolation, check_query_bound, default_budget
from .operators import (
    cauchy_to_xp,
    differentiate,
    discontinuity_demo,
    evaluate,
    integrate,
    minimal_a,
    norm_xpd,
    norm_constants,
    xp_to_cauchy,
)
from .representations import (
    RepresentationError,
    iterated_derivative,
    make_cauchy_name,
    make_xc_name,
    make_xmp_name,
    make_xp_name,
    make_xpd_name,
    make_xs_name,
    validate_name,
)
from .symbolic import FunctionSpec, SymbolicError, load_function

EXIT_OK, EXIT_MANIFEST, EXIT_CONTRACT, EXIT_BUDGET = 0, 1, 2, 3

MODULUS_KIND = {"xs": "singularity", "xp": "lp", "xmp": "lp", "xpd": "lp", "xc": "continuity",
                "cauchy": "lp"}


class ManifestError(ValueError):
    """Unusable arguments or input files."""


class ContractViolation(RuntimeError):
    """An output failed its exact check."""

    def __init__(self, message: str, report: dict) -> None:
        super().__init__(message)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise ManifestError(message)


# -- manifest handling -------------------------------------------------------------------


def manifest_of(args: argparse.Namespace) -> dict:
    """Normalised manifest: every argument except the output path and manifest file."""
    data = {k: v for k, v in sorted(vars(args).items())
            if k not in ("out", "manifest", "handler") and v is not None}
    return json.loads(json.dumps(data, default=str))


def manifest_hash(manifest: dict) -> str:
    text = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _header(args: argparse.Namespace) -> dict:
    manifest = manifest_of(args)
    return {"version": __version__, "seed": args.seed, "manifest_hash": manifest_hash(manifest),
            "manifest": manifest}


def _emit_json(args: argparse.Namespace, result: dict) -> None:
    payload = dict(_header(args), command=args.command, result=result)
    text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    _write(args, text)


def _emit_csv(args: argparse.Namespace, body: str, extra: dict | None = None) -> None:
    head = _header(args)
    lines = [f"# version={head['version']} seed={head['seed']} manifest_hash={head['manifest_hash']}"]
    if extra:
        lines.append("# " + json.dumps(extra, sort_keys=True, default=str))
    _write(args, "\n".join(lines) + "\n" + body)


def _write(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- inputs ---------------------------------------------------------------------------------


def _dyadic(text: str) -> Fraction:
    try:
        return parse_literal(text).to_fraction()
    except ValueError as exc:
        raise ManifestError(str(exc)) from exc


def parse_modulus(text: str, kind: str, p: int | None) -> Modulus:
    """``"a*n+b"``, ``"n+b"``, ``"b"`` or a comma table ``"0,1,3"`` (continued with slope one)."""
    text = text.replace(" ", "")
    try:
        if "n" in text:
            head, _, tail = text.partition("n")
            a = int(head.rstrip("*") or "1")
            b = int(tail or "0")
            return Modulus.affine(a, b, kind, p)
        if "," in text:
            return Modulus.from_values([int(v) for v in text.split(",")], kind, p)
        return Modulus.from_values([int(text)], kind, p) if int(text) else Modulus.zero(kind, p)
    except ValueError as exc:
        raise ManifestError(f"bad modulus {text!r}") from exc


def _load_spec(args) -> tuple[FunctionSpec, object]:
    if getattr(args, "corpus", None):
        corpus = build_corpus()
        if args.corpus not in corpus:
            raise ManifestError(f"unknown corpus key {args.corpus!r}; choose from {', '.join(CORPUS_KEYS)}")
        entry = corpus[args.corpus]
        return entry.function, entry
    if not getattr(args, "spec", None):
        raise ManifestError("need --spec FILE or --corpus KEY")
    path = Path(args.spec)
    if not path.exists():
        raise ManifestError(f"spec file {path} does not exist")
    try:
        return load_function(path), None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, SymbolicError) as exc:
        raise ManifestError(f"cannot read function spec {path}: {exc}") from exc


def _modulus_for(args, f: FunctionSpec, entry, kind: str, p: int | None, target: FunctionSpec | None = None):
    if getattr(args, "modulus", None):
        return parse_modulus(args.modulus, kind, p)
    if entry is not None and target is None:
        if kind == "lp" and p in entry.lp_moduli:
            return entry.lp_moduli[p]
        if kind == "singularity" and entry.singularity is not None:
            return entry.singularity
        if kind == "continuity" and entry.continuity is not None:
            return entry.continuity
    return search_modulus(target or f, kind, p, n_max=8)


def build_name(args, f: FunctionSpec, entry):
    rep = args.rep
    p = args.p
    if rep in ("xp", "xmp", "xpd", "cauchy") and p is None:
        raise ManifestError(f"--p is required for {rep}")
    kind = MODULUS_KIND.get(rep)
    if kind is None:
        raise ManifestError(f"unsupported representation {rep!r}")
    try:
        if rep == "xs":
            name = make_xs_name(f, _modulus_for(args, f, entry, kind, None), check_upto=None)
        elif rep == "xp":
            name = make_xp_name(f, _modulus_for(args, f, entry, kind, p), p, check_upto=None)
        elif rep == "xmp":
            top = iterated_derivative(f, args.m)
            mu = _modulus_for(args, f, entry, kind, p, target=top if args.m else None)
            name = make_xmp_name(f, mu, args.m, p, check_upto=None)
        elif rep == "xpd":
            name = make_xpd_name(f, _modulus_for(args, f, entry, kind, p), p, check_upto=None)
        elif rep == "xc":
            name = make_xc_name(f, _modulus_for(args, f, entry, kind, None), check_upto=None)
        else:
            name = make_cauchy_name(f, p, modulus=_modulus_for(args, f, entry, "lp", p), check_upto=None)
    except (RepresentationError, SymbolicError) as exc:
        raise ManifestError(str(exc)) from exc
    if getattr(args, "fault_offset", None):
        offset = _dyadic(args.fault_offset)
        name.answer_offset = lambda n: offset
    return name.fresh(args.budget)


def _check(ok: bool, message: str, report: dict) -> None:
    if not ok:
        raise ContractViolation(message, report)


# -- subcommands ----------------------------------------------------------------------------


def cmd_integrate(args) -> int:
    f, entry = _load_spec(args)
    name = build_name(args, f, entry)
    lo_text, sep, hi_text = args.box.partition(":")
    if not sep:
        raise ManifestError("--box needs two corners separated by ':'")
    lo = [_dyadic(t) for t in lo_text.split(",")]
    hi = [_dyadic(t) for t in hi_text.split(",")]
    if len(lo) != f.d or len(hi) != f.d:
        raise ManifestError(f"--box corners need {f.d} coordinates")
    x, y = (lo[0], hi[0]) if f.d == 1 else (tuple(lo), tuple(hi))
    result = integrate(name, x, y, args.prec)
    value = result.value.to_fraction()
    box = tuple((min(a, b), max(a, b)) for a, b in zip(lo, hi))
    exact = f.integral(box) * (1 if f.d > 1 or lo[0] <= hi[0] else -1)
    report = {"value": str(value), "error_exp": args.prec, "exact": str(exact),
              "within": abs(value - exact) < Fraction(1, 2**args.prec),
              "certificate": result.certificate.to_json()}
    _check(report["within"], "integral outside the error bound", report)
    _emit_json(args, report)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    f, entry = _load_spec(args)
    args.rep = "xc"
    name = build_name(args, f, entry)
    x = _dyadic(args.point)
    result = evaluate(name, x, args.prec)
    value = result.value.to_fraction()
    (lo, hi), = f.bounding_box()
    exact = f.value(min(max(x, lo), hi))
    report = {"value": str(value), "error_exp": args.prec, "exact": str(exact),
              "within": abs(value - exact) < Fraction(1, 2**args.prec),
              "certificate": result.certificate.to_json()}
    _check(report["within"], "value outside the error bound", report)
    _emit_json(args, report)
    return EXIT_OK


def cmd_translate(args) -> int:
    f, entry = _load_spec(args)
    p = args.p
    if p is None:
        raise ManifestError("--p is required")
    if args.direction == "xp-to-cauchy":
        args.rep = "xp"
        name = build_name(args, f, entry)
        result = xp_to_cauchy(name, args.prec, budget=args.budget)
        grid = result.value
        error = grid.error_power(f, p)
        bound = Fraction(1, 2 ** (args.prec * p))
        report = {"cells": result.certificate.details["cells"], "error_power_hi": str(error.hi),
                  "bound_power": str(bound), "within": error.below(bound),
                  "certificate": result.certificate.to_json()}
        _check(report["within"], "step function outside the error bound", report)
    else:
        args.rep = "cauchy"
        name = build_name(args, f, entry)
        translated = cauchy_to_xp(name, p)
        check = validate_name("xp", translated, f, n_max=min(args.prec, 6), grid=2, bit_level=False)
        report = {"validated": check.ok, "checks": check.checks, "failures": check.failures,
                  "modulus": translated.modulus.to_json()}
        _check(check.ok, "translated name failed validation", report)
    _emit_json(args, report)
    return EXIT_OK


def cmd_differentiate(args) -> int:
    f, entry = _load_spec(args)
    args.rep = "xmp"
    if args.m < 1:
        raise ManifestError("--m must be at least 1 to differentiate")
    name = build_name(args, f, entry)
    derivative = differentiate(name, args.k)
    target = iterated_derivative(f, args.k)
    check = validate_name("xp" if derivative.order == 0 else "xmp", derivative, target,
                          n_max=args.prec, grid=2, bit_level=False)
    report = {"order": args.k, "validated": check.ok, "checks": check.checks,
              "failures": check.failures}
    _check(check.ok, "derivative name failed validation", report)
    _emit_json(args, report)
    return EXIT_OK


def cmd_norm(args) -> int:
    f, entry = _load_spec(args)
    args.rep = "xpd"
    name = build_name(args, f, entry)
    result = norm_xpd(name, args.prec, budget=args.budget)
    value = result.value.to_fraction()
    power = f.lp_power(args.p)
    step = Fraction(1, 2**args.prec)
    lo, hi = max(value - step, Fraction(0)), value + step
    within = power.hi < hi**args.p and (lo == 0 or lo**args.p < power.lo)
    report = {"value": str(value), "error_exp": args.prec, "exact_power": str(power.value if power.exact else power.hi),
              "within": within, "certificate": result.certificate.to_json()}
    _check(within, "norm outside the error bound", report)
    _emit_json(args, report)
    return EXIT_OK


def cmd_entropy(args) -> int:
    start, _, end = args.n_range.partition(":")
    try:
        n_values = range(int(start), int(end or start) + 1)
    except ValueError as exc:
        raise ManifestError(f"bad --n-range {args.n_range!r}") from exc
    if args.cls == "lipschitz":
        compact = CompactClass.lipschitz(args.lipschitz)
    elif args.cls == "aa":
        compact = CompactClass.aa(parse_modulus(args.modulus or "n", "continuity", None), args.sup_exponent)
    else:
        if args.p is None:
            raise ManifestError("--p is required for fk classes")
        compact = CompactClass.fk(parse_modulus(args.modulus or "n+2", "lp", args.p), args.p)
    table = entropy_table(compact, n_values)
    extra = {"class": compact.describe()}
    if args.certify:
        certs = {}
        for n in n_values:
            if compact.kind == "fk":
                rep = fk_cover(compact.modulus, compact.p, n, samples=args.samples, seed=args.seed)
            else:
                rep = certify_aa_cover(compact, n, samples=args.samples, seed=args.seed)
            certs[n] = rep.covered
        extra["covered"] = certs
        _check(all(certs.values()), "net does not cover the sampled members", extra)
    _check(table.ok, "entropy table sandwich failed", {"rows": table.rows})
    _emit_csv(args, table.to_csv(), extra)
    return EXIT_OK


def cmd_demo(args) -> int:
    report = discontinuity_demo(args.m)
    row = report["rows"][-1]
    _check(report["ok"], "discontinuity witness failed", report)
    _emit_json(args, {"m": args.m, "agreement_prefix": row["agreement_prefix"],
                      "norm_l1": row["norm_l1"], "rows": report["rows"], "ok": report["ok"]})
    return EXIT_OK


def cmd_validate(args) -> int:
    f, entry = _load_spec(args)
    name = build_name(args, f, entry)
    target = f
    report = validate_name(args.rep, name, target, n_max=args.prec, grid=2, bit_level=True)
    out = {"rep": args.rep, "pass": report.ok, "checks": report.checks, "failures": report.failures}
    _check(report.ok, "name failed validation", out)
    _emit_json(args, out)
    return EXIT_OK


def _profile_operation(op: dict, budget: int) -> dict:
    kind = op.get("op")
    corpus = build_corpus()
    key = op.get("corpus", "hat")
    if key not in corpus:
        raise ManifestError(f"unknown corpus key {key!r}")
    entry = corpus[key]
    f = entry.function
    p = int(op.get("p", 1))
    n_values = list(op.get("n", range(1, 11)))
    rows = []
    for n in n_values:
        if kind == "integrate":
            name = make_xp_name(f, entry.lp_moduli[p], p, check_upto=None).fresh(budget)
            result = integrate(name, Fraction(1, 4), Fraction(3, 4), n)
            summary = result.certificate.trace_summary
            longest = summary["max_query_len"]
            bound = check_query_bound(name.trace, "1", name.length, n, bits_poly=f"l({longest})")
            rows.append({"n": n, "queries": summary["queries"], "name_queries": name.trace.queries,
                         "max_query_len": longest, "max_answer_len": summary["max_answer_len"],
                         "within_bound": bound.ok and summary["queries"] <= 3})
        elif kind == "norm":
            name = make_xpd_name(f, entry.lp_moduli[p], p, check_upto=None)
            consts = norm_constants(entry.lp_moduli[p], p, minimal_a(f.bounding_box()), n)
            row = {"n": n, "M": consts["M"], "grid_points": consts["points"]}
            try:
                result = norm_xpd(name, n, budget=budget)
            except BudgetExceeded:
                row.update(queries=None, budget_exceeded=True)
            else:
                row.update(queries=result.certificate.trace_summary["queries"], budget_exceeded=False)
            rows.append(row)
        else:
            raise ManifestError(f"unknown profile op {kind!r}")
    return {"op": kind, "corpus": key, "p": p, "rows": rows}


def cmd_profile(args) -> int:
    if args.suite:
        path = Path(args.suite)
        if not path.exists():
            raise ManifestError(f"suite file {path} does not exist")
        try:
            suite = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"cannot parse suite {path}: {exc}") from exc
        ops = suite.get("operations", []) if isinstance(suite, dict) else suite
    else:
        ops = [{"op": args.op, "corpus": args.corpus or "hat", "p": args.p or 1,
                "n": list(range(args.n_min, args.n_max + 1))}]
    reports = [_profile_operation(op, args.budget) for op in ops if op.get("op")]
    _emit_json(args, {"operations": reports})
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------


def _common(sub: argparse.ArgumentParser, spec: bool = True) -> None:
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--budget", type=int, default=None,
                     help="oracle query budget (default: $LPREPS_BUDGET or 10^7)")
    sub.add_argument("--out", default=None, help="artifact path (default: stdout)")
    if spec:
        sub.add_argument("--spec", default=None, help="function spec JSON file")
        sub.add_argument("--corpus", default=None, help="built-in corpus function key")
        sub.add_argument("--modulus", default=None, help="modulus as 'a*n+b' or a comma table")
        sub.add_argument("--fault-offset", default=None, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lpreps", description="Second-order representations of Lp functions.")
    parser.add_argument("--version", action="version", version=f"lpreps {__version__}")
    parser.add_argument("--manifest", default=None, help="JSON file with the arguments of one run")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = subs.add_parser("integrate")
    _common(s)
    s.add_argument("--rep", choices=["xs", "xp", "xmp"], default="xp")
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--box", required=True, help="corners 'x:y' (comma-separated in 2-D)")
    s.add_argument("--prec", type=int, required=True)
    s.set_defaults(handler=cmd_integrate)

    s = subs.add_parser("evaluate")
    _common(s)
    s.add_argument("--point", required=True)
    s.add_argument("--prec", type=int, required=True)
    s.set_defaults(handler=cmd_evaluate, rep="xc", p=None)

    s = subs.add_parser("translate")
    _common(s)
    s.add_argument("--direction", choices=["xp-to-cauchy", "cauchy-to-xp"], default="xp-to-cauchy")
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--prec", type=int, default=3)
    s.set_defaults(handler=cmd_translate)

    s = subs.add_parser("differentiate")
    _common(s)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--m", type=int, default=1, help="Sobolev order of the input name")
    s.add_argument("--k", type=int, default=1, help="number of derivatives")
    s.add_argument("--prec", type=int, default=4)
    s.set_defaults(handler=cmd_differentiate)

    s = subs.add_parser("norm")
    _common(s)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--prec", type=int, default=2)
    s.set_defaults(handler=cmd_norm)

    s = subs.add_parser("entropy")
    _common(s, spec=False)
    s.add_argument("--class", dest="cls", choices=["aa", "fk", "lipschitz"], default="aa")
    s.add_argument("--modulus", default=None)
    s.add_argument("--sup-exponent", type=int, default=0)
    s.add_argument("--lipschitz", type=int, default=0)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--n-range", default="0:4")
    s.add_argument("--certify", action="store_true")
    s.add_argument("--samples", type=int, default=50)
    s.set_defaults(handler=cmd_entropy)

    s = subs.add_parser("demo-discontinuity")
    _common(s, spec=False)
    s.add_argument("--m", type=int, default=6)
    s.set_defaults(handler=cmd_demo)

    s = subs.add_parser("profile")
    _common(s, spec=False)
    s.add_argument("--suite", default=None, help="JSON list of operations")
    s.add_argument("--op", choices=["integrate", "norm"], default="integrate")
    s.add_argument("--corpus", default=None)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--n-max", type=int, default=10)
    s.set_defaults(handler=cmd_profile)

    s = subs.add_parser("validate")
    _common(s)
    s.add_argument("--rep", choices=["xs", "xp", "xmp", "xc", "xpd", "cauchy"], required=True)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--prec", type=int, default=6)
    s.set_defaults(handler=cmd_validate)
    return parser


def _manifest_argv(path: str) -> list[str]:
    file = Path(path)
    if not file.exists():
        raise ManifestError(f"manifest {file} does not exist")
    try:
        data = json.loads(file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"cannot parse manifest {file}: {exc}") from exc
    if not isinstance(data, dict) or "command" not in data:
        raise ManifestError("manifest needs a 'command' entry")
    argv = [str(data["command"])]
    for key, value in data.items():
        if key == "command" or value is None or value is False:
            continue
        flag = "--" + key.replace("_", "-")
        argv += [flag] if value is True else [flag, str(value)]
    return argv


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the subcommand and map failures to exit codes."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.manifest:
            args = parser.parse_args(_manifest_argv(args.manifest))
        if not args.command:
            raise ManifestError("missing subcommand")
        if args.budget is None:
            args.budget = default_budget()
        return args.handler(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        print(json.dumps(exc.report, indent=2, sort_keys=True, default=str), file=sys.stderr)
        return EXIT_CONTRACT
    except InvariantViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
