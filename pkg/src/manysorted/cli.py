"""Command-line interface.

Every command builds one JSON-serializable report dict; ``--json`` prints it
as is and the default text output is rendered from the same dict.  Keys
common to all reports:

``command``
    the subcommand name
``ok``
    ``true`` when the check passed (exit code 0), ``false`` otherwise (exit 1)

Subsets appear as SPEC strings (``s:0,1;t:0``, ``""`` for the empty set).
Per-command keys:

=============  ===============================================================
sg             ``input``, ``operator`` (``"Sg"`` or ``"J"``), ``result``,
               ``stages``, ``cross_check`` (``{iteration, intersection,
               agree}`` or null)
axioms         ``extensive``, ``isotone``, ``idempotent``, ``witnesses``
uniform        ``uniform``, ``witness`` (pair or null)
nary           ``n``, ``n_ary``, ``witness``, ``cross_check``
               (``{tower, fixed_points, fixed_point_witness, agree}`` or null)
tower          ``n``, ``input``, ``stages``, ``omega``, ``closure``
synthesize     ``bound``, ``output``, ``num_ops``, ``num_entries``,
               ``max_arity``; on rejection ``error`` and ``witness``
irb, tarski    ``irb``, ``convex``, ``counts``, ``bases_by_size``, ``gaps``,
               ``n``, ``verdict``, ``violation``; tarski on a non-n-ary
               input has ``error`` and ``witness`` instead
gen            ``kind``, ``seed``, ``output``
selftest       ``checks``: list of ``{name, ok, detail}``
=============  ===============================================================

Exit codes: 0 pass, 1 check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields

from . import kernels
from .algebra import Algebra, as_closure_operator, e_stages, max_arity, sg_via_intersection
from .bases import check_tarski_gaps, irredundant_bases
from .checks import selftest
from .closure import (
    ClosureOperator,
    NotNaryError,
    NotUniformError,
    check_closure_axioms,
    fixed_point_witness,
    is_uniform,
    nary_witness,
    tower,
)
from .core import CAP_ENV, HARD_CAP, ManySortedError, MSSubset, format_spec, parse_spec
from .corpus import GenParams, nonuniform_example, random_algebra, random_closure_table
from .formats import dumps, load_instance
from .synthesis import SynthesizedAlgebra, synthesize, synthesize_bounded

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ManySortedError):
    pass


def _spec(X: MSSubset | None):
    return None if X is None else format_spec(X)


def _operator(obj) -> ClosureOperator:
    return as_closure_operator(obj) if isinstance(obj, Algebra) else obj


def _load(args, check_axioms: bool = True):
    obj = load_instance(args.file, check_axioms=check_axioms and not args.skip_axioms)
    return obj.algebra if isinstance(obj, SynthesizedAlgebra) else obj


# --------------------------------------------------------------------------
# commands: each returns a report dict


def cmd_sg(args) -> dict:
    obj = _load(args)
    X = parse_spec(obj.carrier, args.set)
    if isinstance(obj, Algebra):
        stages = e_stages(obj, X)
        result = stages[-1]
        cross = None
        if args.cross_check:
            other = sg_via_intersection(obj, X)
            cross = {"iteration": _spec(result), "intersection": _spec(other), "agree": other == result}
        ok = cross is None or cross["agree"]
        return {
            "command": "sg",
            "ok": ok,
            "input": _spec(X),
            "operator": "Sg",
            "result": _spec(result),
            "stages": [_spec(s) for s in stages],
            "cross_check": cross,
        }
    if args.cross_check:
        raise UsageError("--cross-check needs an algebra file")
    return {
        "command": "sg",
        "ok": True,
        "input": _spec(X),
        "operator": "J",
        "result": _spec(obj.closure(X)),
        "stages": None,
        "cross_check": None,
    }


def cmd_axioms(args) -> dict:
    J = _operator(_load(args, check_axioms=False))
    r = check_closure_axioms(J)
    iso = r.isotone_witness
    return {
        "command": "axioms",
        "ok": r.ok,
        "extensive": r.extensive,
        "isotone": r.isotone,
        "idempotent": r.idempotent,
        "witnesses": {
            "extensive": _spec(r.extensive_witness),
            "isotone": None if iso is None else [_spec(iso[0]), _spec(iso[1])],
            "idempotent": _spec(r.idempotent_witness),
        },
    }


def cmd_uniform(args) -> dict:
    r = is_uniform(_operator(_load(args)))
    return {
        "command": "uniform",
        "ok": r.uniform,
        "uniform": r.uniform,
        "witness": None if r.witness is None else [_spec(x) for x in r.witness],
    }


def cmd_nary(args) -> dict:
    J = _operator(_load(args))
    w = nary_witness(J, args.n)
    report = {"command": "nary", "n": args.n, "n_ary": w is None, "witness": _spec(w), "cross_check": None}
    ok = w is None
    if args.cross_check:
        fw = fixed_point_witness(J, args.n)
        agree = (fw is None) == (w is None)
        report["cross_check"] = {
            "tower": w is None,
            "fixed_points": fw is None,
            "fixed_point_witness": _spec(fw),
            "agree": agree,
        }
        ok = ok and agree
    report["ok"] = ok
    return report


def cmd_tower(args) -> dict:
    J = _operator(_load(args))
    X = parse_spec(J.carrier, args.set)
    stages = tower(J, args.n, X)
    omega = 0
    for st in stages:
        omega |= st.mask
    return {
        "command": "tower",
        "ok": True,
        "n": args.n,
        "input": _spec(X),
        "stages": [_spec(s) for s in stages],
        "omega": _spec(MSSubset(J.carrier, omega)),
        "closure": _spec(J.closure(X)),
    }


def cmd_synthesize(args) -> dict:
    J = _operator(_load(args))
    report = {"command": "synthesize", "bound": args.bound, "output": args.output}
    try:
        S = synthesize(J) if args.bound is None else synthesize_bounded(J, args.bound)
    except NotUniformError as e:
        return {**report, "ok": False, "error": "not uniform", "witness": [_spec(x) for x in e.witness]}
    except NotNaryError as e:
        return {**report, "ok": False, "error": f"not {e.n}-ary", "witness": _spec(e.witness)}
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(dumps(S))
    return {
        **report,
        "ok": True,
        "num_ops": S.num_ops,
        "num_entries": S.num_entries,
        "max_arity": max_arity(S.algebra),
    }


def cmd_irb(args) -> dict:
    r = irredundant_bases(_operator(_load(args)))
    return {"command": "irb", "ok": True, **r.to_dict()}


def cmd_tarski(args) -> dict:
    J = _operator(_load(args))
    try:
        r = check_tarski_gaps(J, args.n)
    except NotNaryError as e:
        return {"command": "tarski", "ok": False, "n": args.n, "error": f"not {e.n}-ary", "witness": _spec(e.witness)}
    return {"command": "tarski", "ok": bool(r.verdict), **r.to_dict()}


_GEN_FLAGS = {
    "num_sorts": "--sorts",
    "min_size": "--min-size",
    "max_size": "--max-size",
    "max_total": "--max-total",
    "min_ops": "--min-ops",
    "max_ops": "--max-ops",
    "max_arity": "--max-arity",
    "exact_max_arity": "--exact-arity",
    "nullary_prob": "--nullary-prob",
    "projection_prob": "--projection-prob",
    "min_family": "--min-family",
    "max_family": "--max-family",
    "member_density": "--density",
}


def cmd_gen(args) -> dict:
    if args.kind == "nonuniform":
        obj = nonuniform_example()
    else:
        kw = {f.name: getattr(args, f.name) for f in fields(GenParams) if f.name in _GEN_FLAGS}
        kw = {k: v for k, v in kw.items() if v is not None}
        params = GenParams(seed=args.seed, **kw)
        obj = random_algebra(params) if args.kind == "algebra" else random_closure_table(params)
    text = dumps(obj)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return {"command": "gen", "ok": True, "kind": args.kind, "seed": args.seed, "output": args.output}


def cmd_selftest(args) -> dict:
    results = selftest(args.size)
    return {
        "command": "selftest",
        "ok": all(r.ok for r in results),
        "checks": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results],
    }


# --------------------------------------------------------------------------
# text rendering


def _set(spec: str | None) -> str:
    if spec is None:
        return "-"
    return "{" + spec + "}" if spec else "{}"


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _ints(xs) -> str:
    return "{" + ", ".join(map(str, xs)) + "}"


def render(report: dict) -> str:
    cmd = report["command"]
    ok = report["ok"]
    lines: list[str] = []
    if cmd == "sg":
        lines.append(f"{report['operator']}({_set(report['input'])}) = {_set(report['result'])}")
        if report["stages"] is not None and len(report["stages"]) > 1:
            for k, st in enumerate(report["stages"]):
                lines.append(f"  E^{k}: {_set(st)}")
        cc = report["cross_check"]
        if cc is not None:
            lines.append(f"iteration:    {_set(cc['iteration'])}")
            lines.append(f"intersection: {_set(cc['intersection'])}")
            lines.append("oracles agree" if cc["agree"] else "FAIL: oracles disagree")
    elif cmd == "axioms":
        for k in ("extensive", "isotone", "idempotent"):
            w = report["witnesses"][k]
            if report[k]:
                lines.append(f"{k}: yes")
            elif k == "isotone":
                lines.append(f"isotone: no, {_set(w[0])} <= {_set(w[1])} but closures are not")
            else:
                lines.append(f"{k}: no, witness {_set(w)}")
        lines.append(f"{_verdict(ok)}: {'closure operator' if ok else 'not a closure operator'}")
    elif cmd == "uniform":
        if ok:
            lines.append("PASS: uniform")
        else:
            x, y = report["witness"]
            lines.append(f"FAIL: not uniform, witness pair {_set(x)} and {_set(y)}")
    elif cmd == "nary":
        n = report["n"]
        if report["n_ary"]:
            lines.append(f"tower: {n}-ary")
        else:
            lines.append(f"tower: not {n}-ary, witness {_set(report['witness'])}")
        cc = report["cross_check"]
        if cc is not None:
            if cc["fixed_points"]:
                lines.append(f"fixed points: {n}-ary")
            else:
                lines.append(f"fixed points: not {n}-ary, witness {_set(cc['fixed_point_witness'])}")
            lines.append("deciders agree" if cc["agree"] else "deciders DISAGREE")
        lines.append(f"{_verdict(ok)}: {'' if report['n_ary'] else 'not '}{n}-ary")
    elif cmd == "tower":
        for k, st in enumerate(report["stages"]):
            lines.append(f"stage {k}: {_set(st)}")
        lines.append(f"omega: {_set(report['omega'])}")
        lines.append(f"J:     {_set(report['closure'])}")
    elif cmd == "synthesize":
        if ok:
            lines.append(
                f"PASS: wrote {report['output']} with {report['num_ops']} ops, "
                f"{report['num_entries']} table entries, max arity {report['max_arity']}"
            )
        elif isinstance(report["witness"], list):
            x, y = report["witness"]
            lines.append(f"FAIL: {report['error']}, witness pair {_set(x)} and {_set(y)}")
        else:
            lines.append(f"FAIL: {report['error']}, witness {_set(report['witness'])}")
    elif cmd in ("irb", "tarski"):
        if "error" in report:
            lines.append(f"FAIL: {report['error']}, witness {_set(report['witness'])}")
        else:
            for k, bases in report["bases_by_size"].items():
                shown = ", ".join(_set(b) for b in bases)
                more = report["counts"][k] - len(bases)
                lines.append(f"size {k}: {report['counts'][k]} ({shown}{', ...' if more > 0 else ''})")
            shape = "convex" if report["convex"] else "gaps " + ", ".join(f"{i}->{j}" for i, j in report["gaps"])
            head = f"IrB = {_ints(report['irb'])}, {shape}"
            if cmd == "irb":
                lines.append(head)
            elif ok:
                lines.append(f"PASS: {head}")
            else:
                i, j = report["violation"]
                lines.append(f"FAIL: {head}; jump {i}->{j} exceeds n-1 = {report['n'] - 1}")
    elif cmd == "gen":
        if report["output"] != "-":
            lines.append(f"wrote {report['kind']} (seed {report['seed']}) to {report['output']}")
    elif cmd == "selftest":
        for c in report["checks"]:
            lines.append(f"{_verdict(c['ok'])} {c['name']}: {c['detail']}")
        lines.append(f"{_verdict(ok)}: {sum(c['ok'] for c in report['checks'])}/{len(report['checks'])} checks")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# argument parsing


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {v}")
    return v


def _prob(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a probability, got {text!r}") from None
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand default from overwriting a value given
    # before the subcommand name, so these flags work in either position
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument(
        "--cap",
        type=_natural,
        help=f"tabulation cap on the total carrier size (default from ${CAP_ENV} or 16, at most {HARD_CAP})",
    )
    common.add_argument("--backend", choices=("numba", "numpy"), help="kernel backend")

    with_file = argparse.ArgumentParser(add_help=False, parents=[common])
    with_file.add_argument("file", help="instance file (algebra or closure_table JSON)")
    with_file.add_argument(
        "--skip-axioms", action="store_true", help="do not verify the closure axioms when loading a table"
    )

    parser = argparse.ArgumentParser(
        prog="manysorted",
        description="Exhaustive checks on finite many-sorted closure spaces and algebras.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sg", parents=[with_file], help="generated subalgebra (or closure) of a subset")
    p.add_argument("--set", required=True, metavar="SPEC", help="subset such as 's:0,1;t:0'")
    p.add_argument("--cross-check", action="store_true", help="also compute it as an intersection of subalgebras")
    p.set_defaults(func=cmd_sg)

    p = sub.add_parser("axioms", parents=[with_file], help="check extensive, isotone and idempotent")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("uniform", parents=[with_file], help="check uniformity")
    p.set_defaults(func=cmd_uniform)

    p = sub.add_parser("nary", parents=[with_file], help="decide whether the operator is n-ary")
    p.add_argument("--n", type=_natural, required=True)
    p.add_argument("--cross-check", action="store_true", help="also run the fixed-point decider")
    p.set_defaults(func=cmd_nary)

    p = sub.add_parser("tower", parents=[with_file], help="stages of the <=n tower above a subset")
    p.add_argument("--set", required=True, metavar="SPEC")
    p.add_argument("--n", type=_natural, required=True)
    p.set_defaults(func=cmd_tower)

    p = sub.add_parser("synthesize", parents=[with_file], help="build an algebra whose Sg is the operator")
    p.add_argument("--bound", type=_natural, help="keep only operations of arity <= BOUND")
    p.add_argument("-o", "--output", required=True, help="algebra file to write")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("irb", parents=[with_file], help="sizes of irredundant bases")
    p.set_defaults(func=cmd_irb)

    p = sub.add_parser("tarski", parents=[with_file], help="check jumps in IrB are at most n-1")
    p.add_argument("--n", type=_natural, required=True)
    p.set_defaults(func=cmd_tarski)

    p = sub.add_parser("gen", parents=[common], help="write a seeded random instance")
    p.add_argument("kind", choices=("algebra", "table", "nonuniform"))
    p.add_argument("--seed", type=_natural, default=0)
    p.add_argument("-o", "--output", default="-", help="file to write ('-' for stdout)")
    g = p.add_argument_group("generator parameters")
    g.add_argument("--sorts", dest="num_sorts", type=_natural)
    g.add_argument("--min-size", type=_natural)
    g.add_argument("--max-size", type=_natural)
    g.add_argument("--max-total", type=_natural)
    g.add_argument("--min-ops", type=_natural)
    g.add_argument("--max-ops", type=_natural)
    g.add_argument("--max-arity", type=_natural)
    g.add_argument("--exact-arity", dest="exact_max_arity", action="store_true", default=None)
    g.add_argument("--nullary-prob", type=_prob)
    g.add_argument("--projection-prob", type=_prob)
    g.add_argument("--min-family", type=_natural)
    g.add_argument("--max-family", type=_natural)
    g.add_argument("--density", dest="member_density", type=_prob)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite on a small corpus")
    p.add_argument("--size", type=_natural, default=40)
    p.set_defaults(func=cmd_selftest)
    return parser


def run_command(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    for name, default in (("json", False), ("cap", None), ("backend", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.cap is not None and args.cap > HARD_CAP:
        print(f"error: --cap must be at most {HARD_CAP}", file=sys.stderr)
        return EXIT_USAGE
    saved_cap = os.environ.get(CAP_ENV)
    saved_backend = kernels.get_backend()
    try:
        if args.cap is not None:
            os.environ[CAP_ENV] = str(args.cap)
        if args.backend:
            kernels.set_backend(args.backend)
        report = args.func(args)
    except (ManySortedError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if args.cap is not None:
            if saved_cap is None:
                os.environ.pop(CAP_ENV, None)
            else:
                os.environ[CAP_ENV] = saved_cap
        kernels.set_backend(saved_backend)
    if args.json:
        print(json.dumps(report, indent=1, ensure_ascii=False))
    else:
        text = render(report)
        if text:
            print(text)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def main() -> None:
    sys.exit(run_command())
