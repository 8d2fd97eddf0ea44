"""Command-line interface.  Exit codes: 0 yes/success, 1 no/failure, 2 error."""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import replace
from pathlib import Path

from . import bribery, control, manipulation
from .core import HybridRule, ScoringRule, parse_rule, scores, winners
from .fileio import (ParseError, parse_3dm, parse_election, parse_epbm, serialize_3dm,
                     serialize_election, serialize_graph, serialize_provenance)
from .reductions import GADGETS, election_of, random_epbm, verify_gadget
from .threedm import gen_restricted

YES, NO, ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --- solve ---------------------------------------------------------------------

def _is(rule, family, k=None):
    return isinstance(rule, ScoringRule) and rule.family == family and (k is None or rule.k == k)


def _solvers(inst):
    """Available solvers per instance kind; the first one is the exact oracle."""
    if isinstance(inst, manipulation.ManipulationInstance):
        if not inst.conformant:
            return {"standard": manipulation.solve_manipulation_standard}
        out = {"exact": manipulation.solve_cm_exact, "fixed-k": manipulation.solve_cm_fixed_k}
        if _is(inst.rule, "approval", 3):
            out["3approval"] = manipulation.solve_cm_3approval
        if _is(inst.rule, "first-last"):
            out["firstlast"] = manipulation.solve_cm_firstlast
        return out
    if isinstance(inst, bribery.BriberyInstance):
        if not inst.conformant:
            return {"standard": bribery.solve_bribery_standard}
        out = {"exact": bribery.solve_cb_exact, "fixed-k": bribery.solve_cb_fixed_k}
        if _is(inst.rule, "first-last"):
            out["firstlast"] = bribery.solve_cb_firstlast
        return out
    out = {"exact": control.solve_control_exactsearch}
    if inst.mode == "xcav":
        for k in (0, 1):
            if _is(inst.rule, "approval", k):
                out["greedy"] = getattr(control, f"solve_xcav_{k}approval")
        if _is(inst.rule, "veto", 1):
            out["greedy"] = control.solve_xcav_1veto
    if inst.mode == "cav":
        out["dtt"] = lambda i: control.dtt_cav_via_xcav(i, control.solve_control_exactsearch)
    if inst.mode == "cdv":
        out["dtt"] = lambda i: control.dtt_cdv_via_xcav(i, control.solve_control_exactsearch)
    return out


def _auto(solvers) -> str:
    for name in ("3approval", "firstlast", "greedy"):
        if name in solvers:
            return name
    return next(iter(solvers))


def _split(result):
    return (bool(result[0]), result[1]) if isinstance(result, tuple) else (bool(result), None)


def _witness_lines(inst, wit) -> tuple[list[str], object]:
    """Human-readable witness, plus the instance it leads to with the budget
    used up (so solving or evaluating that file re-checks the witness)."""
    e = election_of(inst)
    if isinstance(inst, manipulation.ManipulationInstance):
        lines = [f"manipulator {i + 1}: {e.format_vote(v)}" for i, v in enumerate(wit)]
        return lines, replace(inst, election=e.with_votes(e.votes + tuple(wit)), num_manipulators=0)
    if isinstance(inst, bribery.BriberyInstance):
        lines = [f"voter {i + 1} -> {e.format_vote(v)}" for i, v in wit.changes]
        return lines, replace(inst, election=wit.apply(e), limit=0)
    lines = [f"add unregistered voter {i + 1}: {e.format_vote(inst.unregistered[i])}" for i in wit.added]
    lines += [f"delete voter {i + 1}: {e.format_vote(e.votes[i])}" for i in wit.deleted]
    return lines, replace(inst, registered=wit.apply(inst), unregistered=(), limit=0)


def cmd_solve(args, out) -> int:
    inst = parse_election(_read(args.file))
    if not hasattr(inst, "rule"):
        raise CliError("solve needs an instance file (with rule, preferred and a problem header)")
    solvers = _solvers(inst)
    name = _auto(solvers) if args.solver == "auto" else args.solver
    if name not in solvers:
        raise CliError(f"solver {name!r} not available here; choose from {', '.join(solvers)}")
    decision, wit = _split(solvers[name](inst))
    out.write(f"solver: {name}\n{'yes' if decision else 'no'}\n")
    oracle = next(iter(solvers))
    if args.oracle_check or ((args.witness or args.witness_out) and decision and wit is None):
        ref, ref_wit = _split(solvers[oracle](inst))
        if args.oracle_check:
            out.write(f"oracle ({oracle}): {'yes' if ref else 'no'}\n")
            if ref != decision:
                out.write("oracle check FAILED\n")
                return ERROR
        wit = wit if wit is not None else ref_wit
    if (args.witness or args.witness_out) and decision:
        lines, result = _witness_lines(inst, wit)
        if args.witness:
            out.write("witness:\n" + "".join(f"  {x}\n" for x in lines))
        if args.witness_out:
            _write(args.witness_out, serialize_election(result), out)
    return YES if decision else NO


# --- reduce / verify / gen / eval ------------------------------------------------

def cmd_reduce(args, out) -> int:
    if args.gadget not in GADGETS:
        raise CliError(f"unknown gadget {args.gadget!r}; choose from {', '.join(GADGETS)}")
    entry = GADGETS[args.gadget]
    text = _read(args.source)
    try:
        result = entry.build(parse_3dm(text)) if entry.source == "3dm" else entry.build(*parse_epbm(text))
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise CliError(str(exc)) from None
    inst_text = serialize_election(result.instance)
    prov_text = serialize_provenance(result.provenance)
    if args.output in (None, "-"):
        out.write(inst_text + prov_text)
    else:
        _write(args.output, inst_text, out)
        prov_path = args.provenance or args.output + ".provenance"
        _write(prov_path, prov_text, out)
        out.write(f"wrote {args.output} and {prov_path}\n")
    return YES


def cmd_verify(args, out) -> int:
    ids = list(GADGETS) if args.gadget == "all" else [args.gadget]
    if any(g not in GADGETS for g in ids):
        raise CliError(f"unknown gadget {args.gadget!r}; choose from all, {', '.join(GADGETS)}")
    planted = True if args.planted else None
    out.write(f"seed: {args.seed}, trials: {args.trials}\n")
    ok = True
    for gid in ids:
        report = verify_gadget(gid, args.trials, args.seed, planted)
        out.write(report.summary() + "\n")
        ok &= report.ok
    return YES if ok else NO


def _random_votes(rng, m, n, distinct):
    pool = [tuple(rng.sample(range(m), m)) for _ in range(max(distinct, 1))]
    return tuple(rng.choice(pool) for _ in range(n))


def cmd_gen(args, out) -> int:
    rng = random.Random(args.seed)
    header = f"# generated by: gen {args.kind} (seed {args.seed})\n"
    if args.kind == "3dm":
        text = serialize_3dm(gen_restricted(args.k, args.seed, planted=args.planted))
    elif args.kind == "epbm":
        g, k = random_epbm(args.n, args.seed, args.planted)
        text = serialize_graph(g, k)
    else:
        from .core import Election
        rule = parse_rule(args.rule)
        names = tuple(f"c{i + 1}" for i in range(args.m))
        e = Election(names, _random_votes(rng, args.m, args.voters, args.distinct))
        p = rng.randrange(args.m)
        if args.kind == "cm":
            inst = manipulation.ManipulationInstance(e, args.budget, p, rule)
        elif args.kind == "cb":
            inst = bribery.BriberyInstance(e, args.budget, p, rule)
        else:
            unreg = () if args.kind == "cdv" else _random_votes(rng, args.m, args.voters, args.distinct)
            inst = control.ControlInstance(e, unreg, args.budget, args.kind, p, rule)
        text = serialize_election(inst)
    _write(args.output, header + text, out)
    return YES


def cmd_eval(args, out) -> int:
    obj = parse_election(_read(args.file))
    e = election_of(obj) if hasattr(obj, "rule") else obj
    if args.rule:
        rule = parse_rule(args.rule)
    elif hasattr(obj, "rule"):
        rule = obj.rule
    else:
        raise CliError("eval needs --rule for a plain election file")
    if isinstance(rule, HybridRule) and e.m < 4:
        raise CliError("the hybrid rule needs at least 4 candidates")
    if isinstance(rule, ScoringRule):
        table = scores(e, rule)
        for c in range(e.m):
            out.write(f"{e.names[c]}: {table[c]}\n")
    win = sorted(winners(e, rule))
    out.write("winners: " + " ".join(e.names[c] for c in win) + "\n")
    if hasattr(obj, "preferred"):
        out.write(f"preferred {e.names[obj.preferred]} wins: {'yes' if obj.preferred in win else 'no'}\n")
    return YES


# --- wiring --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conformant", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance file")
    p.add_argument("file")
    p.add_argument("--solver", default="auto",
                   help="auto, exact, fixed-k, 3approval, firstlast, greedy, dtt or standard")
    p.add_argument("--witness", action="store_true", help="print a witness for yes-answers")
    p.add_argument("--witness-out", metavar="PATH", help="write the election the witness produces")
    p.add_argument("--oracle-check", action="store_true",
                   help="also run the exhaustive solver and fail on disagreement")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reduce", help="build a gadget from a 3DM or EPBM source file")
    p.add_argument("gadget")
    p.add_argument("source")
    p.add_argument("-o", "--output")
    p.add_argument("--provenance", metavar="PATH")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="round-trip gadgets against their oracles")
    p.add_argument("gadget", help="gadget id or 'all'")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", action="store_true", help="planted (yes) sources only")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("kind", choices=["3dm", "epbm", "cm", "cb", "cav", "xcav", "cdv", "crv"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", action="store_true")
    p.add_argument("--k", type=int, default=2, help="3DM size")
    p.add_argument("--n", type=int, default=2, help="EPBM side size")
    p.add_argument("--m", type=int, default=4, help="candidates")
    p.add_argument("--voters", type=int, default=6)
    p.add_argument("--distinct", type=int, default=3, help="distinct rankings to draw from")
    p.add_argument("--budget", type=int, default=1)
    p.add_argument("--rule", default="borda")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("eval", help="scores and winners of an election")
    p.add_argument("file")
    p.add_argument("--rule")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return YES if exc.code == 0 else ERROR
    try:
        return args.func(args, out)
    except (CliError, ParseError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
