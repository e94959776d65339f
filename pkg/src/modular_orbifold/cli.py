"""Command-line interface: build | verify | fusion | solve | compare | report.

Exit codes: 0 success, 1 verification or solve failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import branching as br
from . import families, io, orbifold_solver
from .mtc_core import (
    INT_TOL,
    REL_TOL,
    ModularData,
    ModularDataError,
    central_charge_mod8,
    global_dimension,
    verify,
    verlinde_fusion,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SOLVER_PROBLEMS = {
    "spin_level2": orbifold_solver.spin_problem,
    "orbifold_u1": orbifold_solver.orbifold_u1_problem,
}


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(text)


def _summary(md: ModularData) -> dict:
    try:
        c = str(central_charge_mod8(md))
    except ModularDataError:
        c = None
    return {"name": md.name, "sectors": len(md), "mu": global_dimension(md), "c_mod_8": c}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    try:
        md = families.build_family(args.family, args.param)
    except families.FamilyError as exc:
        raise UsageError(str(exc)) from exc
    text = io.dumps_modular(md)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    s = _summary(md)
    line = f"{s['name']}: {s['sectors']} sectors, mu = {s['mu']:.12g}, c mod 8 = {s['c_mod_8']}"
    if args.out:
        _emit(args, s, line)
    else:
        print(line, file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    md = io.read_modular(args.input)
    rep = verify(md, args.tolerance, args.int_tolerance)
    _emit(args, rep.to_dict(), rep.table())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_fusion(args) -> int:
    md = io.read_modular(args.input)
    try:
        ring = verlinde_fusion(md, args.int_tolerance, args.tolerance)
    except ModularDataError as exc:
        _emit(args, {"name": md.name, "error": str(exc)}, f"fusion failed: {exc}")
        return EXIT_FAIL
    products = []
    n = len(ring)
    for i in range(n):
        for j in range(i, n):
            products.append({"a": ring.labels[i], "b": ring.labels[j], "product": ring.product(i, j)})
    lines = [f"{p['a']} x {p['b']} = " + " + ".join(f"{m if m > 1 else ''}{k}" for k, m in p["product"].items())
             for p in products]
    conj = {ring.labels[i]: ring.labels[ring.conj[i]] for i in range(n)}
    _emit(args, {"name": md.name, "conjugation": conj, "products": products}, "\n".join(lines))
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.problem and args.family:
        raise UsageError("give either a problem file or --family/--param, not both")
    if args.problem:
        problem = io.problem_from_doc(io.read_json(args.problem))
    elif args.family:
        if args.param is None:
            raise UsageError("--family needs --param")
        try:
            problem = SOLVER_PROBLEMS[args.family](args.param)
        except (ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from exc
    else:
        raise UsageError("solve needs a problem file or --family/--param")
    if args.emit_problem:
        io.write_text(args.emit_problem, io.dumps(io.problem_to_doc(problem)))
    sols = orbifold_solver.solve(problem, args.tolerance, args.int_tolerance)
    doc = io.solutions_to_doc(problem.name, sols)
    if args.out:
        io.write_text(args.out, io.dumps(doc))
    payload = {"problem": problem.name, "solutions": len(sols),
               "residuals": [s.residuals for s in sols]}
    text = f"{problem.name}: {len(sols)} solution(s)"
    for k, s in enumerate(sols):
        text += f"\n  solution {k}: " + ", ".join(f"{a} residual {b:.2e}" for a, b in s.residuals.items())
    if not args.out and not args.json:
        text += "\n" + io.dumps(doc)
    _emit(args, payload, text)
    return EXIT_OK if sols else EXIT_FAIL


def find_permutation(a: ModularData, b: ModularData, tol: float) -> list[int] | None:
    """``perm`` with ``a.S[i,j] = b.S[perm[i],perm[j]]`` and matching twists, or None."""
    n = len(a)
    if n != len(b):
        return None
    cand = [
        [j for j in range(n) if abs(a.twists[i] - b.twists[j]) <= tol and abs(a.dims[i] - b.dims[j]) <= max(tol, 1e-9)]
        for i in range(n)
    ]
    order = sorted(range(n), key=lambda i: (i != a.vacuum, len(cand[i])))
    perm = [-1] * n
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in cand[i]:
            if used[j] or (i == a.vacuum) != (j == b.vacuum):
                continue
            if all(abs(a.S[i, order[m]] - b.S[j, perm[order[m]]]) <= tol for m in range(k)) and abs(
                a.S[i, i] - b.S[j, j]
            ) <= tol:
                perm[i], used[j] = j, True
                if extend(k + 1):
                    return True
                perm[i], used[j] = -1, False
        return False

    return perm if extend(0) else None


def cmd_compare(args) -> int:
    a, b = io.read_modular(args.a), io.read_modular(args.b)
    tol = args.tolerance
    payload = {"a": a.name, "b": b.name, "equal": False}
    if len(a) != len(b):
        _emit(args, {**payload, "reason": "different sector counts"}, f"differ: {len(a)} vs {len(b)} sectors")
        return EXIT_FAIL
    phase_dev = abs(a.phaseC - b.phaseC)
    if args.allow_permutation:
        perm = find_permutation(a, b, tol)
        if perm is None or phase_dev > tol:
            _emit(args, {**payload, "reason": "no matching permutation"}, "differ: no label permutation matches")
            return EXIT_FAIL
    else:
        perm = list(range(len(a)))
    p = np.array(perm)
    dev = max(
        float(np.abs(a.S - b.S[np.ix_(p, p)]).max()),
        float(np.abs(a.twists - b.twists[p]).max()),
        phase_dev,
    )
    mapping = {a.labels[i]: b.labels[perm[i]] for i in range(len(a))}
    payload.update(equal=dev <= tol, deviation=dev, permutation=mapping)
    text = f"max deviation {dev:.3e} (tolerance {tol:g}): {'equal' if dev <= tol else 'differ'}"
    if args.allow_permutation or a.labels != b.labels:
        text += "\nlabel map: " + ", ".join(f"{k} -> {v}" for k, v in mapping.items())
    _emit(args, payload, text)
    return EXIT_OK if dev <= tol else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        md = families.build_family(args.family, args.param)
    except families.FamilyError as exc:
        raise UsageError(str(exc)) from exc
    rep = verify(md, args.tolerance, args.int_tolerance)
    s = _summary(md)
    sections = [
        f"# {md.name}",
        f"sectors: {s['sectors']}   mu: {s['mu']:.12g}   c mod 8: {s['c_mod_8']}",
        "",
        "## Arbitrated choices",
        *(f"- {n}" for n in md.report),
        "",
        "## Verification",
        rep.table(),
    ]
    payload = {"summary": s, "choices": [str(n) for n in md.report], "verification": rep.to_dict()}
    ok = rep.passed
    if args.family in ("spin_level2", "orbifold_u1"):
        l = args.param
        suffix = "_hat" if args.family == "spin_level2" else ""
        bad = families.check_fusion_relations(md, l, suffix)
        if args.family == "spin_level2":
            parent, table = families.build_su_m_level1(l), br.branching_su_to_spin(l)
        else:
            parent, table = families.build_u1(2 * l), br.branching_u1_to_orbifold(l)
        inter = br.verify_intertwining(parent, md, table, args.tolerance)
        cls = br.classify_sectors(md, table)
        phase_ok = br.c_phase_check(parent, md, args.tolerance)
        ok = ok and not bad and inter.passed and phase_ok
        sections += [
            "",
            "## Simple-current fusion facts",
            "all hold" if not bad else "\n".join(bad),
            "",
            f"## Relation to {parent.name}",
            f"intertwining deviation: {inter.deviation:.3e} ({'pass' if inter.passed else 'fail'})",
            f"dim W: {br.dim_w(table)}",
            f"twisted sectors: {', '.join(cls.twisted_labels)}",
            f"untwisted sum d^2 = {cls.untwisted_dim_sum:.12g} < mu = {cls.mu:.12g}",
            f"C^3 matches parent: {phase_ok}",
        ]
        payload.update(
            fusion_violations=bad,
            intertwining=inter.deviation,
            dim_w=br.dim_w(table),
            twisted=list(cls.twisted_labels),
            untwisted_dim_sum=cls.untwisted_dim_sum,
            c_phase=phase_ok,
        )
    _emit(args, payload, "\n".join(sections))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=_positive_float, default=REL_TOL, help="relation tolerance (default 1e-9)")
    common.add_argument(
        "--int-tolerance", type=_positive_float, default=INT_TOL, help="integrality tolerance (default 1e-6)"
    )
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="modular-orbifold", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="construct a family member and write its JSON")
    b.add_argument("family", choices=list(families.FAMILIES))
    b.add_argument("param", type=int)
    b.add_argument("-o", "--out", help="output path (default: stdout)")

    v = sub.add_parser("verify", parents=[common], help="run every modular relation on a JSON file")
    v.add_argument("input")

    f = sub.add_parser("fusion", parents=[common], help="print Verlinde fusion rules")
    f.add_argument("input")

    s = sub.add_parser("solve", parents=[common], help="reconstruct an orbifold S-matrix")
    s.add_argument("problem", nargs="?", help="solver problem JSON")
    s.add_argument("--family", choices=list(SOLVER_PROBLEMS), help="use a built-in problem")
    s.add_argument("--param", type=int, help="l for the built-in problem")
    s.add_argument("--emit-problem", help="also write the problem JSON here")
    s.add_argument("-o", "--out", help="write solutions JSON here")

    c = sub.add_parser("compare", parents=[common], help="compare two modular data files")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--allow-permutation", action="store_true", help="search for a label permutation")

    r = sub.add_parser("report", parents=[common], help="construction and verification report for a family member")
    r.add_argument("family", choices=list(families.FAMILIES))
    r.add_argument("param", type=int)
    return p


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "fusion": cmd_fusion,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, io.DocumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModularDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
