"""Command-line front end: ``nilmap <command> ...``.

Exit codes: 0 verdict computed, 1 verdict computed and the property fails
(or the input lacks a property the command needs), 2 usage or parse error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from .errors import DimensionError, InvariantBreach, ParseError, PreconditionError
from .fixedpoints import fixed_point_search
from .fuzz import FAMILIES, VIOLATION, fuzz_jn
from .inverse import default_cap, invert_keller, verify_inverse
from .nilpotency import (euler_identity_check, is_nilpotent, jacobian_rank_detail, lemma1_bridge,
                         sign_classify, two_form_identity_check)
from .pmap import parse_pmap, print_pmap
from .polymap import PolyMap, is_keller, realify
from .reduction import blow_up, to_nilpotent_form
from .report import RunReport

OK, VIOLATED, USAGE, BREACH = 0, 1, 2, 3
T_NAME = "t"


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _load(path: str, reserved: Sequence[str] = ()) -> PolyMap:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_pmap(text, reserved=reserved).to_polymap()
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.message}", exc.line, exc.column) from exc


def _emit(out, *lines):
    for line in lines:
        print(line, file=out)


# --- command handlers: each returns an exit code and fills the report ----------------


def _cmd_check(args, rep, out):
    F = _load(args.file)
    rep.add_input("map", print_pmap(F))
    if args.property == "keller":
        res = is_keller(F)
        rep.verdicts = {"keller": bool(res), "determinant": res.determinant}
        _emit(out, f"keller: {'yes' if res else 'no'}", f"det JF = {res.determinant.to_text()}")
        return OK if res else VIOLATED
    res = is_nilpotent(F)
    rep.verdicts = {"nilpotent": bool(res), "index": res.index, "power": res.power,
                    "trace": res.trace}
    if res:
        _emit(out, "nilpotent: yes" + (f" (JN^{res.index} = 0)" if res.index else ""))
        return OK
    _emit(out, "nilpotent: no", f"witness: trace(JN^{res.power}) = {res.trace.to_text()}")
    return VIOLATED


def _cmd_bridge(args, rep, out):
    N = _load(args.file, reserved=(T_NAME,))
    rep.add_input("map", print_pmap(N))
    B = lemma1_bridge(N, T_NAME)
    keller = is_keller(B)
    nil = is_nilpotent(N)
    unit = bool(keller) and keller.constant == 1
    rep.verdicts = {"bridge": B, "det_is_one": unit, "nilpotent": bool(nil)}
    _emit(out, print_pmap(B).rstrip(), f"det J = {keller.determinant.to_text()}",
          f"nilpotent: {'yes' if nil else 'no'}")
    if unit != bool(nil):
        raise InvariantBreach("bridge determinant disagrees with the nilpotency test")
    return OK


def _cmd_blowup(args, rep, out):
    F = _load(args.file, reserved=(T_NAME,))
    rep.add_input("map", print_pmap(F))
    Ft = blow_up(F, T_NAME)
    rep.verdicts = {"blow_up": Ft}
    _emit(out, print_pmap(Ft).rstrip())
    return OK


def _cmd_reduce(args, rep, out):
    F = _load(args.file)
    rep.add_input("map", print_pmap(F))
    res = to_nilpotent_form(F)
    rep.verdicts = {"N": res.N, "nilpotent": bool(res.nilpotency), "added_dims": res.added_dims,
                    "measures": res.measures, "links_verified": res.all_links_verified(),
                    "notes": res.notes}
    rep.witnesses = [{"stage": link["stage"], **{k: v for k, v in link.items() if k != "stage"}}
                     for link in res.links]
    _emit(out, print_pmap(res.N).rstrip(),
          f"added dimensions: {res.added_dims}",
          f"elimination measures: {res.measures}",
          *(f"link {link['stage']}: {'replayed' if link['verified'] else 'FAILED'}"
            for link in res.links),
          *(f"note: {note}" for note in res.notes))
    return OK if res.all_links_verified() else BREACH


def _cmd_invert(args, rep, out):
    F = _load(args.file)
    rep.add_input("map", print_pmap(F))
    cap = args.cap if args.cap is not None else default_cap(F)
    rep.parameters["cap"] = cap
    keller = is_keller(F)
    if not keller:
        rep.verdicts = {"keller": False, "determinant": keller.determinant}
        _emit(out, f"not a Keller map: det JF = {keller.determinant.to_text()}")
        return VIOLATED
    res = invert_keller(F, cap)
    if not res:
        rep.verdicts = {"inverted": False, "cap": cap}
        _emit(out, f"no polynomial inverse found up to degree {cap} (not a proof of non-invertibility)")
        return VIOLATED
    check = verify_inverse(F, res.inverse)
    if not check:
        raise InvariantBreach("converged inverse fails exact verification")
    rep.verdicts = {"inverted": True, "inverse": res.inverse, "degree": res.inverse.degree(),
                    "verified": True}
    _emit(out, print_pmap(res.inverse).rstrip(), "verified: F o G = G o F = Id")
    return OK


def _cmd_fixed_points(args, rep, out):
    N = _load(args.file)
    rep.add_input("map", print_pmap(N))
    rep.parameters.update({"seeds": args.seeds, "tol": args.tol})
    res = fixed_point_search(N, seeds=args.seeds, tol=args.tol, seed=args.seed)
    exact = [[str(v) for v in p] for p in res.exact]
    rep.verdicts = {"nilpotent": res.nilpotent, "clusters": len(res.clusters),
                    "converged": res.converged, "exact": exact,
                    "approximate": [list(c.point) for c in res.clusters]}
    _emit(out, f"nilpotent: {'yes' if res.nilpotent else 'no'}",
          f"converged starts: {res.converged}",
          f"clusters: {len(res.clusters)}")
    for c in res.clusters:
        pt = ", ".join(f"{z.real:.10g}{z.imag:+.10g}i" for z in c.point)
        tag = "exact " + ", ".join(str(v) for v in c.exact) if c.exact else (
            "refined" if c.confirmed else "unconfirmed")
        _emit(out, f"  ({pt})  x{c.size}  [{tag}]")
    if res.violation:
        rep.events.append({"event": VIOLATION, "points": exact})
        _emit(out, f"{VIOLATION}: {len(exact)} verified fixed points of a nilpotent map")
        return VIOLATED
    return OK


def _cmd_euler(args, rep, out):
    N = _load(args.file)
    rep.add_input("map", print_pmap(N))
    res = euler_identity_check(N, args.k)
    rep.verdicts = {"passed": res.passed, "failing_component": res.failing_component}
    _emit(out, f"JN(X) X = {args.k} N(X): {'holds' if res else 'fails'}" +
          ("" if res else f" ({res.detail})"))
    return OK if res else VIOLATED


def _cmd_euler2(args, rep, out):
    N1 = _load(args.file1)
    N2 = _load(args.file2)
    rep.add_input("first", print_pmap(N1))
    rep.add_input("second", print_pmap(N2))
    if N1.ring != N2.ring:
        raise DimensionError("the two files must declare the same variables")
    res = two_form_identity_check(N1, N2, args.k1, args.k2)
    eig = res.extra.get("eigenvalue")
    rep.verdicts = {"passed": res.passed, "failing_component": res.failing_component,
                    "eigenvalue": eig}
    _emit(out, f"two-form identity (k1={args.k1}, k2={args.k2}): {'holds' if res else 'fails'}",
          f"eigenvalue k1*lam^(k1-1) with lam^{args.k2 - args.k1} = {args.k1}/{args.k2}: "
          f"coordinates {[str(c) for c in eig.coords]}")
    return OK if res else VIOLATED


def _cmd_rank(args, rep, out):
    N = _load(args.file)
    rep.add_input("map", print_pmap(N))
    rank, exact = jacobian_rank_detail(N)
    rep.verdicts = {"rank": rank, "exact": exact}
    _emit(out, f"rank JN = {rank}" + ("" if exact else " (lower bound from random points)"))
    return OK


def _cmd_signs(args, rep, out):
    F = _load(args.file)
    rep.add_input("map", print_pmap(F))
    res = sign_classify(F)
    rep.verdicts = {"classification": res.classification.value,
                    "invertibility_implied": res.invertibility_implied, "reason": res.reason}
    _emit(out, f"sign class: {res.classification.value}",
          f"invertibility implied: {'yes' if res.invertibility_implied else 'no'}",
          f"reason: {res.reason}")
    return OK


def _cmd_realify(args, rep, out):
    F = _load(args.file)
    rep.add_input("map", print_pmap(F))
    R = realify(F)
    rep.verdicts = {"realified": R}
    _emit(out, print_pmap(R).rstrip())
    return OK


def _cmd_fuzz(args, rep, out):
    r = fuzz_jn(args.family, args.n, args.deg, args.count, args.seed, seeds=args.seeds,
                tol=args.tol)
    rep.parameters, rep.verdicts, rep.witnesses, rep.events = (
        r.parameters, r.verdicts, r.witnesses, r.events)
    v = r.verdicts
    _emit(out, f"family {args.family}, n={args.n}, deg={args.deg}: {v['maps']} maps",
          f"one verified fixed point: {v['unique_verified']}",
          f"no reconstructed fixed point: {v['unreconstructed']}",
          f"violations: {v['violations']}")
    if "oracle_mismatches" in v:
        _emit(out, f"triangular oracle mismatches: {v['oracle_mismatches']}")
    for ev in r.events:
        _emit(out, f"{VIOLATION} at map #{ev['index']}:", ev["map"].rstrip(), f"points: {ev['points']}")
    if "oracle_mismatches" in v and v["oracle_mismatches"]:
        return VIOLATED
    return VIOLATED if r.events else OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nilmap", description="Exact tools for polynomial maps and nilpotent Jacobians.")
    p.add_argument("--json", metavar="PATH", help="write a JSON run report")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, help_text, files=("file",)):
        sp = sub.add_parser(name, help=help_text)
        for f in files:
            sp.add_argument(f)
        sp.add_argument("--json", metavar="PATH", default=argparse.SUPPRESS)
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.set_defaults(handler=handler)
        return sp

    c = add("check", _cmd_check, "test the Keller condition or nilpotency", files=())
    c.add_argument("property", choices=("keller", "nilpotent"))
    c.add_argument("file")
    add("bridge", _cmd_bridge, "the map (x - t*N(x), t)")
    add("blowup", _cmd_blowup, "T-weighted blow-up of a map with F(0) = 0")
    add("reduce", _cmd_reduce, "stable equivalence to Id - N with witness chain")
    inv = add("invert", _cmd_invert, "formal inverse with exact verification")
    inv.add_argument("--cap", type=int, default=None)
    fp = add("fixed-points", _cmd_fixed_points, "numeric fixed-point search with exact checks")
    fp.add_argument("--seeds", type=int, default=64)
    fp.add_argument("--tol", type=float, default=1e-10)
    eu = add("euler", _cmd_euler, "check JN(X) X = k N(X)")
    eu.add_argument("--k", type=int, required=True)
    e2 = add("euler2", _cmd_euler2, "two-form identity over the extension ring", files=("file1", "file2"))
    e2.add_argument("--k1", type=int, required=True)
    e2.add_argument("--k2", type=int, required=True)
    add("rank", _cmd_rank, "generic rank of the Jacobian")
    add("signs", _cmd_signs, "coefficient-sign classification")
    add("realify", _cmd_realify, "the real map of 2n variables underlying a complex map")
    fz = add("fuzz", _cmd_fuzz, "search nilpotent families for extra fixed points", files=())
    fz.add_argument("--family", choices=FAMILIES, required=True)
    fz.add_argument("--n", type=int, required=True)
    fz.add_argument("--deg", type=int, required=True)
    fz.add_argument("--count", type=int, required=True)
    fz.add_argument("--seeds", type=int, default=64)
    fz.add_argument("--tol", type=float, default=1e-10)
    return p


def run_command(argv: Sequence[str] | None = None, out=None, err=None) -> tuple[int, RunReport | None]:
    """Run one invocation; returns (exit code, report).  Nothing is read from the environment."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except _Usage as exc:
        print(str(exc), file=err)
        return USAGE, None
    except SystemExit as exc:  # --help
        return (OK if not exc.code else USAGE), None
    name = args.command if args.command != "check" else f"check {args.property}"
    rep = RunReport(name, seed=args.seed)
    t0 = time.perf_counter()
    try:
        code = args.handler(args, rep, out)
    except InvariantBreach as exc:
        print(f"internal invariant breach (a bug): {exc}", file=err)
        code = BREACH
    except (ParseError, _Usage, DimensionError) as exc:
        print(f"error: {exc}", file=err)
        return USAGE, None
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=err)
        rep.verdicts = {"precondition": str(exc)}
        code = VIOLATED
    rep.timings["total"] = time.perf_counter() - t0
    rep.verdicts.setdefault("exit_code", code)
    if args.json:
        try:
            rep.write(args.json)
        except OSError as exc:
            print(f"cannot write {args.json}: {exc.strerror}", file=err)
            return USAGE, rep
    return code, rep


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run_command(argv)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
