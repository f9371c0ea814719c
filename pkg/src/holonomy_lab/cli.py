"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from . import catalog
from .acceptance import DEFAULT_SEED, SAMPLE_TIMES, run_all
from .curvature import k_contact_check, ricci
from .exterior import Form
from .flow import (ScalarODE, build_hitchin_system, build_hypo_ode, explicit_solution,
                   first_integral_drift, integrate)
from .holonomy import certify_g2, certify_su3
from .liealg import jacobi_check
from .scalars import ParseError, parse_rational
from .structfile import StructureFileError, dumps, from_algebra, load
from .structures import check_hypo, check_hypo_contact, check_su2

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    inputs: Dict[str, object] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    tables: Dict[str, object] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)
    raw: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> Dict[str, object]:
        return {"command": self.command, "inputs": _jsonable(self.inputs),
                "verdicts": self.verdicts, "passed": self.passed,
                "residuals": self.residuals, "tables": _jsonable(self.tables),
                "timings": self.timings}

    def render(self) -> str:
        if self.raw is not None:
            return self.raw.rstrip("\n")
        out = [f"{self.command}"]
        for k, v in self.inputs.items():
            out.append(f"  {k:<14} {_fmt(v)}")
        out.extend(self.lines)
        if self.residuals:
            w = max(len(k) for k in self.residuals)
            for k, v in self.residuals.items():
                out.append(f"  {k:<{w}}  {v:.3e}")
        if self.verdicts:
            w = max(len(k) for k in self.verdicts)
            for k, v in self.verdicts.items():
                out.append(f"  {k:<{w}}  {'PASS' if v else 'FAIL'}")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out)


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    return str(x)


def _parse_sets(items: Optional[Sequence[str]]) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for group in items or []:
        for item in group:
            name, eq, val = item.partition("=")
            if not eq or not name.strip():
                raise UsageError(f"--set expects name=value, got {item!r}")
            try:
                out[name.strip()] = parse_rational(val)
            except ParseError as exc:
                raise UsageError(str(exc)) from None
    return out


def _parse_times(text: Optional[str]) -> Tuple:
    if not text:
        return SAMPLE_TIMES
    try:
        return tuple(float(parse_rational(t)) if "." in t else parse_rational(t)
                     for t in text.split(","))
    except ParseError as exc:
        raise UsageError(str(exc)) from None


def _load(path: str):
    try:
        return load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _algebra_from_args(args):
    sets = _parse_sets(args.set)
    if getattr(args, "file", None):
        sf = _load(args.file)
        try:
            return sf.algebra(sets), sf.su2(sets), {"file": args.file, **sets}
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    fid = args.family
    try:
        e = catalog.family(fid, sets)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except (catalog.DomainError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    return e.algebra, e.structure, {"family": fid, **sets}


# subcommands


def cmd_jacobi(args) -> Report:
    g, _, inputs = _algebra_from_args(args)
    rep = Report("jacobi", inputs)
    res = jacobi_check(g)
    for i, f in sorted(res.failures.items()):
        rep.lines.append(f"  d(de{i}) = {f}")
    rep.verdicts["d^2 = 0"] = res.passed
    return rep


def cmd_hypo_check(args) -> Report:
    g, s, inputs = _algebra_from_args(args)
    if s is None:
        raise UsageError("the file defines no complete SU(2)-structure (eta, omega1..3)")
    rep = Report("hypo-check", inputs)
    su2 = check_su2(s)
    rep.verdicts["SU(2) compatibility"] = su2.passed
    rep.verdicts["Jacobi"] = jacobi_check(g).passed
    hyp = check_hypo(g, s)
    rep.verdicts["hypo"] = hyp.passed
    hc = check_hypo_contact(g, s)
    rep.tables["hypo-contact"] = hc.passed
    rep.lines.append(f"  hypo-contact   {'yes' if hc.passed else 'no'}")
    for name in hyp.failing():
        rep.lines.append(f"  {name} = {hyp.residuals[name]}")
    return rep


def cmd_ricci(args) -> Report:
    g, _, inputs = _algebra_from_args(args)
    rep = Report("ricci", inputs)
    eta = Form.basis(g.dim, g.dim)
    r = ricci(g, eta=eta)
    rep.tables["diagonal"] = [str(x) for x in r.diagonal()]
    rep.tables["scalar"] = str(r.scalar)
    rep.lines.append("  Ric diagonal   (" + ", ".join(str(x) for x in r.diagonal()) + ")")
    if not r.is_diagonal():
        rep.lines.append("  off-diagonal entries present")
    rep.lines.append(f"  scalar         {r.scalar}")
    if r.eta_einstein is not None:
        tau, nu = r.eta_einstein
        rep.tables["tau"], rep.tables["nu"] = str(tau), str(nu)
        rep.lines.append(f"  eta-Einstein   tau = {tau}, nu = {nu}")
    else:
        rep.tables["tau"] = rep.tables["nu"] = None
        rep.lines.append("  eta-Einstein   no")
    if g.dim == 5:
        kc = k_contact_check(g)
        rep.tables["k_contact"] = kc.passed
        rep.lines.append("  K-contact      " + ("yes" if kc.passed else f"no, fails at {list(kc.failures)}"))
    rep.verdicts["symmetric Ricci"] = all(
        r.ricci[i][j] == r.ricci[j][i] for i in range(g.dim) for j in range(g.dim))
    return rep


def cmd_catalog(args, out: TextIO) -> Report:
    rep = Report(f"catalog {args.action}")
    if args.action == "list":
        for fid, names in catalog.FAMILY_PARAMS.items():
            rep.lines.append(f"  {fid:<4} params ({', '.join(names)})  -> {catalog.CANONICAL_TARGET[fid]}")
        for h in ("h1", "h2", "h3", "h4", "h5"):
            rep.lines.append(f"  {h}   canonical algebra")
        return rep
    if not args.id:
        raise UsageError("catalog dump needs a family id")
    fid = args.id
    try:
        if fid in catalog.FAMILY_PARAMS:
            e = catalog.family(fid)
            sf = from_algebra(e.algebra, su2=e.structure)
        else:
            sf = from_algebra(catalog.canonical(fid))
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    rep.tables["text"] = rep.raw = dumps(sf, fid)
    return rep


def _flow_system(fid: str, sets):
    try:
        if fid in ("K", "Ktilde"):
            return build_hitchin_system(fid, sets)
        return build_hypo_ode(fid, sets)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_evolve(args) -> Report:
    sets = _parse_sets(args.set)
    system = _flow_system(args.family, sets)
    rep = Report("evolve", {"family": args.family, **sets, "t_end": args.t_end, "tol": args.tol})
    t0 = time.perf_counter()
    tr = integrate(system, args.t_end, args.tol)
    rep.timings["integrate"] = time.perf_counter() - t0
    rep.lines.append(f"  status         {tr.status}")
    rep.lines.append(f"  nodes          {len(tr.times)}")
    rep.lines.append(f"  final t        {tr.t_final:.10g}")
    rep.lines.append("  final state    " + _fmt(tuple(f"{v:.12g}" for v in tr.values[-1])))
    rep.tables["status"] = tr.status
    rep.tables["t_final"] = tr.t_final
    if isinstance(system, ScalarODE):
        drift = first_integral_drift(system, tr)
        rep.residuals["first-integral drift"] = drift
        rep.verdicts["first integral conserved"] = drift < max(1e-9, 100 * args.tol)
    if args.table:
        with open(args.table, "w", encoding="utf-8") as fh:
            fh.write(tr.as_table())
        rep.lines.append(f"  table          {args.table}")
    return rep


def _cert_report(name: str, cert) -> Report:
    d = cert.to_dict()
    rep = Report(name, d["inputs"])
    if "sample_times" in cert.inputs:
        rep.inputs["sample_times"] = [str(t) for t in cert.inputs["sample_times"]]
    rep.residuals.update(cert.residuals)
    rep.tables.update({"rank": cert.rank, "per_time_rank": list(cert.per_time_rank),
                       "exact_rank": cert.exact_rank, "verdict": cert.verdict,
                       "pivot_ratio": cert.pivot_ratio, "rank_gap": cert.gap})
    rep.lines.append(f"  rank           {cert.rank} (per time {list(cert.per_time_rank)}, "
                     f"{'exact' if cert.exact_rank else 'float'})")
    rep.lines.append(f"  verdict        {cert.verdict}")
    rep.verdicts["residuals below tolerance"] = cert.max_residual < cert.tol
    rep.verdicts[f"rank {cert.expected_rank}"] = cert.rank == cert.expected_rank
    return rep


def cmd_holonomy(args) -> Report:
    sets = _parse_sets(args.set)
    times = _parse_times(args.times)
    system = _flow_system(args.family, sets)
    if not isinstance(system, ScalarODE):
        raise UsageError("use the g2 subcommand for K and Ktilde")
    source = _trajectory(system, times, args.tol)
    cert = certify_su3(args.family, sets, source, times, tol=1e-8)
    return _cert_report("holonomy", cert)


def _trajectory(system, times, tol):
    span = max(float(t) for t in times)
    if span == 0:
        return None
    tr = integrate(system, span, tol, sample_times=[float(t) for t in times])
    missing = [t for t in times if not tr.covers(float(t))]
    if missing:
        raise _MathFailure(f"solution stops at t={tr.t_final:.6g} before sample time(s) {missing}")
    return tr


class _MathFailure(Exception):
    pass


def cmd_g2(args) -> Report:
    sets = _parse_sets(args.set)
    times = _parse_times(args.times)
    system = _flow_system(args.kind, sets)
    if args.explicit:
        if args.kind != "K" or any(sets.get(k, d) != d for k, d in (("a", 0), ("b", 0), ("a1", 2))):
            raise UsageError("--explicit needs --kind K with a=0 b=0 a1=2")
        source = explicit_solution("K-explicit")
    else:
        source = _trajectory(system, times, args.tol)
    cert = certify_g2(args.kind, sets, source, times, tol=1e-8)
    return _cert_report("g2", cert)


def cmd_verify(args) -> Report:
    threads = args.threads or int(os.environ.get("HOLONOMY_LAB_THREADS", "1") or 1)
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise UsageError("--only expects comma-separated criterion numbers") from None
    rep = Report("verify-paper", {"seed": args.seed, "threads": threads})
    results = run_all(args.seed, only, threads)
    for r in results:
        rep.lines.append("  " + r.line())
        rep.verdicts[f"AC{r.number}"] = r.passed
        rep.timings[f"AC{r.number}"] = r.seconds
    rep.tables["criteria"] = [r.to_dict() for r in results]
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holonomy-lab",
                                description="Structure equations, curvature and holonomy checks.")
    p.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    sub = p.add_subparsers(dest="command", required=True)

    def with_set(sp):
        sp.add_argument("--set", nargs="+", action="append", metavar="K=V",
                        help="parameter values, e.g. --set r=1 a=1/2")

    sp = sub.add_parser("jacobi", help="check d^2 = 0 for a structure file")
    sp.add_argument("file")
    with_set(sp)
    sp = sub.add_parser("hypo-check", help="SU(2), hypo and hypo-contact checks for a file")
    sp.add_argument("file")
    with_set(sp)
    sp = sub.add_parser("ricci", help="Ricci tensor, eta-Einstein fit and K-contact test")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--file")
    src.add_argument("--family")
    with_set(sp)
    sp = sub.add_parser("catalog", help="list families or dump one as a structure file")
    sp.add_argument("action", choices=("list", "dump"))
    sp.add_argument("id", nargs="?")
    sp = sub.add_parser("evolve", help="integrate an evolution ODE")
    sp.add_argument("--family", required=True, help="F1, F2, F4, F5, K or Ktilde")
    with_set(sp)
    sp.add_argument("--t-end", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--table", metavar="PATH", help="write the trajectory as a column table")
    sp = sub.add_parser("holonomy", help="certify SU(3) holonomy of a hypo evolution")
    sp.add_argument("--family", required=True)
    with_set(sp)
    sp.add_argument("--times", help="comma-separated sample times (default 0,0.05,0.1)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp = sub.add_parser("g2", help="certify G2 holonomy of a Hitchin evolution")
    sp.add_argument("--kind", required=True, choices=("K", "Ktilde"))
    with_set(sp)
    sp.add_argument("--times", help="comma-separated sample times (default 0,0.05,0.1)")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--explicit", action="store_true", help="use the closed-form solution")
    for name in ("verify-paper", "verify"):
        sp = sub.add_parser(name, help="run the full acceptance suite")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--only", help="comma-separated criterion numbers")
        sp.add_argument("--threads", type=int, default=0)
    return p


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
        err: Optional[TextIO] = None) -> Tuple[int, Optional[Report]]:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), None
    handlers = {
        "jacobi": cmd_jacobi, "hypo-check": cmd_hypo_check, "ricci": cmd_ricci,
        "evolve": cmd_evolve, "holonomy": cmd_holonomy, "g2": cmd_g2,
        "verify-paper": cmd_verify, "verify": cmd_verify,
    }
    t0 = time.perf_counter()
    try:
        if args.command == "catalog":
            rep = cmd_catalog(args, out)
        else:
            rep = handlers[args.command](args)
    except (UsageError, StructureFileError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE, None
    except _MathFailure as exc:
        rep = Report(args.command, verdicts={"solution covers sample times": False})
        rep.lines.append(f"  {exc}")
    rep.timings["total"] = time.perf_counter() - t0
    print(rep.render(), file=out)
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(rep.to_dict(), fh, indent=2)
        except OSError as exc:
            print(f"error: cannot write {args.json}: {exc.strerror}", file=err)
            return EXIT_USAGE, rep
    return (EXIT_OK if rep.passed else EXIT_FAIL), rep


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
