"""Command-line entry point: ``koenigslab <command> [options]``.

Exit codes: 0 success or PASS, 1 FAIL, 2 bad input or violated
precondition, 3 UNDETERMINED or NOT_APPLICABLE.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance, criteria, disc, koenigs as kg, shifts
from .errors import KoenigsLabError, ParseError
from .series import DirichletSeries
from .symbols import Symbol, compose
from .taylor import TaylorSeries
from .verdict import FAIL, PASS, UNDETERMINED, Verdict, jsonable

EXIT = {PASS: 0, FAIL: 1, UNDETERMINED: 3, "NOT_APPLICABLE": 3}


def _load_json(text: str, what: str):
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {what} file: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at position {exc.pos}: {exc.msg}") from exc


def _symbol(args) -> Symbol:
    if args.symbol is None:
        raise ParseError("--symbol is required")
    return Symbol.from_record(_load_json(args.symbol, "symbol"), trunc=args.trunc)


def _series(args) -> DirichletSeries:
    if args.series is None:
        raise ParseError("--series is required")
    rec = _load_json(args.series, "series")
    if isinstance(rec, list):
        from .series import parse_triples

        return DirichletSeries.from_terms(args.trunc, parse_triples(rec, start=1))
    return DirichletSeries.from_record(rec, trunc=args.trunc)


def _taylor(args) -> TaylorSeries:
    if args.series is None:
        raise ParseError("--series is required (Taylor coefficients [[j, re, im], ...])")
    return TaylorSeries.from_record(_load_json(args.series, "series"), trunc=args.taylor_trunc)


def _family(args) -> shifts.WeightFamily:
    if args.family is not None:
        return shifts.WeightFamily.from_record(_load_json(args.family, "family"))
    if args.alternating:
        return shifts.alternating_family(args.alternating, args.K)
    return shifts.canonical_family(args.c0, complex(args.c1), args.mmax, args.K)


# command handlers return (report, exit status)

def cmd_koenigs(args):
    phi = _symbol(args)
    res = kg.koenigs(phi, scheme=args.scheme, tol=args.tol, max_iter=args.max_iter)
    return res.to_record(), PASS


def cmd_spectrum(args):
    return kg.spectrum_points(_symbol(args), args.points).to_record(), PASS


def cmd_companion(args):
    phi = _symbol(args)
    w = kg.companion_symbol(phi, args.c)
    return {"companion": w.to_record(), "commutation_residual": kg.commutation_residual(phi, w)}, PASS


def cmd_resolvent(args):
    phi, g = _symbol(args), _series(args)
    lam = complex(args.lam)
    G = kg.resolvent_apply(phi, lam, g, tol=args.tol, max_iter=args.max_iter)
    res = (compose(G, phi) - G * lam).max_abs_diff(g)
    return {"lambda": lam, "solution": G.to_record(), "residual": res}, PASS


def cmd_eigenfunction(args):
    phi = _symbol(args)
    u = kg.koenigs(phi, tol=args.tol, max_iter=args.max_iter).u
    f = kg.eigenfunction(args.m, u)
    ev = complex(args.m) ** (-phi.c1)
    return {"eigenvalue": ev, "eigenfunction": f.to_record(), "residual": compose(f, phi).max_abs_diff(f * ev)}, PASS


def _verdict(v: Verdict):
    return v.to_record(), v.status


def cmd_criteria(args):
    kind = args.kind
    if kind == "example48":
        return _verdict(criteria.example48_check(args.c1, complex(args.c2)))
    if kind == "example76":
        return _verdict(criteria.example76_check(args.a, args.b))
    phi = _symbol(args)
    if kind == "cyclic":
        gate = criteria.cyclicity_gate(phi)
        if gate.status != UNDETERMINED:
            return _verdict(gate)
        if not np.any(phi.psi0.coeffs != 0):
            return _verdict(criteria.cyclicity_affine(phi.c1, Nmax=args.nmax, tol=args.tol))
        return _verdict(criteria.dense_range_box(phi))
    if kind == "minimal":
        return _verdict(criteria.minimal_commutant_sufficient(phi))
    return _verdict(criteria.char2_commutant_verdict(phi))


def cmd_disc(args):
    phi = _taylor(args)
    kind = args.kind
    if kind == "boettcher":
        p, lam, _ = disc.split_boettcher(phi, args.p)
        u = disc.boettcher(phi, p)
        return {"p": p, "lambda": lam, "u": u.to_record(), "residual": disc.boettcher_residual(u, phi, p, lam)}, PASS
    if kind == "koenigs":
        u = disc.koenigs_disc(phi, max_iter=args.max_iter)
        return {"u": u.to_record(), "residual": disc.schroeder_residual(u, phi)}, PASS
    if kind == "starlike":
        u = disc.koenigs_disc(phi, max_iter=args.max_iter) if abs(phi[1]) > 0 else disc.boettcher(phi)
        v = disc.starlike_check(u, samples=args.samples)
        if args.csv:
            thetas, re, bar, _, _ = disc.starlike_samples(u, args.samples)
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["theta", "re_zu_over_u", "errorbar"])
                for row in zip(thetas, re, bar):
                    w.writerow([repr(float(x)) for x in row])
        return _verdict(v)
    # check
    if phi[1] == 0:
        return _verdict(disc.boettcher_norm_check(phi))
    lam = phi[1]
    M = phi.trunc
    psi = TaylorSeries(M - 1, np.concatenate([[0], phi.coeffs[2:] / lam]))
    return _verdict(disc.cor89_check(lam, psi))


def cmd_shifts(args):
    fam = _family(args)
    kind = args.kind
    if kind == "family":
        return {"labels": fam.labels, "family": fam.to_record()}, PASS
    if kind == "commutant":
        rep = shifts.commutant_blocks(fam)
        rep.pop("pairs")
        return rep, PASS if rep["all_patterned"] else FAIL
    if kind == "double":
        rep = shifts.double_commutant_structure(fam, growth_window=args.growth_window)
        rep.pop("solutions")
        return rep, PASS
    if kind == "classes":
        rep = shifts.equivalence_classes(fam, mode=args.mode, horizon=args.horizon)
        v = rep.pop("verdict")
        rec = v.to_record()
        rec.update(rep)
        return rec, v.status
    a = _load_json(args.a, "pattern")
    coeffs = [complex(x[0], x[1]) if isinstance(x, list) else complex(x) for x in a]
    rep = shifts.cesaro_approximation(fam, coeffs, L=args.L, tol=args.tol)
    rep.pop("errors")
    ok = rep["bound_W_holds"] and rep["converged"]
    return rep, PASS if ok else FAIL


def cmd_selftest(args):
    rep = acceptance.run_selftest(seed=args.seed, threads=_threads())
    return rep, PASS if rep["passed"] else FAIL


def _threads() -> int:
    raw = os.environ.get("KOENIGSLAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ParseError(f"KOENIGSLAB_THREADS must be an integer, got {raw!r}") from exc
    return max(n, 0)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def render(report, fmt: str) -> str:
    data = jsonable(report)
    if fmt == "json":
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    rows = [(k, json.dumps(v) if isinstance(v, list) else str(v)) for k, v in _flatten(data)]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, default=64, help="Dirichlet truncation N")
    common.add_argument("--taylor-trunc", type=int, default=32, help="Taylor truncation M")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--max-iter", type=int, default=10000)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--symbol", help="symbol JSON {c0, psi} or @file")
    common.add_argument("--series", help="series JSON record or @file")

    p = argparse.ArgumentParser(prog="koenigslab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("koenigs", parents=[common], help="Königs map of a symbol")
    s.add_argument("--scheme", choices=("recurrence", "iterative"), default="recurrence")
    s.set_defaults(fn=cmd_koenigs)
    s = sub.add_parser("spectrum", parents=[common], help="point spectrum of C_phi")
    s.add_argument("--points", type=int, default=10)
    s.set_defaults(fn=cmd_spectrum)
    s = sub.add_parser("companion", parents=[common], help="commuting companion symbol")
    s.add_argument("--c", type=int, required=True)
    s.set_defaults(fn=cmd_companion)
    s = sub.add_parser("resolvent", parents=[common], help="solve (C_phi - lambda) G = g")
    s.add_argument("--lam", required=True, help="complex number, e.g. 0.5+0.5j")
    s.set_defaults(fn=cmd_resolvent)
    s = sub.add_parser("eigenfunction", parents=[common], help="m^{-u} for the Königs map u")
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(fn=cmd_eigenfunction)

    s = sub.add_parser("criteria", parents=[common], help="cyclicity and commutant predicates")
    s.add_argument("kind", choices=("cyclic", "minimal", "example48", "example76", "char2"))
    s.add_argument("--nmax", type=int, default=50)
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--c1", type=float)
    s.add_argument("--c2", default="0")
    s.set_defaults(fn=cmd_criteria)

    s = sub.add_parser("disc", parents=[common], help="self-maps of the disc (Taylor input via --series)")
    s.add_argument("kind", choices=("boettcher", "koenigs", "starlike", "check"))
    s.add_argument("--p", type=int)
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--csv", help="write sampled (theta, Re(zu'/u)) rows to this file")
    s.set_defaults(fn=cmd_disc)

    s = sub.add_parser("shifts", parents=[common], help="weighted shift families")
    s.add_argument("kind", choices=("family", "commutant", "double", "classes", "cesaro"))
    s.add_argument("--family", help="family JSON {K, blocks} or @file")
    s.add_argument("--c0", type=int, default=2)
    s.add_argument("--c1", default="1")
    s.add_argument("--mmax", type=int, default=5)
    s.add_argument("--K", type=int, default=8)
    s.add_argument("--alternating", type=int, default=0, help="use the alternating family with this many blocks")
    s.add_argument("--growth-window", type=int, default=5)
    s.add_argument("--mode", choices=("auto", "closed-form", "finite-horizon"), default="auto")
    s.add_argument("--horizon", type=int, default=2048)
    s.add_argument("--a", default="[1]", help="pattern coefficients as JSON list")
    s.add_argument("--L", type=int, default=200)
    s.set_defaults(fn=cmd_shifts)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.trunc < 2 or args.taylor_trunc < 1:
            raise ParseError("--trunc must be >= 2 and --taylor-trunc >= 1")
        if not args.tol > 0:
            raise ParseError("--tol must be positive")
        report, status = args.fn(args)
    except (KoenigsLabError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT.get(status, 0)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
