"""Acceptance checks shared by ``koenigslab selftest`` and the test suite.

Every check is deterministic for a given seed and returns a plain record
``{id, name, status, details}``.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .criteria import cyclicity_affine, example48_check, example76_check
from .disc import boettcher, boettcher_norm_check, boettcher_residual, cor89_check
from .koenigs import abel_residual, commutation_residual, companion_symbol, eigenfunction, koenigs, resolvent_apply
from .series import DirichletSeries
from .shifts import (
    alternating_family,
    canonical_family,
    cesaro_approximation,
    commutant_blocks,
    double_commutant_structure,
    equivalence_classes,
)
from .symbols import Symbol, compose, power_term
from .taylor import TaylorSeries, tpow
from .verdict import FAIL, PASS, jsonable


def _rand_complex(rng, scale: float) -> complex:
    r = scale * rng.uniform(0.2, 1.0)
    return r * complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))


def _random_symbol(rng, c0: int, N: int, n_terms: int = 3, scale: float = 0.3) -> Symbol:
    idx = rng.choice(np.arange(2, 21), size=n_terms, replace=False)
    terms = {int(k): _rand_complex(rng, scale) for k in idx}
    re_c1 = sum(abs(v) for v in terms.values()) + rng.uniform(0.5, 2.0)
    terms[1] = complex(re_c1, rng.uniform(-2, 2))
    return Symbol.from_terms(c0, terms, N)


def _result(cid: int, name: str, ok: bool, details: dict) -> dict:
    return {"id": cid, "name": name, "status": PASS if ok else FAIL, "details": jsonable(details)}


def check_affine_closed_form(rng) -> dict:
    worst = 0.0
    for _ in range(20):
        c0 = int(rng.integers(2, 6))
        c1 = complex(rng.uniform(0.01, 2.99), rng.uniform(-3, 3))
        u = koenigs(Symbol.affine(c0, c1, 64)).u
        target = DirichletSeries.constant(64, c1 / (c0 - 1))
        worst = max(worst, u.psi.max_abs_diff(target) if u.c0 == 1 else math.inf)
    return _result(1, "affine Koenigs closed form", worst < 1e-14, {"max_error": worst})


def check_cross_scheme(rng) -> dict:
    agree, resid = 0.0, 0.0
    for i in range(10):
        phi = _random_symbol(rng, (1, 2, 3)[i % 3], 64)
        a = koenigs(phi, scheme="recurrence")
        b = koenigs(phi, scheme="iterative", tol=1e-13)
        agree = max(agree, a.u.max_abs_diff(b.u))
        resid = max(resid, abel_residual(a.u, phi), abel_residual(b.u, phi))
    return _result(2, "cross-scheme agreement", agree <= 1e-8 and resid <= 1e-10, {"max_disagreement": agree, "max_residual": resid})


def check_power_term_support(rng) -> dict:
    N = 64
    bad_support, worst = 0, 0.0
    for _ in range(100):
        c0 = int(rng.integers(1, 4))
        kmax = int(math.floor(N ** (1.0 / c0) + 1e-9))
        k = int(rng.integers(2, kmax + 1))
        phi = _random_symbol(rng, c0, N)
        f = power_term(k, phi)
        base = k**c0
        support = f.support()
        bad_support += sum(1 for n in support if n % base)
        worst = max(worst, abs(f[base] - complex(k) ** (-phi.c1)))
    return _result(3, "power term support and leading coefficient", bad_support == 0 and worst <= 1e-12,
                   {"off_support_terms": bad_support, "max_leading_error": worst})


def check_eigen_relation(rng) -> dict:
    phi = Symbol.from_terms(1, {1: 2.0, 2: 1.0}, 64)
    u = koenigs(phi).u
    worst = 0.0
    for m in (2, 3, 5):
        f = eigenfunction(m, u)
        worst = max(worst, compose(f, phi).max_abs_diff(f * (m ** -2.0)))
    return _result(4, "eigenfunction relation", worst <= 1e-8, {"max_error": worst})


def check_companion(rng) -> dict:
    w = companion_symbol(Symbol.affine(2, 1.0, 64), 3)
    exact = w.c0 == 3 and w.psi.max_abs_diff(DirichletSeries.constant(64, 2.0)) == 0.0
    phi = Symbol.from_terms(2, {1: 2.0, 2: 1.0}, 81)
    res = commutation_residual(phi, companion_symbol(phi, 3))
    return _result(5, "companion witness", exact and res <= 1e-8, {"affine_exact": exact, "residual": res})


def check_resolvent(rng) -> dict:
    phi = Symbol.affine(2, 1.0, 64)
    worst = 0.0
    for lam in (2.0, -1.0, 0.5 + 0.5j):
        for _ in range(5):
            g = DirichletSeries(64, rng.normal(size=64) + 1j * rng.normal(size=64))
            G = resolvent_apply(phi, lam, g)
            worst = max(worst, (compose(G, phi) - G * lam).max_abs_diff(g))
    return _result(6, "resolvent", worst <= 1e-8, {"max_residual": worst})


def check_examples(rng) -> dict:
    got = {
        "example76(5/2,1/2)": example76_check(2.5, 0.5).status,
        "example48(1,0.2)": example48_check(1.0, 0.2).status,
        "example48(1,0.25)": example48_check(1.0, 0.25).status,
        "cyclicity_affine(2 pi i/log 2)": cyclicity_affine(2j * math.pi / math.log(2)).status,
        "cor route (1/3)z(1+z/2)": cor89_check(1 / 3, TaylorSeries.from_terms(32, {1: 0.5})).status,
    }
    want = [PASS, PASS, FAIL, FAIL, PASS]
    return _result(7, "example predicates", list(got.values()) == want, got)


def check_boettcher(rng) -> dict:
    M = 32
    mono = 0.0
    for p in (2, 3):
        u = boettcher(TaylorSeries.from_terms(M, {p: 1.0}))
        mono = max(mono, u.max_abs_diff(TaylorSeries.identity(M)))
    phi = TaylorSeries.from_terms(M, {2: 0.25, 3: 1 / 16})
    u = boettcher(phi)
    res = boettcher_residual(u, phi, 2, 0.25)
    norm = boettcher_norm_check(TaylorSeries.from_terms(M, {2: 0.5, 4: 0.25}))
    ok = mono == 0.0 and abs(u[1] - 1) == 0 and res <= 1e-10 and norm.status == PASS
    return _result(8, "Boettcher coordinates", ok, {"monomial_error": mono, "u1": u[1], "residual": res, "norm_check": norm.status})


def check_shift_structure(rng) -> dict:
    fam = canonical_family(2, 1.0, 5, 8)
    blocks = commutant_blocks(fam)
    dc = double_commutant_structure(fam)
    cls = equivalence_classes(fam)
    alt = equivalence_classes(alternating_family(4, 8), mode="finite-horizon")
    d = {
        "pattern_deviation": blocks["pattern_deviation"],
        "double_commutant_dimension": dc["dimension"],
        "shared_pattern_deviation": dc["shared_pattern_deviation"],
        "classes": cls["classes"],
        "statement": cls["statement"],
        "alternating_classes": alt["classes"],
        "alternating_verdict": alt["verdict"].status,
    }
    ok = (
        blocks["all_patterned"]
        and dc["dimension"] == fam.K + 1
        and dc["shared_pattern_deviation"] <= 1e-10
        and len(cls["classes"]) == 1
        and cls["verdict"].status == PASS
        and len(alt["classes"]) == 2
        and alt["verdict"].status == FAIL
    )
    return _result(9, "shift structure", ok, d)


def check_cesaro(rng) -> dict:
    fam = canonical_family(2, 1.0, 3, 10)
    bound, conv, errs = True, True, []
    for _ in range(3):
        a = rng.normal(size=4) + 1j * rng.normal(size=4)
        rep = cesaro_approximation(fam, a, L=200, tol=1e-6)
        bound = bound and rep["bound_W_holds"]
        conv = conv and rep["converged"] and rep["monotone"]
        errs.append(rep["final_error"])
    return _result(10, "Cesaro means", bound and conv, {"norm_bound_W": bound, "converged_1e-6": conv, "final_errors": errs})


CHECKS = (
    check_affine_closed_form,
    check_cross_scheme,
    check_power_term_support,
    check_eigen_relation,
    check_companion,
    check_resolvent,
    check_examples,
    check_boettcher,
    check_shift_structure,
    check_cesaro,
)


def _run_one(args):
    fn, seed = args
    return fn(np.random.default_rng([seed, CHECKS.index(fn)]))


def run_checks(seed: int = 0, threads: int = 0) -> list[dict]:
    """Checks 1 to 10; each gets its own seeded generator so order and threading do not matter."""
    jobs = [(fn, seed) for fn in CHECKS]
    if threads > 0:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def run_selftest(seed: int = 0, threads: int = 0) -> dict:
    first = run_checks(seed, threads)
    second = run_checks(seed, threads)
    same = json.dumps(first) == json.dumps(second)
    results = first + [_result(11, "determinism", same, {"repeated_runs_identical": same})]
    return {"seed": seed, "passed": all(r["status"] == PASS for r in results), "results": results}
