"""Decision predicates for cyclicity and commutant questions.

Each predicate returns a :class:`~koenigslab.verdict.Verdict`.  PASS and
FAIL are only issued when the tested condition is decidable from the
truncated data; otherwise the verdict is UNDETERMINED and carries the bound
that was reached.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import PowerError
from .koenigs import _is_power_of, commutation_residual, companion_symbol
from .series import DirichletSeries
from .symbols import compose
from .symbols import Symbol, image_lower_bound
from .verdict import FAIL, NOT_APPLICABLE, PASS, UNDETERMINED, Verdict

EXAMPLE48_CONSTANT = -math.log(math.log(2)) / (1 + math.log(2))


def _tail(phi: Symbol):
    n = np.arange(2, phi.trunc + 1, dtype=float)
    return n, np.abs(phi.psi.coeffs[1:])


def cyclicity_gate(phi: Symbol) -> Verdict:
    if phi.c0 >= 2:
        return Verdict(FAIL, {"c0": phi.c0}, witness={"orthogonal_pair": [2, 3]})
    if phi.c0 == 0:
        return Verdict(FAIL, {"c0": 0})
    return Verdict(UNDETERMINED, {"c0": 1, "gate": "passed"})


def cyclicity_affine(c1: complex, Nmax: int = 50, tol: float = 1e-9) -> Verdict:
    """Affine symbol ``s + c1``: search ``c1 = 2 k pi i / log(m/n)`` with ``m, n <= Nmax``."""
    c1 = complex(c1)
    if c1.real > 0:
        return Verdict(PASS, {"re_c1": c1.real})
    tau = c1.imag
    for n, m in itertools.combinations(range(1, Nmax + 1), 2):
        ell = math.log(m / n)
        k = round(tau * ell / (2 * math.pi))
        dist = abs(c1 - 2j * math.pi * k / ell)
        if dist < tol:
            return Verdict(FAIL, {"distance": dist}, witness={"m": m, "n": n, "k": k})
    return Verdict(PASS, {"search_bound": Nmax, "scope": "up to search bound"})


def _bisect_decreasing(fn, target: float, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with ``fn(x) <= target`` for decreasing ``fn``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def dense_range_box(phi: Symbol) -> Verdict:
    """Look for ``a < 0 < sigma' < sigma`` certifying dense range of ``C_phi``.

    The three bounds are: ``sum |c_k| log k k^{-a} <= 1`` (univalence on
    ``Re s > a``), ``Re phi >= sigma`` on the right half-plane, and
    ``a + Re c1 + sum |c_k| k^{-a} <= sigma'``.  On the admissible range of
    ``a`` the last left-hand side, minus ``sigma``, is increasing in ``a``,
    so the smallest admissible ``a`` is the best choice.
    """
    if phi.c0 != 1 or phi.c1.real <= 0:
        return Verdict(NOT_APPLICABLE, {"c0": phi.c0, "re_c1": phi.c1.real})
    n, a_abs = _tail(phi)
    logs = np.log(n)
    if not np.any(a_abs > 0):
        return Verdict(PASS, {"affine": True})
    deriv = lambda a: float(np.sum(a_abs * logs * np.exp(-a * logs)))
    spread = lambda a: float(np.sum(a_abs * np.exp(-a * logs)))
    sigma = image_lower_bound(phi, 0.0)
    q = {"sigma_max": sigma}
    if deriv(0.0) > 1:
        q["reason"] = "no univalence half-plane to the left of 0"
        return Verdict(UNDETERMINED, q)
    lo = -1.0
    while deriv(lo) <= 1:
        lo *= 2
        if lo < -1e6:
            break
    a = _bisect_decreasing(deriv, 1.0, lo, 0.0)
    lower = a + phi.c1.real + spread(a)
    q.update({"a": a, "sigma_prime_min": lower})
    if sigma <= 0 or lower >= sigma:
        q["reason"] = "bounds cannot separate"
        return Verdict(UNDETERMINED, q)
    sigma_p = 0.5 * (max(lower, 0.0) + sigma)
    return Verdict(PASS, q, witness={"a": a, "sigma_prime": sigma_p, "sigma": sigma})


def example48_check(c1: float, c2: complex) -> Verdict:
    mod = abs(complex(c2))
    q = {"constant": EXAMPLE48_CONSTANT, "abs_c2": mod, "c1": float(c1)}
    ok = mod < EXAMPLE48_CONSTANT and mod < c1
    return Verdict(PASS if ok else FAIL, q)


def diag_minimal_commutant(lambdas, tag: str = "none", tol: float = 1e-12, center: complex = 0.0, radius: float = 1.0) -> Verdict:
    """Minimal commutant of a diagonal operator from a finite prefix plus a caller-supplied tag."""
    lam = np.asarray(list(lambdas), dtype=complex)
    for i in range(lam.size):
        close = np.nonzero(np.abs(lam[i + 1 :] - lam[i]) <= tol)[0]
        if close.size:
            return Verdict(FAIL, {"count": int(lam.size)}, witness={"duplicate": [i + 1, i + 2 + int(close[0])]})
    q = {"count": int(lam.size), "tag": tag}
    if tag == "convergent-to":
        return Verdict(PASS, q)
    if tag == "on-circle":
        dev = float(np.max(np.abs(np.abs(lam - center) - radius), initial=0.0))
        q["circle_deviation"] = dev
        return Verdict(PASS if dev <= tol else UNDETERMINED, q)
    return Verdict(UNDETERMINED, q)


def rotation_symbol(k: int, m0: int, N: int) -> Symbol:
    """``s + i tau`` with ``tau = 2 k pi / log m0``."""
    return Symbol.affine(1, 2j * math.pi * k / math.log(m0), N)


def rotation_witness(k: int, m0: int, ell: int, N: int) -> DirichletSeries:
    """``m0^{-(ell/k) s}`` as a single basis term; needs ``ell/k`` a positive integer."""
    if k == 0 or ell % k or ell // k < 1:
        raise ValueError("ell/k must be a positive integer")
    idx = m0 ** (ell // k)
    if idx > N:
        raise ValueError(f"index {idx} exceeds truncation {N}")
    return DirichletSeries.from_terms(N, {idx: 1.0})


def multiplier_commutes(b: DirichletSeries, phi: Symbol, tol: float = 1e-12) -> Verdict:
    gap = compose(b, phi.restrict(b.trunc)).max_abs_diff(b)
    return Verdict(PASS if gap <= tol else FAIL, {"gap": gap})


def minimal_commutant_sufficient(phi: Symbol, n_terms: int = 200) -> Verdict:
    """Quantitative sufficient condition for a minimal commutant.

    With the per-step gain ``g = Re c1 - sum_{k>=2} |c_k|``, the iterates
    map the closed right half-plane into ``Re s >= n g``, where
    ``|psi'| <= M_n = sum |c_k| log k k^{-n g}``.  The test is
    ``1 - prod(1 + M_n) * sum(M_n) > 0``.
    """
    if phi.c0 != 1:
        return Verdict(NOT_APPLICABLE, {"c0": phi.c0})
    n, a_abs = _tail(phi)
    if not np.any(a_abs > 0):
        return Verdict(NOT_APPLICABLE, {"reason": "psi is constant"})
    gain = phi.c1.real - float(np.sum(a_abs))
    if gain <= 0:
        return Verdict(FAIL, {"gain": gain, "reason": "no certified half-plane drift"})
    logs = np.log(n)
    total, prod, used = 0.0, 1.0, 0
    for j in range(n_terms):
        M = float(np.sum(a_abs * logs * np.exp(-j * gain * logs)))
        total += M
        prod *= 1 + M
        used = j + 1
        if M < 1e-16:
            break
    margin = 1 - prod * total
    q = {"gain": gain, "sum_M": total, "product": prod, "margin": margin, "terms": used}
    return Verdict(PASS if margin > 0 else FAIL, q)


def example76_check(a: float, b_mod: float) -> Verdict:
    if not a > b_mod:
        return Verdict(FAIL, {"a": a, "b_mod": b_mod, "reason": "a <= |b|"})
    x = b_mod * math.log(2) / (1 - 2 ** (-a + b_mod))
    val = x * math.exp(x)
    return Verdict(PASS if val < 1 else FAIL, {"x": x, "x_exp_x": val})


def smallest_companion_order(c0: int) -> int:
    c = 2
    while _is_power_of(c, c0):
        c += 1
    return c


def char2_commutant_verdict(phi: Symbol) -> Verdict:
    """FAIL means the minimal commutant property fails, witnessed by a commuting symbol."""
    if phi.c0 <= 1:
        return Verdict(NOT_APPLICABLE, {"c0": phi.c0})
    bound = image_lower_bound(phi, 0.0)
    if bound <= 0:
        return Verdict(UNDETERMINED, {"image_lower_bound": bound})
    c = smallest_companion_order(phi.c0)
    try:
        witness = companion_symbol(phi, c)
    except PowerError:  # pragma: no cover - c is chosen to avoid this
        return Verdict(UNDETERMINED, {"image_lower_bound": bound})
    q = {"image_lower_bound": bound, "companion_order": c, "commutation_residual": commutation_residual(phi, witness)}
    return Verdict(FAIL, q, witness=witness)
