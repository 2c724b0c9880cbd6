"""Conjugacies for self-maps of the unit disc fixing the origin.

Böttcher coordinates (``phi = lam z^p psi``, ``p >= 2``), Königs coordinates
(``0 < |phi'(0)| < 1``), commuting companions, and coefficient-bound checks
for the minimal commutant property.  Sup norms on the closed disc are
bounded by coefficient sums throughout.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import BranchError, Inconclusive, NonConvergence, NotAttracting, OrderError, ZeroDerivative
from .taylor import (
    TaylorSeries,
    tcompose,
    tderivative,
    tdiv,
    texp,
    tlog,
    tpow,
    reversion,
)
from .verdict import FAIL, PASS, UNDETERMINED, Verdict


def split_boettcher(phi: TaylorSeries, p: int | None = None) -> tuple[int, complex, TaylorSeries]:
    """Write ``phi = lam z^p psi`` with ``psi_0 = 1``; ``p`` defaults to the valuation."""
    if phi[0] != 0:
        raise ValueError("phi must fix the origin")
    if p is None:
        p = phi.valuation(0.0)
        if p is None:
            raise ValueError("phi is identically zero")
    lam = phi[p]
    if lam == 0 or np.any(phi.coeffs[:p] != 0):
        raise ValueError(f"phi does not vanish to order exactly {p}")
    M = phi.trunc
    psi = np.zeros(M + 1, dtype=complex)
    psi[: M + 1 - p] = phi.coeffs[p:] / lam
    return p, lam, TaylorSeries(M, psi)


def boettcher(phi: TaylorSeries, p: int | None = None, lam: complex | None = None, tol: float = 1e-14, max_iter: int = 10000) -> TaylorSeries:
    """Böttcher coordinate ``u`` with ``u o phi = lam u^p``, ``u_0 = 0``, ``u_1 = 1``.

    ``u = z prod_{k>=0} psi^{1/p^(k+1)}(phi^[k])``, accumulated through the
    principal logarithm of ``psi``.  Since ``phi^[k]`` vanishes to order
    ``p^k`` the product is exact after ``log_p M`` factors.
    """
    p, lam0, psi = split_boettcher(phi, p)
    if lam is not None and abs(complex(lam) - lam0) > 1e-12 * max(1.0, abs(lam0)):
        raise ValueError("lambda does not match the leading coefficient of phi")
    if p < 2:
        raise ZeroDerivative("Böttcher coordinates need p >= 2; use koenigs_disc")
    if psi.coefficient_sum(1) >= 1:
        raise BranchError("psi is not certified nonvanishing on the closed disc")
    M = phi.trunc
    L = tlog(psi)
    acc = L / p
    it = phi
    weight = p
    for _ in range(max_iter):
        weight *= p
        term = tcompose(L, it) / weight
        if float(np.max(np.abs(term.coeffs))) <= tol * 1e-2:
            break
        acc = acc + term
        it = tcompose(phi, it)
    else:
        raise NonConvergence("Böttcher product did not settle")
    E = texp(acc)
    u = np.zeros(M + 1, dtype=complex)
    u[1:] = E.coeffs[:M]
    return TaylorSeries(M, u)


def boettcher_residual(u: TaylorSeries, phi: TaylorSeries, p: int, lam: complex) -> float:
    return tcompose(u, phi).max_abs_diff(tpow(u, p) * lam)


def boettcher_norm_check(phi: TaylorSeries, p: int | None = None, lam: complex | None = None, max_n: int = 20) -> Verdict:
    """PASS means ``C_phi`` fails to have a minimal commutant.

    Routes tried in order: ``psi = 1`` (then ``u = z`` is univalent on the
    whole disc), the bound ``|lam| B^(p-1) < 1`` with ``B`` the smaller of the
    two coefficient-sum bounds on ``sup |u|``, and an iterate ``phi^[n]``
    with coefficient sum below 1.
    """
    p, lam0, psi = split_boettcher(phi, p)
    lam = lam0 if lam is None else complex(lam)
    q: dict = {"p": p, "abs_lambda": abs(lam)}
    if psi.coefficient_sum(1) == 0:
        q["route"] = "monomial"
        return Verdict(PASS if abs(lam) <= 1 else UNDETERMINED, q)
    if psi.coefficient_sum(1) >= 1:
        q["reason"] = "psi not certified nonvanishing"
        return Verdict(UNDETERMINED, q)
    u = boettcher(phi, p)
    b_u = u.coefficient_sum()
    b_psi = psi.coefficient_sum() ** (1.0 / (p - 1))
    B = min(b_u, b_psi)
    value = abs(lam) * B ** (p - 1)
    q.update({"u_bound": b_u, "psi_bound": b_psi, "value": value})
    if value < 1:
        q["route"] = "norm bound"
        return Verdict(PASS, q)
    it = phi
    for n in range(1, max_n + 1):
        if n > 1:
            it = tcompose(phi, it)
        s = it.coefficient_sum()
        if s < 1:
            q.update({"route": "iterate bound", "n": n, "iterate_bound": s})
            return Verdict(PASS, q)
    return Verdict(UNDETERMINED, q)


def disc_companion(phi: TaylorSeries, p: int | None = None, lam: complex | None = None, q: int = 3) -> TaylorSeries:
    """``u^{-1}(mu u^q)`` with ``mu = lam^((q-1)/(p-1))`` (principal branch)."""
    p, lam0, _ = split_boettcher(phi, p)
    lam = lam0 if lam is None else complex(lam)
    if q < 2 or q % p == 0:
        raise OrderError(f"q={q} must be >= 2 and not a multiple of p={p}")
    u = boettcher(phi, p)
    mu = cmath.exp((q - 1) / (p - 1) * cmath.log(lam))
    return tcompose(reversion(u), tpow(u, q) * mu)


def tcommutation_residual(f: TaylorSeries, g: TaylorSeries) -> float:
    return tcompose(f, g).max_abs_diff(tcompose(g, f))


def koenigs_disc(phi: TaylorSeries, tol: float = 1e-14, max_iter: int = 10000) -> TaylorSeries:
    """Königs coordinate ``lim phi^[n] / lam^n`` for ``0 < |lam| < 1``."""
    if phi[0] != 0:
        raise ValueError("phi must fix the origin")
    lam = phi[1]
    if lam == 0:
        raise ZeroDerivative("phi'(0) = 0; use boettcher")
    if abs(lam) >= 1:
        raise NotAttracting(f"|phi'(0)| = {abs(lam)} >= 1")
    u = TaylorSeries.identity(phi.trunc)
    for _ in range(max_iter):
        nxt = tcompose(u, phi) / lam
        change = nxt.max_abs_diff(u)
        u = nxt
        if change < tol:
            return u
    raise NonConvergence("Königs iteration on the disc did not settle")


def schroeder_residual(u: TaylorSeries, phi: TaylorSeries) -> float:
    return tcompose(u, phi).max_abs_diff(u * phi[1])


def starlike_samples(u: TaylorSeries, samples: int = 256, eval_degree: int | None = None):
    """Boundary values of ``Re(z u'/u)`` with a tail error bar.

    The series is evaluated through degree ``eval_degree`` (default: three
    quarters of the truncation); the remaining coefficients, plus rounding in
    the evaluation, give the bar.
    """
    M = u.trunc
    K = math.ceil(3 * M / 4) if eval_degree is None else min(eval_degree, M)
    head = u.restrict(K)
    # tail plus a rounding allowance for the Horner evaluation of the head
    eps_u = u.coefficient_sum(K + 1) + 4 * (K + 1) * np.finfo(float).eps * head.coefficient_sum()
    eps_du = float(np.sum(np.abs(u.coeffs[K + 1 :]) * np.arange(K + 1, M + 1)))
    thetas = 2 * np.pi * np.arange(samples) / samples
    z = np.exp(1j * thetas)
    a = head.coeffs
    uz = np.polyval(a[::-1], z)
    duz = np.polyval((a[1:] * np.arange(1, K + 1))[::-1], z) if K else np.zeros_like(z)
    w = z * duz / uz
    with np.errstate(divide="ignore", invalid="ignore"):
        bar = (np.abs(z * duz) * eps_u + np.abs(uz) * eps_du) / (np.abs(uz) * (np.abs(uz) - eps_u))
    return thetas, w.real, bar, np.abs(uz), eps_u


def starlike_check(u: TaylorSeries, samples: int = 256, eval_degree: int | None = None) -> Verdict:
    """Strict starlikeness of ``u`` on the closed disc from boundary samples.

    Sampling the boundary is not a proof between samples; the verdict is
    about the sampled points and the truncation tail only.
    """
    if u[0] != 0 or u[1] == 0:
        raise ValueError("need u_0 = 0 and u_1 != 0")
    thetas, re, bar, mod, eps_u = starlike_samples(u, samples, eval_degree)
    if np.any(mod <= eps_u):
        raise Inconclusive("u is within its error bar of 0 at a boundary sample")
    lower = re - bar
    i = int(np.argmin(lower))
    q = {"min_re": float(np.min(re)), "errorbar": float(np.max(bar)), "argmin_theta": float(thetas[i]), "samples": samples}
    if lower[i] > 0:
        return Verdict(PASS, q)
    if np.any(re + bar < 0):
        return Verdict(FAIL, q)
    return Verdict(UNDETERMINED, q)


def cor89_check(lam: complex, psi: TaylorSeries) -> Verdict:
    """Sufficient condition for a minimal commutant of ``phi = lam z (1 + psi)``.

    Tests ``||psi'/(1+psi)|| / (1 - ||phi'||) < 1`` with coefficient-sum
    bounds.  For ``psi = a z`` with ``lam, a > 0`` the closed-form value
    ``lam a (1 + 2a) / (1 - a)`` is also reported and used as a second route.
    """
    lam = complex(lam)
    if psi[0] != 0:
        raise ValueError("psi must vanish at 0")
    s = psi.coefficient_sum(1)
    if s >= 1:
        raise BranchError("sum |psi_j| >= 1: 1 + psi not certified nonvanishing")
    M = psi.trunc + 1
    phi = TaylorSeries.from_terms(M, {1: lam}) + TaylorSeries(M, np.concatenate([[0], psi.coeffs])) * lam
    dphi = float(np.sum(np.abs(phi.coeffs) * np.arange(M + 1)))
    d_psi = tderivative(psi)
    ratio_bound = d_psi.coefficient_sum() / (1 - s)
    div_sum = tdiv(d_psi, psi + 1.0).coefficient_sum()
    left = min(ratio_bound, div_sum)
    q: dict = {"phi_prime_bound": dphi, "log_derivative_bound": left}
    if dphi < 1:
        product = left / (1 - dphi)
        q["product"] = product
        if product < 1:
            q["route"] = "coefficient bound"
            return Verdict(PASS, q)
    else:
        q["product"] = math.inf
    nz = [j for j in range(1, psi.trunc + 1) if psi[j] != 0]
    a = psi[1]
    if nz == [1] and a.imag == 0 and a.real > 0 and lam.imag == 0 and lam.real > 0:
        a = a.real
        closed = lam.real * a * (1 + 2 * a) / (1 - a)
        q["closed_form"] = closed
        if closed < 1:
            q["route"] = "closed form"
            return Verdict(PASS, q)
    return Verdict(FAIL, q)
