"""Königs maps of Dirichlet symbols and the spectral data built from them.

Two independent constructions are provided:

* ``koenigs_recurrence`` solves the Abel/Schröder equation coefficient by
  coefficient.  Writing ``u = s + sum d_n n^{-s}`` and ``P[n, k]`` for the
  coefficient of ``n^{-s}`` in ``k^{-phi}``, index ``n >= 2`` of the
  functional equation reads ``c_n + sum_{k<n} P[n,k] d_k = (lam - P[n,n]) d_n``
  with ``lam = 1`` for characteristic one and ``lam = c0`` otherwise.
* ``koenigs_iterative`` iterates ``u <- u o phi - c1`` (characteristic one)
  or ``u <- (u o phi) / c0``, i.e. the normalized iterates of ``phi``.

With characteristic one the additive constant is fixed by ``d_1 = 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    CharacteristicError,
    EmptyPointSpectrum,
    NonConvergence,
    PowerError,
    ResonanceError,
    SpectrumError,
    TruncationOverflow,
    ZeroFactor,
)
from .series import ZERO_TOL, DirichletSeries
from .symbols import Composer, Symbol, compose_symbols, image_lower_bound, invert, power_term


@dataclass(frozen=True)
class KoenigsResult:
    u: Symbol
    scheme: str
    residual: float
    iterations_used: int

    def to_record(self) -> dict:
        return {
            "u": self.u.to_record(),
            "scheme": self.scheme,
            "residual": self.residual,
            "iterations_used": self.iterations_used,
        }


@dataclass(frozen=True)
class Spectrum:
    classification: str
    points: list
    automorphism: bool = False
    notes: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        rec = {
            "classification": self.classification,
            "automorphism": self.automorphism,
            "points": [[float(z.real), float(z.imag)] for z in self.points],
        }
        if self.notes:
            rec["notes"] = self.notes
        return rec


def _is_pure_shift(phi: Symbol, zero_tol: float = 0.0) -> bool:
    return bool(np.all(np.abs(phi.psi.coeffs[1:]) <= zero_tol))


def _check_solvable(phi: Symbol) -> None:
    if phi.c0 == 0:
        raise CharacteristicError("characteristic 0 symbols have no Königs map")
    if phi.c0 == 1 and not _is_pure_shift(phi) and phi.c1.real <= 0:
        raise ResonanceError("characteristic 1 needs Re(c1) > 0")


def abel_residual(u: Symbol, phi: Symbol) -> float:
    """Coefficient sup-norm of ``u o phi - (u + c1)`` or ``u o phi - c0 u``."""
    if u.c0 != 1:
        raise CharacteristicError("a Königs map has characteristic 1")
    lhs = compose_symbols(u, phi)
    N = lhs.trunc
    if phi.c0 == 1:
        rhs = u.psi.restrict(N) + phi.c1
    else:
        rhs = u.psi.restrict(N) * phi.c0
    return lhs.psi.max_abs_diff(rhs)


def koenigs_recurrence(phi: Symbol) -> KoenigsResult:
    _check_solvable(phi)
    N = phi.trunc
    if phi.c0 == 1 and _is_pure_shift(phi):
        u = Symbol.identity(N)
        return KoenigsResult(u, "recurrence", abel_residual(u, phi), 0)
    P = Composer(phi).matrix
    c = phi.psi.coeffs
    d = np.zeros(N, dtype=complex)
    lam = 1.0 if phi.c0 == 1 else float(phi.c0)
    if phi.c0 >= 2:
        d[0] = c[0] / (phi.c0 - 1)
    for n in range(2, N + 1):
        acc = c[n - 1] + P[n - 1, 1 : n - 1] @ d[1 : n - 1]
        d[n - 1] = acc / (lam - P[n - 1, n - 1])
    u = Symbol(1, DirichletSeries(N, d))
    return KoenigsResult(u, "recurrence", abel_residual(u, phi), N - 1)


def koenigs_iterative(phi: Symbol, tol: float = 1e-12, max_iter: int = 10000) -> KoenigsResult:
    _check_solvable(phi)
    N = phi.trunc
    comp = Composer(phi)
    u = Symbol.identity(N)
    for it in range(1, max_iter + 1):
        v = comp.symbol(u)
        if phi.c0 == 1:
            nxt = Symbol(1, v.psi - phi.c1)
        else:
            nxt = Symbol(1, v.psi / phi.c0)
        change = nxt.psi.max_abs_diff(u.psi)
        u = nxt
        if change < tol:
            return KoenigsResult(u, "iterative", abel_residual(u, phi), it)
    raise NonConvergence(f"Königs iteration did not settle within {max_iter} steps")


def koenigs(phi: Symbol, scheme: str = "recurrence", tol: float = 1e-12, max_iter: int = 10000) -> KoenigsResult:
    if scheme == "recurrence":
        return koenigs_recurrence(phi)
    if scheme == "iterative":
        return koenigs_iterative(phi, tol=tol, max_iter=max_iter)
    raise ValueError(f"unknown scheme {scheme!r}")


def eigenfunction(m: int, u: Symbol) -> DirichletSeries:
    """``m^{-u}``; for a Königs map of ``phi`` this spans the ``m^{-c1}`` eigenspace."""
    if u.c0 != 1:
        raise CharacteristicError("eigenfunctions are built from a characteristic-1 map")
    if m < 1:
        raise ValueError("m must be positive")
    if m > u.trunc:
        raise TruncationOverflow(f"m={m} exceeds truncation {u.trunc}")
    if m == 1:
        return DirichletSeries.constant(u.trunc, 1.0)
    return power_term(m, u)


def spectrum_points(phi: Symbol, M: int) -> Spectrum:
    if phi.c0 >= 2:
        return Spectrum("characteristic>=2", [0j, 1 + 0j])
    if phi.c0 != 1:
        raise CharacteristicError("spectrum needs characteristic >= 1")
    if _is_pure_shift(phi) and phi.c1.real == 0:
        tau = phi.c1.imag
        pts = [cmath.exp(-1j * tau * math.log(m)) for m in range(1, M + 1)]
        return Spectrum("automorphism", pts, automorphism=True, notes={"tau": tau, "kind": "point spectrum"})
    pts = [0j] + [complex(m ** (-phi.c1)) for m in range(1, M + 1)]
    return Spectrum("characteristic=1", pts)


def _log_relation(tau, n: int, m: int, tol: float) -> bool:
    if isinstance(tau, tuple):
        k, m0, n0 = tau
        if n == m:
            return True
        ratio = math.log(n / m) * k / math.log(m0 / n0)
        ell = round(ratio)
        if abs(ratio - ell) > 1e-6:
            return False
        # exact check of (n/m)^k == (m0/n0)^ell
        return Fraction(n, m) ** k == Fraction(m0, n0) ** ell
    x = tau * math.log(n / m) / (2 * math.pi)
    return abs(x - round(x)) <= tol


def rotation_eigenstructure(tau, m: int, Nmax: int, tol: float = 1e-9) -> dict:
    """Indices ``n <= Nmax`` with ``n^{-i tau} = m^{-i tau}``.

    ``tau`` is either a float or a triple ``(k, m0, n0)`` standing for
    ``2 k pi / log(m0 / n0)``; the triple form is decided exactly.
    """
    if isinstance(tau, (list, tuple)):
        tau = tuple(int(x) for x in tau)
        mode = "exact"
    else:
        tau = float(tau)
        mode = "up to search bound"
    gens = [n for n in range(1, Nmax + 1) if _log_relation(tau, n, m, tol)]
    return {"generators": gens, "mode": mode, "search_bound": Nmax}


def _in_point_set(lam: complex, phi: Symbol, N: int) -> bool:
    if abs(lam) <= ZERO_TOL:
        return True
    if phi.c0 >= 2:
        return abs(lam - 1) <= ZERO_TOL
    return any(abs(lam - m ** (-phi.c1)) <= ZERO_TOL * max(1.0, abs(lam)) for m in range(1, N + 1))


def resolvent_apply(phi: Symbol, lam: complex, g: DirichletSeries, tol: float = 1e-12, max_iter: int = 10000) -> DirichletSeries:
    """Solve ``F o phi - lam F = g`` on the truncated space.

    The constant term is handled by ``a / (1 - lam)``.  With characteristic
    one the span of ``k^{-u}`` for ``k < m`` is split off (there the operator
    is diagonal), ``m`` being the first index with ``m^{-Re c1} < |lam|``.
    The remainder goes through ``-sum_n h o phi^[n] / lam^(n+1)``.
    """
    lam = complex(lam)
    N = phi.trunc
    g = g.restrict(N)
    if phi.c0 < 1:
        raise CharacteristicError("resolvent needs characteristic >= 1")
    if _in_point_set(lam, phi, N):
        raise SpectrumError(f"lambda={lam} lies in the spectrum")
    a = g[1]
    rest = g - a
    F = DirichletSeries.constant(N, a / (1 - lam))
    ratio = 0.0
    if phi.c0 == 1:
        c1r = phi.c1.real
        m = N + 1
        if c1r > 0:
            m = min(N + 1, max(2, math.floor(abs(lam) ** (-1.0 / c1r)) + 1))
            while m <= N and m ** (-c1r) >= abs(lam):
                m += 1
        u = koenigs_recurrence(phi).u if m > 2 else Symbol.identity(N)
        for k in range(2, m):
            b = rest[k]
            if b == 0:
                continue
            e = eigenfunction(k, u)
            rest = rest - e * b
            F = F + e * (b / (k ** (-phi.c1) - lam))
        ratio = (m ** (-c1r)) / abs(lam) if m <= N else 0.0
    comp = Composer(phi)
    term = rest / lam
    G = DirichletSeries.zero(N)
    for _ in range(max_iter):
        size = float(np.max(np.abs(term.coeffs)))
        if size == 0.0:
            return F + G
        G = G - term
        if phi.c0 == 1 and ratio < 1 and size / (1 - ratio) < tol / 10:
            return F + G
        term = comp.series(term) / lam
    raise NonConvergence("resolvent series did not decay")


def _is_power_of(c: int, base: int) -> bool:
    if c == 1:
        return True
    if base < 2:
        return False
    while c % base == 0:
        c //= base
    return c == 1


def companion_symbol(phi: Symbol, c: int, u: Symbol | None = None) -> Symbol:
    """Characteristic-``c`` symbol commuting with ``phi``: ``u^{-1}(c u)``."""
    if phi.c0 < 2:
        raise CharacteristicError("companion needs characteristic >= 2")
    if c < 1 or _is_power_of(c, phi.c0):
        raise PowerError(f"{c} is a power of {phi.c0}")
    if u is None:
        u = koenigs_recurrence(phi).u
    scaled = Symbol(c, u.psi * c)
    return compose_symbols(invert(u), scaled)


def commutation_residual(phi: Symbol, other: Symbol) -> float:
    return compose_symbols(phi, other).max_abs_diff(compose_symbols(other, phi))


def weighted_eigenfunction(D: DirichletSeries, phi: Symbol, tol: float = 1e-12, max_iter: int = 10000) -> DirichletSeries:
    """``h = prod_k D(phi^[k]) / D(inf)`` with ``h_1 = 1``; satisfies ``D (h o phi) = D(inf) h``."""
    N = phi.trunc
    D = D.restrict(N)
    d_inf = D[1]
    if abs(d_inf) <= ZERO_TOL:
        raise EmptyPointSpectrum("D(inf) = 0: no eigenvalues")
    comp = Composer(phi)
    h = DirichletSeries.constant(N, 1.0)
    factor_src = D
    for _ in range(max_iter):
        if abs(factor_src[1]) <= ZERO_TOL:
            raise ZeroFactor("factor with vanishing constant term")
        factor = factor_src / factor_src[1]
        if float(np.max(np.abs(factor.coeffs[1:]), initial=0.0)) <= tol / 10:
            return h
        h = h * factor
        factor_src = comp.series(factor_src)
    raise NonConvergence("eigenfunction product did not settle")


def weighted_residual(D: DirichletSeries, phi: Symbol, h: DirichletSeries) -> float:
    lhs = D.restrict(phi.trunc) * Composer(phi).series(h)
    return lhs.max_abs_diff(h * D[1])


def weighted_spectrum(D: DirichletSeries, phi: Symbol, M: int) -> Spectrum:
    d_inf = D[1]
    automorphism = phi.c0 == 1 and _is_pure_shift(phi) and phi.c1.real == 0
    if abs(d_inf) <= ZERO_TOL:
        return Spectrum("D(inf)=0", [0j], automorphism=automorphism)
    if phi.c0 >= 2:
        return Spectrum("characteristic>=2", [0j, d_inf], automorphism=automorphism)
    pts = [0j] + [d_inf * m ** (-phi.c1) for m in range(1, M + 1)]
    return Spectrum("characteristic=1", pts, automorphism=automorphism)


def compactness_certificate(phi: Symbol, max_n: int = 20) -> dict:
    """Search ``n <= max_n`` with ``Re phi^[n] > delta > 0`` on the closed right half-plane."""
    it = phi
    comp = Composer(phi)
    for n in range(1, max_n + 1):
        if n > 1:
            it = comp.symbol(it)
        delta = image_lower_bound(it, 0.0)
        if delta > 0:
            return {"certified": True, "n": n, "delta": delta}
    return {"certified": False, "n": None, "delta": None}
