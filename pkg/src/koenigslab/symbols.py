"""Composition symbols ``c0*s + psi(s)`` on truncated Dirichlet series.

The workhorse is :class:`Composer`, which caches the expansions of
``k^{-phi(s)}`` for a fixed symbol so that repeated right-composition with
that symbol (iteration, the Königs schemes, resolvent sums) reduces to one
matrix-vector product per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CharacteristicError, NonConvergence, ParseError
from .series import DirichletSeries, dexp, dilate, evaluate, parse_triples


@dataclass(frozen=True, eq=False)
class Symbol:
    c0: int
    psi: DirichletSeries

    def __post_init__(self) -> None:
        if not isinstance(self.c0, (int, np.integer)) or self.c0 < 0:
            raise ValueError("characteristic must be a nonnegative integer")
        object.__setattr__(self, "c0", int(self.c0))

    @property
    def trunc(self) -> int:
        return self.psi.trunc

    @property
    def c1(self) -> complex:
        return self.psi[1]

    @property
    def psi0(self) -> DirichletSeries:
        """``psi`` with its constant term removed."""
        return self.psi - self.c1

    def __call__(self, s: complex) -> complex:
        return self.c0 * complex(s) + evaluate(self.psi, s)

    def restrict(self, trunc: int) -> "Symbol":
        return Symbol(self.c0, self.psi.restrict(trunc))

    def max_abs_diff(self, other: "Symbol") -> float:
        if self.c0 != other.c0:
            return math.inf
        return self.psi.max_abs_diff(other.psi)

    def __repr__(self) -> str:
        return f"Symbol(c0={self.c0}, psi={self.psi!r})"

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, trunc: int) -> "Symbol":
        return cls(1, DirichletSeries.zero(trunc))

    @classmethod
    def affine(cls, c0: int, c1: complex, trunc: int) -> "Symbol":
        return cls(c0, DirichletSeries.constant(trunc, c1))

    @classmethod
    def from_terms(cls, c0: int, terms, trunc: int) -> "Symbol":
        return cls(c0, DirichletSeries.from_terms(trunc, terms))

    def to_record(self) -> dict:
        return {"c0": self.c0, "psi": self.psi.to_record()}

    @classmethod
    def from_record(cls, rec: Mapping, trunc: int | None = None) -> "Symbol":
        """Parse ``{c0, psi}``; ``psi`` may be a series record or a bare triple list."""
        if not isinstance(rec, Mapping) or "c0" not in rec or "psi" not in rec:
            raise ParseError("symbol record needs 'c0' and 'psi' fields")
        c0 = rec["c0"]
        if not isinstance(c0, int) or isinstance(c0, bool) or c0 < 0:
            raise ParseError(f"symbol characteristic must be a nonnegative integer, got {c0!r}")
        psi = rec["psi"]
        if isinstance(psi, list):
            N = trunc if trunc is not None else rec.get("trunc")
            if N is None:
                raise ParseError("bare psi list needs a truncation")
            series = DirichletSeries.from_terms(N, parse_triples(psi, start=1))
        else:
            series = DirichletSeries.from_record(psi, trunc=trunc)
        return cls(c0, series)


def _require_positive_char(phi: Symbol) -> None:
    if phi.c0 < 1:
        raise CharacteristicError("composition needs characteristic >= 1")


def power_term(k: int, phi: Symbol, N: int | None = None, return_flag: bool = False):
    """Coefficients of ``k^{-phi(s)}`` truncated at ``N``.

    Equal to ``k^{-c1} * dilate(dexp(-log(k) psi0), k^{c0})``.  When
    ``k^{c0} > N`` the result is zero; ``return_flag`` then reports the
    overflow alongside the series.
    """
    if k < 2:
        raise ValueError("power_term needs k >= 2")
    _require_positive_char(phi)
    N = phi.trunc if N is None else N
    step = k ** phi.c0
    if step > N:
        out = DirichletSeries.zero(N)
        return (out, True) if return_flag else out
    inner_n = N // step
    g = -math.log(k) * phi.psi0.restrict(inner_n)
    inner = dexp(g).restrict(N)
    out = dilate(inner, step) * (k ** (-phi.c1))
    return (out, False) if return_flag else out


class Composer:
    """Right-composition ``f -> f o phi`` for a fixed symbol, as a cached matrix."""

    def __init__(self, phi: Symbol, N: int | None = None) -> None:
        _require_positive_char(phi)
        self.phi = phi
        self.N = phi.trunc if N is None else N
        mat = np.zeros((self.N, self.N), dtype=complex)
        mat[0, 0] = 1.0
        for k in range(2, self.N + 1):
            if k ** phi.c0 > self.N:
                break
            mat[:, k - 1] = power_term(k, phi, self.N).coeffs
        self.matrix = mat

    def series(self, f: DirichletSeries) -> DirichletSeries:
        return DirichletSeries(self.N, self.matrix @ f.restrict(self.N).coeffs)

    def symbol(self, u: Symbol) -> Symbol:
        """``u o phi``."""
        psi = self.phi.psi.restrict(self.N) * u.c0 + self.series(u.psi)
        return Symbol(u.c0 * self.phi.c0, psi)


def compose(f: DirichletSeries, phi: Symbol) -> DirichletSeries:
    """``f o phi``; exact at the truncation of ``f``."""
    _require_positive_char(phi)
    N = f.trunc
    out = DirichletSeries.constant(N, f[1])
    for k in range(2, N + 1):
        if k ** phi.c0 > N:
            break
        fk = f[k]
        if fk != 0:
            out = out + fk * power_term(k, phi.restrict(N), N)
    return out


def compose_symbols(outer: Symbol, inner: Symbol) -> Symbol:
    """``outer o inner``."""
    _require_positive_char(inner)
    N = min(outer.trunc, inner.trunc)
    psi = inner.psi.restrict(N) * outer.c0 + compose(outer.psi.restrict(N), inner)
    return Symbol(outer.c0 * inner.c0, psi)


def iterate(phi: Symbol, n: int) -> Symbol:
    if n < 0:
        raise ValueError("iteration count must be nonnegative")
    out = Symbol.identity(phi.trunc)
    if n == 0:
        return out
    comp = Composer(phi)
    out = phi
    for _ in range(n - 1):
        out = comp.symbol(out)
    return out


def invert(phi: Symbol, tol: float = 1e-12, max_iter: int = 10000) -> Symbol:
    """Compositional inverse of a characteristic-one symbol.

    Iterates ``v <- w - psi(v)``.  The coefficient of ``v`` at ``n`` only
    depends on coefficients at indices ``<= n/2`` from the previous step, so
    the iteration stabilizes after about ``log2 N`` rounds.
    """
    if phi.c0 != 1:
        raise CharacteristicError("inverse is only available for characteristic 1")
    N = phi.trunc
    v = Symbol.identity(N)
    for _ in range(max_iter):
        nxt = Symbol(1, -compose(phi.psi, v))
        change = nxt.psi.max_abs_diff(v.psi)
        v = nxt
        if change < tol:
            return v
    raise NonConvergence(f"inverse did not stabilize within {max_iter} iterations")


def _derivative_bound(phi: Symbol, sigma: float) -> float:
    n = np.arange(2, phi.trunc + 1, dtype=float)
    a = np.abs(phi.psi.coeffs[1:])
    return float(np.sum(a * np.log(n) * np.exp(-sigma * np.log(n))))


def injectivity_abscissa(phi: Symbol, tol: float = 1e-12) -> float:
    """Smallest ``sigma`` (to ``tol``) with ``sum_{k>=2} |c_k| log k k^{-sigma} <= 1/2``.

    Returns ``-inf`` when ``psi`` has no non-constant term.
    """
    if not np.any(phi.psi.coeffs[1:] != 0):
        return -math.inf
    lo, hi = -1.0, 1.0
    while _derivative_bound(phi, lo) <= 0.5:
        lo *= 2.0
    while _derivative_bound(phi, hi) > 0.5:
        hi *= 2.0
    while hi - lo > tol * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if _derivative_bound(phi, mid) <= 0.5:
            hi = mid
        else:
            lo = mid
    return hi


def image_lower_bound(phi: Symbol, sigma: float) -> float:
    """Lower bound for ``Re phi`` on ``Re s >= sigma``."""
    n = np.arange(2, phi.trunc + 1, dtype=float)
    tail = float(np.sum(np.abs(phi.psi.coeffs[1:]) * np.exp(-sigma * np.log(n))))
    return phi.c0 * sigma + phi.c1.real - tail


def mapping_check(phi: Symbol, samples: int = 64, height: float = 50.0) -> dict:
    """Sufficient check that ``phi`` maps the right half-plane into itself.

    ``certified`` comes from the coefficient bound; otherwise ``Re phi`` is
    sampled on the imaginary axis (where the minimum of a harmonic function
    bounded below would sit) and the result is only ``sampled-only``.
    """
    bound = image_lower_bound(phi, 0.0)
    if phi.c0 >= 1 and bound >= 0:
        return {"status": "certified", "lower_bound": bound}
    ts = np.linspace(-height, height, samples)
    worst = min(phi(1j * t).real for t in ts)
    status = "sampled-only" if worst >= 0 else "violated"
    return {"status": status, "lower_bound": bound, "sampled_min": worst}
