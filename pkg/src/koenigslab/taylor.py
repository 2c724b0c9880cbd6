"""Truncated Taylor series ``b_0 + b_1 z + ... + b_M z^M``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import BranchError, ConstantTermError, NotInvertible, ParseError
from .series import parse_triples


@dataclass(frozen=True, eq=False)
class TaylorSeries:
    trunc: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.trunc < 0:
            raise ValueError("truncation must be nonnegative")
        if arr.shape[0] != self.trunc + 1:
            raise ValueError(f"expected {self.trunc + 1} coefficients, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_terms(cls, trunc: int, terms) -> "TaylorSeries":
        items = terms.items() if isinstance(terms, Mapping) else terms
        a = np.zeros(trunc + 1, dtype=complex)
        for j, c in items:
            if j < 0:
                raise ValueError("negative exponent")
            if j <= trunc:
                a[j] += c
        return cls(trunc, a)

    @classmethod
    def constant(cls, trunc: int, value: complex = 1.0) -> "TaylorSeries":
        return cls.from_terms(trunc, {0: value})

    @classmethod
    def identity(cls, trunc: int) -> "TaylorSeries":
        return cls.from_terms(trunc, {1: 1.0})

    def __getitem__(self, j: int) -> complex:
        if 0 <= j <= self.trunc:
            return complex(self.coeffs[j])
        if j > self.trunc:
            return 0j
        raise IndexError(j)

    def restrict(self, trunc: int) -> "TaylorSeries":
        a = np.zeros(trunc + 1, dtype=complex)
        k = min(trunc, self.trunc) + 1
        a[:k] = self.coeffs[:k]
        return TaylorSeries(trunc, a)

    def __add__(self, other):
        if isinstance(other, TaylorSeries):
            return TaylorSeries(self.trunc, self.coeffs + other.restrict(self.trunc).coeffs)
        a = self.coeffs.copy()
        a[0] += other
        return TaylorSeries(self.trunc, a)

    __radd__ = __add__

    def __neg__(self):
        return TaylorSeries(self.trunc, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TaylorSeries):
            return tmul(self, other)
        return TaylorSeries(self.trunc, self.coeffs * complex(other))

    def __rmul__(self, other):
        return TaylorSeries(self.trunc, self.coeffs * complex(other))

    def __truediv__(self, scalar):
        return TaylorSeries(self.trunc, self.coeffs / complex(scalar))

    def __call__(self, z: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], complex(z)))

    def max_abs_diff(self, other: "TaylorSeries") -> float:
        return float(np.max(np.abs(self.coeffs - other.restrict(self.trunc).coeffs)))

    def coefficient_sum(self, start: int = 0) -> float:
        """``sum_{j >= start} |b_j|``: a bound for ``sup |f|`` on the closed disc."""
        return float(np.sum(np.abs(self.coeffs[start:])))

    def valuation(self, zero_tol: float = 1e-12) -> int | None:
        idx = np.nonzero(np.abs(self.coeffs) > zero_tol)[0]
        return int(idx[0]) if idx.size else None

    def __repr__(self) -> str:
        terms = ", ".join(f"{j}: {self[j]:.6g}" for j in range(self.trunc + 1) if self[j] != 0)
        return f"TaylorSeries(trunc={self.trunc}, {{{terms}}})"

    def to_record(self) -> dict:
        return {
            "trunc": self.trunc,
            "coeffs": [[j, float(self[j].real), float(self[j].imag)] for j in range(self.trunc + 1) if self[j] != 0],
        }

    @classmethod
    def from_record(cls, rec: Mapping, trunc: int | None = None) -> "TaylorSeries":
        if isinstance(rec, list):
            if trunc is None:
                raise ParseError("bare coefficient list needs a truncation")
            return cls.from_terms(trunc, parse_triples(rec, start=0))
        if not isinstance(rec, Mapping) or "coeffs" not in rec:
            raise ParseError("Taylor record needs a 'coeffs' field")
        M = trunc if trunc is not None else rec.get("trunc")
        if not isinstance(M, int) or isinstance(M, bool) or M < 0:
            raise ParseError(f"Taylor truncation must be a nonnegative integer, got {M!r}")
        return cls.from_terms(M, parse_triples(rec["coeffs"], start=0))


def tmul(f: TaylorSeries, g: TaylorSeries) -> TaylorSeries:
    M = f.trunc
    return TaylorSeries(M, np.convolve(f.coeffs, g.restrict(M).coeffs)[: M + 1])


def tpow(f: TaylorSeries, p: int) -> TaylorSeries:
    out = TaylorSeries.constant(f.trunc, 1.0)
    base = f
    while p:
        if p & 1:
            out = out * base
        p >>= 1
        if p:
            base = base * base
    return out


def tderivative(f: TaylorSeries) -> TaylorSeries:
    a = np.zeros(f.trunc + 1, dtype=complex)
    a[: f.trunc] = f.coeffs[1:] * np.arange(1, f.trunc + 1)
    return TaylorSeries(f.trunc, a)


def tintegral(f: TaylorSeries) -> TaylorSeries:
    """Antiderivative vanishing at 0 (top coefficient dropped)."""
    a = np.zeros(f.trunc + 1, dtype=complex)
    a[1:] = f.coeffs[:-1] / np.arange(1, f.trunc + 1)
    return TaylorSeries(f.trunc, a)


def tdiv(f: TaylorSeries, g: TaylorSeries) -> TaylorSeries:
    """``f / g`` for ``g_0 != 0``."""
    M = f.trunc
    b = g.restrict(M).coeffs
    if b[0] == 0:
        raise NotInvertible("divisor has zero constant term")
    q = np.zeros(M + 1, dtype=complex)
    a = f.coeffs
    for j in range(M + 1):
        q[j] = (a[j] - np.dot(b[1 : j + 1], q[j - 1 :: -1][:j])) / b[0] if j else a[0] / b[0]
    return TaylorSeries(M, q)


def tlog(f: TaylorSeries) -> TaylorSeries:
    """Principal logarithm for ``f_0 = 1`` as the antiderivative of ``f'/f``."""
    if f[0] != 1:
        raise BranchError("logarithm needs constant term 1")
    return tintegral(tdiv(tderivative(f), f))


def texp(f: TaylorSeries) -> TaylorSeries:
    """``exp(f)`` via ``E' = f' E``."""
    M = f.trunc
    d = f.coeffs[1:] * np.arange(1, M + 1)
    E = np.zeros(M + 1, dtype=complex)
    E[0] = np.exp(f.coeffs[0])
    for n in range(1, M + 1):
        E[n] = np.dot(d[:n], E[n - 1 :: -1][:n]) / n
    return TaylorSeries(M, E)


def tcompose(f: TaylorSeries, g: TaylorSeries) -> TaylorSeries:
    """``f o g`` for ``g_0 = 0`` (Horner scheme)."""
    if g[0] != 0:
        raise ConstantTermError("inner series must vanish at 0")
    M = f.trunc
    g = g.restrict(M)
    out = TaylorSeries.constant(M, f[M])
    for j in range(M - 1, -1, -1):
        out = out * g + f[j]
    return out


def fractional_power(f: TaylorSeries, p: int) -> TaylorSeries:
    """Principal ``f^{1/p}`` for ``f_0 = 1`` and ``sum_{j>=1} |f_j| < 1``."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if abs(f[0] - 1) > 0 or f.coefficient_sum(1) >= 1:
        raise BranchError("need f_0 = 1 and sum_{j>=1} |f_j| < 1")
    return texp(tlog(f) / p)


def reversion(u: TaylorSeries) -> TaylorSeries:
    """Compositional inverse of ``u`` with ``u_0 = 0 != u_1``.

    Fixed-point iteration ``v <- v - (u(v) - z) / u_1``; each pass fixes one
    more coefficient.
    """
    if u[0] != 0:
        raise ConstantTermError("series must vanish at 0")
    if u[1] == 0:
        raise NotInvertible("u_1 = 0")
    M = u.trunc
    z = TaylorSeries.identity(M)
    v = z / u[1]
    for _ in range(M):
        v = v - (tcompose(u, v) - z) / u[1]
    return v


def titerate(phi: TaylorSeries, n: int) -> TaylorSeries:
    out = TaylorSeries.identity(phi.trunc)
    for _ in range(n):
        out = tcompose(phi, out)
    return out
