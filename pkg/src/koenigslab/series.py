"""Truncated Dirichlet series and their coefficient algebra.

A :class:`DirichletSeries` stores ``a_1 .. a_N`` for ``sum a_n n^{-s}``.
Every operation here is exact at each retained index: the coefficient at
``n`` of a product, exponential or dilation only depends on coefficients
at divisors of ``n``, so truncating before or after the operation gives the
same result.  Storage is a numpy ``complex128`` array where position
``n - 1`` holds ``a_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import NoLeadingTerm, ParseError, TruncationMismatch

ZERO_TOL = 1e-12


@lru_cache(maxsize=64)
def _log_table(trunc: int) -> np.ndarray:
    return np.log(np.arange(1, trunc + 1, dtype=float))


@lru_cache(maxsize=64)
def proper_divisors(trunc: int) -> tuple[tuple[int, ...], ...]:
    """Divisors ``d > 1`` of every ``n <= trunc`` (entry ``n`` lists those of ``n``)."""
    table: list[list[int]] = [[] for _ in range(trunc + 1)]
    for d in range(2, trunc + 1):
        for m in range(d, trunc + 1, d):
            table[m].append(d)
    return tuple(tuple(row) for row in table)


@dataclass(frozen=True, eq=False)
class DirichletSeries:
    trunc: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.trunc < 1:
            raise ValueError("truncation must be a positive integer")
        if arr.shape[0] != self.trunc:
            raise ValueError(f"expected {self.trunc} coefficients, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, trunc: int) -> "DirichletSeries":
        return cls(trunc, np.zeros(trunc, dtype=complex))

    @classmethod
    def constant(cls, trunc: int, value: complex = 1.0) -> "DirichletSeries":
        a = np.zeros(trunc, dtype=complex)
        a[0] = value
        return cls(trunc, a)

    @classmethod
    def from_terms(cls, trunc: int, terms: Mapping[int, complex] | Iterable[tuple[int, complex]]) -> "DirichletSeries":
        """Build from ``{n: a_n}``; indices above ``trunc`` are dropped."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        a = np.zeros(trunc, dtype=complex)
        for n, c in items:
            if n < 1:
                raise ValueError(f"index must be positive, got {n}")
            if n <= trunc:
                a[n - 1] += c
        return cls(trunc, a)

    # access -------------------------------------------------------------
    def __getitem__(self, n: int) -> complex:
        if 1 <= n <= self.trunc:
            return complex(self.coeffs[n - 1])
        if n > self.trunc:
            return 0j
        raise IndexError(n)

    def support(self, zero_tol: float = 0.0) -> list[int]:
        return [int(i) + 1 for i in np.nonzero(np.abs(self.coeffs) > zero_tol)[0]]

    def restrict(self, trunc: int) -> "DirichletSeries":
        if trunc <= self.trunc:
            return DirichletSeries(trunc, self.coeffs[:trunc])
        a = np.zeros(trunc, dtype=complex)
        a[: self.trunc] = self.coeffs
        return DirichletSeries(trunc, a)

    def _check(self, other: "DirichletSeries") -> None:
        if self.trunc != other.trunc:
            raise TruncationMismatch(f"truncations differ: {self.trunc} vs {other.trunc}")

    # linear structure ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, DirichletSeries):
            self._check(other)
            return DirichletSeries(self.trunc, self.coeffs + other.coeffs)
        a = self.coeffs.copy()
        a[0] += other
        return DirichletSeries(self.trunc, a)

    __radd__ = __add__

    def __neg__(self):
        return DirichletSeries(self.trunc, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DirichletSeries):
            return dmul(self, other)
        return DirichletSeries(self.trunc, self.coeffs * complex(other))

    def __rmul__(self, other):
        return DirichletSeries(self.trunc, self.coeffs * complex(other))

    def __truediv__(self, scalar):
        return DirichletSeries(self.trunc, self.coeffs / complex(scalar))

    def max_abs_diff(self, other: "DirichletSeries") -> float:
        self._check(other)
        if self.trunc == 0:
            return 0.0
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    def allclose(self, other: "DirichletSeries", tol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= tol

    def __repr__(self) -> str:
        terms = ", ".join(f"{n}: {self[n]:.6g}" for n in self.support())
        return f"DirichletSeries(trunc={self.trunc}, {{{terms}}})"

    # serialization ------------------------------------------------------
    def to_record(self) -> dict:
        return {
            "trunc": self.trunc,
            "coeffs": [[n, float(self[n].real), float(self[n].imag)] for n in self.support()],
        }

    @classmethod
    def from_record(cls, rec: Mapping, trunc: int | None = None) -> "DirichletSeries":
        """Parse ``{trunc, coeffs: [[n, re, im], ...]}``.

        ``trunc`` overrides the record's own truncation when given.
        """
        if not isinstance(rec, Mapping) or "coeffs" not in rec:
            raise ParseError("series record needs a 'coeffs' field")
        N = trunc if trunc is not None else rec.get("trunc")
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ParseError(f"series truncation must be a positive integer, got {N!r}")
        return cls.from_terms(N, parse_triples(rec["coeffs"], start=1))


def parse_triples(entries, start: int) -> list[tuple[int, complex]]:
    """Validate ``[[index, re, im], ...]`` entries; errors name the offending entry."""
    if not isinstance(entries, list):
        raise ParseError("coefficient list must be a JSON array")
    out = []
    for pos, item in enumerate(entries):
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise ParseError(f"coefficient entry {pos}: expected [index, re, im]")
        idx, re, im = item
        if not isinstance(idx, int) or isinstance(idx, bool) or idx < start:
            raise ParseError(f"coefficient entry {pos}: bad index {idx!r}")
        for part in (re, im):
            if isinstance(part, bool) or not isinstance(part, (int, float)) or not math.isfinite(part):
                raise ParseError(f"coefficient at index {idx}: non-finite or non-numeric value {part!r}")
        out.append((idx, complex(re, im)))
    return out


def dmul(f: DirichletSeries, g: DirichletSeries) -> DirichletSeries:
    """Divisor convolution ``(f*g)_n = sum_{d|n} f_d g_{n/d}``."""
    f._check(g)
    N = f.trunc
    out = np.zeros(N, dtype=complex)
    a, b = f.coeffs, g.coeffs
    for d in range(1, N + 1):
        if a[d - 1] == 0:
            continue
        m = N // d
        out[d - 1 : d * m : d] += a[d - 1] * b[:m]
    return DirichletSeries(N, out)


def dexp(g: DirichletSeries) -> DirichletSeries:
    """Exponential of a Dirichlet series via the log-weighted recurrence.

    With ``G = g - g_1`` we have ``F' = G' F`` for ``F = exp(G)``; comparing
    coefficients of ``log n`` gives
    ``F_n log n = sum_{d|n, d>1} (log d) g_d F_{n/d}``.
    The scalar ``exp(g_1)`` is applied at the end.
    """
    N = g.trunc
    logs = _log_table(N)
    divs = proper_divisors(N)
    wg = logs * g.coeffs
    F = np.zeros(N, dtype=complex)
    F[0] = 1.0
    for n in range(2, N + 1):
        acc = 0j
        for d in divs[n]:
            w = wg[d - 1]
            if w != 0:
                acc += w * F[n // d - 1]
        F[n - 1] = acc / logs[n - 1]
    return DirichletSeries(N, F * np.exp(g.coeffs[0]))


def dilate(f: DirichletSeries, k: int) -> DirichletSeries:
    """Send the coefficient at ``n`` to index ``k n`` (multiplication by ``k^{-s}``)."""
    if k < 1:
        raise ValueError("dilation factor must be >= 1")
    N = f.trunc
    out = np.zeros(N, dtype=complex)
    m = N // k
    out[k - 1 : k * m : k] = f.coeffs[:m]
    return DirichletSeries(N, out)


def evaluate(f: DirichletSeries, s: complex) -> complex:
    n = np.arange(1, f.trunc + 1, dtype=float)
    return complex(np.sum(f.coeffs * np.exp(-complex(s) * np.log(n))))


def sup_bound(f: DirichletSeries, sigma: float) -> float:
    """Coefficient bound ``sum |a_n| n^{-sigma}`` for ``sup |f|`` over ``Re s >= sigma``."""
    logs = _log_table(f.trunc)
    return float(np.sum(np.abs(f.coeffs) * np.exp(-sigma * logs)))


def leading_term(f: DirichletSeries, zero_tol: float = ZERO_TOL) -> tuple[int, complex]:
    idx = np.nonzero(np.abs(f.coeffs) > zero_tol)[0]
    if idx.size == 0:
        raise NoLeadingTerm("series has no coefficient above the zero tolerance")
    m = int(idx[0]) + 1
    return m, f[m]


def derivative(f: DirichletSeries) -> DirichletSeries:
    return DirichletSeries(f.trunc, -f.coeffs * _log_table(f.trunc))
