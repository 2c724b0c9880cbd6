"""Direct sums of weighted forward shifts: intertwiners, commutants, Cesàro means.

Weights are stored through their logarithms so that canonical weights such
as ``m^{-c0^k c1}`` (which underflow after a few steps) keep exact products
``pi_k = w_0 ... w_{k-1}``.  Linear solves run in coordinates rescaled by
``diag(pi_k)``, where every weighted shift becomes the unweighted shift; the
raw-coordinate solve is kept for weights of moderate dynamic range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import sparse
from scipy.linalg import null_space

from .errors import ParseError
from .verdict import FAIL, PASS, Verdict

LogWeightFn = Callable[[int, int], complex]


@dataclass(frozen=True, eq=False)
class WeightFamily:
    """Blocks ``m -> (w_0, ..., w_K)``; ``source`` optionally extends a block past ``K``."""

    K: int
    logw: Mapping[int, np.ndarray]
    source: LogWeightFn | None = None
    meta: dict = field(default_factory=dict)

    @property
    def labels(self) -> list[int]:
        return sorted(self.logw)

    def weights(self, m: int) -> np.ndarray:
        return np.exp(self.logw[m][: self.K + 1])

    def log_weights(self, m: int, length: int) -> np.ndarray | None:
        """First ``length`` log-weights of block ``m`` (None if unavailable)."""
        have = self.logw[m]
        if length <= have.shape[0]:
            return have[:length]
        if self.source is None:
            return None
        return np.array([self.source(m, k) for k in range(length)], dtype=complex)

    def to_record(self) -> dict:
        blocks = {}
        for m in self.labels:
            w = self.weights(m)
            blocks[str(m)] = [[float(z.real), float(z.imag)] for z in w]
        return {"K": self.K, "blocks": blocks}

    @classmethod
    def from_record(cls, rec: Mapping) -> "WeightFamily":
        if not isinstance(rec, Mapping) or "K" not in rec or "blocks" not in rec:
            raise ParseError("weight family needs 'K' and 'blocks'")
        K = rec["K"]
        if not isinstance(K, int) or K < 1:
            raise ParseError(f"K must be a positive integer, got {K!r}")
        logw = {}
        for key, seq in rec["blocks"].items():
            try:
                m = int(key)
            except ValueError as exc:
                raise ParseError(f"block label {key!r} is not an integer") from exc
            if not isinstance(seq, list) or len(seq) < K + 1:
                raise ParseError(f"block {m}: expected at least {K + 1} weights")
            vals = []
            for pos, item in enumerate(seq):
                if not isinstance(item, (list, tuple)) or len(item) != 2:
                    raise ParseError(f"block {m}, weight {pos}: expected [re, im]")
                z = complex(item[0], item[1])
                if z == 0 or not np.isfinite(z):
                    raise ParseError(f"block {m}, weight {pos}: weights must be finite and nonzero")
                vals.append(np.log(z))
            logw[m] = np.array(vals, dtype=complex)
        return cls(K, logw)


def excluded_power(m: int, c0: int) -> bool:
    """True when ``m = n^(c0^k)`` for some ``n >= 2, k >= 1``."""
    e = c0
    while 2**e <= m:
        n = round(m ** (1.0 / e))
        for cand in (n - 1, n, n + 1):
            if cand >= 2 and cand**e == m:
                return True
        e *= c0
    return False


def canonical_family(c0: int, c1: complex, Mmax: int, K: int) -> WeightFamily:
    """Shift decomposition of ``f -> f(c0 s + c1)`` on series without constant term."""
    if c0 < 2:
        raise ValueError("canonical family needs c0 >= 2")
    c1 = complex(c1)
    labels = [m for m in range(2, Mmax + 1) if not excluded_power(m, c0)]

    def src(m: int, k: int) -> complex:
        return -(float(c0) ** k) * c1 * math.log(m)

    logw = {m: np.array([src(m, k) for k in range(K + 1)], dtype=complex) for m in labels}
    return WeightFamily(K, logw, src, {"c0": c0, "c1": c1})


def _alternating_logw(k: int) -> float:
    if k == 0:
        return 0.0
    p = k.bit_length() - 1  # k in [2^p, 2^(p+1))
    return math.log(2.0) if p % 2 == 0 else -math.log(2.0)


def alternating_family(n_blocks: int, K: int) -> WeightFamily:
    """Odd labels carry ``w`` (2 on ``[4^p, 2 4^p)``, 1/2 otherwise, ``w_0 = 1``); even labels carry ``1/w``."""

    def src(m: int, k: int) -> complex:
        v = _alternating_logw(k)
        return complex(v if m % 2 else -v)

    logw = {m: np.array([src(m, k) for k in range(K + 1)], dtype=complex) for m in range(1, n_blocks + 1)}
    return WeightFamily(K, logw, src, {"kind": "alternating"})


def shift_matrix(w: np.ndarray, K: int) -> np.ndarray:
    S = np.zeros((K + 1, K + 1), dtype=complex)
    S[np.arange(1, K + 1), np.arange(K)] = np.asarray(w, dtype=complex)[:K]
    return S


def _log_products(logw: np.ndarray, K: int) -> np.ndarray:
    """``log(w_0 ... w_{k-1})`` for ``k = 0..K``."""
    out = np.zeros(K + 1, dtype=complex)
    out[1:] = np.cumsum(np.asarray(logw, dtype=complex)[:K])
    return out


@dataclass(frozen=True, eq=False)
class PatternOperator:
    """Lower-triangular ``t_ij = a_{i-j} (w_0..w_{i-1}) / (w'_0..w'_{j-1})``."""

    a: np.ndarray
    logw: np.ndarray
    logw_prime: np.ndarray

    @property
    def K(self) -> int:
        return self.a.shape[0] - 1

    def scale(self) -> np.ndarray:
        """Matrix of ``pi_i / pi'_j`` (lower triangle)."""
        K = self.K
        lp = _log_products(self.logw, K)
        lq = _log_products(self.logw_prime, K)
        L = lp[:, None] - lq[None, :]
        mask = np.tril(np.ones((K + 1, K + 1), dtype=bool))
        out = np.zeros((K + 1, K + 1), dtype=complex)
        out[mask] = np.exp(L[mask])
        return out

    def toeplitz(self) -> np.ndarray:
        K = self.K
        i, j = np.indices((K + 1, K + 1))
        T = np.where(i >= j, self.a[np.clip(i - j, 0, K)], 0)
        return T.astype(complex)

    def matrix(self) -> np.ndarray:
        return self.toeplitz() * self.scale()


def _sylvester_operator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> X A - B X`` on column-major ``vec(X)``."""
    n = A.shape[0]
    eye = np.eye(n)
    return np.kron(A.T, eye) - np.kron(eye, B)


def intertwiner_basis(w, w_prime, K: int, scaled: bool = True, logs: bool = False) -> dict:
    """Nullspace of ``T S_{w'} = S_w T`` on ``(K+1) x (K+1)`` matrices.

    ``w``/``w_prime`` are weights (or log-weights when ``logs``).  With
    ``scaled`` the unknown is ``X = D_w^{-1} T D_{w'}``, which turns both
    shifts into the unit shift and keeps the solve well conditioned.
    """
    lw = np.asarray(w, dtype=complex) if logs else np.log(np.asarray(w, dtype=complex))
    lwp = np.asarray(w_prime, dtype=complex) if logs else np.log(np.asarray(w_prime, dtype=complex))
    n = K + 1
    if scaled:
        J = shift_matrix(np.ones(K), K)
        op = _sylvester_operator(J, J)
    else:
        op = _sylvester_operator(shift_matrix(np.exp(lwp), K), shift_matrix(np.exp(lw), K))
    ns = null_space(op)
    basis, worst = [], 0.0
    lp = _log_products(lw, K)
    for col in ns.T:
        M = col.reshape((n, n), order="F")
        if scaled:
            a = M[:, 0].copy()
        else:
            a = M[:, 0] * np.exp(-lp)
        P = PatternOperator(a, lw, lwp)
        ref = P.toeplitz() if scaled else P.matrix()
        dev = float(np.max(np.abs(M - ref)) / max(np.max(np.abs(M)), 1e-300))
        worst = max(worst, dev)
        basis.append(P)
    residual = 0.0
    Sw, Swp = shift_matrix(np.exp(lw), K), shift_matrix(np.exp(lwp), K)
    for P in basis:
        T = P.matrix()
        residual = max(residual, float(np.max(np.abs(T @ Swp - Sw @ T)) / max(np.max(np.abs(T)), 1e-300)))
    return {"dimension": len(basis), "basis": basis, "pattern_deviation": worst, "residual": residual, "scaled": scaled}


def commutant_blocks(family: WeightFamily, scaled: bool = True) -> dict:
    """Per-pair intertwiner spaces ``T_{m,n} S_{w^(n)} = S_{w^(m)} T_{m,n}``."""
    K = family.K
    pairs = {}
    worst = 0.0
    total = 0
    for m in family.labels:
        for n in family.labels:
            rep = intertwiner_basis(family.logw[m][: K + 1], family.logw[n][: K + 1], K, scaled=scaled, logs=True)
            pairs[(m, n)] = rep
            worst = max(worst, rep["pattern_deviation"])
            total += rep["dimension"]
    return {
        "labels": family.labels,
        "pair_dimensions": {f"{m},{n}": r["dimension"] for (m, n), r in pairs.items()},
        "total_dimension": total,
        "pattern_deviation": worst,
        "all_patterned": worst <= 1e-10,
        "pairs": pairs,
    }


def _ratio_log_sequence(family: WeightFamily, m: int, n: int, length: int) -> np.ndarray | None:
    """``log |(w^m_0..w^m_k) / (w^n_0..w^n_k)|`` for ``k < length``."""
    a = family.log_weights(m, length)
    b = family.log_weights(n, length)
    if a is None or b is None:
        return None
    with np.errstate(invalid="ignore", over="ignore"):
        return np.cumsum((a - b).real)


def _bounded_above(seq: np.ndarray, split: int, slack: float) -> bool:
    if not np.all(np.isfinite(seq)):
        return False
    head = float(np.max(seq[:split]))
    return float(np.max(seq)) <= head + slack * (1 + abs(head))


def _stable_pair(family: WeightFamily, m: int, n: int, growth_window: int) -> bool | None:
    """Whether the diagonal intertwiner from block ``n`` to ``m`` stays bounded as ``K`` grows."""
    K = family.K
    seq = _ratio_log_sequence(family, m, n, K + growth_window)
    if seq is None:
        return None
    # entry k of the diagonal intertwiner is pi^m_k / pi^n_k, i.e. seq[k-1]
    diag = np.concatenate([[0.0], seq[:-1]]) if seq.size else seq
    return _bounded_above(diag, K + 1, 1e-9)


def _components(labels: list[int], edges) -> list[list[int]]:
    parent = {m: m for m in labels}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m, n in edges:
        ra, rb = find(m), find(n)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for m in labels:
        groups.setdefault(find(m), []).append(m)
    return sorted(groups.values())


def _commutator_rows(G: np.ndarray) -> sparse.csr_matrix:
    n = G.shape[0]
    Gs = sparse.csr_matrix(G)
    eye = sparse.identity(n, format="csr")
    return (sparse.kron(Gs.T, eye) - sparse.kron(eye, Gs)).tocsr()


def double_commutant_structure(family: WeightFamily, growth_window: int = 5) -> dict:
    """Double commutant of ``W = sum S_{w^(m)}`` inside the truncated matrix algebra.

    The commutant is generated by ``W``, the block projections and the
    diagonal intertwiners ``S_{w^(m), w^(n), delta_0}`` between blocks.  A
    cross intertwiner is kept only when its entries do not grow when ``K`` is
    extended by ``growth_window``; this stands in for the boundedness that
    finite matrices cannot see.  Everything is solved in rescaled
    coordinates, where the kept intertwiners become identity blocks.
    """
    labels = family.labels
    K = family.K
    B = len(labels)
    size = B * (K + 1)
    pos = {m: i * (K + 1) for i, m in enumerate(labels)}
    gens = []
    J = np.zeros((size, size))
    blockJ = shift_matrix(np.ones(K), K).real
    for m in labels:
        s = pos[m]
        J[s : s + K + 1, s : s + K + 1] = blockJ
        P = np.zeros((size, size))
        P[s : s + K + 1, s : s + K + 1] = np.eye(K + 1)
        gens.append(P)
    gens.append(J)
    kept, unknown = [], []
    for m in labels:
        for n in labels:
            if m == n:
                continue
            st = _stable_pair(family, m, n, growth_window)
            if st is None:
                unknown.append((m, n))
                st = True
            if st:
                kept.append((m, n))
                E = np.zeros((size, size))
                E[pos[m] : pos[m] + K + 1, pos[n] : pos[n] + K + 1] = np.eye(K + 1)
                gens.append(E)
    A = sparse.vstack([_commutator_rows(G) for G in gens]).tocsr()
    gram = (A.T @ A).toarray()
    evals, evecs = np.linalg.eigh(gram)
    null = evecs[:, evals <= 1e-9 * max(1.0, float(evals[-1]))]
    comps = _components(labels, kept)
    shared_dev, offdiag = 0.0, 0.0
    for col in null.T:
        X = col.reshape((size, size), order="F")
        blocks = {m: X[pos[m] : pos[m] + K + 1, pos[m] : pos[m] + K + 1] for m in labels}
        mask = np.ones((size, size), dtype=bool)
        for m in labels:
            mask[pos[m] : pos[m] + K + 1, pos[m] : pos[m] + K + 1] = False
        offdiag = max(offdiag, float(np.max(np.abs(X[mask]), initial=0.0)))
        for comp in comps:
            ref = blocks[comp[0]][:, 0]
            for m in comp[1:]:
                shared_dev = max(shared_dev, float(np.max(np.abs(blocks[m][:, 0] - ref))))
    return {
        "labels": labels,
        "dimension": int(null.shape[1]),
        "predicted_dimension": len(comps) * (K + 1),
        "components": comps,
        "kept_pairs": [list(p) for p in kept],
        "unfiltered_pairs": [list(p) for p in unknown],
        "shared_pattern_deviation": shared_dev,
        "offdiagonal_max": offdiag,
        "growth_window": growth_window,
        "solutions": [col.reshape((size, size), order="F") for col in null.T],
    }


def equivalence_classes(family: WeightFamily, mode: str = "auto", horizon: int = 2048, slack: float = 1e-6) -> dict:
    """Partition block labels by: ratio of weight products bounded, or bounded away from 0.

    ``closed-form`` applies to canonical families, whose ratio for ``m < n``
    is ``(m/n)^{-c1 (c0^(k+1) - 1)/(c0 - 1)}``: of modulus tending to
    infinity when ``Re c1 > 0`` and of modulus one when ``Re c1 = 0``.
    ``finite-horizon`` inspects the ratio products up to ``horizon`` and calls
    a sequence bounded when its running maximum stops growing over the last
    two doublings of the horizon (a single doubling can sit inside one
    monotone stretch of a dyadically oscillating product).
    """
    labels = family.labels
    if mode == "auto":
        mode = "closed-form" if "c0" in family.meta else "finite-horizon"
    if mode == "closed-form":
        c1 = complex(family.meta["c1"])
        if c1.real < 0:
            raise ValueError("closed form needs Re c1 >= 0")
        classes = [labels] if labels else []
        grade = "proof"
        used = None
    else:
        length = horizon
        if family.source is None:
            length = min(len(family.logw[m]) for m in labels)
        edges = []
        for i, m in enumerate(labels):
            for n in labels[i + 1 :]:
                seq = _ratio_log_sequence(family, m, n, length)
                split = max(1, length // 4)
                if _bounded_above(seq, split, slack) or _bounded_above(-seq, split, slack):
                    edges.append((m, n))
        classes = _components(labels, edges)
        grade = "evidence"
        used = length
    single = len(classes) <= 1
    verdict = Verdict(
        PASS if single else FAIL,
        {"classes": len(classes), "mode": mode, "grade": grade, "horizon": used},
        witness={"classes": classes},
    )
    return {"classes": classes, "mode": mode, "grade": grade, "horizon": used, "verdict": verdict,
            "statement": "double commutant property holds" if single else "double commutant property fails"}


def affine_double_commutant(c0: int, c1: complex, Mmax: int = 10, K: int = 8) -> dict:
    """Verdict for ``s -> c0 s + c1`` with ``c0 >= 2``; ``Re c1 = 0`` is the isometric case."""
    c1 = complex(c1)
    if c1.real == 0:
        v = Verdict(PASS, {"case": "isometry"})
        return {"classes": None, "mode": "gate", "grade": "cited", "verdict": v, "statement": "double commutant property holds"}
    return equivalence_classes(canonical_family(c0, c1, Mmax, K), mode="closed-form")


def family_matrix(family: WeightFamily) -> np.ndarray:
    K = family.K
    mats = [shift_matrix(family.weights(m), K) for m in family.labels]
    size = len(mats) * (K + 1)
    W = np.zeros((size, size), dtype=complex)
    for i, S in enumerate(mats):
        s = i * (K + 1)
        W[s : s + K + 1, s : s + K + 1] = S
    return W


def cesaro_approximation(family: WeightFamily, a, L: int = 200, tol: float = 1e-6) -> dict:
    """Cesàro means ``P_l(W)`` of ``sum a_i W^i`` and their convergence to ``S``.

    ``P_l`` weights ``a_i W^i`` by ``(l + 1 - i)/(l + 1)``.  Reports both the
    bound against ``||W||`` and the Fejér-kernel bound against ``||S||``.
    """
    a = np.asarray(a, dtype=complex)
    W = family_matrix(family)
    size = W.shape[0]
    powers = [np.eye(size, dtype=complex)]
    for _ in range(1, a.size):
        powers.append(powers[-1] @ W)
    S = sum(ai * Pw for ai, Pw in zip(a, powers))
    norm_W = float(np.linalg.norm(W, 2))
    norm_S = float(np.linalg.norm(S, 2))
    max_norm = 0.0
    errors = []
    prev = None
    monotone = True
    for l in range(L + 1):
        P = np.zeros((size, size), dtype=complex)
        for i in range(min(l, a.size - 1) + 1):
            P += (l + 1 - i) / (l + 1) * a[i] * powers[i]
        max_norm = max(max_norm, float(np.linalg.norm(P, 2)))
        col_err = np.linalg.norm(P - S, axis=0)
        if prev is not None and np.any(col_err > prev + 1e-15):
            monotone = False
        prev = col_err
        errors.append(float(np.max(col_err)))
    return {
        "norm_W": norm_W,
        "norm_S": norm_S,
        "max_norm_P": max_norm,
        "bound_W_holds": max_norm <= norm_W * (1 + 1e-10),
        "bound_S_holds": max_norm <= norm_S * (1 + 1e-10),
        "final_error": errors[-1],
        "monotone": monotone,
        "converged": errors[-1] <= tol,
        "errors": errors,
    }
