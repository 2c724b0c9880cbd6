import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from koenigslab.errors import ParseError
from koenigslab.shifts import (
    PatternOperator,
    WeightFamily,
    affine_double_commutant,
    alternating_family,
    canonical_family,
    cesaro_approximation,
    commutant_blocks,
    double_commutant_structure,
    equivalence_classes,
    excluded_power,
    family_matrix,
    intertwiner_basis,
    shift_matrix,
)
from koenigslab.verdict import FAIL, PASS


def brute_index_set(c0, Mmax):
    bad = {n ** (c0**k) for n in range(2, Mmax + 1) for k in range(1, 8) if n ** (c0**k) <= Mmax}
    return [m for m in range(2, Mmax + 1) if m not in bad]


def test_canonical_index_sets():
    assert canonical_family(2, 1, 10, 4).labels == [2, 3, 5, 6, 7, 8, 10]
    labels = canonical_family(3, 1, 30, 4).labels
    assert set(range(2, 31)) - set(labels) == {8, 27}
    for c0 in (2, 3, 4):
        assert canonical_family(c0, 1, 300, 2).labels == brute_index_set(c0, 300)
    assert excluded_power(16, 2) and excluded_power(81, 2) and not excluded_power(32, 4)


def test_canonical_weights():
    fam = canonical_family(2, 1, 3, 4)
    assert np.allclose(fam.weights(2)[:4], [1 / 2, 1 / 4, 1 / 16, 1 / 256])
    with pytest.raises(ValueError):
        canonical_family(1, 1, 5, 4)


def unit_toeplitz_space_dimension(basis, K):
    stack = np.array([P.toeplitz()[:, 0] for P in basis])
    return np.linalg.matrix_rank(stack)


def test_intertwiners_of_unit_shift_are_toeplitz():
    K = 6
    rep = intertwiner_basis(np.ones(K + 1), np.ones(K + 1), K, scaled=False)
    assert rep["dimension"] == K + 1 and rep["pattern_deviation"] < 1e-12
    for P in rep["basis"]:
        T = P.matrix()
        assert np.allclose(T, np.tril(T))
        for d in range(K + 1):
            assert np.allclose(np.diag(T, -d), np.diag(T, -d)[0])
    assert unit_toeplitz_space_dimension(rep["basis"], K) == K + 1


@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_raw_and_scaled_nullspaces_agree(K, seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 2, K + 1) * np.exp(1j * rng.uniform(0, 6, K + 1))
    wp = rng.uniform(0.5, 2, K + 1)
    raw = intertwiner_basis(w, wp, K, scaled=False)
    scaled = intertwiner_basis(w, wp, K, scaled=True)
    assert raw["dimension"] == scaled["dimension"] == K + 1
    assert raw["pattern_deviation"] < 1e-10 and scaled["pattern_deviation"] < 1e-10
    assert raw["residual"] < 1e-12 and scaled["residual"] < 1e-12


def test_pattern_identity():
    w = np.array([0.5, 2.0, 3.0, 1.0])
    P = PatternOperator(np.array([1, 0, 0, 0], dtype=complex), np.log(w + 0j), np.log(w + 0j))
    assert np.allclose(P.matrix(), np.eye(4))


def test_pattern_entries_follow_formula():
    w = np.array([0.5, 2.0, 3.0, 1.0])
    wp = np.array([1.5, 0.25, 2.0, 1.0])
    a = np.array([1.0, 2.0, -1.0, 0.5])
    T = PatternOperator(a + 0j, np.log(w + 0j), np.log(wp + 0j)).matrix()
    for i in range(4):
        for j in range(4):
            ref = a[i - j] * np.prod(w[:i]) / np.prod(wp[:j]) if j <= i else 0
            assert T[i, j] == pytest.approx(ref)
    Sw, Swp = shift_matrix(w, 3), shift_matrix(wp, 3)
    assert np.allclose(T @ Swp, Sw @ T)


def test_commutant_block_dimensions():
    single = WeightFamily(5, {7: np.log(np.full(6, 0.5) + 0j)})
    assert commutant_blocks(single)["total_dimension"] == 6
    rep = commutant_blocks(canonical_family(2, 1, 3, 8))
    assert rep["total_dimension"] == 4 * 9 and rep["all_patterned"]


def test_identical_blocks_commutant_contains_swap():
    K = 4
    lw = np.log(np.array([0.5, 0.7, 1.2, 0.9, 1.1]) + 0j)
    fam = WeightFamily(K, {1: lw, 2: lw})
    rep = commutant_blocks(fam)
    assert rep["pair_dimensions"]["1,2"] == K + 1
    # the identity intertwiner (a = delta_0) between equal blocks lies in the span
    span = np.array([P.matrix().ravel() for P in rep["pairs"][(1, 2)]["basis"]]).T
    coef, *_ = np.linalg.lstsq(span, np.eye(K + 1).ravel(), rcond=None)
    assert np.allclose(span @ coef, np.eye(K + 1).ravel())
    swap = np.block([[np.zeros((K + 1, K + 1)), np.eye(K + 1)], [np.eye(K + 1), np.zeros((K + 1, K + 1))]])
    W = family_matrix(fam)
    assert np.allclose(swap @ W, W @ swap)


@pytest.mark.parametrize("c0,c1,Mmax,K", [(2, 1.0, 5, 8), (2, 0.5 + 1j, 6, 6), (3, 1.0, 6, 5), (2, 2.0, 6, 10)])
def test_double_commutant_of_canonical_family(c0, c1, Mmax, K):
    rep = double_commutant_structure(canonical_family(c0, c1, Mmax, K))
    assert rep["dimension"] == rep["predicted_dimension"] == K + 1
    assert rep["shared_pattern_deviation"] < 1e-10 and rep["offdiagonal_max"] < 1e-10


def test_double_commutant_contains_identity():
    fam = canonical_family(2, 1.0, 5, 6)
    K = fam.K
    rep = double_commutant_structure(fam)
    assert rep["components"] == [[2, 3, 5]]
    span = np.array([X.ravel() for X in rep["solutions"]]).T
    ident = np.eye(3 * (K + 1)).ravel()
    coef, *_ = np.linalg.lstsq(span, ident, rcond=None)
    assert np.allclose(span @ coef, ident)


def test_double_commutant_two_classes():
    fam = alternating_family(4, 8)
    # a window of 5 from K = 8 does not reach the next dyadic swing
    assert double_commutant_structure(fam, growth_window=5)["dimension"] == 9
    rep = double_commutant_structure(fam, growth_window=24)
    assert rep["components"] == [[1, 3], [2, 4]]
    assert rep["dimension"] == 2 * 9


def test_equivalence_classes():
    cls = equivalence_classes(canonical_family(2, 1.0, 10, 4))
    assert cls["classes"] == [[2, 3, 5, 6, 7, 8, 10]] and cls["grade"] == "proof"
    assert cls["verdict"].status == PASS
    alt = equivalence_classes(alternating_family(4, 8))
    assert alt["classes"] == [[1, 3], [2, 4]] and alt["verdict"].status == FAIL
    assert alt["mode"] == "finite-horizon" and alt["grade"] == "evidence"
    lw = np.log(np.linspace(0.5, 1.5, 7) + 0j)
    shared = WeightFamily(6, {1: lw, 2: lw, 3: lw})
    assert equivalence_classes(shared)["classes"] == [[1, 2, 3]]


@given(st.integers(2, 3), st.floats(0.1, 2.0), st.floats(-2, 2))
def test_canonical_single_class_by_finite_horizon(c0, re, im):
    fam = canonical_family(c0, complex(re, im), 12, 4)
    assert len(equivalence_classes(fam, mode="finite-horizon", horizon=40)["classes"]) == 1


def test_affine_gate():
    assert affine_double_commutant(2, 3j)["mode"] == "gate"
    assert affine_double_commutant(2, 3j)["verdict"].status == PASS
    assert affine_double_commutant(3, 1.0)["verdict"].status == PASS


def test_cesaro_delta0_is_identity():
    fam = canonical_family(2, 1.0, 3, 4)
    rep = cesaro_approximation(fam, [1.0], L=5)
    assert rep["errors"][0] == 0 and rep["converged"]
    # the identity has norm 1 while ||W|| = 1/2: the bound holds against ||S|| only
    assert rep["bound_S_holds"] and not rep["bound_W_holds"]


def test_cesaro_error_is_harmonic():
    fam = canonical_family(2, 1.0, 3, 10)
    a = np.array([0.3, -1.0, 0.5, 0.2j])
    rep = cesaro_approximation(fam, a, L=200)
    W = family_matrix(fam)
    D = sum(i * a[i] * np.linalg.matrix_power(W, i) for i in range(4))
    C = float(np.max(np.linalg.norm(D, axis=0)))
    for l in (3, 50, 200):
        assert rep["errors"][l] == pytest.approx(C / (l + 1), rel=1e-10)
    assert rep["monotone"]


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=5))
def test_cesaro_norms_stay_below_norm_of_target(a):
    rep = cesaro_approximation(canonical_family(2, 1.0, 3, 6), a, L=30)
    assert rep["bound_S_holds"] and rep["monotone"]


def test_family_records():
    fam = canonical_family(2, 1.0, 5, 4)
    back = WeightFamily.from_record(fam.to_record())
    assert back.labels == fam.labels
    for m in fam.labels:
        assert np.allclose(back.weights(m), fam.weights(m))
    with pytest.raises(ParseError, match="weight 1"):
        WeightFamily.from_record({"K": 1, "blocks": {"2": [[1, 0], [0, 0]]}})
    with pytest.raises(ParseError):
        WeightFamily.from_record({"K": 3, "blocks": {"2": [[1, 0]]}})
