import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from koenigslab.errors import CharacteristicError, ParseError
from koenigslab.series import DirichletSeries, evaluate
from koenigslab.symbols import (
    Composer,
    Symbol,
    compose,
    compose_symbols,
    image_lower_bound,
    injectivity_abscissa,
    invert,
    iterate,
    mapping_check,
    power_term,
)

from conftest import series, symbols

S0 = 5.0 + 0.7j  # far enough right that truncation tails are negligible


def test_power_term_closed_form():
    # 2^{-(s + 1 + 2^{-s})} = (1/2) 2^{-s} exp(-log 2 * 2^{-s})
    phi = Symbol.from_terms(1, {1: 1.0, 2: 1.0}, 16)
    f = power_term(2, phi)
    assert f.support() == [2, 4, 8, 16]
    assert f[2] == pytest.approx(0.5)
    assert f[4] == pytest.approx(-0.5 * math.log(2))
    assert f[8] == pytest.approx(0.5 * math.log(2) ** 2 / 2)


def test_power_term_overflow_flag():
    phi = Symbol.affine(3, 1.0, 20)
    out, flag = power_term(3, phi, return_flag=True)
    assert flag and out.support() == []
    out, flag = power_term(2, phi, return_flag=True)
    assert not flag and out.support() == [8]


def test_power_term_needs_characteristic():
    with pytest.raises(CharacteristicError):
        power_term(2, Symbol.affine(0, 1.0, 8))


@given(symbols(N=64), st.integers(2, 8))
def test_power_term_support_and_leading(phi, k):
    if k**phi.c0 > 64:
        return
    f = power_term(k, phi)
    base = k**phi.c0
    assert all(n % base == 0 for n in f.support())
    assert abs(f[base] - complex(k) ** (-phi.c1)) < 1e-12


def test_power_term_matches_pointwise_value():
    phi = Symbol.from_terms(1, {1: 0.8 + 0.2j, 2: 0.3, 5: -0.1j}, 400)
    f = power_term(3, phi)
    assert abs(evaluate(f, S0) - np.exp(-math.log(3) * phi(S0))) < 1e-12


def test_compose_matches_pointwise_value():
    f = DirichletSeries.from_terms(300, {1: 1.0, 2: -0.5, 3: 0.25j, 6: 0.1})
    phi = Symbol.from_terms(2, {1: 0.5, 3: 0.2}, 300)
    assert abs(evaluate(compose(f, phi), 4.0) - evaluate(f, phi(4.0))) < 1e-12


@given(series(N=32), symbols(N=32))
def test_composer_matrix_agrees_with_compose(f, phi):
    assert Composer(phi).series(f).max_abs_diff(compose(f, phi)) < 1e-12


def test_composer_matrix_columns():
    phi = Symbol.affine(1, 1.0, 12)
    P = Composer(phi).matrix
    # k^{-(s+1)} = k^{-1} k^{-s}: diagonal matrix
    assert np.allclose(P, np.diag([1.0 / k for k in range(1, 13)]))


@given(symbols(N=32), symbols(N=32), symbols(N=32))
def test_symbol_composition_associates(a, b, c):
    left = compose_symbols(compose_symbols(a, b), c)
    right = compose_symbols(a, compose_symbols(b, c))
    assert left.c0 == right.c0
    assert left.max_abs_diff(right) < 1e-9 * max(1.0, float(np.max(np.abs(left.psi.coeffs))))


def test_iterate_counts():
    phi = Symbol.from_terms(1, {1: 1.0, 2: 0.2}, 32)
    assert iterate(phi, 0).max_abs_diff(Symbol.identity(32)) == 0
    assert iterate(phi, 1).max_abs_diff(phi) == 0
    three = compose_symbols(phi, compose_symbols(phi, phi))
    assert iterate(phi, 3).max_abs_diff(three) < 1e-13
    with pytest.raises(ValueError):
        iterate(phi, -1)


@given(symbols(N=48, c0=1))
def test_invert_is_two_sided(phi):
    v = invert(phi)
    ident = Symbol.identity(48)
    assert compose_symbols(phi, v).max_abs_diff(ident) < 1e-10
    assert compose_symbols(v, phi).max_abs_diff(ident) < 1e-10


def test_invert_of_shift():
    v = invert(Symbol.affine(1, 2 + 1j, 10))
    assert v.max_abs_diff(Symbol.affine(1, -2 - 1j, 10)) == 0
    with pytest.raises(CharacteristicError):
        invert(Symbol.affine(2, 1.0, 10))


def test_injectivity_abscissa_solves_the_bound():
    phi = Symbol.from_terms(1, {1: 1.0, 2: 0.5, 3: 0.25}, 8)
    sigma = injectivity_abscissa(phi)
    value = 0.5 * math.log(2) * 2**-sigma + 0.25 * math.log(3) * 3**-sigma
    assert value == pytest.approx(0.5, abs=1e-10)
    root = brentq(lambda x: 0.5 * math.log(2) * 2**-x + 0.25 * math.log(3) * 3**-x - 0.5, -5, 5, xtol=1e-14)
    assert sigma == pytest.approx(root, abs=1e-10)
    assert injectivity_abscissa(Symbol.affine(1, 1.0, 8)) == -math.inf


def test_image_lower_bound_and_mapping():
    phi = Symbol.from_terms(1, {1: 1.0, 2: 0.5}, 8)
    assert image_lower_bound(phi, 0.0) == pytest.approx(0.5)
    assert mapping_check(phi)["status"] == "certified"
    bad = Symbol.from_terms(1, {1: -1.0}, 8)
    assert mapping_check(bad)["status"] == "violated"


def test_symbol_records():
    phi = Symbol.from_terms(2, {1: 1.0, 3: 0.5j}, 10)
    back = Symbol.from_record(phi.to_record())
    assert back.c0 == 2 and back.max_abs_diff(phi) == 0
    bare = Symbol.from_record({"c0": 2, "psi": [[1, 1, 0]]}, trunc=16)
    assert bare.trunc == 16 and bare.c1 == 1
    with pytest.raises(ParseError):
        Symbol.from_record({"c0": -1, "psi": []}, trunc=4)
    with pytest.raises(ParseError):
        Symbol.from_record({"psi": []})
