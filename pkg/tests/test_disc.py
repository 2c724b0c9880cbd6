import numpy as np
import pytest

from koenigslab.disc import (
    boettcher,
    boettcher_norm_check,
    boettcher_residual,
    cor89_check,
    disc_companion,
    koenigs_disc,
    schroeder_residual,
    split_boettcher,
    starlike_check,
    tcommutation_residual,
)
from koenigslab.errors import BranchError, Inconclusive, NotAttracting, OrderError, ZeroDerivative
from koenigslab.taylor import TaylorSeries, fractional_power, tcompose, titerate
from koenigslab.verdict import FAIL, PASS, UNDETERMINED

M = 32


def pointwise_boettcher(phi, p, lam, z, steps=6):
    """``lim (phi^[n](z) / c)^{1/p^n}`` with principal roots guided by the local branch."""
    # lam u^p conjugacy: u(z) = lim (lam^{1/(p-1)} phi^[n](z))^{1/p^n} / lam^{1/(p-1)}
    c = lam ** (1 / (p - 1))
    w = z
    for n in range(1, steps + 1):
        w = phi(w)
    return (c * w) ** (1 / p**steps) / c


def test_monomials_have_identity_coordinate():
    for p in (2, 3):
        u = boettcher(TaylorSeries.from_terms(M, {p: 1.0}))
        assert u.max_abs_diff(TaylorSeries.identity(M)) == 0


def test_boettcher_quarter_example():
    phi = TaylorSeries.from_terms(M, {2: 0.25, 3: 1 / 16})
    u = boettcher(phi)
    assert u[1] == 1
    assert boettcher_residual(u, phi, 2, 0.25) < 1e-14
    z0 = 0.05
    assert u(z0) == pytest.approx(pointwise_boettcher(phi, 2, 0.25, z0), abs=1e-12)


def test_boettcher_matches_product_of_roots():
    # u = z psi^{1/2} (psi o phi)^{1/4} ... with exact fractional powers
    phi = TaylorSeries.from_terms(16, {2: 0.5, 3: 0.2})
    _, lam, psi = split_boettcher(phi)
    ref = TaylorSeries.identity(16)
    it = TaylorSeries.identity(16)
    for k in range(6):
        ref = ref * fractional_power(tcompose(psi, it), 2 ** (k + 1))
        it = tcompose(phi, it)
    assert boettcher(phi).max_abs_diff(ref) < 1e-13


def test_boettcher_preconditions():
    with pytest.raises(ZeroDerivative):
        boettcher(TaylorSeries.from_terms(M, {1: 0.5}))
    with pytest.raises(BranchError):
        boettcher(TaylorSeries.from_terms(M, {2: 1.0, 3: 1.0}))
    with pytest.raises(ValueError):
        split_boettcher(TaylorSeries.from_terms(M, {0: 0.1, 2: 1.0}))


def test_norm_check_routes():
    v = boettcher_norm_check(TaylorSeries.from_terms(M, {2: 0.5, 4: 0.25}))
    assert v.status == PASS and v.quantities["route"] in ("norm bound", "iterate bound")
    v = boettcher_norm_check(TaylorSeries.from_terms(M, {2: 1.0}))
    assert v.status == PASS and v.quantities["route"] == "monomial"
    assert boettcher_norm_check(TaylorSeries.from_terms(M, {2: 0.5, 3: 0.6})).status == UNDETERMINED


def test_disc_companion_commutes():
    phi = TaylorSeries.from_terms(48, {2: 0.5, 4: 0.25})
    g = disc_companion(phi, q=3)
    assert g.valuation() == 3
    assert tcommutation_residual(phi, g) < 1e-12
    with pytest.raises(OrderError):
        disc_companion(phi, q=4)


def test_koenigs_disc_against_pointwise_limit():
    phi = TaylorSeries.from_terms(M, {1: 0.5, 2: 0.2})
    u = koenigs_disc(phi)
    assert schroeder_residual(u, phi) < 1e-13
    z0 = 0.2 + 0.1j
    w = titerate(phi, 1)(z0)
    for n in range(2, 60):
        w = phi(w)
    assert u(z0) == pytest.approx(w / 0.5**59, abs=1e-10)
    with pytest.raises(ZeroDerivative):
        koenigs_disc(TaylorSeries.from_terms(M, {2: 0.5}))
    with pytest.raises(NotAttracting):
        koenigs_disc(TaylorSeries.from_terms(M, {1: 1.0}))


def test_starlike_verdicts():
    assert starlike_check(TaylorSeries.identity(M)).status == PASS
    assert starlike_check(TaylorSeries.from_terms(M, {1: 1, 2: 0.9})).status == FAIL
    with pytest.raises(Inconclusive):
        starlike_check(TaylorSeries.from_terms(M, {1: 1, 2: 1}))


def test_starlike_of_boundary_critical_point_is_undetermined():
    # phi'(-1) = 0 forces u'(-1) = 0, so Re(z u'/u) touches 0 at theta = pi
    phi = TaylorSeries.from_terms(64, {1: 1 / 3, 2: 1 / 6})
    u = koenigs_disc(phi)
    v = starlike_check(u)
    assert v.status == UNDETERMINED
    assert v.quantities["argmin_theta"] == pytest.approx(np.pi)
    assert abs(v.quantities["min_re"]) < 1e-2


def test_cor89_routes():
    v = cor89_check(1 / 3, TaylorSeries.from_terms(32, {1: 0.5}))
    assert v.status == PASS and v.quantities["route"] == "closed form"
    assert v.quantities["closed_form"] == pytest.approx(2 / 3)
    assert v.quantities["product"] == pytest.approx(3.0, abs=1e-6)
    v = cor89_check(0.2, TaylorSeries.from_terms(32, {1: 0.1}))
    assert v.status == PASS and v.quantities["route"] == "coefficient bound"
    assert cor89_check(0.9, TaylorSeries.from_terms(32, {1: 0.6})).status == FAIL
    with pytest.raises(BranchError):
        cor89_check(0.5, TaylorSeries.from_terms(32, {1: 1.0}))
