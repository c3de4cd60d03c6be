import cmath

import pytest
from hypothesis import given, strategies as st

from serrehom.class_poly import (ReducedForm, class_number, hilbert_class_poly, j_from_tau,
                                 new_context, reduced_forms, tau_of_lattice, verify_cm_j,
                                 default_precision)
from serrehom.errors import BadDiscriminant, NotUpperHalfPlane, PrecisionExhausted, ZeroIdeal
from serrehom.quad_orders import FracIdeal, ImQuadField, QuadOrder


def test_reduced_forms_examples():
    assert reduced_forms(-4) == [ReducedForm(1, 0, 1)]
    assert reduced_forms(-15) == [ReducedForm(1, 1, 4), ReducedForm(2, 1, 2)]
    assert class_number(-23) == 3
    assert class_number(-16) == 1
    assert ReducedForm(2, 0, 2) in reduced_forms(-16, primitive=False)


@pytest.mark.parametrize("D", [-5, -1, 4, 0, -2])
def test_bad_discriminants(D):
    with pytest.raises(BadDiscriminant):
        reduced_forms(D)


def test_discriminant_limit():
    with pytest.raises(BadDiscriminant):
        reduced_forms(-(10 ** 6) - 4)
    assert reduced_forms(-(10 ** 6) - 4, max_abs=10 ** 7)


@given(st.integers(3, 2000))
def test_forms_are_reduced_and_complete(n):
    D = -n
    if D % 4 not in (0, 1):
        return
    forms = reduced_forms(D, primitive=False)
    assert len(set(forms)) == len(forms)
    for q in forms:
        assert q.disc == D and q.is_reduced()


@pytest.mark.parametrize("tau,value", [(1j, 1728), (2j, 287496), (complex(0.5, 3 ** 0.5 / 2), 0)])
def test_j_special_values(tau, value):
    assert abs(j_from_tau(tau, 333).value - value) < 1e-20


@given(st.floats(-0.5, 0.5), st.floats(0.6, 2.0))
def test_j_modular_invariance(x, y):
    bits = 200
    ctx = new_context(bits + 64)
    tau = ctx.mpc(x, y)
    j0 = j_from_tau(tau, bits).value
    j1 = j_from_tau(tau + 1, bits).value
    j2 = j_from_tau(-1 / tau, bits).value
    scale = max(1, abs(j0))
    assert abs(j0 - j1) / scale < 1e-40 and abs(j0 - j2) / scale < 1e-40


def test_j_rejects_lower_half_plane():
    with pytest.raises(NotUpperHalfPlane):
        j_from_tau(complex(0.1, -1))


def test_tau_of_lattice():
    F = ImQuadField(-1)
    t, form, exact = tau_of_lattice(F.maximal_order().as_ideal())
    assert form == ReducedForm(1, 0, 1) and exact == F.omega
    t, form, exact = tau_of_lattice(F.order(2).as_ideal())
    assert form == ReducedForm(1, 0, 4) and exact == F.omega * 2
    with pytest.raises(ZeroIdeal):
        tau_of_lattice(FracIdeal(F, [F(0)]))


@given(st.integers(-5, 5), st.integers(-5, 5), st.sampled_from([-1, -2, -3, -15, -23]))
def test_tau_homothety_invariant(a, b, d):
    F = ImQuadField(d)
    c = F(a, b)
    if not c:
        return
    o = QuadOrder.from_discriminant(F.disc * 4)
    L = FracIdeal.from_form(o, *[(q.a, q.b) for q in reduced_forms(o.disc)][-1])
    assert tau_of_lattice(L)[2] == tau_of_lattice(L.scale(c))[2]
    assert tau_of_lattice(L)[1].disc == o.disc


@pytest.mark.parametrize("D,coeffs", [
    (-3, (0, 1)), (-4, (-1728, 1)), (-16, (-287496, 1)),
    (-15, (-121287375, 191025, 1)), (-7, (3375, 1)),
])
def test_class_poly_goldens(D, coeffs):
    H = hilbert_class_poly(D)
    assert H.coeffs == coeffs and H.residue < 1e-10 and H.degree == class_number(D)


def test_class_poly_str_and_json():
    assert str(hilbert_class_poly(-15)) == "x^2 + 191025*x - 121287375"
    assert str(hilbert_class_poly(-3)) == "x"
    assert hilbert_class_poly(-4).to_json() == {"D": -4, "coeffs": ["-1728", "1"]}


def test_precision_monotone_and_threads():
    a = hilbert_class_poly(-71, 512)
    b = hilbert_class_poly(-71, 1024)
    c = hilbert_class_poly(-71, 512, threads=4)
    assert a.coeffs == b.coeffs == c.coeffs


def test_precision_exhausted():
    with pytest.raises(PrecisionExhausted):
        hilbert_class_poly(-15, 64, threshold=0.0, max_retries=1)


def test_env_precision(monkeypatch):
    monkeypatch.setenv("SERREHOM_PREC_BITS", "256")
    assert default_precision() == 256
    monkeypatch.setenv("SERREHOM_PREC_BITS", "lots")
    with pytest.raises(ValueError):
        default_precision()


def test_verify_cm_j():
    F = ImQuadField(-1)
    ok = verify_cm_j(F.maximal_order().as_ideal(), F.maximal_order())
    assert ok.passed and ok.j_rounded == 1728
    ok2 = verify_cm_j(F.order(2).as_ideal(), F.order(2))
    assert ok2.passed and ok2.j_rounded == 287496
    bad = verify_cm_j(F.maximal_order().as_ideal(), F.order(2))
    assert not bad.passed and bad.residue > 1e-3


def test_verify_non_trivial_class_group():
    o = QuadOrder.from_discriminant(-23)
    for q in reduced_forms(-23):
        assert verify_cm_j(FracIdeal.from_form(o, q.a, q.b), o).passed
