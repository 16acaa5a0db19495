from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fca.errors import MissingAssignment
from fca.rings import GaussianRational, SymPoly, Variable, evaluate, sym_conjugate

NAMES = ["alpha", "beta", "gamma"]

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)
gauss = st.builds(GaussianRational, small, small)


@st.composite
def sympolys(draw):
    p = SymPoly()
    for _ in range(draw(st.integers(0, 3))):
        term = SymPoly.const(draw(gauss))
        for _ in range(draw(st.integers(0, 2))):
            term = term * SymPoly.var(draw(st.sampled_from(NAMES)), draw(st.booleans()))
        p = p + term
    return p


assignments = st.fixed_dictionaries(
    {n: st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False) for n in NAMES}
)


def test_conj_of_variable_is_starred():
    assert sym_conjugate(SymPoly.var("alpha_x")) == SymPoly.var("alpha_x", True)
    assert str(sym_conjugate(SymPoly.var("alpha_x"))) == "alpha_x*"


def test_self_conjugate_monomial():
    b = SymPoly.var("beta")
    p = SymPoly.const(2) * b * b.conjugate()
    assert sym_conjugate(p) == p


def test_conj_of_i_alpha():
    i = SymPoly.const(GaussianRational(0, 1))
    a = SymPoly.var("alpha")
    assert sym_conjugate(i * a) == SymPoly.const(GaussianRational(0, -1)) * SymPoly.var("alpha", True)


def test_evaluate_unit_modulus():
    a = SymPoly.var("alpha")
    p = a * a.conjugate() - SymPoly.const(1)
    assert abs(evaluate(p, {"alpha": cmath.exp(0.7j)})) < 1e-15


def test_evaluate_gamma_beta_square():
    b, g = SymPoly.var("beta"), SymPoly.var("gamma")
    assert evaluate(g - b * b, {"beta": -2, "gamma": 4}) == 0


def test_evaluate_product():
    p = SymPoly.var("mu") * SymPoly.var("nu")
    assert evaluate(p, {"mu": 0.3, "nu": 0.7}) == pytest.approx(0.21)


def test_missing_assignment():
    with pytest.raises(MissingAssignment):
        evaluate(SymPoly.var("mu"), {})


def test_variable_parse():
    assert Variable.parse("x*") == Variable("x", True)
    assert Variable.parse("x") == Variable("x", False)


def test_json_round_trip():
    p = SymPoly.const(GaussianRational(Fraction(1, 2), -3)) * SymPoly.var("beta_ae") * SymPoly.var("beta_ae", True)
    data = p.to_json()
    assert data[0]["monomial"] == ["beta_ae", "beta_ae*"]
    assert data[0]["coeff"] == [1, 2, -3, 1]
    assert SymPoly.from_json(data) == p


def test_gaussian_inverse():
    z = GaussianRational(3, -4)
    assert z * z.inverse() == GaussianRational(1)


@given(sympolys(), sympolys(), sympolys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert p - p == SymPoly()


@given(sympolys(), sympolys())
def test_conjugation_is_involutive_automorphism(p, q):
    assert sym_conjugate(sym_conjugate(p)) == p
    assert sym_conjugate(p * q) == sym_conjugate(p) * sym_conjugate(q)
    assert sym_conjugate(p + q) == sym_conjugate(p) + sym_conjugate(q)


@given(sympolys(), sympolys(), assignments)
def test_evaluate_is_homomorphism(p, q, a):
    assert evaluate(p * q, a) == pytest.approx(evaluate(p, a) * evaluate(q, a), abs=1e-9)
    assert evaluate(p + q, a) == pytest.approx(evaluate(p, a) + evaluate(q, a), abs=1e-9)
    assert evaluate(sym_conjugate(p), a) == pytest.approx(evaluate(p, a).conjugate(), abs=1e-9)
