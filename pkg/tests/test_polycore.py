import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyharmonic.polycore import (
    ATOM_BASE,
    SparsePoly,
    TruncatedSeries,
    linear_series,
    log1p_series,
    register_atom,
    series_exp,
    series_log,
    xt_names,
)

x1, x2, x3 = (SparsePoly.var(i) for i in range(3))


def test_difference_of_squares():
    assert (x1 + 1) * (x1 - 1) == x1**2 - 1


def test_add_zero_is_identity():
    p = x1**2 + x2.scale(Fraction(3, 4))
    assert p + SparsePoly() == p
    assert p + 0 == p


def test_cancellation_leaves_no_zero_terms():
    d = (x1**2 + x2) - x1**2
    assert d == x2
    assert d.terms == {((1, 1),): 1}


def test_zero_coefficients_never_stored():
    p = SparsePoly({((0, 1),): 0, (): Fraction(2)})
    assert p.terms == {(): 2}
    assert (x1 - x1).is_zero()


def test_substitute_example():
    t = SparsePoly.var(1)
    assert (x1**2 + x2).subs({1: -t}) == x1**2 - t


def test_substitute_empty_and_linear():
    p = x1**3 - x2 * x3
    assert p.subs({}) == p
    y, z = SparsePoly.var(5), SparsePoly.var(6)
    assert x1.subs({0: y + z}) == y + z


def test_substitute_unbound_variables_kept():
    assert (x1 * x2).subs({0: 2}) == x2.scale(2)


def test_diff():
    p = x1**3 + 3 * x1 * x2 + x3
    assert p.diff(1) == x1.scale(3)
    assert p.diff(0) == 3 * x1**2 + 3 * x2
    assert SparsePoly.const(5).diff(0).is_zero()


def test_degrees_and_coeffs_in():
    p = x1**3 * x2 + x2**2 - 4
    assert p.degree() == 4
    assert p.degree_in(0) == 3
    assert p.degree_in(1) == 2
    parts = p.coeffs_in(0)
    assert len(parts) == 4
    assert parts[3] == x2 and parts[0] == x2**2 - 4
    assert SparsePoly().degree() == -1


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        SparsePoly.const(0.5)


def test_evaluate_exact_and_float():
    p = x1**2 + x2 / 3
    assert p.evaluate({0: Fraction(1, 2), 1: 3}) == Fraction(5, 4)
    assert p.evaluate({0: 0.5, 1: 3.0}) == pytest.approx(1.25)
    with pytest.raises(KeyError):
        p.evaluate({0: 1})


def test_plain_and_latex_rendering():
    p = x1**3 + 3 * x1 * x2 + x3
    assert p.to_plain() == "x1^3 + 3*x1*x2 + x3"
    assert p.to_latex() == "x_{1}^{3} + 3 x_{1} x_{2} + x_{3}"
    q = (x1**2 - x2) / 2
    assert q.to_plain() == "1/2*x1^2 - 1/2*x2"
    assert q.to_latex() == r"\frac{1}{2} x_{1}^{2} - \frac{1}{2} x_{2}"
    assert (x1**2 - x2).to_plain(xt_names) == "x^2 - t"
    assert (-x1).to_plain() == "-x1"
    assert SparsePoly().to_plain() == "0"


def test_atom_rendering_and_evaluation():
    a = register_atom(ATOM_BASE + 900, "alpha", r"\alpha", 2.5)
    p = a**2 * x1
    assert p.to_plain() == "x1*alpha^2"
    assert p.to_latex() == r"x_{1} \alpha^{2}"
    assert p.evaluate({0: 2.0}) == pytest.approx(12.5)
    with pytest.raises(ValueError):
        register_atom(ATOM_BASE + 900, "beta", r"\beta", 1.0)


def test_json_roundtrip_big_integers():
    big = Fraction(3**80, 7**30)
    p = x1.scale(big) - x2**5 + Fraction(-1, 3)
    doc = json.loads(p.to_json())
    assert doc["schema_version"] == 1
    assert all(isinstance(term["num"], str) for term in doc["terms"])
    assert SparsePoly.from_json(p.to_json()) == p


def test_json_rejects_bad_denominator():
    with pytest.raises(ValueError):
        SparsePoly.from_json_obj([{"exponents": {}, "num": "1", "den": "0"}])


# -- property tests -------------------------------------------------------

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polys(draw, nvars=3, max_deg=3, max_terms=5):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = [draw(st.integers(0, max_deg)) for _ in range(nvars)]
        if sum(exps) > 6:
            continue
        mono = tuple((v, e) for v, e in enumerate(exps) if e)
        terms[mono] = draw(coeffs)
    return SparsePoly(terms)


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q, r):
    assert p * q == q * p
    assert (p + q) * r == p * r + q * r
    assert (p + q) - q == p
    assert hash(p * q) == hash(q * p)


@given(polys(), polys(), polys(), polys())
@settings(max_examples=40, deadline=None)
def test_substitution_is_ring_homomorphism(p, q, b0, b2):
    binds = {0: b0, 2: b2}
    assert (p * q).subs(binds) == p.subs(binds) * q.subs(binds)
    assert (p + q).subs(binds) == p.subs(binds) + q.subs(binds)


@given(polys())
@settings(max_examples=40, deadline=None)
def test_json_roundtrip_property(p):
    assert SparsePoly.from_json(p.to_json()) == p


# -- truncated series ------------------------------------------------------


def test_series_exp_cumulant_example():
    k1, k2, k3 = x1, x2, x3
    out = series_exp(TruncatedSeries((SparsePoly(), k1, k2, k3)))
    assert out.coeffs == (SparsePoly.const(1), k1, k1**2 + k2, k1**3 + 3 * k1 * k2 + k3)


def test_series_exp_of_zero():
    out = series_exp(TruncatedSeries.zero(4))
    assert out.coeffs == TruncatedSeries.one(4).coeffs


def test_series_exp_linear_term():
    out = series_exp(TruncatedSeries((SparsePoly(), x1, 0, 0, 0)))
    assert all(out[k] == x1**k for k in range(5))


def test_series_exp_rejects_constant_term():
    with pytest.raises(ValueError):
        series_exp(TruncatedSeries((SparsePoly.const(1), x1)))


def test_log1p_ordinary_coefficients():
    s = log1p_series(5)
    assert [s.ordinary(k) for k in range(6)] == [0, 1, Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 4), Fraction(1, 5)]
    s = log1p_series(4, sign=-1)
    assert [s.ordinary(k) for k in range(5)] == [0, -1, Fraction(-1, 2), Fraction(-1, 3), Fraction(-1, 4)]


def test_exp_of_log1p_is_one_plus_u():
    out = series_exp(log1p_series(6))
    assert [out.ordinary(k) for k in range(7)] == [1, 1, 0, 0, 0, 0, 0]


def test_from_ordinary_and_linear_series():
    s = TruncatedSeries.from_ordinary([0, 2, Fraction(1, 2)])
    assert s.coeffs == (0, 2, 1)
    assert linear_series(3, x1).coeffs == (0, x1, 0, 0)


@given(st.lists(polys(nvars=2, max_deg=2, max_terms=3), min_size=4, max_size=6))
@settings(max_examples=25, deadline=None)
def test_exp_times_exp_neg_is_one(cs):
    s = TruncatedSeries((SparsePoly(),) + tuple(cs))
    prod = series_exp(s) * series_exp(-s)
    assert prod.coeffs == TruncatedSeries.one(s.order).coeffs


@given(st.lists(polys(nvars=2, max_deg=2, max_terms=3), min_size=3, max_size=5))
@settings(max_examples=25, deadline=None)
def test_log_exp_roundtrip(cs):
    s = TruncatedSeries((SparsePoly(),) + tuple(cs))
    assert series_log(series_exp(s)).coeffs == s.coeffs


def test_egf_product_binomial():
    # e^{au} e^{bu}: coefficient n is (a+b)^n
    ea = series_exp(linear_series(5, x1))
    eb = series_exp(linear_series(5, x2))
    prod = ea * eb
    assert all(prod[n] == (x1 + x2) ** n for n in range(6))
    assert math.factorial(3) * prod.ordinary(3) == (x1 + x2) ** 3
