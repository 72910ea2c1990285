import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyharmonic import harmonic as H
from levyharmonic.gamma import xvar, weight_of
from levyharmonic.kailath_segall import ks_evaluate, ks_evaluate_all, ks_from_gamma, ks_recurrence
from levyharmonic.polycore import T, X, SparsePoly

x1, x2, x3 = xvar(1), xvar(2), xvar(3)


def test_low_orders():
    assert ks_recurrence(0) == SparsePoly.const(1)
    assert ks_recurrence(1) == x1
    assert ks_recurrence(2) == (x1**2 - x2) / 2
    assert ks_recurrence(3) == x1**3 / 6 - x1 * x2 / 2 + x3 / 3


def test_gamma_form_examples():
    assert ks_from_gamma(0) == SparsePoly.const(1)
    assert ks_from_gamma(2) == (x1**2 - x2) / 2
    assert ks_from_gamma(8) == ks_recurrence(8)


@pytest.mark.parametrize("n", range(11))
def test_recurrence_equals_gamma_form(n):
    assert ks_recurrence(n) == ks_from_gamma(n)


@pytest.mark.parametrize("n", range(9))
def test_brownian_collapse(n):
    p = ks_recurrence(n).subs({k: 0 for k in range(2, n)})
    assert p.scale(math.factorial(n)) == H.hermite_monic(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_weighted_homogeneous(n):
    for mono in ks_recurrence(n).terms:
        assert sum(weight_of(v) * e for v, e in mono) == n


def test_evaluate_examples():
    v = 1.7
    assert ks_evaluate([v, 0.0, 0.0], 3) == pytest.approx(v**3 / 6)
    assert ks_evaluate([2.0, 4.0], 2) == 0.0
    assert ks_evaluate([Fraction(2), Fraction(4)], 2) == 0


def test_evaluate_matches_polynomial():
    vals = [Fraction(3, 2), Fraction(-1, 3), Fraction(5, 7), Fraction(2), Fraction(-4, 9)]
    for n in range(6):
        exact = ks_recurrence(n).evaluate(dict(enumerate(vals)))
        assert ks_evaluate(vals, n) == exact


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
@settings(max_examples=50, deadline=None)
def test_evaluate_float_matches_polynomial(vals):
    for n in range(7):
        expected = ks_recurrence(n).evaluate(dict(enumerate(vals)))
        assert ks_evaluate(vals, n) == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_evaluate_elementwise_on_arrays():
    a = np.array([0.5, -1.0, 2.0])
    b = np.array([1.0, 0.25, 3.0])
    out = ks_evaluate_all([a, b], 2)
    assert np.allclose(out[0], 1.0)
    assert np.allclose(out[2], (a * a - b) / 2)


def test_evaluate_errors():
    with pytest.raises(ValueError):
        ks_evaluate([1.0], 2)
    with pytest.raises(ValueError):
        ks_evaluate([1.0], -1)


def test_single_jump_kills_higher_integrals():
    # one jump of size y and nothing else: X^(k) = y^k, P_n = 0 for n >= 2
    y = Fraction(5, 3)
    vals = [y**k for k in range(1, 7)]
    ps = ks_evaluate_all(vals, 6)
    assert ps[1] == y and all(p == 0 for p in ps[2:])


@pytest.mark.parametrize("n", range(1, 8))
def test_poisson_variations_give_charlier(n):
    # compensated unit Poisson: X_t = N - t, X^(k) = N for k >= 2
    cbar = H.charlier_polys(n)[n]
    for N in range(6):
        for t in (Fraction(1, 2), Fraction(3)):
            vals = [N - t] + [Fraction(N)] * (n - 1)
            assert ks_evaluate(vals, n) == cbar.evaluate({X: N - t, T: t})
