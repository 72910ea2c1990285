import math
from fractions import Fraction

import pytest
import sympy

from levyharmonic import gamma as G
from levyharmonic.polycore import SparsePoly

x1, x2, x3, x4 = (G.xvar(j) for j in range(1, 5))


def test_low_orders():
    assert G.gamma_recurrence(0) == SparsePoly.const(1)
    assert G.gamma_recurrence(1) == x1
    assert G.gamma_recurrence(2) == x1**2 + x2
    assert G.gamma_recurrence(3) == x1**3 + 3 * x1 * x2 + x3
    assert G.gamma_recurrence(4) == x1**4 + 6 * x1**2 * x2 + 3 * x2**2 + 4 * x1 * x3 + x4


def test_partition_low_orders():
    assert G.gamma_partition(0) == SparsePoly.const(1)
    assert G.gamma_partition(2) == x1**2 + x2
    assert G.gamma_partition(5) == G.gamma_recurrence(5)


def test_partitions_enumeration():
    assert list(G.partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [sum(1 for _ in G.partitions(n)) for n in range(10)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]


@pytest.mark.parametrize("n", range(13))
def test_three_constructions_agree(n):
    assert G.gamma_partition(n) == G.gamma_recurrence(n) == G.gamma_series(n)


@pytest.mark.parametrize("n", range(17))
def test_coefficient_sum_is_bell_number(n):
    assert sum(G.gamma_recurrence(n).terms.values()) == sympy.bell(n)


@pytest.mark.parametrize("n", range(1, 9))
def test_matches_sympy_complete_bell(n):
    xs = sympy.symbols(f"k1:{n + 1}")
    bell = sympy.expand(sum(sympy.bell(n, k, xs[: n - k + 1]) for k in range(1, n + 1)))
    ours = G.gamma_recurrence(n)
    expected = {}
    for mono, c in sympy.Poly(bell, *xs).terms():
        key = tuple((v, e) for v, e in enumerate(mono) if e)
        expected[key] = Fraction(int(c.p), int(c.q))
    assert ours.terms == expected


@pytest.mark.parametrize("n", range(1, 11))
def test_exponential_distribution_moments(n):
    # Exp(1): kappa_k = (k-1)!, mu_n = n!
    args = [SparsePoly.const(math.factorial(k - 1)) for k in range(1, n + 1)]
    assert G.gamma_at(n, args) == SparsePoly.const(math.factorial(n))


def _bell_number(n):
    # count set partitions of {0..n-1} by brute force
    def parts(elems):
        if not elems:
            yield []
            return
        head, rest = elems[0], elems[1:]
        for p in parts(rest):
            yield [[head]] + p
            for i in range(len(p)):
                yield p[:i] + [[head] + p[i]] + p[i + 1:]
    return sum(1 for _ in parts(list(range(n))))


@pytest.mark.parametrize("n", range(1, 9))
def test_poisson_moments_are_bell_numbers(n):
    ones = [SparsePoly.const(1)] * n
    assert G.gamma_at(n, ones) == SparsePoly.const(_bell_number(n))


def test_gaussian_moments_double_factorial():
    # N(0,1): only kappa_2 = 1
    for n in range(1, 11):
        args = [SparsePoly(), SparsePoly.const(1)] + [SparsePoly()] * (n - 2)
        expected = 0 if n % 2 else math.prod(range(n - 1, 0, -2))
        assert G.gamma_at(n, args[:n]) == SparsePoly.const(expected)


def test_partial_examples():
    assert G.gamma_partial(3, 2) == x1.scale(3)
    assert G.gamma_partial(2, 2) == SparsePoly.const(1)
    assert G.gamma_partial(4, 1) == G.gamma_recurrence(3).scale(4)
    with pytest.raises(ValueError):
        G.gamma_partial(3, 4)


@pytest.mark.parametrize("n", range(1, 11))
def test_derivative_identity(n):
    for j in range(1, n + 1):
        assert G.gamma_partial(n, j) == G.gamma_recurrence(n - j).scale(math.comb(n, j))


def test_center_expand_examples():
    assert G.gamma_center_expand(0) == [SparsePoly.const(1)]
    assert G.gamma_center_expand(2) == [x2, SparsePoly(), SparsePoly.const(1)]
    c = G.gamma_center_expand(3)
    assert c[0] == x3
    assert c[1] == x2.scale(3)


@pytest.mark.parametrize("n", range(11))
def test_shift_and_center_identities(n):
    assert G.gamma_shift_check(n)
    assert G.gamma_center_check(n)


def test_convolution_by_hand_n2():
    y1, y2, z1, z2 = (SparsePoly.var(v) for v in (0, 1, 2, 3))
    lhs = G.gamma_at(2, [y1 + z1, y2 + z2])
    assert lhs == (y1**2 + y2) + (y1 * z1).scale(2) + (z1**2 + z2)


@pytest.mark.parametrize("n", range(7))
def test_convolution_identity(n):
    assert G.gamma_convolution_check(n)


@pytest.mark.parametrize("n", range(1, 11))
def test_weighted_homogeneous(n):
    # every monomial has weight sum j * r_j = n
    for mono in G.gamma_recurrence(n).terms:
        assert sum(G.weight_of(v) * e for v, e in mono) == n


def test_order_bound():
    with G.order_bound(5):
        assert G.max_order() == 5
        with pytest.raises(G.OrderBoundError):
            G.gamma_partition(6)
    assert G.max_order() == G.DEFAULT_MAX_ORDER
    with pytest.raises(ValueError):
        G.gamma_recurrence(-1)


def test_gamma_at_argument_count():
    with pytest.raises(ValueError):
        G.gamma_at(3, [x1, x2])
