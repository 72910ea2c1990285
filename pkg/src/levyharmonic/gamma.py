"""Cumulant-to-moment polynomials Gamma_n and their identities.

``gamma_recurrence(n)`` is the polynomial in ``x_1..x_n`` (variable ids
``0..n-1``) such that the n-th moment of a random variable equals
``Gamma_n(kappa_1, ..., kappa_n)``.  Two independent constructions are
provided (a binomial recurrence and a sum over integer partitions), together
with checks of the derivative, shift and convolution identities.
"""
from __future__ import annotations

import contextlib
import logging
import math
import threading
from fractions import Fraction
from typing import Iterator

from .polycore import SparsePoly, TruncatedSeries, series_exp

log = logging.getLogger(__name__)

DEFAULT_MAX_ORDER = 16
_max_order = DEFAULT_MAX_ORDER


class OrderBoundError(ValueError):
    """Requested degree exceeds the configured maximum order."""


def max_order() -> int:
    return _max_order


def set_max_order(k: int) -> None:
    global _max_order
    if k < 0:
        raise ValueError("max order must be non-negative")
    _max_order = int(k)


@contextlib.contextmanager
def order_bound(k: int):
    """Temporarily change the maximum supported degree."""
    old = _max_order
    set_max_order(k)
    try:
        yield
    finally:
        set_max_order(old)


def check_order(n: int) -> None:
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    if n > _max_order:
        raise OrderBoundError(f"degree {n} exceeds the configured maximum order {_max_order}")


def xvar(j: int) -> SparsePoly:
    """The indeterminate ``x_j`` (1-based), stored as variable id ``j - 1``."""
    return SparsePoly.var(j - 1)


_memo: list[SparsePoly] = [SparsePoly.const(1)]
_memo_lock = threading.Lock()


def gamma_recurrence(n: int) -> SparsePoly:
    """Gamma_n from ``Gamma_{k+1} = sum_j C(k, j) Gamma_j x_{k+1-j}``.

    The table Gamma_0..Gamma_n is kept between calls.

    >>> gamma_recurrence(3).to_plain()
    'x1^3 + 3*x1*x2 + x3'
    """
    check_order(n)
    if n < len(_memo):
        return _memo[n]
    with _memo_lock:
        while len(_memo) <= n:
            k = len(_memo) - 1
            acc = SparsePoly()
            for j in range(k + 1):
                acc = acc + (_memo[j] * xvar(k + 1 - j)).scale(math.comb(k, j))
            _memo.append(acc)
    return _memo[n]


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples, in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def gamma_partition(n: int) -> SparsePoly:
    """Gamma_n as ``n! sum prod_j x_j**r_j / ((j!)**r_j r_j!)`` over ``sum j r_j = n``."""
    check_order(n)
    terms = {}
    fact_n = math.factorial(n)
    for part in partitions(n):
        mult: dict[int, int] = {}
        for j in part:
            mult[j] = mult.get(j, 0) + 1
        denom = 1
        for j, r in mult.items():
            denom *= math.factorial(j) ** r * math.factorial(r)
        mono = tuple(sorted((j - 1, r) for j, r in mult.items()))
        terms[mono] = Fraction(fact_n, denom)
    return SparsePoly(terms)


def gamma_series(n: int) -> SparsePoly:
    """Gamma_n as the n-th EGF coefficient of ``exp(sum_k x_k u**k / k!)``."""
    check_order(n)
    s = TruncatedSeries((SparsePoly(),) + tuple(xvar(k) for k in range(1, n + 1)))
    return series_exp(s)[n]


def gamma_partial(n: int, j: int) -> SparsePoly:
    """Symbolic derivative of Gamma_n with respect to ``x_j``."""
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got n={n}, j={j}")
    return gamma_recurrence(n).diff(j - 1)


def gamma_at(n: int, args) -> SparsePoly:
    """Evaluate Gamma_n at polynomial arguments ``args[0..n-1]`` (= x_1..x_n).

    Missing trailing arguments are an error; extra ones are ignored.
    """
    if len(args) < n:
        raise ValueError(f"Gamma_{n} needs {n} arguments, got {len(args)}")
    return gamma_recurrence(n).subs({k: args[k] for k in range(n)})


def gamma_center_expand(n: int) -> list[SparsePoly]:
    """Coefficients ``c_j = C(n, j) Gamma_{n-j}(0, x_2, ...)`` of ``x_1**j``.

    >>> [c.to_plain() for c in gamma_center_expand(2)]
    ['x2', '0', '1']
    """
    check_order(n)
    out = []
    for j in range(n + 1):
        g = gamma_recurrence(n - j).subs({0: 0})
        out.append(g.scale(math.comb(n, j)))
    return out


def gamma_center_check(n: int) -> bool:
    """Reassemble ``sum_j c_j x_1**j`` and compare with Gamma_n."""
    x1 = xvar(1)
    total = SparsePoly()
    for j, c in enumerate(gamma_center_expand(n)):
        total = total + c * x1**j
    return total == gamma_recurrence(n)


def gamma_shift_check(n: int) -> bool:
    """``Gamma_n(x_1 + y, x_2, ...) == sum_j C(n, j) Gamma_{n-j}(x) y**j`` with fresh ``y``."""
    check_order(n)
    y = SparsePoly.var(max(n, 1))
    lhs = gamma_recurrence(n).subs({0: xvar(1) + y})
    rhs = SparsePoly()
    for j in range(n + 1):
        rhs = rhs + gamma_recurrence(n - j).scale(math.comb(n, j)) * y**j
    return lhs == rhs


def gamma_convolution_check(n: int) -> bool:
    """Check ``Gamma_n(y + z) == sum_j C(n, j) Gamma_j(y) Gamma_{n-j}(z)`` symbolically.

    ``y_k`` uses variable id ``k - 1`` and ``z_k`` uses ``n + k - 1``.
    """
    check_order(n)
    ys = [SparsePoly.var(k) for k in range(n)]
    zs = [SparsePoly.var(n + k) for k in range(n)]
    lhs = gamma_at(n, [a + b for a, b in zip(ys, zs)])
    rhs = SparsePoly()
    for j in range(n + 1):
        rhs = rhs + (gamma_at(j, ys) * gamma_at(n - j, zs)).scale(math.comb(n, j))
    ok = lhs == rhs
    log.debug("gamma convolution n=%d: %s", n, ok)
    return ok


def weight_of(v: int) -> int:
    """Weight of variable ``x_{v+1}`` in the grading of Gamma_n."""
    return v + 1
