"""Kailath-Segall polynomials.

``P_n(x_1, ..., x_n)`` expresses the n-th iterated integral of a Lévy
process through its variations ``x_1 = X_t``, ``x_2 = [X, X]_t``,
``x_k = sum (Delta X_s)**k``.  Variable ``x_k`` has id ``k - 1``, as for
Gamma_n.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Sequence

from .gamma import check_order, gamma_at, xvar
from .polycore import SparsePoly

_memo: list[SparsePoly] = [SparsePoly.const(1)]
_lock = threading.Lock()


def ks_recurrence(n: int) -> SparsePoly:
    """``P_n = (P_{n-1} x_1 - P_{n-2} x_2 + ... + (-1)**(n+1) P_0 x_n) / n``.

    >>> ks_recurrence(3).to_plain()
    '1/6*x1^3 - 1/2*x1*x2 + 1/3*x3'
    """
    check_order(n)
    if n < len(_memo):
        return _memo[n]
    with _lock:
        while len(_memo) <= n:
            k = len(_memo)
            acc = SparsePoly()
            for j in range(1, k + 1):
                term = _memo[k - j] * xvar(j)
                acc = acc + term if j % 2 else acc - term
            _memo.append(acc / k)
    return _memo[n]


def ks_from_gamma(n: int) -> SparsePoly:
    """``P_n = Gamma_n(x_1, -x_2, 2! x_3, ..., (-1)**(n-1) (n-1)! x_n) / n!``."""
    check_order(n)
    args = [xvar(k).scale((-1) ** (k - 1) * math.factorial(k - 1)) for k in range(1, n + 1)]
    return gamma_at(n, args) / math.factorial(n)


def ks_evaluate_all(variations: Sequence, n: int) -> list:
    """Numeric ``P^(0)..P^(n)`` from the variations ``X^(1)..X^(n)``.

    Entries of ``variations`` may be floats, Fractions or numpy arrays of a
    common shape; arithmetic is elementwise.  With Fractions the result is
    exact.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if len(variations) < n:
        raise ValueError(f"P_{n} needs {n} variations, got {len(variations)}")
    exact = all(isinstance(v, (int, Fraction)) for v in variations[:n])
    if exact:
        out = [Fraction(1)]
    else:
        # ones shaped like the inputs
        out = [variations[0] * 0.0 + 1.0 if n else 1.0]
    for k in range(1, n + 1):
        acc = 0
        for j in range(1, k + 1):
            term = out[k - j] * variations[j - 1]
            acc = acc + term if j % 2 else acc - term
        out.append(acc / k)
    return out


def ks_evaluate(variations: Sequence, n: int):
    """Numeric ``P_t^(n)`` by the recurrence (no symbolic expansion)."""
    return ks_evaluate_all(variations, n)[n]
