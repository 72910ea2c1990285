"""Time-space harmonic polynomials ``Q_n(x, t)`` of a centered Lévy process.

``Q_n(x, t) = Gamma_n(x, -(sigma2 + m_2) t, -m_3 t, ..., -m_n t)``, so that
``Q_n(X_t, t)`` is a martingale.  Polynomials live in the variables
``x`` (id 0) and ``t`` (id 1); ``t`` is always a formal variable here.

Four constructions are provided and must agree exactly: the closed form,
the three-term-style recurrence in ``n``, the expansion in powers of ``x``
and the coefficient extraction from ``exp(u x - t sum kappa_k u**k / k!)``.
The classical Hermite, Charlier and Laguerre families are built from their
own generating functions or recurrences for comparison.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .gamma import check_order, gamma_at
from .models import LevyModel, model_cumulants, model_moment, model_sum
from .polycore import (
    S,
    T,
    X,
    Y,
    Z,
    SparsePoly,
    TruncatedSeries,
    linear_series,
    log1p_series,
    series_exp,
    xt_names,
)


class MartingaleBoundWarning(UserWarning):
    """Q_n was built beyond the degree for which the martingale property is guaranteed."""


ROUTES = ("closed", "recurrence", "expansion", "gf")

_x = SparsePoly.var(X)
_t = SparsePoly.var(T)


@dataclass(frozen=True)
class HarmonicPoly:
    """``Q_n`` for ``model`` as a polynomial in ``x`` and ``t``."""

    n: int
    model: LevyModel
    poly: SparsePoly
    route: str = "closed"

    @property
    def martingale_guaranteed(self) -> bool:
        bound = self.model.martingale_degree_bound
        return bound is None or self.n <= bound

    def coeffs_in_x(self) -> list[SparsePoly]:
        return self.poly.coeffs_in(X)

    def to_plain(self) -> str:
        return self.poly.to_plain(xt_names)

    def to_latex(self) -> str:
        return self.poly.to_latex(xt_names)

    def __str__(self) -> str:
        return self.to_plain()


def _wrap(model: LevyModel, n: int, poly: SparsePoly, route: str) -> HarmonicPoly:
    h = HarmonicPoly(n, model, poly, route)
    if not h.martingale_guaranteed:
        warnings.warn(
            f"Q_{n} for {model.name}: only {model.max_order} finite cumulants, martingale "
            f"property guaranteed up to degree {model.martingale_degree_bound}",
            MartingaleBoundWarning,
            stacklevel=3,
        )
    return h


def _space_args(model: LevyModel, n: int, time: SparsePoly, sign: int = -1) -> list[SparsePoly]:
    """``[sign * m~_2 * time, ..., sign * m_n * time]`` (arguments x_2..x_n of Gamma_n)."""
    if n < 2:
        return []
    spec = model_cumulants(model, n)
    return [spec.m_tilde(k) * time * sign for k in range(2, n + 1)]


def q_closed(model: LevyModel, n: int) -> HarmonicPoly:
    """Substitute ``x_1 -> x`` and ``x_k -> -m~_k t`` into Gamma_n.

    >>> from levyharmonic.models import compensated_poisson
    >>> q_closed(compensated_poisson(), 3).to_plain()
    'x^3 - 3*x*t - t'
    """
    check_order(n)
    if n == 0:
        return _wrap(model, 0, SparsePoly.const(1), "closed")
    args = [_x] + _space_args(model, n, _t)
    return _wrap(model, n, gamma_at(n, args), "closed")


def q_recurrence(model: LevyModel, n: int) -> HarmonicPoly:
    """Build ``Q_0..Q_n`` from

    ``Q_{k+1} = x Q_k - k m~_2 t Q_{k-1} - sum_{j=2}^{k} C(k, j) m_{j+1} t Q_{k-j}``.
    """
    check_order(n)
    if n >= 2:
        spec = model_cumulants(model, n)
    table = [SparsePoly.const(1), _x]
    for k in range(1, n):
        nxt = _x * table[k] - (spec.m_tilde(2) * _t * table[k - 1]).scale(k)
        for j in range(2, k + 1):
            nxt = nxt - (spec.m_k(j + 1) * _t * table[k - j]).scale(math.comb(k, j))
        table.append(nxt)
    return _wrap(model, n, table[n], "recurrence")


def q_expand_in_x(model: LevyModel, n: int) -> list[SparsePoly]:
    """Coefficients ``a_j(t) = C(n, j) Gamma_{n-j}(0, -m~_2 t, ..., -m_{n-j} t)`` of ``x**j``."""
    check_order(n)
    rest = _space_args(model, n, _t)
    out = []
    for j in range(n + 1):
        g = gamma_at(n - j, [SparsePoly()] + rest)
        out.append(g.scale(math.comb(n, j)))
    return out


def q_from_expansion(coeffs: list[SparsePoly]) -> SparsePoly:
    total = SparsePoly()
    for j, a in enumerate(coeffs):
        total = total + a * _x**j
    return total


def q_gf_oracle(model: LevyModel, n: int) -> HarmonicPoly:
    """``n``-th EGF coefficient of ``exp(u x - t sum_{k>=2} m~_k u**k / k!)``."""
    check_order(n)
    if n == 0:
        return _wrap(model, 0, SparsePoly.const(1), "gf")
    s = TruncatedSeries((SparsePoly(), _x) + tuple(_space_args(model, n, _t)))
    return _wrap(model, n, series_exp(s)[n], "gf")


def q_route(model: LevyModel, n: int, route: str = "closed") -> HarmonicPoly:
    if route == "closed":
        return q_closed(model, n)
    if route == "recurrence":
        return q_recurrence(model, n)
    if route == "gf":
        return q_gf_oracle(model, n)
    if route == "expansion":
        return _wrap(model, n, q_from_expansion(q_expand_in_x(model, n)), "expansion")
    raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")


def martingale_mean(model: LevyModel, n: int) -> SparsePoly:
    """``E[Q_n(X_t, t)] = sum_j a_j(t) mu_j(t)`` as a polynomial in ``t``; zero for ``n >= 1``."""
    coeffs = q_expand_in_x(model, n)
    total = SparsePoly()
    for j, a in enumerate(coeffs):
        total = total + a * model_moment(model, j)
    return total


# -- classical families ----------------------------------------------------


def hermite_monic(n: int) -> SparsePoly:
    """Monic Hermite ``H_{k+1} = x H_k - k t H_{k-1}``."""
    check_order(n)
    table = [SparsePoly.const(1), _x]
    for k in range(1, n):
        table.append(_x * table[k] - (_t * table[k - 1]).scale(k))
    return table[n]


def charlier_polys(n: int) -> list[SparsePoly]:
    """Shifted normalized Charlier ``Cbar_0..Cbar_n``.

    ``Cbar_k`` is the ordinary ``u**k`` coefficient of
    ``exp(-u t + (x + t) log(1 + u))``.
    """
    check_order(n)
    s = linear_series(n, -_t) + log1p_series(n).scale(_x + _t)
    gf = series_exp(s)
    return [gf.ordinary(k) for k in range(n + 1)]


def charlier_lambda(n: int) -> list[list[int]]:
    """Coefficients ``table[j][k] = lambda_k^(j)`` with ``Q_j = sum_k lambda_k^(j) Cbar_k``.

    ``lambda_1^(j) = 1`` and ``lambda_{k+1}^(j) = sum_{i=k}^{j-1} C(j, i) lambda_k^(i)``.
    Row 0 and column 0 are zero padding.
    """
    if n < 1:
        raise ValueError("charlier_lambda needs n >= 1")
    table = [[0]]
    for j in range(1, n + 1):
        row = [0] * (j + 1)
        row[1] = 1
        for k in range(1, j):
            row[k + 1] = sum(math.comb(j, i) * table[i][k] for i in range(k, j))
        table.append(row)
    return table


def charlier_expansion(n: int) -> SparsePoly:
    """``sum_k lambda_k^(n) Cbar_k(x, t)``; equals ``Q_n`` for the unit-rate Poisson model."""
    if n == 0:
        return SparsePoly.const(1)
    lam = charlier_lambda(n)[n]
    cbar = charlier_polys(n)
    total = SparsePoly()
    for k in range(1, n + 1):
        total = total + cbar[k].scale(lam[k])
    return total


def laguerre_polynomial(n: int, alpha: SparsePoly, y: SparsePoly) -> SparsePoly:
    """Generalized Laguerre ``L_n^(alpha)(y) = sum_i C(n + alpha, n - i) (-y)**i / i!``.

    ``alpha`` may be a polynomial; the binomial is expanded as a falling
    factorial over ``(n - i)!``.
    """
    total = SparsePoly()
    top = alpha + n
    for i in range(n + 1):
        r = n - i
        binom = SparsePoly.const(1)
        for q in range(r):
            binom = binom * (top - q)
        binom = binom / math.factorial(r)
        total = total + binom * (-y) ** i / math.factorial(i)
    return total


def laguerre_qn(n: int, route: str = "series") -> SparsePoly:
    """``(-1)**n n! L_n^(t - n)(x + t)``, the Gamma-process polynomial.

    ``route="series"`` reads ``L_n^(t-n)(y)`` off
    ``(1 - u)**t exp(u y) = sum_n (-1)**n L_n^(t-n)(y) u**n`` with
    ``(1 - u)**t = exp(t log(1 - u))``; ``route="explicit"`` uses the finite
    sum in :func:`laguerre_polynomial`.
    """
    check_order(n)
    y = _x + _t
    if route == "series":
        s = log1p_series(n, sign=-1).scale(_t) + linear_series(n, y)
        lag = series_exp(s).ordinary(n).scale((-1) ** n)
    elif route == "explicit":
        lag = laguerre_polynomial(n, _t - n, y)
    else:
        raise ValueError(f"unknown route {route!r}")
    return lag.scale((-1) ** n * math.factorial(n))


# -- identities -------------------------------------------------------------


def gs_consistency_check(model: LevyModel, k: int) -> bool:
    """Coefficient identity for time-space harmonic polynomials in ``(s, t)``.

    ``Gamma_k(0, -m~ s) == sum_l C(k, l) Gamma_{k-l}(0, -m~ t) Gamma_l(0, m~ (t - s))``
    where ``m~`` stands for the whole cumulant list.
    """
    check_order(k)
    s, t = SparsePoly.var(S), SparsePoly.var(T)
    zero = [SparsePoly()]
    lhs = gamma_at(k, zero + _space_args(model, k, s))
    minus_t = _space_args(model, k, t)
    plus_ts = _space_args(model, k, t - s, sign=1)
    rhs = SparsePoly()
    for ell in range(k + 1):
        a = gamma_at(k - ell, zero + minus_t)
        b = gamma_at(ell, zero + plus_ts)
        rhs = rhs + (a * b).scale(math.comb(k, ell))
    return lhs == rhs


def q_convolution(a: LevyModel, b: LevyModel, n: int) -> SparsePoly:
    """``sum_j C(n, j) Q_j^A(y, t) Q_{n-j}^B(z, t)`` over variables ``y, z, t``."""
    check_order(n)
    y, z = SparsePoly.var(Y), SparsePoly.var(Z)
    total = SparsePoly()
    for j in range(n + 1):
        qa = q_closed(a, j).poly.subs({X: y})
        qb = q_closed(b, n - j).poly.subs({X: z})
        total = total + (qa * qb).scale(math.comb(n, j))
    return total


def q_convolution_check(a: LevyModel, b: LevyModel, n: int) -> bool:
    """``Q_n^{A+B}(y + z, t)`` equals the convolution of ``Q^A`` and ``Q^B``."""
    lhs = q_closed(model_sum(a, b), n).poly.subs({X: SparsePoly.var(Y) + SparsePoly.var(Z)})
    return lhs == q_convolution(a, b, n)


def harmonic_span_coefficients(model: LevyModel, poly: SparsePoly) -> dict[int, Fraction] | None:
    """Write ``poly`` as ``sum_n c_n Q_n`` with constant ``c_n``, if possible.

    Peels off the leading power of ``x`` at each step; returns ``None`` as
    soon as a leading coefficient depends on ``t`` (or on anything else), in
    which case ``poly`` is not in the constant-coefficient span.
    """
    rest = poly
    out: dict[int, Fraction] = {}
    while rest:
        d = rest.degree_in(X)
        lead = rest.coeffs_in(X)[d]
        if not lead.is_constant():
            return None
        c = lead.constant_term()
        out[d] = c
        rest = rest - q_closed(model, d).poly.scale(c)
    return out
