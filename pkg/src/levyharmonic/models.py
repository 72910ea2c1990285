"""Lévy process specifications through their cumulant data.

A centered Lévy process enters the algebra only through the Gaussian
variance ``sigma2`` and the Lévy-measure moments ``m_k = int x**k nu(dx)``,
``k >= 2``.  The cumulants of ``X_1`` are then ``kappa_1 = 0``,
``kappa_2 = sigma2 + m_2`` and ``kappa_k = m_k`` for ``k >= 3``.

Moment values are :class:`SparsePoly` constants.  Irrational moments (the
lognormal ``exp(k**2/2)``) are registered atoms, so that all polynomial
identities stay exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .gamma import gamma_at
from .polycore import ATOM_BASE, T, SparsePoly, register_atom

LOGNORMAL_ATOM_BASE = ATOM_BASE
KAPPA_ATOM_BASE = ATOM_BASE + 500

# samplers with an exactly simulable jump record (or no jumps at all)
FINITE_ACTIVITY_SAMPLERS = frozenset({"brownian", "poisson", "cp-lognormal", "zero"})
SAMPLERS = FINITE_ACTIVITY_SAMPLERS | {"gamma"}


class TruncationError(ValueError):
    """A cumulant beyond the model's available order was requested."""


class ModelConfigError(ValueError):
    """Malformed model specification or configuration."""


def lognormal_moment(k: int) -> SparsePoly:
    """The atom ``exp(k**2/2)``, i.e. ``E[Y**k]`` for a standard lognormal ``Y``."""
    half = Fraction(k * k, 2)
    text = str(half)
    return register_atom(
        LOGNORMAL_ATOM_BASE + k,
        f"exp({text})",
        "e^{%s}" % (text if half.denominator == 1 else r"%d/%d" % (half.numerator, half.denominator)),
        math.exp(k * k / 2),
    )


def kappa_symbol(k: int) -> SparsePoly:
    """A free symbol standing for a generic cumulant (``k2``, ``k3``, ...)."""
    return register_atom(KAPPA_ATOM_BASE + k, f"k{k}", r"\kappa_{%d}" % k)


# -- moment providers: hashable callables k -> m_k ------------------------


@dataclass(frozen=True)
class _Const:
    value: Fraction

    def __call__(self, k: int) -> SparsePoly:
        return SparsePoly.const(self.value)


@dataclass(frozen=True)
class _Table:
    values: tuple[SparsePoly, ...]  # m_2, m_3, ...

    def __call__(self, k: int) -> SparsePoly:
        return self.values[k - 2]


@dataclass(frozen=True)
class _Factorial:
    def __call__(self, k: int) -> SparsePoly:
        return SparsePoly.const(math.factorial(k - 1))


@dataclass(frozen=True)
class _Lognormal:
    def __call__(self, k: int) -> SparsePoly:
        return lognormal_moment(k)


@dataclass(frozen=True)
class _Symbolic:
    def __call__(self, k: int) -> SparsePoly:
        return kappa_symbol(k)


@dataclass(frozen=True)
class _Sum:
    a: Callable[[int], SparsePoly]
    b: Callable[[int], SparsePoly]

    def __call__(self, k: int) -> SparsePoly:
        return self.a(k) + self.b(k)


@dataclass(frozen=True)
class CumulantSpec:
    """Gaussian variance and Lévy-measure moments ``m_2..m_K``."""

    sigma2: Fraction
    m: tuple[SparsePoly, ...]
    name: str = "model"

    @property
    def max_order(self) -> int:
        return len(self.m) + 1

    def m_k(self, k: int) -> SparsePoly:
        if k < 2:
            raise ValueError(f"Lévy-measure moments start at k=2, got {k}")
        if k > self.max_order:
            raise TruncationError(truncation_message(self.name, self.max_order, k))
        return self.m[k - 2]

    def m_tilde(self, k: int) -> SparsePoly:
        """``sigma2 + m_2`` for ``k == 2``, ``m_k`` otherwise."""
        if k == 2:
            return self.m_k(2) + self.sigma2
        return self.m_k(k)

    def kappa(self, k: int) -> SparsePoly:
        """Cumulant of order ``k`` of ``X_1``."""
        if k == 1:
            return SparsePoly()
        return self.m_tilde(k)


def truncation_message(name: str, available: int, requested: int) -> str:
    bound = available // 2 + 1
    return (
        f"model {name!r} has finite cumulants only up to order {available}, "
        f"but order {requested} was requested; Q_n exists only for n <= {available}, "
        f"and with {available} finite moments the martingale property is guaranteed "
        f"only up to degree [{available}/2]+1 = {bound}"
    )


@dataclass(frozen=True)
class LevyModel:
    """A centered Lévy process given by its cumulant data and a sampler tag.

    ``max_order`` is ``None`` for named models whose moments have a closed
    form of every order.
    """

    name: str
    sigma2: Fraction
    moments: Callable[[int], SparsePoly]
    max_order: int | None = None
    sampler: str | None = None
    params: tuple = ()
    components: tuple["LevyModel", ...] = ()
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma2", Fraction(self.sigma2))
        if self.sigma2 < 0:
            raise ModelConfigError(f"sigma2 must be >= 0, got {self.sigma2}")
        if self.max_order is None or self.max_order >= 2:
            m2 = self.moments(2)
            if m2.is_constant() and m2.constant_term() < 0:
                raise ModelConfigError(f"m_2 must be >= 0, got {m2.constant_term()}")

    def available(self, order: int) -> bool:
        return self.max_order is None or order <= self.max_order

    def cumulants(self, order: int) -> CumulantSpec:
        return model_cumulants(self, order)

    def m_tilde(self, k: int) -> SparsePoly:
        return self.cumulants(k).m_tilde(k)

    @property
    def degenerate(self) -> bool:
        """True when every available cumulant of order >= 2 vanishes."""
        top = self.max_order if self.max_order is not None else 8
        return all(self.m_tilde(k).is_zero() for k in range(2, top + 1))

    @property
    def finite_activity(self) -> bool:
        if self.sampler == "sum":
            return all(c.finite_activity for c in self.components)
        return self.sampler in FINITE_ACTIVITY_SAMPLERS

    @property
    def martingale_degree_bound(self) -> int | None:
        """Largest degree for which ``Q_n(X_t, t)`` is guaranteed a martingale."""
        if self.max_order is None:
            return None
        return self.max_order // 2 + 1

    def __str__(self) -> str:
        return self.name


def model_cumulants(model: LevyModel, order: int) -> CumulantSpec:
    """``sigma2`` and ``m_2..m_order`` for ``model``.

    >>> [str(m) for m in model_cumulants(compensated_gamma(), 4).m]
    ['1', '2', '6']
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if not model.available(order):
        raise TruncationError(truncation_message(model.name, model.max_order, order))
    return CumulantSpec(
        sigma2=model.sigma2,
        m=tuple(model.moments(k) for k in range(2, order + 1)),
        name=model.name,
    )


# -- named models -------------------------------------------------------------


def brownian(sigma2=1) -> LevyModel:
    sigma2 = Fraction(sigma2)
    name = "brownian" if sigma2 == 1 else f"brownian:{sigma2}"
    return LevyModel(name, sigma2, _Const(Fraction(0)), sampler="brownian", params=(sigma2,))


def compensated_poisson(rate=1) -> LevyModel:
    """``N_t - rate*t``; the Lévy measure ``rate * delta_1`` has every moment equal to ``rate``."""
    rate = Fraction(rate)
    if rate <= 0:
        raise ModelConfigError(f"Poisson intensity must be positive, got {rate}")
    return LevyModel(f"poisson:{rate}", Fraction(0), _Const(rate), sampler="poisson", params=(rate,))


def compensated_gamma() -> LevyModel:
    """``G_t - t`` with ``G_t ~ Gamma(shape=t, scale=1)``; ``m_k = (k-1)!``."""
    return LevyModel("gamma", Fraction(0), _Factorial(), sampler="gamma")


def compound_poisson_lognormal() -> LevyModel:
    """Unit-rate compound Poisson with standard lognormal jumps, compensated."""
    return LevyModel("cp-lognormal", Fraction(0), _Lognormal(), sampler="cp-lognormal")


def zero_model() -> LevyModel:
    return LevyModel("zero", Fraction(0), _Const(Fraction(0)), sampler="zero")


def symbolic_model() -> LevyModel:
    """Generic model whose cumulants ``sigma2 + m_2, m_3, ...`` are free symbols ``k2, k3, ...``.

    No sampler: usable only in exact computations.
    """
    return LevyModel("symbolic", Fraction(0), _Symbolic())


def user_model(sigma2, m, name: str = "user") -> LevyModel:
    """Model with explicitly listed ``m_2..m_K`` (exact rationals)."""
    values = tuple(SparsePoly.const(Fraction(v)) for v in m)
    return LevyModel(name, Fraction(sigma2), _Table(values), max_order=len(values) + 1)


def model_sum(a: LevyModel, b: LevyModel) -> LevyModel:
    """Model of ``A + B`` for independent ``A`` and ``B``: cumulants add."""
    if a.max_order is None:
        order = b.max_order
    elif b.max_order is None:
        order = a.max_order
    else:
        order = min(a.max_order, b.max_order)
    notes = a.notes + b.notes
    if a.max_order != b.max_order and a.max_order is not None and b.max_order is not None:
        notes += (f"available orders differ ({a.max_order} vs {b.max_order}); truncated to {order}",)
    elif (a.max_order is None) != (b.max_order is None):
        notes += (f"one summand is truncated; sum truncated to order {order}",)
    sampler = "sum" if a.sampler and b.sampler else None
    return LevyModel(
        f"sum:{a.name}+{b.name}",
        a.sigma2 + b.sigma2,
        _Sum(a.moments, b.moments),
        max_order=order,
        sampler=sampler,
        components=(a, b),
        notes=notes,
    )


def model_moment(model: LevyModel, r: int) -> SparsePoly:
    """``E[X_t**r]`` as an exact polynomial in ``t``.

    Uses ``mu_r(t) = Gamma_r(0, (sigma2 + m_2) t, m_3 t, ..., m_r t)``.

    >>> model_moment(brownian(), 4).to_plain({1: "t"})
    '3*t^2'
    """
    if r < 0:
        raise ValueError("moment order must be non-negative")
    if r == 0:
        return SparsePoly.const(1)
    spec = model_cumulants(model, max(r, 1))
    t = SparsePoly.var(T)
    args = [SparsePoly()] + [spec.m_tilde(k) * t for k in range(2, r + 1)]
    return gamma_at(r, args)


# -- parsing ------------------------------------------------------------------


def _parse_rational(text: str, what: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelConfigError(f"cannot parse {what} {text!r} as an exact rational") from exc


def model_from_config(doc: Mapping, name: str = "user") -> LevyModel:
    """Build a model from ``{"sigma2": "p/q", "m": ["p/q", ...]}``.

    ``m`` lists ``m_2, m_3, ..., m_K``; the model is then truncated at order
    ``K``.  An empty or missing ``m`` means a zero Lévy measure (all orders).
    """
    if not isinstance(doc, Mapping):
        raise ModelConfigError("model config must be a JSON object")
    if "sigma2" not in doc:
        raise ModelConfigError("model config is missing 'sigma2'")
    sigma2 = _parse_rational(doc["sigma2"], "sigma2")
    raw_m = doc.get("m", [])
    if not isinstance(raw_m, list):
        raise ModelConfigError("'m' must be a list of rationals (m_2, m_3, ...)")
    m = [_parse_rational(v, f"m_{k + 2}") for k, v in enumerate(raw_m)]
    if sigma2 < 0:
        raise ModelConfigError(f"sigma2 must be >= 0, got {sigma2}")
    if m and m[0] < 0:
        raise ModelConfigError(f"m_2 must be >= 0, got {m[0]}")
    if not m:
        # no Lévy measure at all: every m_k is zero
        return LevyModel(str(doc.get("name", name)), sigma2, _Const(Fraction(0)))
    return user_model(sigma2, m, name=str(doc.get("name", name)))


def load_model_config(path) -> LevyModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelConfigError(f"cannot read model config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ModelConfigError(f"malformed JSON in {path}: {exc.msg}") from exc
    return model_from_config(doc, name=str(path))


def parse_model(spec: str) -> LevyModel:
    """Parse a model string.

    Accepted forms: ``brownian``, ``brownian:<sigma2>``, ``poisson``,
    ``poisson:<rate>``, ``gamma``, ``cp-lognormal``, ``zero``,
    ``sum:A+B[+C...]`` and a path to a JSON config (``*.json`` or ``@path``).
    """
    spec = spec.strip()
    if spec.startswith("@") or spec.endswith(".json"):
        return load_model_config(spec.lstrip("@"))
    if spec.startswith("sum:"):
        parts = [p for p in spec[4:].split("+") if p.strip()]
        if len(parts) < 2:
            raise ModelConfigError(f"sum model needs at least two components: {spec!r}")
        out = parse_model(parts[0])
        for p in parts[1:]:
            out = model_sum(out, parse_model(p))
        return out
    head, _, arg = spec.partition(":")
    head = head.lower()
    if head == "brownian":
        return brownian(_parse_rational(arg, "sigma2") if arg else 1)
    if head == "poisson":
        return compensated_poisson(_parse_rational(arg, "intensity") if arg else 1)
    if arg:
        raise ModelConfigError(f"model {head!r} takes no parameter")
    named = {
        "gamma": compensated_gamma,
        "cp-lognormal": compound_poisson_lognormal,
        "zero": zero_model,
        "symbolic": symbolic_model,
    }
    if head not in named:
        raise ModelConfigError(f"unknown model {spec!r}")
    return named[head]()


NAMED_MODELS = {
    "brownian": brownian,
    "poisson": compensated_poisson,
    "gamma": compensated_gamma,
    "cp-lognormal": compound_poisson_lognormal,
    "brownian+poisson": lambda: model_sum(brownian(), compensated_poisson()),
}
