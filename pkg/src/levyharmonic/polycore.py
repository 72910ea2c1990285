"""Exact sparse multivariate polynomials and truncated exponential series.

Polynomials carry :class:`fractions.Fraction` coefficients and are keyed by
monomials, which are sorted tuples of ``(variable_id, exponent)`` pairs with
strictly positive exponents.  The empty tuple is the constant monomial.

Variable ids are small non-negative integers whose meaning depends on the
caller: in Gamma-polynomial context id ``k`` is ``x_{k+1}``; in time-space
context ``0`` is ``x`` and ``1`` is ``t`` (see :data:`XT_NAMES`).  Ids at or
above :data:`ATOM_BASE` are reserved for *atoms*: named constants such as
``exp(9/2)`` that must stay symbolic in exact computations but have a known
floating-point value.

Truncated series use the exponential-generating-function convention
throughout: ``coeffs[k]`` is the coefficient of ``u**k / k!``.
"""
from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

Monomial = tuple  # tuple[tuple[int, int], ...], sorted by variable id

X, T, S, Y, Z = 0, 1, 2, 3, 4
XT_NAMES = {X: "x", T: "t", S: "s", Y: "y", Z: "z"}

ATOM_BASE = 1000
JSON_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Atom:
    """A named constant kept symbolic in exact arithmetic."""

    var: int
    plain: str
    latex: str
    value: float | None = None


_atoms: dict[int, Atom] = {}
_atoms_lock = threading.Lock()


def register_atom(var: int, plain: str, latex: str, value: float | None = None) -> "SparsePoly":
    if var < ATOM_BASE:
        raise ValueError(f"atom ids start at {ATOM_BASE}, got {var}")
    atom = Atom(var, plain, latex, value)
    with _atoms_lock:
        old = _atoms.get(var)
        if old is not None and old != atom:
            raise ValueError(f"atom id {var} already registered as {old.plain!r}")
        _atoms[var] = atom
    return SparsePoly.var(var)


def get_atom(var: int) -> Atom | None:
    return _atoms.get(var)


def atom_values() -> dict[int, float]:
    """Floating-point values of every registered atom that has one."""
    return {k: a.value for k, a in _atoms.items() if a.value is not None}


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        out[v] = out.get(v, 0) + e
    return tuple(sorted(out.items()))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


class SparsePoly:
    """Immutable polynomial with exact rational coefficients.

    Two polynomials are equal iff their term maps are equal; zero
    coefficients are never stored.

    >>> x1, x2 = SparsePoly.var(0), SparsePoly.var(1)
    >>> ((x1 + 1) * (x1 - 1)).to_plain()
    'x1^2 - 1'
    >>> (x1**2 + x2 - x1**2) == x2
    True
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[tuple(mono)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "SparsePoly":
        # caller guarantees canonical monomials and nonzero Fraction values
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "SparsePoly":
        c = _as_fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, v: int, power: int = 1) -> "SparsePoly":
        if v < 0:
            raise ValueError("variable ids are non-negative")
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return cls.const(1)
        return cls._raw({((v, power),): Fraction(1)})

    @classmethod
    def coerce(cls, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return other
        return cls.const(other)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        """A copy of the term map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def coefficient(self, mono: Iterable[tuple[int, int]] | Mapping[int, int]) -> Fraction:
        if isinstance(mono, Mapping):
            mono = mono.items()
        key = tuple(sorted((v, e) for v, e in mono if e))
        return self._terms.get(key, Fraction(0))

    def variables(self) -> set[int]:
        return {v for m in self._terms for v, _ in m}

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(sum(e for _, e in m) for m in self._terms)

    def degree_in(self, v: int) -> int:
        if not self._terms:
            return -1
        return max(dict(m).get(v, 0) for m in self._terms)

    def weights(self, weight: Callable[[int], int]) -> set[int]:
        """Set of weighted degrees ``sum(weight(v) * e)`` over all monomials."""
        return {sum(weight(v) * e for v, e in m) for m in self._terms}

    # -- arithmetic -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, SparsePoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == SparsePoly.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> "SparsePoly":
        return SparsePoly._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "SparsePoly":
        return self

    def __add__(self, other) -> "SparsePoly":
        try:
            other = SparsePoly.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return SparsePoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "SparsePoly":
        try:
            other = SparsePoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "SparsePoly":
        return SparsePoly.coerce(other) - self

    def __mul__(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            return self._mul_poly(other)
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def _mul_poly(self, other: "SparsePoly") -> "SparsePoly":
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return SparsePoly._raw({m: c for m, c in out.items() if c})

    def scale(self, c) -> "SparsePoly":
        c = _as_fraction(c)
        if not c:
            return SparsePoly()
        return SparsePoly._raw({m: v * c for m, v in self._terms.items()})

    def __truediv__(self, c) -> "SparsePoly":
        c = _as_fraction(c)
        if not c:
            raise ZeroDivisionError("polynomial divided by zero")
        return self.scale(1 / c)

    def __pow__(self, k: int) -> "SparsePoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = SparsePoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and composition -----------------------------------------

    def diff(self, v: int) -> "SparsePoly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d = dict(m)
            e = d.get(v, 0)
            if not e:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = out.get(key, 0) + c * e
        return SparsePoly._raw({m: c for m, c in out.items() if c})

    def subs(self, bindings: Mapping[int, object]) -> "SparsePoly":
        """Substitute polynomials (or exact constants) for variables.

        Variables absent from ``bindings`` are kept as they are.
        """
        if not bindings:
            return self
        binds = {v: SparsePoly.coerce(p) for v, p in bindings.items()}
        powers: dict[tuple[int, int], SparsePoly] = {}

        def power(v: int, e: int) -> SparsePoly:
            key = (v, e)
            if key not in powers:
                powers[key] = binds[v] if e == 1 else power(v, e - 1) * binds[v]
            return powers[key]

        acc: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            term = SparsePoly._raw({(): c})
            kept = []
            for v, e in m:
                if v in binds:
                    term = term * power(v, e)
                else:
                    kept.append((v, e))
            if kept:
                term = term * SparsePoly._raw({tuple(kept): Fraction(1)})
            for mm, cc in term._terms.items():
                acc[mm] = acc.get(mm, 0) + cc
        return SparsePoly._raw({m: c for m, c in acc.items() if c})

    def coeffs_in(self, v: int) -> list["SparsePoly"]:
        """Split into ``[p_0, ..., p_d]`` with ``self == sum(p_j * v**j)``."""
        d = self.degree_in(v)
        parts: list[dict] = [{} for _ in range(max(d, 0) + 1)]
        for m, c in self._terms.items():
            dm = dict(m)
            e = dm.pop(v, 0)
            parts[e][tuple(sorted(dm.items()))] = c
        return [SparsePoly._raw(p) for p in parts]

    def evaluate(self, values: Mapping[int, object], atoms: bool = True):
        """Numeric evaluation.

        ``values`` maps variable ids to numbers (floats, Fractions or numpy
        arrays; broadcasting applies).  Registered atoms with a float value
        are filled in automatically unless ``atoms`` is False.  Coefficients
        are converted to float unless every supplied value is exact.
        """
        vals = dict(values)
        if atoms:
            for k, a in atom_values().items():
                vals.setdefault(k, a)
        used = self.variables()
        missing = used - set(vals)
        if missing:
            raise KeyError(f"no value for variables {sorted(missing)}")
        exact = all(isinstance(vals[v], (int, Fraction)) for v in used)
        total = 0
        for m, c in self._terms.items():
            term = c if exact else float(c)
            for v, e in m:
                term = term * vals[v] ** e
            total = total + term
        return total

    # -- rendering --------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in graded lexicographic order (highest total degree first)."""

        def key(item):
            m, _ = item
            # larger exponent on smaller ids first
            return (-sum(e for _, e in m), [(v, -e) for v, e in m])

        return sorted(self._terms.items(), key=key)

    def to_plain(self, names: Callable[[int], str] | Mapping[int, str] | None = None) -> str:
        name = _namer(names, latex=False)
        if not self._terms:
            return "0"
        pieces = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = [name(v) + (f"^{e}" if e > 1 else "") for v, e in m]
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(a)] + factors)
            if i == 0:
                pieces.append(("-" if sign == "-" else "") + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def to_latex(self, names: Callable[[int], str] | Mapping[int, str] | None = None) -> str:
        name = _namer(names, latex=True)
        if not self._terms:
            return "0"
        pieces = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = " ".join(_latex_power(name(v), e) for v, e in m)
            if a.denominator != 1:
                num = r"\frac{%d}{%d}" % (a.numerator, a.denominator)
            elif a != 1 or not factors:
                num = str(a.numerator)
            else:
                num = ""
            body = " ".join(p for p in (num, factors) if p)
            if i == 0:
                pieces.append(("-" if sign == "-" else "") + body)
            else:
                pieces.append(f" {sign} {body}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_plain()

    def __repr__(self) -> str:
        return f"SparsePoly({self.to_plain()!r})"

    # -- serialization ----------------------------------------------------

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "exponents": {str(v): e for v, e in m},
                "num": str(c.numerator),
                "den": str(c.denominator),
            }
            for m, c in self.sorted_terms()
        ]

    @classmethod
    def from_json_obj(cls, obj: Sequence[Mapping]) -> "SparsePoly":
        terms: dict[Monomial, Fraction] = {}
        for entry in obj:
            mono = tuple(sorted((int(v), int(e)) for v, e in entry["exponents"].items()))
            if any(e <= 0 for _, e in mono):
                raise ValueError("exponents must be positive")
            den = int(entry["den"])
            if den <= 0:
                raise ValueError("denominator must be positive")
            c = Fraction(int(entry["num"]), den)
            terms[mono] = terms.get(mono, 0) + c
        return cls(terms)

    def to_json(self, **extra) -> str:
        doc = {"schema_version": JSON_SCHEMA_VERSION, **extra, "terms": self.to_json_obj()}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SparsePoly":
        doc = json.loads(text)
        if isinstance(doc, list):
            return cls.from_json_obj(doc)
        return cls.from_json_obj(doc["terms"])


def _latex_power(base: str, e: int) -> str:
    if e == 1:
        return base
    if "^" in base:
        base = "{%s}" % base
    return f"{base}^{{{e}}}"


def gamma_names(v: int) -> str:
    return f"x{v + 1}"


def _namer(names, latex: bool) -> Callable[[int], str]:
    if names is None:
        base: Callable[[int], str] = gamma_names
    elif isinstance(names, Mapping):
        base = lambda v: names.get(v, f"v{v}")  # noqa: E731
    else:
        base = names

    def name(v: int) -> str:
        atom = _atoms.get(v)
        if atom is not None:
            return atom.latex if latex else atom.plain
        s = base(v)
        if latex:
            head, digits = s.rstrip("0123456789"), s[len(s.rstrip("0123456789")):]
            if digits and head:
                return f"{head}_{{{digits}}}"
        return s

    return name


def xt_names(v: int) -> str:
    return XT_NAMES.get(v, f"v{v}")


# ---------------------------------------------------------------------------
# truncated series, EGF convention


@dataclass(frozen=True)
class TruncatedSeries:
    """Series ``sum_k coeffs[k] * u**k / k!`` truncated after ``u**order``."""

    coeffs: tuple[SparsePoly, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(SparsePoly.coerce(c) for c in self.coeffs))

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(tuple(SparsePoly() for _ in range(order + 1)))

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls((SparsePoly.const(1),) + tuple(SparsePoly() for _ in range(order)))

    @classmethod
    def from_ordinary(cls, coeffs: Sequence) -> "TruncatedSeries":
        """Build from ordinary coefficients ``c_k`` of ``u**k``."""
        return cls(tuple(SparsePoly.coerce(c) * math.factorial(k) for k, c in enumerate(coeffs)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> SparsePoly:
        return self.coeffs[k]

    def ordinary(self, k: int) -> SparsePoly:
        """Coefficient of ``u**k`` (EGF coefficient divided by ``k!``)."""
        return self.coeffs[k] / math.factorial(k)

    def _check(self, other: "TruncatedSeries") -> None:
        if other.order != self.order:
            raise ValueError(f"series orders differ: {self.order} vs {other.order}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def scale(self, p) -> "TruncatedSeries":
        p = SparsePoly.coerce(p)
        return TruncatedSeries(tuple(a * p for a in self.coeffs))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        # EGF product: c_n = sum_k C(n, k) a_k b_{n-k}
        self._check(other)
        K = self.order
        out = []
        for n in range(K + 1):
            acc = SparsePoly()
            for k in range(n + 1):
                a, b = self.coeffs[k], other.coeffs[n - k]
                if a and b:
                    acc = acc + (a * b).scale(math.comb(n, k))
            out.append(acc)
        return TruncatedSeries(tuple(out))


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """``exp(s)`` truncated at ``s.order``; ``s`` must have zero constant term.

    Computed as the finite sum ``sum_j s**j / j!``, which is exact because
    ``s**j`` vanishes below ``u**j``.

    >>> k = [SparsePoly.var(i) for i in range(3)]
    >>> out = series_exp(TruncatedSeries((SparsePoly(),) + tuple(k)))
    >>> out[3].to_plain()
    'x1^3 + 3*x1*x2 + x3'
    """
    if s.coeffs[0]:
        raise ValueError("series_exp needs a zero constant term")
    K = s.order
    result = TruncatedSeries.one(K)
    power = TruncatedSeries.one(K)
    for j in range(1, K + 1):
        power = power * s
        result = result + power.scale(Fraction(1, math.factorial(j)))
    return result


def series_log(s: TruncatedSeries) -> TruncatedSeries:
    """``log(s)`` for a series with constant term 1, via ``log(1 + h)``."""
    if s.coeffs[0] != 1:
        raise ValueError("series_log needs constant term 1")
    K = s.order
    h = s - TruncatedSeries.one(K)
    result = TruncatedSeries.zero(K)
    power = TruncatedSeries.one(K)
    for j in range(1, K + 1):
        power = power * h
        sign = 1 if j % 2 else -1
        result = result + power.scale(Fraction(sign, j))
    return result


def log1p_series(order: int, sign: int = 1) -> TruncatedSeries:
    """``log(1 + sign*u)`` with exact rational coefficients.

    ``log(1 + a u) = sum_k (-1)**(k+1) a**k u**k / k``; in EGF form the
    ``k``-th coefficient is ``(-1)**(k+1) a**k (k-1)!``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    coeffs = [SparsePoly()]
    for k in range(1, order + 1):
        coeffs.append(SparsePoly.const((-1) ** (k + 1) * sign**k * math.factorial(k - 1)))
    return TruncatedSeries(tuple(coeffs))


def linear_series(order: int, coeff) -> TruncatedSeries:
    """The series ``coeff * u``."""
    coeffs = [SparsePoly() for _ in range(order + 1)]
    if order >= 1:
        coeffs[1] = SparsePoly.coerce(coeff)
    return TruncatedSeries(tuple(coeffs))
