"""Exact coefficient rings.

Two coefficient types live here:

* :class:`GaussianRational` -- exact numbers ``p + q i`` with rational parts.
* :class:`SymPoly` -- multivariate polynomials over the Gaussian rationals in
  named variables *and* their formal conjugates.  A variable and its
  conjugate are independent atoms; ``conjugate()`` swaps them.

Both types, as well as the builtin ``int``/``float``/``complex``, satisfy the
informal coefficient protocol used by :mod:`fca.algebra`: ``+``, ``-``, ``*``,
``conjugate()`` and comparison against ``0`` for the zero test.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Complex, Rational
from typing import Iterable, Mapping, NamedTuple, Union


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot convert {x!r} to an exact rational")


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
            return cls(x, 0)
        raise TypeError(f"cannot coerce {x!r} to GaussianRational")

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return GaussianRational(self.re * other, self.im * other)
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self) -> list[int]:
        return [self.re.numerator, self.re.denominator, self.im.numerator, self.im.denominator]

    @classmethod
    def from_json(cls, data) -> "GaussianRational":
        num, den, num_i, den_i = data
        return cls(Fraction(num, den), Fraction(num_i, den_i))


ONE = GaussianRational(1)
ZERO = GaussianRational(0)
I_UNIT = GaussianRational(0, 1)


class Variable(NamedTuple):
    """A coefficient symbol or its formal conjugate."""

    name: str
    conjugated: bool = False

    def conjugate(self) -> "Variable":
        return Variable(self.name, not self.conjugated)

    def __str__(self):
        return self.name + ("*" if self.conjugated else "")

    @classmethod
    def parse(cls, text: str) -> "Variable":
        if text.endswith("*"):
            return cls(text[:-1], True)
        return cls(text, False)


Monomial = tuple  # sorted tuple of Variables, repeats allowed
Scalar = Union[int, Fraction, GaussianRational]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


class SymPoly:
    """Polynomial in :class:`Variable` atoms with Gaussian-rational coefficients.

    Instances are immutable; the zero coefficient is never stored, so two
    polynomials are equal exactly when their term maps are equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, GaussianRational] = {}
        if terms:
            for mono, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    key = tuple(sorted(mono))
                    prev = clean.get(key)
                    if prev is not None:
                        c = prev + c
                        if not c:
                            del clean[key]
                            continue
                    clean[key] = c
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("SymPoly is immutable")

    @classmethod
    def _raw(cls, terms: dict) -> "SymPoly":
        # terms already canonical and zero-free
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def var(cls, name: str, conjugated: bool = False) -> "SymPoly":
        return cls._raw({(Variable(name, conjugated),): ONE})

    @classmethod
    def const(cls, c: Scalar) -> "SymPoly":
        c = GaussianRational.coerce(c)
        return cls._raw({(): c} if c else {})

    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def variables(self) -> set[str]:
        return {v.name for mono in self._terms for v in mono}

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def constant_term(self) -> GaussianRational:
        return self._terms.get((), ZERO)

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _lift(other) -> "SymPoly | None":
        if isinstance(other, SymPoly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return SymPoly.const(other)
        return None

    def __add__(self, other):
        o = SymPoly._lift(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        out = dict(self._terms)
        for mono, c in o._terms.items():
            prev = out.get(mono)
            if prev is None:
                out[mono] = c
            else:
                s = prev + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return SymPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = SymPoly._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return SymPoly._raw({})
            if other == 1:
                return self
            return SymPoly._raw({m: c * other for m, c in self._terms.items()})
        if isinstance(other, (Fraction, GaussianRational)):
            c0 = GaussianRational.coerce(other)
            if not c0:
                return SymPoly._raw({})
            return SymPoly._raw({m: c * c0 for m, c in self._terms.items()})
        if not isinstance(other, SymPoly):
            return NotImplemented
        out: dict[Monomial, GaussianRational] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                prev = out.get(m)
                if prev is not None:
                    c = prev + c
                    if not c:
                        del out[m]
                        continue
                out[m] = c
        return SymPoly._raw(out)

    __rmul__ = __mul__

    def conjugate(self) -> "SymPoly":
        return sym_conjugate(self)

    def __eq__(self, other):
        o = SymPoly._lift(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._terms.items())))
        return self._hash

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: kv[0])

    def leading_coefficient(self) -> GaussianRational:
        if not self._terms:
            return ZERO
        return self.sorted_items()[0][1]

    def monic(self) -> "SymPoly":
        """Scale so that the leading (first sorted) coefficient is one."""
        lead = self.leading_coefficient()
        if not lead:
            return self
        inv = lead.inverse()
        return SymPoly._raw({m: c * inv for m, c in self._terms.items()})

    def evaluate(self, assignment: Mapping[str, complex]) -> complex:
        return evaluate(self, assignment)

    def __repr__(self):
        return f"SymPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_items():
            body = " ".join(str(v) for v in mono)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c} {body}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialization ---------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [
            {"monomial": [str(v) for v in mono], "coeff": c.to_json()}
            for mono, c in self.sorted_items()
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "SymPoly":
        terms: dict = {}
        for entry in data:
            mono = tuple(sorted(Variable.parse(s) for s in entry["monomial"]))
            c = GaussianRational.from_json(entry["coeff"])
            terms[mono] = terms.get(mono, ZERO) + c
        return cls(terms)


def sym_conjugate(p: SymPoly) -> SymPoly:
    """Flip every variable's conjugation flag and conjugate the coefficients."""
    out = {}
    for mono, c in p.items():
        out[tuple(sorted(v.conjugate() for v in mono))] = c.conjugate()
    return SymPoly._raw(out)


def evaluate(p: SymPoly, assignment: Mapping[str, complex]) -> complex:
    """Substitute complex values; starred variables receive the conjugate."""
    total = 0j
    for mono, c in p.items():
        term = complex(c)
        for v in mono:
            try:
                value = complex(assignment[v.name])
            except KeyError:
                from .errors import MissingAssignment

                raise MissingAssignment(f"no value assigned to {v.name!r}") from None
            term *= value.conjugate() if v.conjugated else value
        total += term
    return total


def is_zero(c) -> bool:
    """Zero test for any supported coefficient type."""
    if isinstance(c, SymPoly):
        return c.is_zero()
    return c == 0


def conj(c):
    """Ring conjugation for any supported coefficient type."""
    return c.conjugate()


def polar(modulus: float, phase: float) -> complex:
    return cmath.rect(modulus, phase)


__all__ = [
    "GaussianRational",
    "Variable",
    "SymPoly",
    "sym_conjugate",
    "evaluate",
    "is_zero",
    "conj",
    "ONE",
    "ZERO",
    "I_UNIT",
    "Complex",
]
