"""Fermionic operator algebra in canonical normal form.

A monomial is stored as a pair of bitsets ``(creators, annihilators)`` and
stands for the ordered product

    psi^dag_{c1} ... psi^dag_{ck} psi_{a1} ... psi_{am}

with ``c1 < ... < ck`` and ``a1 < ... < am``.  A :class:`FermionPolynomial`
maps such keys to nonzero coefficients.  Coefficients only need ``+``, ``*``,
``conjugate()`` and a zero test, so the same code runs over ``complex``,
:class:`fca.rings.GaussianRational` and :class:`fca.rings.SymPoly`.

All reordering happens on integer-coefficient expansions which are cached;
ring coefficients are multiplied in afterwards.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ModeCountMismatch, SiteOutOfRange
from .rings import GaussianRational, SymPoly, is_zero

Key = tuple  # (creators bitset, annihilators bitset)

_DAG = 0
_ANN = 1


def bits_to_sites(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def sites_to_bits(sites: Iterable[int]) -> int:
    b = 0
    for s in sites:
        b |= 1 << s
    return b


def _merge_sign(left: int, right: int) -> int:
    """Sign of sorting the concatenation ``left + right`` of two ascending blocks."""
    inversions = 0
    r = right
    j = 0
    while r:
        if r & 1:
            inversions += bin(left >> (j + 1)).count("1")
        r >>= 1
        j += 1
    return -1 if inversions & 1 else 1


@lru_cache(maxsize=None)
def _order_word(word: tuple) -> tuple:
    """Normal-order a word of ``(kind, site)`` letters.

    Returns a tuple of ``((creators, annihilators), int coefficient)``.
    """
    for i in range(len(word) - 1):
        x, y = word[i], word[i + 1]
        if x < y:
            continue
        if x == y:
            return ()
        swapped = word[:i] + (y, x) + word[i + 2 :]
        acc: dict = {}
        if x[0] == _ANN and y[0] == _DAG and x[1] == y[1]:
            # psi_x psi^dag_x = 1 - psi^dag_x psi_x
            for k, c in _order_word(word[:i] + word[i + 2 :]):
                acc[k] = acc.get(k, 0) + c
            for k, c in _order_word(swapped):
                acc[k] = acc.get(k, 0) - c
        else:
            for k, c in _order_word(swapped):
                acc[k] = acc.get(k, 0) - c
        return tuple((k, c) for k, c in acc.items() if c)
    cre = 0
    ann = 0
    for kind, site in word:
        if kind == _DAG:
            cre |= 1 << site
        else:
            ann |= 1 << site
    return (((cre, ann), 1),)


@lru_cache(maxsize=None)
def _ann_times_cre(ann: int, cre: int) -> tuple:
    """Expand ``(prod psi_a) (prod psi^dag_c)`` with both blocks ascending."""
    word = tuple((_ANN, s) for s in bits_to_sites(ann)) + tuple(
        (_DAG, s) for s in bits_to_sites(cre)
    )
    return _order_word(word)


@lru_cache(maxsize=None)
def _monomial_product(k1: Key, k2: Key) -> tuple:
    c1, a1 = k1
    c2, a2 = k2
    acc: dict = {}
    for (cm, am), coeff in _ann_times_cre(a1, c2):
        if c1 & cm or am & a2:
            continue
        sign = _merge_sign(c1, cm) * _merge_sign(am, a2)
        key = (c1 | cm, am | a2)
        acc[key] = acc.get(key, 0) + sign * coeff
    return tuple((k, c) for k, c in acc.items() if c)


def _check_sites(sites: Iterable[int], mode_count: int) -> None:
    for s in sites:
        if not 0 <= s < mode_count:
            raise SiteOutOfRange(f"site {s} outside [0, {mode_count})")


class FermionPolynomial:
    """Immutable normal-ordered polynomial in ``mode_count`` fermionic modes."""

    __slots__ = ("mode_count", "_terms")

    def __init__(self, mode_count: int, terms: Mapping[Key, object] | None = None):
        object.__setattr__(self, "mode_count", int(mode_count))
        limit = 1 << self.mode_count
        clean = {}
        if terms:
            for key, c in terms.items():
                cre, ann = key
                if cre >= limit or ann >= limit or cre < 0 or ann < 0:
                    raise SiteOutOfRange(f"monomial {key} exceeds {mode_count} modes")
                if not is_zero(c):
                    clean[(cre, ann)] = c
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("FermionPolynomial is immutable")

    @classmethod
    def _raw(cls, mode_count: int, terms: dict) -> "FermionPolynomial":
        obj = cls.__new__(cls)
        object.__setattr__(obj, "mode_count", mode_count)
        object.__setattr__(obj, "_terms", terms)
        return obj

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, mode_count: int) -> "FermionPolynomial":
        return cls._raw(mode_count, {})

    @classmethod
    def identity(cls, mode_count: int, coeff=1) -> "FermionPolynomial":
        return cls(mode_count, {(0, 0): coeff})

    @classmethod
    def annihilator(cls, mode_count: int, site: int, coeff=1) -> "FermionPolynomial":
        _check_sites([site], mode_count)
        return cls(mode_count, {(0, 1 << site): coeff})

    @classmethod
    def creator(cls, mode_count: int, site: int, coeff=1) -> "FermionPolynomial":
        _check_sites([site], mode_count)
        return cls(mode_count, {(1 << site, 0): coeff})

    @classmethod
    def number(cls, mode_count: int, site: int) -> "FermionPolynomial":
        _check_sites([site], mode_count)
        return cls._raw(mode_count, {(1 << site, 1 << site): 1})

    @classmethod
    def monomial(
        cls, mode_count: int, create: Iterable[int], annihilate: Iterable[int], coeff=1
    ) -> "FermionPolynomial":
        """Canonical monomial from site lists (already in canonical order)."""
        create = list(create)
        annihilate = list(annihilate)
        _check_sites(create + annihilate, mode_count)
        if len(set(create)) != len(create) or len(set(annihilate)) != len(annihilate):
            return cls.zero(mode_count)
        return cls(mode_count, {(sites_to_bits(create), sites_to_bits(annihilate)): coeff})

    # access ---------------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self) -> Iterator[Key]:
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, create: Iterable[int] = (), annihilate: Iterable[int] = ()):
        """Coefficient of the canonical monomial with the given site sets (0 if absent)."""
        return self._terms.get((sites_to_bits(create), sites_to_bits(annihilate)), 0)

    def sorted_keys(self) -> list[Key]:
        return sorted(self._terms, key=monomial_sort_key)

    # arithmetic -----------------------------------------------------------

    def _same_modes(self, other: "FermionPolynomial") -> None:
        if self.mode_count != other.mode_count:
            raise ModeCountMismatch(
                f"mode counts differ: {self.mode_count} vs {other.mode_count}"
            )

    def __add__(self, other):
        if not isinstance(other, FermionPolynomial):
            if is_scalar(other):
                other = FermionPolynomial.identity(self.mode_count, other)
            else:
                return NotImplemented
        self._same_modes(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            if k in out:
                s = out[k] + c
                if is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = c
        return FermionPolynomial._raw(self.mode_count, out)

    __radd__ = __add__

    def __neg__(self):
        return FermionPolynomial._raw(self.mode_count, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, FermionPolynomial):
            if is_scalar(other):
                other = FermionPolynomial.identity(self.mode_count, other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FermionPolynomial":
        out = {}
        for k, v in self._terms.items():
            p = v * c
            if not is_zero(p):
                out[k] = p
        return FermionPolynomial._raw(self.mode_count, out)

    def __mul__(self, other):
        if isinstance(other, FermionPolynomial):
            return multiply(self, other)
        if is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if is_scalar(other):
            out = {}
            for k, v in self._terms.items():
                p = other * v
                if not is_zero(p):
                    out[k] = p
            return FermionPolynomial._raw(self.mode_count, out)
        return NotImplemented

    def adjoint(self) -> "FermionPolynomial":
        return adjoint(self)

    def map_coefficients(self, fn) -> "FermionPolynomial":
        return FermionPolynomial(self.mode_count, {k: fn(c) for k, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, FermionPolynomial):
            if self.mode_count != other.mode_count:
                return False
            if self._terms.keys() != other._terms.keys():
                return False
            return all(self._terms[k] == other._terms[k] for k in self._terms)
        if is_scalar(other):
            return self == FermionPolynomial.identity(self.mode_count, other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"FermionPolynomial({self.mode_count}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in self.sorted_keys():
            parts.append(f"({self._terms[k]})*{format_monomial(k)}")
        return " + ".join(parts)

    # serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        ring = None
        for k in self.sorted_keys():
            c = self._terms[k]
            tag, enc = encode_coefficient(c)
            ring = ring or tag
            if tag != ring:
                # mixed int/complex collapse to complex
                tag, enc = "complex", encode_coefficient(complex(c))[1]
                ring = "complex"
            terms.append(
                {"create": bits_to_sites(k[0]), "annihilate": bits_to_sites(k[1]), "coeff": enc}
            )
        return {"modes": self.mode_count, "ring": ring or "complex", "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "FermionPolynomial":
        ring = data.get("ring", "complex")
        n = int(data["modes"])
        out: dict = {}
        for t in data["terms"]:
            key = (sites_to_bits(t["create"]), sites_to_bits(t["annihilate"]))
            c = decode_coefficient(ring, t["coeff"])
            out[key] = out[key] + c if key in out else c
        return cls(n, out)


def is_scalar(x) -> bool:
    return isinstance(x, (int, float, complex, GaussianRational, SymPoly)) or (
        hasattr(x, "conjugate") and not isinstance(x, FermionPolynomial)
    )


def encode_coefficient(c):
    if isinstance(c, SymPoly):
        return "symbolic", c.to_json()
    if isinstance(c, GaussianRational):
        return "gaussian", c.to_json()
    if isinstance(c, int):
        return "gaussian", GaussianRational(c).to_json()
    c = complex(c)
    return "complex", [c.real, c.imag]


def decode_coefficient(ring: str, enc):
    if ring == "symbolic":
        return SymPoly.from_json(enc)
    if ring == "gaussian":
        return GaussianRational.from_json(enc)
    if ring == "complex":
        re, im = enc
        return complex(float(re), float(im))
    raise ValueError(f"unknown coefficient ring {ring!r}")


def monomial_sort_key(key: Key):
    cre, ann = key
    return (bin(cre).count("1") + bin(ann).count("1"), bits_to_sites(cre), bits_to_sites(ann))


def format_monomial(key: Key, names: Sequence[str] | None = None) -> str:
    cre, ann = key
    if not cre and not ann:
        return "I"
    label = (lambda s: str(s)) if names is None else (lambda s: str(names[s]))
    parts = [f"d{label(s)}" for s in bits_to_sites(cre)]
    parts += [f"p{label(s)}" for s in bits_to_sites(ann)]
    return " ".join(parts)


# operations ---------------------------------------------------------------


def normal_order(
    ops: Sequence[tuple[int, bool]], sign: int = 1, mode_count: int | None = None
) -> FermionPolynomial:
    """Canonical form of the product of ``ops`` = [(site, is_dagger), ...]."""
    ops = list(ops)
    if mode_count is None:
        mode_count = max((s for s, _ in ops), default=-1) + 1
    _check_sites([s for s, _ in ops], mode_count)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    word = tuple((_DAG if dag else _ANN, site) for site, dag in ops)
    return FermionPolynomial._raw(mode_count, {k: sign * c for k, c in _order_word(word)})


def multiply(p: FermionPolynomial, q: FermionPolynomial) -> FermionPolynomial:
    p._same_modes(q)
    out: dict = {}
    for k1, c1 in p._terms.items():
        for k2, c2 in q._terms.items():
            expansion = _monomial_product(k1, k2)
            if not expansion:
                continue
            base = c1 * c2
            for k, n in expansion:
                term = base * n if n != 1 else base
                if k in out:
                    out[k] = out[k] + term
                else:
                    out[k] = term
    return FermionPolynomial._raw(
        p.mode_count, {k: c for k, c in out.items() if not is_zero(c)}
    )


def anticommute(p: FermionPolynomial, q: FermionPolynomial) -> FermionPolynomial:
    return multiply(p, q) + multiply(q, p)


def _reverse_sign(bits: int) -> int:
    k = bin(bits).count("1")
    return -1 if (k * (k - 1) // 2) & 1 else 1


def adjoint(p: FermionPolynomial) -> FermionPolynomial:
    # (C A)^dag = reversed(A)^dag reversed(C)^dag; only block reversals cost signs
    out = {}
    for (cre, ann), c in p._terms.items():
        s = _reverse_sign(cre) * _reverse_sign(ann)
        cc = c.conjugate()
        out[(ann, cre)] = cc if s == 1 else -cc
    return FermionPolynomial._raw(p.mode_count, out)


def _permute_block(bits: int, perm: Sequence[int]) -> tuple[int, int]:
    """Relabel an ascending block; returns (new bits, permutation sign)."""
    images = [perm[s] for s in bits_to_sites(bits)]
    inversions = 0
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if images[i] > images[j]:
                inversions += 1
    return sites_to_bits(images), (-1 if inversions & 1 else 1)


def relabel(p: FermionPolynomial, perm: Sequence[int]) -> FermionPolynomial:
    """Apply a site permutation ``i -> perm[i]`` and re-canonicalize."""
    if len(perm) != p.mode_count or sorted(perm) != list(range(p.mode_count)):
        raise ValueError("perm must be a permutation of the sites")
    out = {}
    for (cre, ann), c in p._terms.items():
        nc, s1 = _permute_block(cre, perm)
        na, s2 = _permute_block(ann, perm)
        out[(nc, na)] = c if s1 * s2 == 1 else -c
    return FermionPolynomial._raw(p.mode_count, out)


def translate(p: FermionPolynomial, g: int, graph) -> FermionPolynomial:
    """Relabel every site ``f`` to ``g * f`` using ``graph``'s site ordering."""
    if p.mode_count != graph.mode_count:
        raise ModeCountMismatch(
            f"polynomial has {p.mode_count} modes, graph has {graph.mode_count}"
        )
    return relabel(p, graph.translation_permutation(g))


def clear_caches() -> None:
    _order_word.cache_clear()
    _ann_times_cre.cache_clear()
    _monomial_product.cache_clear()
