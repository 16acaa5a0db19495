"""Finite groups by multiplication table, Cayley graphs and quotient regularity."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import NotAGroup, NotNormal


@dataclass(frozen=True)
class FiniteGroupModel:
    """Group on labels ``0..n-1`` with 0 the identity."""

    table: tuple
    names: tuple = ()
    inverse: tuple = field(init=False)

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if not self.names:
            object.__setattr__(self, "names", tuple(str(i) for i in range(n)))
        elif len(self.names) != n:
            raise NotAGroup("names must match the group order")
        _validate_table(table)
        inv = []
        for g in range(n):
            inv.append(next(h for h in range(n) if table[g][h] == 0))
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inv(self, g: int) -> int:
        return self.inverse[g]

    def element(self, label) -> int:
        """Resolve an element given as an int label or a name."""
        if isinstance(label, int):
            if 0 <= label < self.order:
                return label
            raise ValueError(f"element {label} outside group of order {self.order}")
        text = str(label).strip()
        if text in self.names:
            return self.names.index(text)
        if re.fullmatch(r"-?\d+", text):
            return self.element(int(text))
        raise ValueError(f"unknown group element {label!r}")

    def name(self, g: int) -> str:
        return self.names[g]

    def generated_by(self, gens: Sequence[int]) -> set[int]:
        seen = {0}
        frontier = [0]
        while frontier:
            g = frontier.pop()
            for h in gens:
                k = self.mul(g, h)
                if k not in seen:
                    seen.add(k)
                    frontier.append(k)
        return seen


def _validate_table(table) -> None:
    n = len(table)
    if n == 0:
        raise NotAGroup("empty table")
    full = set(range(n))
    for row in table:
        if len(row) != n or set(row) != full:
            raise NotAGroup("multiplication table is not a Latin square")
    for col in range(n):
        if {table[r][col] for r in range(n)} != full:
            raise NotAGroup("multiplication table is not a Latin square")
    if any(table[0][g] != g or table[g][0] != g for g in range(n)):
        raise NotAGroup("label 0 is not the identity")
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise NotAGroup(f"not associative at ({a}, {b}, {c})")


def cyclic_group(n: int) -> FiniteGroupModel:
    if n < 1:
        raise NotAGroup("cyclic group order must be positive")
    return FiniteGroupModel(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def klein_group() -> FiniteGroupModel:
    # e=0, a=1, b=2, c=ab=3; the product is bitwise xor of the labels
    return FiniteGroupModel(
        tuple(tuple(i ^ j for j in range(4)) for i in range(4)), names=("e", "a", "b", "c")
    )


def build_group(spec) -> FiniteGroupModel:
    """Build from a preset name, ``{"preset": ...}`` or ``{"table": [[...]]}``."""
    if isinstance(spec, FiniteGroupModel):
        return spec
    if isinstance(spec, Mapping):
        if "preset" in spec:
            return build_group(spec["preset"])
        if "table" in spec:
            return FiniteGroupModel(tuple(map(tuple, spec["table"])), tuple(spec.get("names", ())))
        raise ValueError("group spec needs 'preset' or 'table'")
    if isinstance(spec, (list, tuple)):
        return FiniteGroupModel(tuple(map(tuple, spec)))
    key = str(spec).strip().lower().replace(" ", "")
    if key in ("z2xz2", "klein", "v4"):
        return klein_group()
    m = re.fullmatch(r"z(?:n\()?(\d+)\)?", key)
    if m:
        return cyclic_group(int(m.group(1)))
    raise ValueError(f"unknown group preset {spec!r}")


@dataclass(frozen=True)
class CayleyGraph:
    """Group with ordered generators, a neighborhood template and a site ordering.

    ``site_order[i]`` is the group element carried by fermionic mode ``i``.
    """

    group: FiniteGroupModel
    generators: tuple
    template: tuple
    site_order: tuple = ()

    def __post_init__(self):
        g = self.group
        gens = tuple(g.element(x) for x in self.generators)
        tmpl = tuple(g.element(x) for x in self.template)
        order = tuple(g.element(x) for x in self.site_order) or tuple(g.elements)
        if any(x == 0 for x in gens):
            raise ValueError("generators must be non-identity elements")
        if g.order > 1 and g.generated_by(gens) != set(g.elements):
            raise ValueError("generators do not generate the group")
        if len(set(tmpl)) != len(tmpl) or not tmpl:
            raise ValueError("neighborhood template must be nonempty with distinct elements")
        if sorted(order) != list(g.elements):
            raise ValueError("site_order must list every group element once")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "template", tmpl)
        object.__setattr__(self, "site_order", order)

    @property
    def mode_count(self) -> int:
        return self.group.order

    def site_index(self, element) -> int:
        return self.site_order.index(self.group.element(element))

    def neighborhood(self, g) -> list[int]:
        g = self.group.element(g)
        return [self.group.mul(g, h) for h in self.template]

    def neighborhood_sites(self, g) -> list[int]:
        return [self.site_index(x) for x in self.neighborhood(g)]

    def translation_permutation(self, g) -> list[int]:
        """Site permutation induced by left multiplication ``f -> g f``."""
        g = self.group.element(g)
        return [self.site_index(self.group.mul(g, f)) for f in self.site_order]

    def edges(self) -> list[tuple[int, int, int]]:
        """Colored edges ``(g, g h, h)`` for ``h`` in the generator set."""
        return [(x, self.group.mul(x, h), h) for x in self.group.elements for h in self.generators]

    def site_names(self) -> list[str]:
        return [self.group.name(x) for x in self.site_order]


def neighborhood(graph: CayleyGraph, g) -> list[int]:
    return graph.neighborhood(g)


def klein_graph() -> CayleyGraph:
    return CayleyGraph(klein_group(), ("a", "b"), ("a", "b", "e"), ("a", "b", "e", "c"))


def z5_graph() -> CayleyGraph:
    return CayleyGraph(cyclic_group(5), (1,), (1, 0, 4), (1, 0, 4, 3, 2))


def trivial_graph() -> CayleyGraph:
    return CayleyGraph(cyclic_group(1), (), (0,), (0,))


def build_graph(group, neighborhood=None, generators=None, site_order=None) -> CayleyGraph:
    """Graph for a group spec; the two case-study presets carry their orderings."""
    grp = build_group(group)
    key = str(group).strip().lower() if not isinstance(group, (Mapping, FiniteGroupModel)) else ""
    if grp == klein_group() and key in ("z2xz2", "klein", "v4"):
        base = klein_graph()
    elif grp == cyclic_group(5) and key in ("z5", "zn(5)"):
        base = z5_graph()
    elif grp.order == 1:
        base = trivial_graph()
    else:
        gens = tuple(generators) if generators else _default_generators(grp)
        tmpl = tuple(neighborhood) if neighborhood else tuple(gens) + (0,)
        return CayleyGraph(grp, gens, tmpl, tuple(site_order or ()))
    return CayleyGraph(
        grp,
        tuple(generators) if generators else base.generators,
        tuple(neighborhood) if neighborhood else base.template,
        tuple(site_order) if site_order else base.site_order,
    )


def _default_generators(grp: FiniteGroupModel) -> tuple:
    gens: list[int] = []
    for x in grp.elements:
        if x and x not in grp.generated_by(gens):
            gens.append(x)
    return tuple(gens)


@dataclass(frozen=True)
class QuotientSpec:
    """Base group (``"Z"`` or a finite model), kernel and the resulting quotient.

    For base ``"Z"`` the kernel is the modulus ``n``.  For a finite base the
    kernel is a tuple of base elements.
    """

    base: object
    kernel: object
    quotient: FiniteGroupModel = None

    def __post_init__(self):
        if self.base == "Z":
            n = int(self.kernel)
            if n < 1:
                raise ValueError("modulus must be positive")
            object.__setattr__(self, "quotient", cyclic_group(n))
        else:
            base = build_group(self.base)
            object.__setattr__(self, "base", base)
            kern = tuple(sorted({base.element(k) for k in self.kernel}))
            _check_normal(base, kern)
            object.__setattr__(self, "kernel", kern)
            object.__setattr__(self, "quotient", _coset_group(base, kern)[0])

    def project(self, x) -> int:
        if self.base == "Z":
            return int(x) % int(self.kernel)
        return _coset_group(self.base, self.kernel)[1][x]


def _check_normal(base: FiniteGroupModel, kern: tuple) -> None:
    ks = set(kern)
    if 0 not in ks or any(base.mul(a, b) not in ks for a in ks for b in ks):
        raise NotNormal("kernel is not a subgroup")
    for g in base.elements:
        for k in ks:
            if base.mul(base.mul(g, k), base.inv(g)) not in ks:
                raise NotNormal("kernel is not a normal subgroup")


def _coset_group(base: FiniteGroupModel, kern: tuple):
    cosets: list[frozenset] = []
    label: dict[int, int] = {}
    for g in base.elements:
        if g in label:
            continue
        coset = frozenset(base.mul(g, k) for k in kern)
        for x in coset:
            label[x] = len(cosets)
        cosets.append(coset)
    reps = [min(c) for c in cosets]
    table = tuple(tuple(label[base.mul(r, s)] for s in reps) for r in reps)
    return FiniteGroupModel(table), label


def is_regular(base_neighborhood: Sequence, quotient: QuotientSpec) -> bool:
    """Check that neighborhood intersections commute with the projection.

    For every ``x`` and every pair ``h1, h2`` of template elements, the
    projected neighborhoods of ``[x]`` and ``[x h1 h2^-1]`` must intersect
    exactly in the projection of the base intersection.
    """
    if quotient.base == "Z":
        offsets = [int(h) for h in base_neighborhood]
        base_points = [0]  # translation invariance on Z

        def mul(x, h):
            return x + h

        def inv(h):
            return -h

    else:
        base = quotient.base
        offsets = [base.element(h) for h in base_neighborhood]
        base_points = list(base.elements)
        mul = base.mul
        inv = base.inv

    for x in base_points:
        for h1 in offsets:
            for h2 in offsets:
                y = mul(mul(x, h1), inv(h2))
                nx = {mul(x, h) for h in offsets}
                ny = {mul(y, h) for h in offsets}
                lhs = {quotient.project(p) for p in nx} & {quotient.project(p) for p in ny}
                rhs = {quotient.project(p) for p in nx & ny}
                if lhs != rhs:
                    return False
    return True
