from __future__ import annotations

from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from fca.errors import NotAGroup, NotNormal
from fca.groups import (
    CayleyGraph,
    FiniteGroupModel,
    QuotientSpec,
    build_graph,
    build_group,
    is_regular,
    klein_graph,
    neighborhood,
    trivial_graph,
    z5_graph,
)


def s3_table():
    perms = list(permutations(range(3)))
    idx = {p: k for k, p in enumerate(perms)}
    return [[idx[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]


def test_klein_relations():
    g = build_group("Z2xZ2")
    a, b = g.element("a"), g.element("b")
    assert g.order == 4
    assert g.mul(a, a) == 0 and g.mul(b, b) == 0
    ab = g.mul(a, b)
    assert g.mul(ab, ab) == 0
    assert g.name(ab) == "c"


def test_trivial_group():
    g = build_group("Zn(1)")
    assert g.order == 1


def test_explicit_table_and_preset_dict():
    assert build_group({"preset": "Z5"}).order == 5
    assert build_group({"table": s3_table()}).order == 6


def test_not_a_group():
    with pytest.raises(NotAGroup):
        FiniteGroupModel(((0, 1), (0, 1)))
    with pytest.raises(NotAGroup):
        # Latin square with identity 0 that is not associative
        FiniteGroupModel(
            ((0, 1, 2, 3, 4), (1, 0, 3, 4, 2), (2, 4, 0, 1, 3), (3, 2, 4, 0, 1), (4, 3, 1, 2, 0))
        )


def test_neighborhoods():
    kg = klein_graph()
    assert [kg.group.name(x) for x in neighborhood(kg, "e")] == ["a", "b", "e"]
    zg = z5_graph()
    assert [zg.group.name(x) for x in neighborhood(zg, 0)] == ["1", "0", "4"]
    assert neighborhood(trivial_graph(), 0) == [0]


def test_site_orders():
    assert klein_graph().site_names() == ["a", "b", "e", "c"]
    assert z5_graph().site_names() == ["1", "0", "4", "3", "2"]


def test_homogeneous_neighborhood_size():
    for graph in (klein_graph(), z5_graph(), build_graph("Z7")):
        sizes = {len(neighborhood(graph, g)) for g in graph.group.elements}
        assert len(sizes) == 1


def test_regular_examples():
    assert is_regular([0, 1, -1], QuotientSpec("Z", 5))
    assert not is_regular([0, 1, -1], QuotientSpec("Z", 3))
    assert not is_regular([0, 1, -1], QuotientSpec("Z", 2))


@pytest.mark.parametrize("n", range(2, 13))
def test_regular_matches_brute_force(n):
    got = is_regular([0, 1, -1], QuotientSpec("Z", n))
    assert got == oracles.brute_force_regular([0, 1, -1], n)
    assert got == (n >= 5)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4, unique=True), st.integers(2, 14))
def test_regular_random_offsets(offsets, n):
    assert is_regular(offsets, QuotientSpec("Z", n)) == oracles.brute_force_regular(offsets, n)


def test_finite_quotient_and_normality():
    q = QuotientSpec("Z2xZ2", ["e", "a"])
    assert q.quotient.order == 2
    assert q.project(q.base.element("b")) == q.project(q.base.element("c"))
    with pytest.raises(NotNormal):
        QuotientSpec({"table": s3_table()}, [0, 1])  # a transposition subgroup


def test_cayley_graph_rejects_non_generating_set():
    grp = build_group("Z4")
    with pytest.raises(Exception):
        CayleyGraph(grp, (2,), (2, 0), ())
