import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psbent.algebra import build_field
from psbent.construct import FunctionTable
from psbent.groups import (
    GroupError,
    TableGroup,
    catalog_group,
    check_group_table,
    coset_difference_histogram,
    cyclic,
    dihedral,
    direct_product,
    elementary_abelian,
    group_from_json,
    order_statistics,
    pairwise_trivial_intersections,
    parse_group,
    quaternion8,
    subgroup_from_members,
    symmetric3,
)
from psbent.spreads import build_spread, field_prequasifield

ALL_GROUPS = [
    cyclic(1), cyclic(2), cyclic(4), cyclic(8), dihedral(6), dihedral(8), quaternion8(),
    symmetric3(), elementary_abelian(2, 3), elementary_abelian(3, 2),
    direct_product(cyclic(4), cyclic(2)), direct_product(symmetric3(), cyclic(2)),
    direct_product(elementary_abelian(2, 4), cyclic(2)),
]


@pytest.mark.parametrize("G", ALL_GROUPS, ids=lambda g: g.name())
def test_group_axioms(G):
    check_group_table(np.asarray(G.table))
    idx = np.arange(G.order)
    assert np.all(G.mul(idx, G.inv(idx)) == 0)


class TestCatalog:
    def test_cyclic2(self):
        assert cyclic(2).table.tolist() == [[0, 1], [1, 0]]

    def test_quaternion_has_one_involution(self):
        Q = quaternion8()
        involutions = [x for x in range(8) if x != 0 and Q.table[x, x] == 0]
        assert involutions == [1]
        assert not Q.is_abelian()

    def test_dihedral8_order_counts(self):
        D = dihedral(8)
        involutions = [x for x in range(1, 8) if D.table[x, x] == 0]
        assert len(involutions) == 5
        assert sum(1 for x in range(8) if D.table[x, x] == 0) == 6  # with the identity
        assert not D.is_abelian()

    def test_five_groups_of_order_8_are_distinct(self):
        groups = [cyclic(8), direct_product(cyclic(4), cyclic(2)), elementary_abelian(2, 3),
                  dihedral(8), quaternion8()]
        signatures = {(G.is_abelian(), tuple(sorted(order_statistics(G).items()))) for G in groups}
        assert len(signatures) == 5

    def test_unknown(self):
        with pytest.raises(GroupError):
            catalog_group("monster")
        with pytest.raises(GroupError):
            catalog_group("cyclic", 1, 2)
        with pytest.raises(GroupError):
            dihedral(7)

    def test_parse(self):
        G = parse_group("direct_product(cyclic(4), cyclic(2))")
        assert G.order == 8 and G.is_abelian()
        assert parse_group("quaternion8") == quaternion8()
        with pytest.raises(GroupError):
            parse_group("cyclic(4")

    def test_json_roundtrip(self):
        for G in ALL_GROUPS:
            H = group_from_json(G.to_json())
            assert H.order == G.order and np.array_equal(H.table, G.table)

    def test_bad_table_rejected(self):
        with pytest.raises(GroupError):
            TableGroup([[0, 1], [1, 1]])
        # a Latin square with identity that is not associative (order 5 loop)
        loop = [[0, 1, 2, 3, 4],
                [1, 0, 3, 4, 2],
                [2, 4, 0, 1, 3],
                [3, 2, 4, 0, 1],
                [4, 3, 1, 2, 0]]
        with pytest.raises(GroupError, match="associativity"):
            TableGroup(loop)


class TestDirectProduct:
    def test_klein(self):
        G = direct_product(cyclic(2), cyclic(2))
        assert G.is_abelian() and all(G.table[x, x] == 0 for x in range(4))

    def test_order(self):
        assert direct_product(elementary_abelian(2, 4), cyclic(2)).order == 32

    def test_s3_x_c2_nonabelian(self):
        G = direct_product(symmetric3(), cyclic(2))
        assert G.order == 12
        # a commutator of two transposition-like elements is not the identity
        a, b = G.pair(1, 0), G.pair(2, 1)
        comm = G.mul(G.mul(a, b), G.mul(G.inv(a), G.inv(b)))
        assert comm != 0

    def test_numbering(self):
        G = direct_product(cyclic(3), cyclic(4))
        for a, b, c, d in itertools.product(range(3), range(4), range(3), range(4)):
            assert G.mul(a * 4 + b, c * 4 + d) == ((a + c) % 3) * 4 + (b + d) % 4

    def test_size_limit(self):
        with pytest.raises(GroupError):
            direct_product(elementary_abelian(2, 16), cyclic(2))


def naive_closure(G, s):
    s = set(s)
    while True:
        new = {int(G.mul(a, b)) for a in s for b in s} | s
        if new == s:
            return s
        s = new


class TestSubgroups:
    def test_trivial(self):
        assert subgroup_from_members(dihedral(8), [0]).order == 1

    def test_order_two_in_c4(self):
        S = subgroup_from_members(cyclic(4), [0, 2])
        assert S.members == (0, 2)

    def test_not_closed(self):
        with pytest.raises(GroupError, match="not closed"):
            subgroup_from_members(cyclic(4), [0, 1, 2])

    def test_identity_missing(self):
        with pytest.raises(GroupError, match="identity"):
            subgroup_from_members(cyclic(4), [2])

    @settings(max_examples=150, deadline=None)
    @given(st.sampled_from([g for g in ALL_GROUPS if g.order <= 64]), st.data())
    def test_accepts_exactly_closed_subsets(self, G, data):
        s = {0} | set(data.draw(st.lists(st.integers(0, G.order - 1), max_size=6)))
        closed = naive_closure(G, s) == s
        if closed:
            assert subgroup_from_members(G, s).member_set == frozenset(s)
        else:
            with pytest.raises(GroupError):
                subgroup_from_members(G, s)

    def test_spread_components_pairwise_trivial(self):
        spread = build_spread(field_prequasifield(build_field(2, 2)))
        comps = list(spread.components.values())
        assert pairwise_trivial_intersections(comps[:2])
        assert pairwise_trivial_intersections(comps)

    def test_duplicate_nontrivial(self):
        X = subgroup_from_members(cyclic(4), [0, 2])
        assert not pairwise_trivial_intersections([X, X])

    def test_vacuous(self):
        X = subgroup_from_members(cyclic(4), [0, 2])
        assert pairwise_trivial_intersections([X])

    def test_mixed_parents(self):
        with pytest.raises(GroupError):
            pairwise_trivial_intersections([subgroup_from_members(cyclic(4), [0]),
                                            subgroup_from_members(cyclic(2), [0])])


class TestHistogram:
    def test_constant(self):
        G = elementary_abelian(2, 4)
        f = FunctionTable(G, cyclic(2), [0] * 16)
        assert coset_difference_histogram(f, 3) == {0: 16, 1: 0}

    def test_homomorphism(self):
        G = cyclic(4)
        f = FunctionTable(G, G, [0, 1, 2, 3])
        assert coset_difference_histogram(f, 1) == {0: 0, 1: 4, 2: 0, 3: 0}

    def test_identity_rejected(self):
        f = FunctionTable(cyclic(4), cyclic(4), [0, 1, 2, 3])
        with pytest.raises(GroupError):
            coset_difference_histogram(f, 0)

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from([g for g in ALL_GROUPS if g.order > 1]),
           st.sampled_from([cyclic(2), cyclic(3), quaternion8()]), st.data())
    def test_total_mass(self, G, H, data):
        values = data.draw(st.lists(st.integers(0, H.order - 1), min_size=G.order, max_size=G.order))
        f = FunctionTable(G, H, values)
        z = data.draw(st.integers(1, G.order - 1))
        hist = coset_difference_histogram(f, z)
        assert sum(hist.values()) == G.order
        # oracle: direct loop
        expect = {h: 0 for h in range(H.order)}
        for x in range(G.order):
            expect[int(H.table[values[int(G.table[x, z])], H.inv(values[x])])] += 1
        assert hist == expect
