import itertools

import numpy as np
import pytest

from psbent.algebra import build_field
from psbent.construct import (
    ConstructionError,
    DSets,
    FunctionTable,
    balanced_function,
    build_d_sets,
    fiber_sizes,
    is_balanced,
    ps_bent,
    qf_bent,
    to_vector_function,
)
from psbent.groups import as_group, cyclic, dihedral, elementary_abelian, quaternion8
from psbent.spreads import (
    INF,
    build_spread,
    field_prequasifield,
    make_partition,
    pair_space,
    solve_slope,
    spread_partition,
    twisted_nearfield9,
)
from psbent.verify import verify_bent_combinatorial, verify_bent_fourier


def dillon():
    return spread_partition(field_prequasifield(build_field(2, 2)), [0, 1], cyclic(2))


def gf8_partition(H, slopes=tuple(range(1, 8)), assignment="round-robin"):
    return spread_partition(field_prequasifield(build_field(2, 3)), list(slopes), H, assignment)


class TestDSets:
    @pytest.mark.parametrize("P", [dillon(), gf8_partition(quaternion8()), gf8_partition(cyclic(4), range(6)),
                                   gf8_partition(cyclic(2), [0, 1, 2, 3])],
                             ids=["dillon", "q8", "c4", "c2"])
    def test_sizes_and_cover(self, P):
        D = build_d_sets(P)
        q, N = P.q, P.N
        sizes = D.sizes()
        assert sizes[0] == q * N * N + q * N - N
        assert all(sizes[i] == N * (q * N - 1) for i in range(1, q))
        assert sum(sizes.values()) == P.G.order
        # D_i is the union of block i minus the identity
        for i, block in P.blocks.items():
            expect = set().union(*(S.member_set for S in block)) - {0}
            assert set(D.members(i).tolist()) == expect

    def test_bad_labels(self):
        with pytest.raises(ConstructionError):
            DSets(cyclic(4), cyclic(2), [0, 1, 2, 0])


class TestPsBent:
    def test_dillon_is_indicator_of_two_lines(self):
        P = dillon()
        f = ps_bent(P)
        lines = P.blocks[1][0].member_set | P.blocks[1][1].member_set
        assert f.values.tolist() == [int(x in lines and x != 0) for x in range(16)]
        assert f.values.sum() == 6

    def test_identity_maps_to_identity(self):
        for P in [dillon(), gf8_partition(dihedral(8))]:
            assert ps_bent(P)(0) == 0

    def test_dihedral_codomain_bent(self):
        f = ps_bent(gf8_partition(dihedral(8)))
        assert verify_bent_combinatorial(f).bent

    def test_not_balanced(self):
        assert not is_balanced(ps_bent(dillon()))
        assert not is_balanced(ps_bent(gf8_partition(quaternion8())))

    @pytest.mark.parametrize("perm", list(itertools.permutations(range(3))))
    def test_relabeling_blocks_keeps_bentness(self, perm):
        S = build_spread(field_prequasifield(build_field(2, 3)))
        sigma = S.select([0, 1, 2, 3, 4, 5])
        blocks = [[0, 1], [2, 3], [4, 5]]
        P = make_partition(sigma, cyclic(4), [blocks[t] for t in perm])
        assert verify_bent_combinatorial(ps_bent(P)).bent

    def test_relabeling_with_nonabelian_h(self):
        rng = np.random.default_rng(5)
        S = build_spread(field_prequasifield(build_field(2, 3)))
        sigma = S.select(list(range(1, 8)))
        for _ in range(4):
            order = rng.permutation(7).tolist()
            P = make_partition(sigma, quaternion8(), [[t] for t in order])
            assert verify_bent_combinatorial(ps_bent(P)).bent


class TestBalanced:
    def test_round_robin_gf9_gf3(self):
        g = balanced_function(build_field(3, 2), build_field(3, 1))
        assert fiber_sizes(g) == {0: 3, 1: 3, 2: 3}

    def test_seeded_gf8_gf2(self):
        g = balanced_function(build_field(2, 3), build_field(2, 1), "seeded-shuffle", 0)
        assert fiber_sizes(g) == {0: 4, 1: 4}
        assert g == balanced_function(build_field(2, 3), build_field(2, 1), "seeded-shuffle", 0)

    def test_seeds_differ(self):
        F, K = build_field(3, 2), build_field(3, 1)
        tables = {tuple(balanced_function(F, K, "seeded-shuffle", s).values) for s in range(10)}
        assert len(tables) == 10

    def test_divisibility(self):
        with pytest.raises(ConstructionError):
            balanced_function(build_field(3, 2), build_field(2, 2))
        # 4 divides 8, so GF(8) -> GF(4) is fine even though GF(4) is not a subfield
        assert is_balanced(balanced_function(build_field(2, 3), build_field(2, 2)))

    def test_unknown_method(self):
        with pytest.raises(ConstructionError):
            balanced_function(build_field(2, 2), build_field(2, 1), "random")

    def test_is_balanced(self):
        assert not is_balanced(FunctionTable(cyclic(4), cyclic(2), [0, 0, 0, 0]))
        assert is_balanced(FunctionTable(cyclic(4), cyclic(4), [0, 1, 2, 3]))
        assert not is_balanced(FunctionTable(cyclic(4), cyclic(3), [0, 1, 2, 0]))


class TestQfBent:
    def test_gf4_round_robin_bent(self):
        F, K = build_field(2, 2), build_field(2, 1)
        f = qf_bent(field_prequasifield(F), K, balanced_function(F, K))
        assert f.domain.order == 16
        assert verify_bent_fourier(f).bent

    def test_twisted_round_robin_bent(self):
        Q, K = twisted_nearfield9(), build_field(3, 1)
        f = qf_bent(Q, K, balanced_function(Q.field, K))
        report = verify_bent_fourier(f)
        assert report.bent and report.details["expected_norm_squared"] == 81

    def test_definition(self):
        Q, K = twisted_nearfield9(), build_field(3, 1)
        g = balanced_function(Q.field, K, "seeded-shuffle", 4)
        f = qf_bent(Q, K, g)
        ps = pair_space(Q.field, K)
        for x in range(9):
            for y in range(9):
                v = int(ps.pack(x, y))
                expect = g(0) if x == 0 else g(solve_slope(Q, x, y))
                assert f(v) == expect

    def test_infinity_component_constant(self):
        F, K = build_field(2, 2), build_field(2, 1)
        g = balanced_function(F, K, "seeded-shuffle", 1)
        f = qf_bent(field_prequasifield(F), K, g)
        S = build_spread(field_prequasifield(F), K)
        assert {int(f(v)) for v in S.components[INF].members} == {int(g(0))}

    def test_unbalanced_rejected(self):
        F, K = build_field(2, 2), build_field(2, 1)
        with pytest.raises(ConstructionError, match="balanced"):
            qf_bent(field_prequasifield(F), K, FunctionTable(F, K, [0, 0, 0, 1]))

    def test_kernel_rejected(self):
        Q = twisted_nearfield9()
        K = build_field(3, 2)
        with pytest.raises(ConstructionError, match="kernel"):
            qf_bent(Q, K, FunctionTable(Q.field, K, list(range(9))))

    def test_over_gf4(self):
        F, K = build_field(2, 4), build_field(2, 2)
        f = qf_bent(field_prequasifield(F), K, balanced_function(F, K, "seeded-shuffle", 2))
        assert f.domain.order == 256
        assert verify_bent_fourier(f).bent


def as_ps_partition(Q, K, g):
    """The partial spread partition whose ps_bent equals qf_bent minus g(0)."""
    F = Q.field
    shifted = {m: int(K.sub(g(m), g(0))) for m in range(F.order)}
    slopes = [m for m in range(F.order) if shifted[m]]
    assignment = {i: [t for t, m in enumerate(slopes) if shifted[m] == i] for i in range(1, K.order)}
    return spread_partition(Q, slopes, as_group(K), assignment, K)


@pytest.mark.parametrize("case", ["gf4", "gf9", "twisted9"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_qf_bent_is_a_ps_bent(case, seed):
    if case == "gf4":
        Q, K = field_prequasifield(build_field(2, 2)), build_field(2, 1)
    elif case == "gf9":
        Q, K = field_prequasifield(build_field(3, 2)), build_field(3, 1)
    else:
        Q, K = twisted_nearfield9(), build_field(3, 1)
    g = balanced_function(Q.field, K, "seeded-shuffle", seed)
    f = qf_bent(Q, K, g)
    P = as_ps_partition(Q, K, g)
    assert P.q == K.order and P.N == Q.order // K.order
    h = ps_bent(P)
    assert f.domain.order in (16, 81)
    assert np.array_equal(h.values, (f.values - int(g(0))) % K.p)


class TestVectorView:
    def test_ea_domain(self):
        f = ps_bent(dillon())
        fv = to_vector_function(f)
        assert fv.domain.dim == 4 and fv.codomain.order == 2
        assert fv == f

    def test_nonabelian_codomain(self):
        with pytest.raises(ConstructionError):
            to_vector_function(ps_bent(gf8_partition(quaternion8())))

    def test_characteristic_mismatch(self):
        with pytest.raises(ConstructionError):
            to_vector_function(FunctionTable(elementary_abelian(2, 2), cyclic(3), [0, 1, 2, 0]))
