import itertools
import random

import pytest

from matcat.core import (
    INFINITY,
    AxiomViolation,
    Matroid,
    NotCircuitHyperplane,
    RankZero,
    bits,
    free,
    from_elements,
    mask_of,
    popcount,
    uniform,
)
from matcat.named import p8


def brute_rank_from_bases(n, bases):
    """Independent oracle: r(A) = max |A & B| over bases."""

    def r(a):
        return max(popcount(a & b) for b in bases)

    return [r(a) for a in range(1 << n)]


class TestFromHyperplanes:
    def test_figure_matroid_builds_at_rank_3(self, fig1):
        assert fig1.n == 7
        assert fig1.rank == 3
        assert len(fig1.hyperplanes) == 10

    def test_empty_family_is_rank_zero_all_loops(self):
        m = Matroid.from_hyperplanes(3, [])
        assert m.rank == 0
        assert m.loops() == 0b111

    def test_all_two_subsets_of_four_is_the_free_truncation(self):
        # six 2-sets as hyperplanes determine rank 3 (U_{3,4}), where every
        # 2-set is a flat; U_{2,4} has the four singletons instead
        m = Matroid.from_hyperplanes(
            4, [mask_of(c) for c in itertools.combinations(range(4), 2)]
        )
        assert m.rank == 3
        assert m == uniform(3, 4)
        u24 = Matroid.from_hyperplanes(4, [0b0001, 0b0010, 0b0100, 0b1000])
        assert u24 == uniform(2, 4)

    def test_rejects_non_antichain(self):
        with pytest.raises(AxiomViolation):
            Matroid.from_hyperplanes(3, [0b001, 0b011])

    def test_rejects_full_ground_set(self):
        with pytest.raises(AxiomViolation):
            Matroid.from_hyperplanes(3, [0b111])

    def test_rejects_weak_elimination_failure(self):
        # {0} and {1}: element 2 outside both, no hyperplane covers {2}
        with pytest.raises(AxiomViolation):
            Matroid.from_hyperplanes(3, [0b001, 0b010])

    def test_family_01_12_on_three_elements_is_a_valid_matroid(self):
        # loop at 1 plus two coloops; the hyperplane axioms hold vacuously
        m = Matroid.from_hyperplanes(3, [0b011, 0b110])
        assert m.rank == 2
        assert m.loops() == 0b010
        assert m.validate().ok


class TestFlatsAndRank:
    def test_figure_matroid_has_19_flats(self, fig1):
        flats = fig1.flats()
        assert flats.count() == 19
        assert [len(level) for level in flats.levels] == [1, 7, 10, 1]
        assert flats.levels[2] == fig1.hyperplanes

    def test_rank0_single_flat(self):
        m = Matroid.from_hyperplanes(4, [])
        assert m.flats().count() == 1

    def test_u24_has_six_flats(self):
        assert uniform(2, 4).flats().count() == 6

    def test_figure_rank_queries(self, fig1):
        assert fig1.rank_of(mask_of((0, 1))) == 2
        assert fig1.rank_of(0) == 0
        assert fig1.rank_of(mask_of((2, 3, 5))) == 2

    def test_figure_closures(self, fig1):
        assert fig1.closure(mask_of((2, 3))) == mask_of((2, 3, 5, 6))
        for level in fig1.flats().levels:
            for f in level:
                assert fig1.closure(f) == f
        assert uniform(2, 4).closure(0b0011) == 0b1111

    def test_intersection_closed(self, fig1):
        all_flats = fig1.flats().all_flats()
        fs = set(all_flats)
        for a, b in itertools.combinations(all_flats, 2):
            assert a & b in fs

    def test_uniform_rank_formula(self):
        for r, n in [(0, 3), (1, 4), (2, 5), (3, 5), (5, 5)]:
            m = uniform(r, n)
            for a in range(1 << n):
                assert m.rank_of(a) == min(r, popcount(a))


class TestCircuitsBasesDual:
    def test_figure_has_28_bases(self, fig1):
        assert len(fig1.bases()) == 28

    def test_u24_bases_and_circuits(self):
        m = uniform(2, 4)
        assert len(m.bases()) == 6
        assert sorted(m.circuits()) == sorted(
            mask_of(c) for c in itertools.combinations(range(4), 3)
        )

    def test_rank0_on_two(self):
        m = Matroid.from_hyperplanes(2, [])
        assert m.circuits() == [0b01, 0b10]
        assert m.bases() == [0]

    def test_independent_sets_count(self):
        count, members = uniform(2, 4).independent_sets()
        assert count == 1 + 4 + 6
        assert len(members) == count

    def test_dual_involution(self, matroids6):
        for m in matroids6:
            d = m.dual()
            assert d.rank == m.n - m.rank
            assert d.dual() == m

    def test_dual_rank_function(self, matroids6):
        rng = random.Random(7)
        for m in rng.sample(matroids6, 40):
            d = m.dual()
            for a in range(1 << m.n):
                comp = m.full & ~a
                assert d.rank_of(a) == popcount(a) + m.rank_of(comp) - m.rank

    def test_dual_of_rank0_is_free(self):
        assert Matroid.from_hyperplanes(4, []).dual() == free(4)

    def test_sparse_paving_dual_circuit_hyperplanes_complement(self):
        m = p8()
        d = m.dual()
        want = sorted(m.full & ~ch for ch in m.circuit_hyperplanes())
        assert sorted(d.circuit_hyperplanes()) == want


class TestMinors:
    def test_delete_uniform(self):
        assert uniform(2, 4).delete(3) == uniform(2, 3)

    def test_contract_uniform(self):
        assert uniform(2, 4).contract(0) == uniform(1, 3)

    def test_delete_contract_duality(self, matroids6):
        rng = random.Random(11)
        for m in rng.sample([x for x in matroids6 if x.n >= 1], 40):
            e = rng.randrange(m.n)
            assert m.delete(e).dual() == m.dual().contract(e)

    def test_rank_table_against_basis_oracle(self, matroids6):
        rng = random.Random(3)
        for m in rng.sample(matroids6, 30):
            if m.rank == 0:
                continue
            oracle = brute_rank_from_bases(m.n, m.bases())
            assert list(m.rank_table) == oracle


class TestLoopsParallelSimplify:
    def test_single_loop(self):
        m = Matroid.from_hyperplanes(1, [])
        assert m.loops() == 0b1

    def test_simplify_fixpoint(self, fig1):
        assert fig1.simplify() == fig1

    def test_simplify_collapses(self):
        # parallel pair {0,1}, coloop 2, loop 3
        table = []
        for a in range(16):
            table.append((1 if a & 0b011 else 0) + (1 if a & 0b100 else 0))
        m = Matroid.from_rank_table(4, table)
        s = m.simplify()
        assert s.n == 2 and s.rank == 2
        assert s == free(2)

    def test_coloops(self):
        assert free(3).coloops() == 0b111
        assert uniform(1, 2).coloops() == 0

    def test_series_classes_are_dual_parallel(self, matroids6):
        rng = random.Random(5)
        for m in rng.sample(matroids6, 25):
            assert m.series_classes() == m.dual().parallel_classes()


class TestRelaxTruncate:
    def test_relax_adds_one_basis(self):
        m = p8()
        before = len(m.bases())
        r = m.relax(m.circuit_hyperplanes()[0])
        assert len(r.bases()) == before + 1
        assert r.rank == m.rank and r.n == m.n

    def test_relax_rejects_non_circuit_hyperplane(self):
        with pytest.raises(NotCircuitHyperplane):
            uniform(2, 4).relax(0b0001)

    def test_truncate_free(self):
        assert free(4).truncate() == uniform(3, 4)
        assert uniform(2, 4).truncate() == uniform(1, 4)

    def test_truncate_figure_is_uniform(self, fig1):
        t = fig1.truncate()
        for a in range(1 << 7):
            assert t.rank_of(a) == min(fig1.rank_of(a), 2)
        assert t == uniform(2, 7)

    def test_truncate_rank0_raises(self):
        with pytest.raises(RankZero):
            Matroid.from_hyperplanes(2, []).truncate()


def oracle_connectivity(m):
    """Independent partition-scan oracle for Tutte connectivity."""
    best = None
    for size in range(1, m.n):
        for xs in itertools.combinations(range(m.n), size):
            x = mask_of(xs)
            lam = m.rank_of(x) + m.rank_of(m.full & ~x) - m.rank
            k = lam + 1
            if min(size, m.n - size) >= k and (best is None or k < best):
                best = k
    return INFINITY if best is None else best


class TestConnectivityPolynomial:
    def test_connectivity_against_oracle(self, matroids6):
        rng = random.Random(13)
        for m in rng.sample(matroids6, 40):
            if m.n == 0:
                continue
            assert m.connectivity() == oracle_connectivity(m)

    def test_loop_gives_connectivity_one(self):
        m = Matroid.from_rank_table(3, [0, 0, 1, 1, 1, 1, 2, 2])
        assert m.loops()
        assert m.connectivity() == 1

    def test_connectivity_self_dual(self, matroids6):
        rng = random.Random(17)
        for m in rng.sample([x for x in matroids6 if x.n >= 2], 30):
            assert m.connectivity() == m.dual().connectivity()

    def test_rank_polynomial_small(self):
        assert free(1).rank_polynomial() == [[1], [1]]  # x + 1
        loop = Matroid.from_hyperplanes(1, [])
        assert loop.rank_polynomial() == [[1, 1]]  # 1 + y

    def test_rank_polynomial_duality_and_total(self, matroids6):
        rng = random.Random(19)
        for m in rng.sample(matroids6, 30):
            rp = m.rank_polynomial()
            rd = m.dual().rank_polynomial()
            for i in range(len(rp)):
                for j in range(len(rp[0])):
                    assert rp[i][j] == rd[j][i]
            assert sum(sum(row) for row in rp) == 1 << m.n


class TestValidate:
    def test_catalogue_validates(self, matroids6):
        for m in matroids6:
            assert m.validate().ok

    def test_figure_validates(self, fig1):
        assert fig1.validate().ok

    def test_detects_submodularity_failure(self):
        # inject a non-submodular table: r({0})=0 yet r({0,1})=2
        bad = Matroid(2, 2, ())
        bad.__dict__["rank_table"] = [0, 0, 1, 2]
        assert not bad.validate().ok
