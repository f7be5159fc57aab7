import itertools
from fractions import Fraction

import pytest

from matcat.canon import canonical_family, certificate, relabel_family
from matcat.core import mask_of, popcount, uniform
from matcat.named import P8_CIRCUIT_HYPERPLANES, p8
from matcat.paving import (
    BudgetExceeded,
    IsetSearch,
    NotIndependent,
    count_nonsparse_paving,
    count_self_dual_sparse,
    enumerate_isets_orderly,
    estimate_iset_count,
    johnson_graph,
    load_iset_checkpoint,
    paving_total,
    save_iset_checkpoint,
    sparse_paving_from_independent_set,
)
from matcat.props import classify


def brute_force_iset_orbits(g):
    """All independent sets deduped by minimum relabeling (plus complement)."""
    full = (1 << g.n) - 1
    verts = g.vertices
    isets = [()]
    stack = [((), 0)]
    while stack:
        members, start = stack.pop()
        for i in range(start, len(verts)):
            v = verts[i]
            if any(g.adjacent(v, u) for u in members):
                continue
            nxt = members + (v,)
            isets.append(nxt)
            stack.append((nxt, i + 1))
    reps = set()
    for s in isets:
        best = None
        for p in itertools.permutations(range(g.n)):
            img = relabel_family(s, p)
            if best is None or img < best:
                best = img
            if g.with_complement:
                img2 = relabel_family([full ^ v for v in s], p)
                if img2 < best:
                    best = img2
        reps.add(best)
    counts = {}
    for r in reps:
        counts[len(r)] = counts.get(len(r), 0) + 1
    return counts


class TestJohnsonGraph:
    def test_j42_shape(self):
        g = johnson_graph(4, 2)
        assert len(g.vertices) == 6
        assert g.degree() == 4
        v = g.vertices[0]
        assert sum(g.adjacent(v, w) for w in g.vertices if w != v) == 4

    def test_j104_vertex_count(self):
        assert len(johnson_graph(10, 4).vertices) == 210

    def test_complement_flag(self):
        assert johnson_graph(8, 4).with_complement
        assert not johnson_graph(9, 4).with_complement

    def test_bounds(self):
        with pytest.raises(ValueError):
            johnson_graph(13, 2)


class TestSparsePavingBijection:
    def test_empty_iset_gives_uniform(self):
        m = sparse_paving_from_independent_set(6, 2, [])
        assert m == uniform(3, 6)

    def test_p8_blocks_give_p8(self):
        blocks = [mask_of(b) for b in P8_CIRCUIT_HYPERPLANES]
        m = sparse_paving_from_independent_set(8, 3, blocks)
        assert certificate(m).bytes == certificate(p8()).bytes

    def test_round_trip(self):
        blocks = [mask_of(b) for b in P8_CIRCUIT_HYPERPLANES]
        m = sparse_paving_from_independent_set(8, 3, blocks)
        assert sorted(m.circuit_hyperplanes()) == sorted(blocks)

    def test_rejects_adjacent_blocks(self):
        with pytest.raises(NotIndependent):
            sparse_paving_from_independent_set(
                6, 2, [mask_of((0, 1, 2)), mask_of((0, 1, 3))]
            )


class TestOrbitEnumeration:
    @pytest.mark.parametrize("n,k", [(5, 2), (6, 2), (6, 3), (5, 3)])
    def test_matches_brute_force(self, n, k):
        g = johnson_graph(n, k)
        assert enumerate_isets_orderly(g) == brute_force_iset_orbits(g)

    def test_matches_catalogue_counts(self, matroids6):
        for n, k in [(5, 2), (6, 2), (6, 3), (5, 3), (6, 4)]:
            g = johnson_graph(n, k)
            total = sum(enumerate_isets_orderly(g).values())
            if g.with_complement:
                total = 2 * total - count_self_dual_sparse(n, method="z2")
            cat = sum(
                1
                for m in matroids6
                if m.n == n and m.rank == k and classify(m).sparse_paving
            )
            assert total == cat, (n, k)

    def test_self_dual_methods_agree(self):
        for n in (4, 6):
            assert count_self_dual_sparse(n, "z2") == count_self_dual_sparse(
                n, "certificate"
            )

    def test_budget_and_resume(self, tmp_path):
        g = johnson_graph(7, 3)
        path = str(tmp_path / "jk.ckpt")
        search = IsetSearch(
            g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement
        )
        with pytest.raises(BudgetExceeded):
            search.run(budget=4, checkpoint_path=path, checkpoint_every=1)
        resumed = load_iset_checkpoint(path)
        counts = resumed.run()
        assert counts == enumerate_isets_orderly(johnson_graph(7, 3))

    def test_checkpoint_magic(self, tmp_path):
        path = str(tmp_path / "bad.ckpt")
        with open(path, "wb") as fh:
            fh.write(b"XXXX\x01junk")
        with pytest.raises(ValueError):
            load_iset_checkpoint(path)


class TestEstimator:
    def test_fraction_one_is_exact(self):
        g = johnson_graph(7, 3)
        exact = sum(enumerate_isets_orderly(g).values())
        rep = estimate_iset_count(g, 2, 1.0, seed=3)
        assert rep.estimate == exact
        assert rep.effective_fraction == 1.0

    def test_single_prefix_mean_is_exact(self):
        # unbiasedness: the mean of the N single-prefix estimates (fraction
        # 1/N, so each contributes below + desc*N) equals the exact count
        g = johnson_graph(7, 3)
        exact = sum(enumerate_isets_orderly(g).values())
        search = IsetSearch(
            g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement,
            max_size=2, collect=True,
        )
        search.run()
        frontier = [s for s in search.collected if len(s) == 2]
        below = sum(c for s, c in search.counts.items() if s < 2)
        mean = 0.0
        for prefix in frontier:
            sub = IsetSearch(
                g.n, g.vertices, conflict_threshold=g.k - 1,
                z2=g.with_complement, stack=[prefix],
            )
            sub.run()
            desc = sum(sub.counts.values())
            mean += (below + desc * len(frontier)) / len(frontier)
        assert mean == pytest.approx(exact)

    def test_seeded_determinism(self):
        g = johnson_graph(7, 3)
        a = estimate_iset_count(g, 3, 0.5, seed=11)
        b = estimate_iset_count(g, 3, 0.5, seed=11)
        assert a == b

    def test_j84_quarter_sample_brackets_exact(self):
        # single-seed estimates are high-variance (subtree sizes are very
        # skewed); the ensemble brackets the truth and its mean is close
        g = johnson_graph(8, 4)
        exact = sum(enumerate_isets_orderly(g).values())
        estimates = [
            estimate_iset_count(g, 3, 0.25, seed=s).estimate for s in range(20)
        ]
        assert min(estimates) <= exact <= max(estimates)
        mean = sum(estimates) / len(estimates)
        assert abs(mean - exact) / exact <= 0.15


class TestNonSparseCounts:
    def test_table8_outer_rows(self):
        assert count_nonsparse_paving(10, 4, only_k=9) == {(9, 1): Fraction(1)}
        assert count_nonsparse_paving(10, 4, only_k=8) == {(8, 1): Fraction(5)}

    def test_paving_totals_match_catalogue(self, matroids6):
        for n, rank in [(5, 2), (6, 2), (6, 3)]:
            cat = sum(
                1
                for m in matroids6
                if m.n == n and m.rank == rank and classify(m).paving
            )
            assert paving_total(n, rank) == cat

    def test_weights_resolve_to_integers(self):
        table = count_nonsparse_paving(7, 3)
        for val in table.values():
            assert val.denominator == 1
