"""Paving-matroid pipelines over Johnson graphs and their auxiliary graphs.

Independent sets in J(n, d+1) are circuit-hyperplane families of sparse
paving matroids of rank d+1; orbits are enumerated isomorph-freely by
canonical augmentation: a grown set survives only when the added vertex
lies in the automorphism orbit of the canonical deletion vertex, with
same-parent survivors deduplicated by canonical form.  At n = 2(d+1) the
group gains the complementation involution and orbits then pair each
matroid with its dual.

Non-sparse counting fixes a largest block {0..k-1}, enumerates independent
sets of the auxiliary conflict graph G(k) under the block stabilizer, and
weights each completed matroid by 1/c where c is the number of automorphism
orbits on its size-k hyperplanes.
"""

from __future__ import annotations

import itertools
import pickle
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .canon import canonical_family, certificate_for, relabel_mask, _compose, _invert
from .core import Matroid, mask_of, popcount
from .named import sparse_paving


class BudgetExceeded(RuntimeError):
    """Node budget breached; a checkpoint was written when configured."""


class NotIndependent(ValueError):
    """Vertex family is not independent in the Johnson graph."""


@dataclass(frozen=True)
class JohnsonGraph:
    n: int
    k: int
    vertices: tuple  # all k-subset masks, ascending

    @property
    def with_complement(self) -> bool:
        return self.n == 2 * self.k

    def adjacent(self, v: int, w: int) -> bool:
        return popcount(v & w) == self.k - 1

    def degree(self) -> int:
        return self.k * (self.n - self.k)


def johnson_graph(n: int, k: int) -> JohnsonGraph:
    if not 1 <= k < n <= 12:
        raise ValueError("need 1 <= k < n <= 12")
    verts = [mask_of(c) for c in itertools.combinations(range(n), k)]
    return JohnsonGraph(n, k, tuple(sorted(verts)))


def sparse_paving_from_independent_set(n: int, d: int, iset) -> Matroid:
    blocks = list(iset)
    for v, w in itertools.combinations(blocks, 2):
        if popcount(v & w) == d:
            raise NotIndependent(f"{v:#x} and {w:#x} meet in {d} points")
    if n <= d + 1:
        raise ValueError("degenerate: ground set must exceed rank")
    return sparse_paving(n, d + 1, blocks)


def paving_from_blocks(n: int, d: int, blocks) -> Matroid:
    """Paving matroid of rank d+1 whose d-partition blocks of size > d are given."""
    hyps = list(blocks)
    for small in itertools.combinations(range(n), d):
        sm = mask_of(small)
        if not any(sm & b == sm for b in blocks):
            hyps.append(sm)
    return Matroid.from_hyperplanes(n, sorted(hyps))


# -- canonical augmentation over a vertex family ------------------------------


@dataclass
class _FamilyCanon:
    value: tuple
    deletion_member: int          # a mask belonging to the family
    member_orbit: dict            # mask -> orbit id


def _family_canon(n: int, masks: tuple, z2: bool, cells=None) -> _FamilyCanon:
    full = (1 << n) - 1
    cf1 = canonical_family(n, masks, cells=cells)
    mixing = None
    chosen, comp_side = cf1, False
    if z2:
        comp = tuple(sorted(full ^ m for m in masks))
        cf2 = canonical_family(n, comp, cells=cells)
        if cf2.masks < cf1.masks:
            chosen, comp_side = cf2, True
        if cf2.masks == cf1.masks:
            # tau maps the complemented family back onto the family
            mixing = _compose(_invert(cf1.perm), cf2.perm)
    # orbits of family members under the (possibly extended) automorphisms
    parent = {m: m for m in masks}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for g in cf1.generators:
        for m in masks:
            union(m, relabel_mask(m, g))
    if mixing is not None:
        for m in masks:
            union(m, relabel_mask(full ^ m, mixing))
    # canonical deletion: member whose canonical image is largest
    if masks:
        if not comp_side:
            deletion = max(masks, key=lambda m: relabel_mask(m, cf1.perm))
        else:
            w = max(
                (full ^ m for m in masks),
                key=lambda c: relabel_mask(c, cf2.perm),
            )
            deletion = full ^ w
    else:
        deletion = -1
    orbit = {m: find(m) for m in masks}
    return _FamilyCanon(chosen.masks, deletion, orbit)


@dataclass
class IsetSearch:
    """Checkpointable orbit enumeration of independent sets of a graph."""

    n: int
    vertices: tuple
    conflict_threshold: int       # adjacency: intersection size >= threshold
    z2: bool = False
    cells: tuple = None
    counts: dict = field(default_factory=dict)
    stack: list = field(default_factory=lambda: [()])
    nodes: int = 0
    max_size: int | None = None
    collect: bool = False
    collected: list = field(default_factory=list)

    def _conflicts(self, v, members):
        return any(popcount(v & u) >= self.conflict_threshold for u in members)

    def _children(self, members):
        """Accepted canonical augmentations of one family."""
        out = {}
        member_set = set(members)
        for v in self.vertices:
            if v in member_set or self._conflicts(v, members):
                continue
            child = tuple(sorted(members + (v,)))
            fc = _family_canon(self.n, child, self.z2, self.cells)
            if fc.member_orbit[v] != fc.member_orbit[fc.deletion_member]:
                continue
            if fc.value not in out:
                out[fc.value] = child
        return [out[v] for v in sorted(out)]

    def run(self, budget: int | None = None, checkpoint_path: str | None = None,
            checkpoint_every: int = 5000):
        while self.stack:
            members = self.stack.pop()
            self.nodes += 1
            size = len(members)
            self.counts[size] = self.counts.get(size, 0) + 1
            if self.collect:
                self.collected.append(members)
            if self.max_size is not None and size >= self.max_size:
                continue
            for child in reversed(self._children(members)):
                self.stack.append(child)
            if checkpoint_path and self.nodes % checkpoint_every == 0:
                save_iset_checkpoint(self, checkpoint_path)
            if budget is not None and self.nodes > budget:
                if checkpoint_path:
                    save_iset_checkpoint(self, checkpoint_path)
                raise BudgetExceeded(f"{self.nodes} nodes exceed budget {budget}")
        return self.counts


_CKPT_MAGIC = b"MCJK"
_CKPT_VERSION = 1


def save_iset_checkpoint(search: IsetSearch, path: str) -> None:
    payload = {
        "n": search.n,
        "vertices": search.vertices,
        "conflict_threshold": search.conflict_threshold,
        "z2": search.z2,
        "cells": search.cells,
        "counts": search.counts,
        "stack": search.stack,
        "nodes": search.nodes,
        "max_size": search.max_size,
    }
    blob = _CKPT_MAGIC + bytes([_CKPT_VERSION]) + pickle.dumps(payload)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    import os

    os.replace(tmp, path)


def load_iset_checkpoint(path: str) -> IsetSearch:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _CKPT_MAGIC or blob[4] != _CKPT_VERSION:
        raise ValueError("bad checkpoint magic/version")
    payload = pickle.loads(blob[5:])
    return IsetSearch(**payload)


def enumerate_isets_orderly(
    g: JohnsonGraph,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    resume: IsetSearch | None = None,
):
    """Count independent-set orbits of J(n,k) by size (S_n, plus Z2 if n=2k)."""
    search = resume or IsetSearch(
        g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement
    )
    return search.run(budget=budget, checkpoint_path=checkpoint_path)


def collect_iset_orbits(g: JohnsonGraph):
    """Orbit representatives themselves (families of vertex masks)."""
    search = IsetSearch(
        g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement,
        collect=True,
    )
    search.run()
    return search.collected


# -- self-dual counting --------------------------------------------------------


def count_self_dual_sparse(n: int, method: str = "certificate"):
    """Self-dual sparse paving classes of rank n/2 on n (even) elements."""
    if n % 2:
        raise ValueError("ground size must be even")
    k = n // 2
    g = johnson_graph(n, k)
    full = (1 << n) - 1
    reps = collect_iset_orbits(g)
    count = 0
    for members in reps:
        if method == "certificate":
            m = sparse_paving_from_independent_set(n, k - 1, members)
            d = m.dual()
            if (
                certificate_for(m.n, m.rank, m.hyperplanes).bytes
                == certificate_for(d.n, d.rank, d.hyperplanes).bytes
            ):
                count += 1
        elif method == "z2":
            comp = tuple(sorted(full ^ v for v in members))
            if (
                canonical_family(n, members).masks
                == canonical_family(n, comp).masks
            ):
                count += 1
        else:
            raise ValueError(f"unknown method {method!r}")
    return count


# -- sampling estimator ----------------------------------------------------------


@dataclass(frozen=True)
class EstimateReport:
    estimate: float
    exact_below_prefix: int
    frontier_size: int
    sample_size: int
    effective_fraction: float
    completions: int
    seed: int


def estimate_iset_count(
    g: JohnsonGraph, prefix_size: int, sample_fraction: float, seed: int
) -> EstimateReport:
    """Estimate total orbit count by completing a sampled prefix frontier."""
    search = IsetSearch(
        g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement,
        max_size=prefix_size, collect=True,
    )
    search.run()
    frontier = [s for s in search.collected if len(s) == prefix_size]
    below = sum(c for size, c in search.counts.items() if size < prefix_size)
    rng = random.Random(seed)
    m = max(1, round(sample_fraction * len(frontier)))
    m = min(m, len(frontier))
    sample = rng.sample(frontier, m) if frontier else []
    completions = 0
    for prefix in sample:
        sub = IsetSearch(
            g.n, g.vertices, conflict_threshold=g.k - 1, z2=g.with_complement,
            stack=[prefix],
        )
        sub.run()
        completions += sum(sub.counts.values())
    frac = m / len(frontier) if frontier else 1.0
    estimate = below + (completions / frac if frac else 0.0)
    return EstimateReport(
        estimate, below, len(frontier), m, frac, completions, seed
    )


# -- non-sparse paving counts ----------------------------------------------------


def auxiliary_graph_vertices(n: int, d: int, k: int):
    """Blocks of size d+1..k meeting the fixed block {0..k-1} in < d points."""
    k0 = (1 << k) - 1
    verts = []
    for size in range(d + 1, k + 1):
        for c in itertools.combinations(range(n), size):
            v = mask_of(c)
            if popcount(v & k0) < d:
                verts.append(v)
    return tuple(sorted(verts))


def count_nonsparse_paving(n: int, rank: int, only_k: int | None = None):
    """Weighted counts of non-sparse paving matroids keyed by
    (largest hyperplane size k, number of size-k hyperplanes).

    only_k restricts to one largest-hyperplane size; the k range near n/2
    explodes combinatorially at paper scale (n = 10), so callers budget
    those buckets explicitly.
    """
    d = rank - 1
    if d < 1:
        raise ValueError("rank must be at least 2")
    results = {}
    k_range = range(d + 2, n) if only_k is None else [only_k]
    for k in k_range:
        k0 = (1 << k) - 1
        verts = auxiliary_graph_vertices(n, d, k)
        cells = (tuple(range(k)), tuple(range(k, n)))
        search = IsetSearch(
            n, verts, conflict_threshold=d, cells=cells, collect=True
        )
        search.run()
        for members in search.collected:
            blocks = (k0,) + members
            m = paving_from_blocks(n, d, blocks)
            cert = certificate_for(m.n, m.rank, m.hyperplanes)
            k_hyps = [h for h in m.hyperplanes if popcount(h) == k]
            c = _orbit_count_on_masks(cert.generators, k_hyps)
            key = (k, len(k_hyps))
            results[key] = results.get(key, Fraction(0)) + Fraction(1, c)
    return {key: val for key, val in sorted(results.items())}


def _orbit_count_on_masks(generators, masks):
    parent = {m: m for m in masks}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators:
        for m in masks:
            a, b = find(m), find(relabel_mask(m, g))
            if a != b:
                parent[max(a, b)] = min(a, b)
    return len({find(m) for m in masks})


def paving_total(n: int, rank: int):
    """Sparse + weighted non-sparse paving classes of the given rank."""
    g = johnson_graph(n, rank)
    sparse = sum(enumerate_isets_orderly(g).values())
    if g.with_complement:
        selfdual = count_self_dual_sparse(n, method="z2")
        sparse = 2 * sparse - selfdual
    nonsparse = sum(count_nonsparse_paving(n, rank).values(), Fraction(0))
    if nonsparse.denominator != 1:
        raise AssertionError("1/c weights did not resolve to an integer")
    return sparse + int(nonsparse)
