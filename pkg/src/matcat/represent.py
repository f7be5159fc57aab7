"""Representability over GF(2), GF(3), GF(4), GF(5) by backtracking search.

A candidate matrix fixes one basis of the matroid to an identity block; the
zero pattern of every other column is forced by its fundamental circuit, a
spanning forest of the nonzero positions is normalized to 1 (projective
scaling), and the remaining entries range over the nonzero field elements.
A column assignment survives only while every subset of the processed
columns has matrix rank equal to matroid rank, so a completed matrix is a
verified representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Matroid, bits, mask_of, popcount


class GF:
    """Arithmetic tables for GF(q), q in {2,3,4,5} (GF(4) via x^2+x+1)."""

    _cache = {}

    def __new__(cls, q: int):
        if q in cls._cache:
            return cls._cache[q]
        self = super().__new__(cls)
        if q in (2, 3, 5):
            add = [[(a + b) % q for b in range(q)] for a in range(q)]
            mul = [[(a * b) % q for b in range(q)] for a in range(q)]
            neg = [(-a) % q for a in range(q)]
        elif q == 4:
            add = [[a ^ b for b in range(4)] for a in range(4)]

            def m4(a, b):
                r = 0
                x = a
                for i in range(2):
                    if (b >> i) & 1:
                        r ^= x << i
                for bit in (3, 2):
                    if r & (1 << bit):
                        r ^= 0b111 << (bit - 2)
                return r

            mul = [[m4(a, b) for b in range(4)] for a in range(4)]
            neg = list(range(4))
        else:
            raise ValueError("supported fields: GF(2), GF(3), GF(4), GF(5)")
        inv = [0] * q
        for a in range(1, q):
            inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
        self.q = q
        self.add = add
        self.mul = mul
        self.neg = neg
        self.inv = inv
        cls._cache[q] = self
        return self

    def matrix_rank(self, rows, ncols):
        """Rank of a list-of-lists matrix over the field (destructive copy)."""
        m = [row[:] for row in rows]
        rank = 0
        for c in range(ncols):
            piv = None
            for i in range(rank, len(m)):
                if m[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            iv = self.inv[m[rank][c]]
            m[rank] = [self.mul[iv][x] for x in m[rank]]
            for i in range(len(m)):
                if i != rank and m[i][c]:
                    f = m[i][c]
                    m[i] = [
                        self.add[x][self.neg[self.mul[f][y]]]
                        for x, y in zip(m[i], m[rank])
                    ]
            rank += 1
            if rank == len(m):
                break
        return rank


@dataclass(frozen=True)
class RepresentationMatrix:
    q: int
    entries: tuple  # rank rows of n field elements; column i <-> element i

    def column_rank(self, subset_mask: int, gf: GF | None = None) -> int:
        gf = gf or GF(self.q)
        cols = list(bits(subset_mask))
        rows = [[row[c] for c in cols] for row in self.entries]
        return gf.matrix_rank(rows, len(cols))


def verify_representation(m: Matroid, rep: RepresentationMatrix) -> bool:
    """Full check of r(A) = column rank for every one of the 2^n subsets."""
    gf = GF(rep.q)
    table = m.rank_table
    return all(
        rep.column_rank(a, gf) == table[a] for a in range(1 << m.n)
    )


def representable(m: Matroid, q: int):
    """A RepresentationMatrix over GF(q), or None when none exists."""
    gf = GF(q)
    if m.rank == 0:
        return RepresentationMatrix(q, ())
    if m.loops() and m.rank > 0:
        # loops are zero columns; represent the loopless part and pad
        keep = m.full & ~m.loops()
        sub = m.restrict(keep)
        rep = representable(sub, q)
        if rep is None:
            return None
        kept = sorted(bits(keep))
        entries = []
        for row in rep.entries:
            full_row = [0] * m.n
            for idx, e in enumerate(kept):
                full_row[e] = row[idx]
            entries.append(tuple(full_row))
        return RepresentationMatrix(q, tuple(entries))

    table = m.rank_table
    r = m.rank
    basis = min(m._bases)
    basis_elems = sorted(bits(basis))
    row_of = {e: i for i, e in enumerate(basis_elems)}
    others = [e for e in range(m.n) if not (basis >> e) & 1]

    # forced zero pattern from fundamental circuits
    support = {}
    for e in others:
        circ = [
            b
            for b in basis_elems
            if table[(basis & ~(1 << b)) | (1 << e)] == r
        ]
        support[e] = circ

    # spanning forest over (row, column) incidences pins entries to 1
    forest = set()
    comp = {("r", i): ("r", i) for i in range(r)}
    comp.update({("c", e): ("c", e) for e in others})

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    unknowns = []
    for e in others:
        for b in support[e]:
            ra, rb = find(("r", row_of[b])), find(("c", e))
            if ra != rb:
                comp[ra] = rb
                forest.add((row_of[b], e))
            else:
                unknowns.append((row_of[b], e))

    cols = {e: [0] * r for e in others}
    for e in others:
        for b in support[e]:
            if (row_of[b], e) in forest:
                cols[e][row_of[b]] = 1

    unknown_by_col = {e: [u for u in unknowns if u[1] == e] for e in others}
    nonzero = list(range(1, q))

    processed_elems = basis_elems[:]
    matrix = [[0] * m.n for _ in range(r)]
    for i, b in enumerate(basis_elems):
        matrix[i][b] = 1

    def check_new_column(e):
        elems = processed_elems + [e]
        for size in range(1, min(r, len(elems)) + 1):
            for sub in itertools.combinations(elems, size):
                if e not in sub:
                    continue
                mask = mask_of(sub)
                rows = [[matrix[i][c] for c in sub] for i in range(r)]
                if gf.matrix_rank(rows, size) != table[mask]:
                    return False
        return True

    def assign(idx):
        if idx == len(others):
            return True
        e = others[idx]
        slots = unknown_by_col[e]
        for values in itertools.product(nonzero, repeat=len(slots)):
            col = cols[e][:]
            for (i, _), v in zip(slots, values):
                col[i] = v
            for i in range(r):
                matrix[i][e] = col[i]
            if check_new_column(e):
                processed_elems.append(e)
                if assign(idx + 1):
                    return True
                processed_elems.pop()
        for i in range(r):
            matrix[i][e] = 0
        return False

    if not assign(0):
        return None
    rep = RepresentationMatrix(q, tuple(tuple(row) for row in matrix))
    assert verify_representation(m, rep)
    return rep


def excluded_minors(matroids, q: int, representable_cache=None):
    """Matroids not representable over GF(q) whose single-element deletions
    and contractions all are; input must be minor-closed (a full catalogue).
    """
    from .canon import certificate_for

    cache = representable_cache if representable_cache is not None else {}

    def rep_by_cert(mat):
        cert = certificate_for(mat.n, mat.rank, mat.hyperplanes).bytes
        if cert not in cache:
            cache[cert] = representable(mat, q) is not None
        return cache[cert]

    out = []
    for m in matroids:
        if rep_by_cert(m):
            continue
        minors_ok = all(
            rep_by_cert(child)
            for e in range(m.n)
            for child in (m.delete(e), m.contract(e))
        )
        if minors_ok:
            out.append(m)
    return out
