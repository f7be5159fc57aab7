"""Named small matroids used throughout the test batteries.

Sparse paving matroids of rank r are specified by their circuit-hyperplanes
(r-sets pairwise meeting in at most r-2 points); hyperplanes are those
blocks plus every (r-1)-set not inside any block.
"""

from __future__ import annotations

import itertools

from .core import Matroid, mask_of, popcount


def sparse_paving(n: int, rank: int, circuit_hyperplanes) -> Matroid:
    """Matroid of the given rank whose circuit-hyperplanes are the blocks."""
    blocks = [mask_of(b) if not isinstance(b, int) else b for b in circuit_hyperplanes]
    d = rank - 1
    for b in blocks:
        if popcount(b) != rank:
            raise ValueError("circuit-hyperplane blocks must have size rank")
    for b1, b2 in itertools.combinations(blocks, 2):
        if popcount(b1 & b2) >= d:
            raise ValueError("blocks may share at most rank-2 elements")
    hyps = list(blocks)
    for small in itertools.combinations(range(n), d):
        sm = mask_of(small)
        if not any(sm & b == sm for b in blocks):
            hyps.append(sm)
    return Matroid.from_hyperplanes(n, sorted(hyps))


def figure_rank3_7pt() -> Matroid:
    """The 7-element rank-3 matroid whose lattice has ten lines."""
    lines = ["02", "34", "05", "15", "45", "16", "013", "124", "046", "2356"]
    masks = [mask_of(int(ch) for ch in s) for s in lines]
    return Matroid.from_hyperplanes(7, sorted(masks))


P8_CIRCUIT_HYPERPLANES = (
    (0, 1, 2, 7),
    (0, 1, 3, 6),
    (0, 2, 3, 5),
    (1, 2, 3, 4),
    (0, 3, 4, 7),
    (1, 2, 5, 6),
    (0, 4, 5, 6),
    (1, 4, 5, 7),
    (2, 4, 6, 7),
    (3, 5, 6, 7),
)


def p8() -> Matroid:
    return sparse_paving(8, 4, P8_CIRCUIT_HYPERPLANES)


def p1() -> Matroid:
    return p8().relax(mask_of((3, 5, 6, 7)))


def p2_prime() -> Matroid:
    return p1().relax(mask_of((0, 3, 4, 7)))


def p2_doubleprime() -> Matroid:
    return p1().relax(mask_of((1, 2, 5, 6)))


def p3() -> Matroid:
    return p1().relax(mask_of((0, 3, 4, 7))).relax(mask_of((1, 2, 5, 6)))


def ag32() -> Matroid:
    """Binary affine cube: points GF(2)^3, circuit-hyperplanes the 14 planes."""
    planes = []
    for a in range(1, 8):
        for b in (0, 1):
            pts = [p for p in range(8) if (bin(p & a).count("1") & 1) == b]
            planes.append(tuple(pts))
    return sparse_paving(8, 4, planes)


def ag32_prime() -> Matroid:
    m = ag32()
    return m.relax(m.circuit_hyperplanes()[0])


def f8() -> Matroid:
    """Ingleton-violating relaxation class of AG(3,2)' (12 of 13 relaxations)."""
    from .props import ingleton_violating

    m = ag32_prime()
    for ch in m.circuit_hyperplanes():
        cand = m.relax(ch)
        if ingleton_violating(cand) is not None:
            return cand
    raise AssertionError("no violating relaxation of AG(3,2)' found")


def vamos() -> Matroid:
    """V_8: pairs P1..P4; circuit-hyperplanes all Pi+Pj except P3+P4."""
    pairs = [(0, 1), (2, 3), (4, 5), (6, 7)]
    chs = [
        pairs[i] + pairs[j]
        for i, j in ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3))
    ]
    return sparse_paving(8, 4, chs)


def l8() -> Matroid:
    """Cube matroid: circuit-hyperplanes the 6 faces and 2 colour classes."""
    faces = []
    for bit in range(3):
        for val in (0, 1):
            faces.append(tuple(p for p in range(8) if (p >> bit) & 1 == val))
    colours = [
        tuple(p for p in range(8) if bin(p).count("1") % 2 == par) for par in (0, 1)
    ]
    return sparse_paving(8, 4, faces + colours)
