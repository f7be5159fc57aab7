"""Classification flags, counting battery, and the Ingleton violation search.

The Ingleton search runs over flat quadruples only: every term of the
inequality is unchanged when any argument is replaced by its closure, so a
violation exists iff one exists among flats.  For fixed (A, B) the remaining
(C, D) space is scanned as one vectorized table; pairs with
r(A) + r(B) = r(A u B) are skipped since the violation amount is bounded by
that modular defect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import INFINITY, Matroid, bits, popcount


class BudgetExceeded(RuntimeError):
    """A property search exceeded its configured budget."""


@dataclass(frozen=True)
class PropertyFlags:
    simple: bool
    cosimple: bool
    paving: bool
    sparse_paving: bool
    uniform: bool
    min_circuit_size: object  # int or INFINITY
    num_bases: int
    num_circuits: int
    num_flats: int
    num_hyperplanes: int
    num_independent: int
    num_circuit_hyperplanes: int
    num_loops: int
    num_coloops: int


def classify(m: Matroid) -> PropertyFlags:
    table = m.rank_table
    circuits = m._circuits
    min_circuit = min((popcount(c) for c in circuits), default=INFINITY)
    loops = popcount(m.loops())
    hyp_sizes = {popcount(h) for h in m.hyperplanes}
    paving = min_circuit >= m.rank
    sparse = paving and all(s in (m.rank - 1, m.rank) for s in hyp_sizes)
    is_uniform = all(
        table[a] == min(m.rank, popcount(a)) for a in range(1 << m.n)
    )
    simple = loops == 0 and min_circuit >= 3
    dual = m.dual()
    dual_circuits = dual._circuits
    cosimple = popcount(dual.loops()) == 0 and all(
        popcount(c) >= 3 for c in dual_circuits
    )
    n_indep = sum(1 for a in range(1 << m.n) if table[a] == popcount(a))
    hset = set(m.hyperplanes)
    return PropertyFlags(
        simple=simple,
        cosimple=cosimple,
        paving=paving,
        sparse_paving=sparse,
        uniform=is_uniform,
        min_circuit_size=min_circuit,
        num_bases=len(m._bases),
        num_circuits=len(circuits),
        num_flats=m.flats().count(),
        num_hyperplanes=len(m.hyperplanes),
        num_independent=n_indep,
        num_circuit_hyperplanes=sum(1 for c in circuits if c in hset),
        num_loops=loops,
        num_coloops=popcount(m.coloops()),
    )


@dataclass(frozen=True)
class IngletonWitness:
    a: int
    b: int
    c: int
    d: int
    lhs: int
    rhs: int


def ingleton_sides(table, a, b, c, d):
    lhs = table[a] + table[b] + table[a | b | c] + table[a | b | d] + table[c | d]
    rhs = (
        table[a | b] + table[a | c] + table[a | d] + table[b | c] + table[b | d]
    )
    return lhs, rhs


def ingleton_violating(
    m: Matroid,
    mode: str = "auto",
    violators8=None,
    budget: int | None = None,
):
    """An IngletonWitness if the inequality fails for some quadruple, else None.

    mode "full" searches quadruples directly; "minor" (9 elements) tests
    whether some single-element deletion or contraction is a known violator
    on 8 elements, per the census fact that Ingleton violation on 9 elements
    always comes from an 8-element violator minor.  "auto" picks full for
    n <= 8 and minor above when violator certificates are supplied.
    """
    if mode == "auto":
        mode = "minor" if m.n > 8 and violators8 is not None else "full"
    if mode == "minor":
        if violators8 is None:
            raise ValueError("minor mode needs the 8-element violator certificates")
        return _ingleton_by_minor(m, violators8)
    return _ingleton_full(m, budget)


def _ingleton_full(m: Matroid, budget=None):
    table = np.asarray(m.rank_table, dtype=np.int16)
    flats, ranks, _ = m._flat_data
    fl = np.asarray(flats, dtype=np.int32)
    nf = len(fl)
    union_rank = table[np.bitwise_or.outer(fl, fl)]
    work = 0
    for i in range(nf):
        a = flats[i]
        ra = ranks[i]
        ua = np.bitwise_or(fl, a)
        pa = table[ua].astype(np.int32)
        for j in range(i + 1, nf):
            b = flats[j]
            u = a | b
            s = ra + ranks[j] - int(table[u])
            if s <= 0:
                continue
            work += nf * nf
            if budget is not None and work > budget:
                raise BudgetExceeded(f"ingleton search passed {budget} table cells")
            p = table[np.bitwise_or(fl, u)].astype(np.int32) - pa - table[
                np.bitwise_or(fl, b)
            ].astype(np.int32)
            grid = p[:, None] + p[None, :] + union_rank
            k = int(grid.argmax())
            ci, di = divmod(k, nf)
            if int(grid[ci, di]) > -s:
                c, d = flats[ci], flats[di]
                lhs, rhs = ingleton_sides(m.rank_table, a, b, c, d)
                return IngletonWitness(a, b, c, d, lhs, rhs)
    return None


def _lift_mask(mask: int, e: int) -> int:
    low = (1 << e) - 1
    return (mask & low) | ((mask & ~low) << 1)


def _ingleton_by_minor(m: Matroid, violators8):
    certs = set(violators8)
    from .canon import certificate_for

    for e in range(m.n):
        for child, contracted in ((m.delete(e), False), (m.contract(e), True)):
            cb = certificate_for(child.n, child.rank, child.hyperplanes).bytes
            if cb not in certs:
                continue
            w = _ingleton_full(child)
            extra = (1 << e) if contracted else 0
            quad = [_lift_mask(x, e) | extra for x in (w.a, w.b, w.c, w.d)]
            lhs, rhs = ingleton_sides(m.rank_table, *quad)
            if lhs <= rhs:  # lifted witness must stay strict
                raise AssertionError("witness lifting failed")
            return IngletonWitness(*quad, lhs, rhs)
    return None


def ingleton_violators(matroids):
    """Subset of an iterable of matroids that violate Ingleton (full search)."""
    return [m for m in matroids if _ingleton_full(m) is not None]
