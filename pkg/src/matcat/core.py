"""Matroids stored by their hyperplane family, with rank/closure/flat algebra.

A matroid on ground set {0, ..., n-1} is kept as (n, rank, hyperplanes) where
each hyperplane is a bitmask (bit i set <=> element i present).  The
hyperplane family determines everything else; derived objects (flats, rank
table, circuits, bases) are computed lazily and cached per instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property


class AxiomViolation(ValueError):
    """Input family is not the hyperplane family of any matroid."""


class NotCircuitHyperplane(ValueError):
    """relax() target is not both a circuit and a hyperplane."""


class RankZero(ValueError):
    """Operation undefined on rank-0 matroids."""


class EmptyGroundSet(ValueError):
    """Operation undefined on the empty ground set."""


MAX_GROUND = 15

INFINITY = float("inf")


def popcount(x: int) -> int:
    return x.bit_count()


def bits(x: int):
    """Iterate set bit positions of a mask, ascending."""
    while x:
        b = x & -x
        yield b.bit_length() - 1
        x ^= b


def mask_of(elems) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def subsets_of(mask: int):
    """All submasks of a mask, ascending as integers."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def _intersection_closure(n: int, hyps):
    """Close {E} + hyps under pairwise intersection; returns a set of masks."""
    full = (1 << n) - 1
    flats = {full}
    flats.update(hyps)
    work = list(flats)
    while work:
        f = work.pop()
        new = []
        for g in flats:
            h = f & g
            if h not in flats:
                new.append(h)
        for h in new:
            flats.add(h)
            work.append(h)
    return flats


def _grade_flats(flat_masks):
    """Rank of each flat as the longest chain from the bottom flat.

    Returns (ordered flats, ranks) with flats sorted by (rank, mask).
    """
    by_size = sorted(flat_masks, key=lambda m: (popcount(m), m))
    rank = {}
    for i, f in enumerate(by_size):
        r = 0
        for g in by_size[:i]:
            if g != f and g & f == g and rank[g] + 1 > r:
                r = rank[g] + 1
        rank[f] = r
    ordered = sorted(flat_masks, key=lambda m: (rank[m], m))
    return ordered, [rank[f] for f in ordered]


@dataclass(frozen=True)
class FlatsByRank:
    """All flats of a matroid grouped by rank (level r = top = {E})."""

    levels: tuple  # levels[k] = sorted tuple of flat masks of rank k

    def all_flats(self):
        return [f for level in self.levels for f in level]

    def count(self) -> int:
        return sum(len(level) for level in self.levels)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    detail: str = ""


class Matroid:
    """Immutable matroid; compare/hash by (n, rank, hyperplanes)."""

    def __init__(self, n: int, rank: int, hyperplanes):
        self.n = n
        self.rank = rank
        self.hyperplanes = tuple(hyperplanes)
        self.full = (1 << n) - 1

    @classmethod
    def from_hyperplanes(cls, n: int, hyps) -> "Matroid":
        """Validate a hyperplane family and infer the rank from its flats."""
        if not 0 <= n <= MAX_GROUND:
            raise AxiomViolation(f"ground size {n} outside 0..{MAX_GROUND}")
        full = (1 << n) - 1
        hyps = sorted(set(int(h) for h in hyps))
        for h in hyps:
            if h & ~full:
                raise AxiomViolation(f"mask {h:#x} uses bits beyond ground set")
            if h == full:
                raise AxiomViolation("E itself may not be a hyperplane")
        for h1, h2 in itertools.combinations(hyps, 2):
            if h1 & h2 == h1 or h1 & h2 == h2:
                raise AxiomViolation(f"not an antichain: {h1:#x} vs {h2:#x}")
        # complement form of weak circuit elimination
        for h1, h2 in itertools.combinations(hyps, 2):
            meet = h1 & h2
            outside = full & ~(h1 | h2)
            for e in bits(outside):
                need = meet | (1 << e)
                if not any(h3 & need == need for h3 in hyps):
                    raise AxiomViolation(
                        f"no hyperplane covers ({h1:#x} & {h2:#x}) + element {e}"
                    )
        if not hyps:
            return cls(n, 0, ())
        flats = _intersection_closure(n, hyps)
        ordered, ranks = _grade_flats(flats)
        rank = ranks[-1]
        hyp_rank = {f: r for f, r in zip(ordered, ranks)}
        bad = [h for h in hyps if hyp_rank[h] != rank - 1]
        if bad:
            raise AxiomViolation(f"family member {bad[0]:#x} is not at corank 1")
        return cls(n, rank, hyps)

    def __eq__(self, other):
        return (
            isinstance(other, Matroid)
            and self.n == other.n
            and self.rank == other.rank
            and self.hyperplanes == other.hyperplanes
        )

    def __hash__(self):
        return hash((self.n, self.rank, self.hyperplanes))

    def __repr__(self):
        hs = ",".join(format(h, "x") for h in self.hyperplanes) or "-"
        return f"Matroid(n={self.n}, rank={self.rank}, hyps={hs})"

    # -- flats and ranks ---------------------------------------------------

    @cached_property
    def _flat_data(self):
        """(flats sorted by (rank, mask), rank list, mask -> index dict)."""
        if not self.hyperplanes:
            return [self.full], [0], {self.full: 0}
        flats = _intersection_closure(self.n, self.hyperplanes)
        ordered, ranks = _grade_flats(flats)
        return ordered, ranks, {f: i for i, f in enumerate(ordered)}

    def flats(self) -> FlatsByRank:
        ordered, ranks, _ = self._flat_data
        levels = [[] for _ in range(self.rank + 1)]
        for f, r in zip(ordered, ranks):
            levels[r].append(f)
        return FlatsByRank(tuple(tuple(level) for level in levels))

    @cached_property
    def rank_table(self):
        """rank_table[mask] = rank of the subset, for every mask < 2^n."""
        flats, ranks, _ = self._flat_data
        nf = len(flats)
        # up[i] = bitset (over flat indices) of flats containing flat i
        up = [0] * nf
        for i, fi in enumerate(flats):
            acc = 0
            for j, fj in enumerate(flats):
                if fi & fj == fi:
                    acc |= 1 << j
            up[i] = acc
        elem_filter = [0] * self.n
        for e in range(self.n):
            acc = 0
            b = 1 << e
            for j, fj in enumerate(flats):
                if fj & b:
                    acc |= 1 << j
            elem_filter[e] = acc
        # join1[i][e] = index of smallest flat containing flat i plus element e
        join1 = [
            [((up[i] & elem_filter[e]) & -(up[i] & elem_filter[e])).bit_length() - 1
             for e in range(self.n)]
            for i in range(nf)
        ]
        # the unique rank-0 flat sorts first, so closure(empty) has index 0
        closure_idx = [0] * (1 << self.n)
        table = [0] * (1 << self.n)
        table[0] = 0
        for m in range(1, 1 << self.n):
            low = (m & -m).bit_length() - 1
            ci = join1[closure_idx[m & (m - 1)]][low]
            closure_idx[m] = ci
            table[m] = ranks[ci]
        self._closure_idx = closure_idx
        return table

    def rank_of(self, a: int) -> int:
        return self.rank_table[a]

    def closure(self, a: int) -> int:
        self.rank_table  # ensure _closure_idx
        flats, _, _ = self._flat_data
        return flats[self._closure_idx[a]]

    # -- independence ------------------------------------------------------

    def is_independent(self, a: int) -> bool:
        return self.rank_table[a] == popcount(a)

    @cached_property
    def _circuits(self):
        table = self.rank_table
        out = []
        for m in range(1, 1 << self.n):
            p = popcount(m)
            if table[m] >= p:
                continue
            if all(table[m & ~(1 << e)] == p - 1 for e in bits(m)):
                out.append(m)
        return tuple(out)

    def circuits(self):
        return list(self._circuits)

    @cached_property
    def _bases(self):
        table = self.rank_table
        r = self.rank
        return tuple(
            m for m in range(1 << self.n) if popcount(m) == r and table[m] == r
        )

    def bases(self):
        return list(self._bases)

    def independent_sets(self):
        """(count, list) of all independent subsets."""
        table = self.rank_table
        out = [m for m in range(1 << self.n) if table[m] == popcount(m)]
        return len(out), out

    def circuit_hyperplanes(self):
        hset = set(self.hyperplanes)
        return [c for c in self._circuits if c in hset]

    # -- duality and minors --------------------------------------------------

    def dual(self) -> "Matroid":
        """Matroid with rank function r*(A) = |A| + r(E \\ A) - r(E)."""
        hyps = sorted(self.full & ~c for c in self._circuits)
        return Matroid(self.n, self.n - self.rank, hyps)

    @classmethod
    def from_rank_table(cls, n: int, table) -> "Matroid":
        """Rebuild (n, rank, hyperplanes) from a full rank table (trusted)."""
        full = (1 << n) - 1
        r = table[full]
        hyps = []
        for m in range(1 << n):
            if table[m] != r - 1:
                continue
            if all(table[m | (1 << e)] > table[m] for e in bits(full & ~m)):
                hyps.append(m)
        return cls(n, r, sorted(hyps))

    def _squeeze(self, e: int):
        """Masks of self restricted to E minus e, paired with lifted masks."""
        low = (1 << e) - 1
        for m in range(1 << (self.n - 1)):
            yield m, (m & low) | ((m & ~low) << 1)

    def delete(self, e: int) -> "Matroid":
        if not 0 <= e < self.n:
            raise ValueError(f"element {e} out of range")
        table = self.rank_table
        new = [0] * (1 << (self.n - 1))
        for m, lifted in self._squeeze(e):
            new[m] = table[lifted]
        return Matroid.from_rank_table(self.n - 1, new)

    def contract(self, e: int) -> "Matroid":
        if not 0 <= e < self.n:
            raise ValueError(f"element {e} out of range")
        table = self.rank_table
        re = table[1 << e]
        new = [0] * (1 << (self.n - 1))
        for m, lifted in self._squeeze(e):
            new[m] = table[lifted | (1 << e)] - re
        return Matroid.from_rank_table(self.n - 1, new)

    def restrict(self, keep_mask: int) -> "Matroid":
        """Delete every element outside keep_mask (relabels downward)."""
        m = self
        for e in sorted(bits(self.full & ~keep_mask), reverse=True):
            m = m.delete(e)
        return m

    # -- loops, parallelism, simplification ----------------------------------

    def loops(self) -> int:
        table = self.rank_table
        return mask_of(e for e in range(self.n) if table[1 << e] == 0)

    def coloops(self) -> int:
        table = self.rank_table
        return mask_of(
            e for e in range(self.n) if table[self.full & ~(1 << e)] == self.rank - 1
        )

    def parallel_classes(self):
        """Partition of the non-loop elements into parallel classes (masks)."""
        table = self.rank_table
        nonloops = [e for e in range(self.n) if table[1 << e] == 1]
        classes = []
        seen = 0
        for e in nonloops:
            if seen & (1 << e):
                continue
            cls_mask = 1 << e
            for f in nonloops:
                if f > e and table[(1 << e) | (1 << f)] == 1:
                    cls_mask |= 1 << f
            seen |= cls_mask
            classes.append(cls_mask)
        return classes

    def series_classes(self):
        return self.dual().parallel_classes()

    def is_simple(self) -> bool:
        return self.loops() == 0 and all(
            popcount(c) == 1 for c in self.parallel_classes()
        )

    def simplify(self) -> "Matroid":
        """Remove loops and collapse each parallel class to its least element."""
        reps = sorted((c & -c).bit_length() - 1 for c in self.parallel_classes())
        table = self.rank_table
        new = [0] * (1 << len(reps))
        for m in range(1 << len(reps)):
            lifted = 0
            for i in bits(m):
                lifted |= 1 << reps[i]
            new[m] = table[lifted]
        return Matroid.from_rank_table(len(reps), new)

    # -- relaxation, truncation ----------------------------------------------

    def relax(self, h: int) -> "Matroid":
        """Turn a circuit-hyperplane into a basis."""
        if h not in set(self.hyperplanes) or h not in set(self._circuits):
            raise NotCircuitHyperplane(f"{h:#x} is not a circuit-hyperplane")
        table = self.rank_table
        new = [max(table[m], popcount(m & h)) for m in range(1 << self.n)]
        return Matroid.from_rank_table(self.n, new)

    def truncate(self) -> "Matroid":
        if self.rank == 0:
            raise RankZero("cannot truncate a rank-0 matroid")
        cap = self.rank - 1
        table = self.rank_table
        new = [min(t, cap) for t in table]
        return Matroid.from_rank_table(self.n, new)

    # -- connectivity, rank polynomial ----------------------------------------

    def connectivity(self):
        """Tutte connectivity; INFINITY when no k-separation exists."""
        table = self.rank_table
        best = None
        for x in range(1, self.full):
            lam = table[x] + table[self.full & ~x] - self.rank
            k = lam + 1
            if min(popcount(x), self.n - popcount(x)) >= k:
                if best is None or k < best:
                    best = k
        return INFINITY if best is None else best

    def rank_polynomial(self):
        """Whitney rank generating function as a coefficient matrix.

        coeff[i][j] multiplies x^i y^j in sum_A x^(r(E)-r(A)) y^(|A|-r(A)).
        """
        table = self.rank_table
        coeff = [
            [0] * (self.n - self.rank + 1) for _ in range(self.rank + 1)
        ]
        for m in range(1 << self.n):
            coeff[self.rank - table[m]][popcount(m) - table[m]] += 1
        return coeff

    # -- validation -----------------------------------------------------------

    def validate(self, pair_limit: int = 1 << 18) -> ValidationReport:
        """Check R1, monotonicity, and submodularity from the rank table.

        Submodularity is checked on all subset pairs when 4^n <= pair_limit,
        otherwise on a deterministic stripe of pairs.
        """
        table = self.rank_table
        full = self.full
        for m in range(1 << self.n):
            if not 0 <= table[m] <= popcount(m):
                return ValidationReport(False, f"R1 fails at {m:#x}")
        for m in range(1 << self.n):
            for e in bits(full & ~m):
                if table[m] > table[m | (1 << e)]:
                    return ValidationReport(False, f"R2 fails at {m:#x}+{e}")
        total = 1 << (2 * self.n)
        step = 1 if total <= pair_limit else total // pair_limit | 1
        idx = 0
        size = 1 << self.n
        while idx < total:
            a, b = idx // size, idx % size
            if table[a & b] + table[a | b] > table[a] + table[b]:
                return ValidationReport(False, f"R3 fails at ({a:#x},{b:#x})")
            idx += step
        return ValidationReport(True)


def uniform(r: int, n: int) -> Matroid:
    """U_{r,n}: rank of A is min(r, |A|)."""
    if not 0 <= r <= n:
        raise ValueError("need 0 <= r <= n")
    if r == 0:
        return Matroid(n, 0, ())
    hyps = [m for m in range(1 << n) if popcount(m) == r - 1]
    return Matroid(n, r, sorted(hyps))


def free(n: int) -> Matroid:
    return uniform(n, n)


def from_elements(n: int, families) -> Matroid:
    """Build from hyperplanes given as element iterables or digit strings."""
    masks = []
    for fam in families:
        if isinstance(fam, str):
            fam = [int(ch, 16) for ch in fam]
        masks.append(mask_of(fam))
    return Matroid.from_hyperplanes(n, masks)
