"""Isomorph-free generation of all matroids on up to N elements.

Canonical construction path: every modular-cut extension of a parent is
canonically labelled, and a child survives only when its new element lies in
the orbit of the element with the lowest canonical label; isomorphic
survivors of the same parent are then filtered by certificate.  Parents are
independent, so levels parallelize over a worker pool without affecting the
(sorted) output.
"""

from __future__ import annotations

import multiprocessing
import os
from dataclasses import dataclass, field

from .canon import certificate_for, element_has_minimal_signature, first_cell_elements
from .core import Matroid, bits
from .lattice import FlatLattice


class ResourceBudgetExceeded(RuntimeError):
    """Extension-candidate budget breached; checkpoint (if any) was written."""


def pack_masks(masks) -> bytes:
    return b"".join(m.to_bytes(2, "big") for m in masks)


def unpack_masks(blob: bytes) -> tuple:
    return tuple(
        int.from_bytes(blob[i : i + 2], "big") for i in range(0, len(blob), 2)
    )


@dataclass(frozen=True)
class MatroidRecord:
    """Compact enumeration record: certificate bytes double as the sort key."""

    n: int
    rank: int
    hyp_bytes: bytes
    cert: bytes

    @property
    def hyperplanes(self) -> tuple:
        return unpack_masks(self.hyp_bytes)

    def matroid(self) -> Matroid:
        return Matroid(self.n, self.rank, self.hyperplanes)

    def sort_key(self):
        return (self.n, self.rank, self.cert)


def _record(n, rank, hyps, cert=None) -> MatroidRecord:
    if cert is None:
        cert = certificate_for(n, rank, hyps).bytes
    return MatroidRecord(n, rank, pack_masks(hyps), cert)


EMPTY_MATROID = MatroidRecord(0, 0, b"", bytes([0, 0]))


def extend_all(parent: Matroid) -> list:
    """Accepted children of one parent, certificate-deduplicated and sorted."""
    return _extend_records(parent.n, parent.rank, parent.hyperplanes)[0]


def _extend_records(n, rank, hyps):
    """(accepted child records, modular-cut candidate count) for one parent."""
    lat = FlatLattice(Matroid(n, rank, hyps))
    accepted = {}
    candidates = 0
    for cut in lat.modular_cuts():
        candidates += 1
        child_hyps, child_rank = lat.extension_hyperplanes(cut)
        # cheap necessary tests: the lowest canonical label lives in the
        # first cell of the root refinement, so the new element must have a
        # minimal one-round signature and then sit in that first cell
        if not element_has_minimal_signature(n + 1, child_hyps, n):
            continue
        if n not in first_cell_elements(n + 1, child_hyps):
            continue
        cert = certificate_for(n + 1, child_rank, child_hyps)
        ids = cert.orbit_ids()
        if ids[n] != ids[cert.perm.index(0)]:
            continue
        if cert.bytes not in accepted:
            accepted[cert.bytes] = MatroidRecord(
                n + 1, child_rank, pack_masks(child_hyps), cert.bytes
            )
    return sorted(accepted.values(), key=MatroidRecord.sort_key), candidates


def _worker(args):
    n, rank, hyps = args
    return _extend_records(n, rank, hyps)


def default_jobs() -> int:
    env = os.environ.get("MATCAT_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class EnumerationJob:
    """State of a level-by-level enumeration, checkpointable between batches."""

    max_n: int
    level: int = 0
    parents: list = field(default_factory=lambda: [EMPTY_MATROID])
    next_parent: int = 0
    children: list = field(default_factory=list)
    emitted: list = field(default_factory=lambda: [EMPTY_MATROID])
    candidates_used: int = 0


def enumerate_matroids(
    max_n: int,
    jobs: int = 1,
    budget: int | None = None,
    checkpoint_path: str | None = None,
    checkpoint_every: int = 64,
    resume_job: EnumerationJob | None = None,
    progress=None,
) -> list:
    """All matroids with 0..max_n elements as sorted MatroidRecords.

    budget caps the number of modular-cut candidates examined; on breach a
    checkpoint is written (when a path is configured) and
    ResourceBudgetExceeded is raised.
    """
    if not 0 <= max_n <= 9:
        raise ValueError("supported range is 0 <= max_n <= 9")
    job = resume_job if resume_job is not None else EnumerationJob(max_n)
    if job.max_n != max_n:
        raise ValueError(f"checkpoint was for max_n={job.max_n}")
    pool = None
    if jobs > 1:
        pool = multiprocessing.Pool(jobs)
    try:
        while job.level < max_n:
            _advance_level(job, pool, budget, checkpoint_path, checkpoint_every, progress)
        return sorted(job.emitted, key=MatroidRecord.sort_key)
    finally:
        if pool is not None:
            pool.close()
            pool.join()


def _advance_level(job, pool, budget, checkpoint_path, checkpoint_every, progress):
    parents = job.parents
    pending = [
        (rec.n, rec.rank, rec.hyperplanes) for rec in parents[job.next_parent:]
    ]
    if pool is None:
        results = map(_worker, pending)
    else:
        results = pool.imap(_worker, pending, chunksize=4)
    done = job.next_parent
    for recs, cand in results:
        job.children.extend(recs)
        job.candidates_used += cand
        done += 1
        job.next_parent = done
        if checkpoint_path and done % checkpoint_every == 0:
            save_checkpoint(job, checkpoint_path)
        if progress and done % 64 == 0:
            progress(job.level + 1, done, len(parents), len(job.children))
        if budget is not None and job.candidates_used > budget:
            if checkpoint_path:
                save_checkpoint(job, checkpoint_path)
            raise ResourceBudgetExceeded(
                f"{job.candidates_used} extension candidates exceed budget {budget}"
            )
    level_children = sorted(set(job.children), key=MatroidRecord.sort_key)
    job.level += 1
    job.parents = level_children
    job.next_parent = 0
    job.children = []
    job.emitted.extend(level_children)
    if checkpoint_path:
        save_checkpoint(job, checkpoint_path)


# -- checkpoint serialization (line-oriented text) ---------------------------

_CKPT_HEADER = "#matcat-enum-checkpoint v1"


def _rec_line(rec: MatroidRecord) -> str:
    hs = ",".join(format(h, "x") for h in rec.hyperplanes) or "-"
    return f"{rec.n} {rec.rank} {hs} {rec.cert.hex()}"


def _rec_parse(line: str) -> MatroidRecord:
    ns, rs, hs, cert = line.split()
    hyps = () if hs == "-" else tuple(int(t, 16) for t in hs.split(","))
    return MatroidRecord(int(ns), int(rs), pack_masks(hyps), bytes.fromhex(cert))


def save_checkpoint(job: EnumerationJob, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{_CKPT_HEADER}\n")
        fh.write(
            f"max_n={job.max_n} level={job.level} next_parent={job.next_parent} "
            f"candidates={job.candidates_used}\n"
        )
        for tag, records in (
            ("P", job.parents),
            ("C", job.children),
            ("E", job.emitted),
        ):
            for rec in records:
                fh.write(f"{tag} {_rec_line(rec)}\n")
    os.replace(tmp, path)


def load_checkpoint(path: str) -> EnumerationJob:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != _CKPT_HEADER:
            raise ValueError(f"bad checkpoint header: {header!r}")
        meta = dict(kv.split("=") for kv in fh.readline().split())
        job = EnumerationJob(
            max_n=int(meta["max_n"]),
            level=int(meta["level"]),
            next_parent=int(meta["next_parent"]),
            parents=[],
            children=[],
            emitted=[],
            candidates_used=int(meta["candidates"]),
        )
        for line in fh:
            tag, rest = line.rstrip("\n").split(" ", 1)
            rec = _rec_parse(rest)
            {"P": job.parents, "C": job.children, "E": job.emitted}[tag].append(rec)
    return job


# -- tabulation ---------------------------------------------------------------


def count_matrix(records, max_n: int):
    """counts[r][n] in the rank-by-size layout."""
    counts = [[0] * (max_n + 1) for _ in range(max_n + 1)]
    for rec in records:
        counts[rec.rank][rec.n] += 1
    return counts


def totals_by_n(records, max_n: int):
    totals = [0] * (max_n + 1)
    for rec in records:
        totals[rec.n] += 1
    return totals


# -- brute-force oracle --------------------------------------------------------


def brute_force_enumerate(n: int):
    """Every matroid on n elements via cocircuit antichains; certificate-deduped.

    Returns (records sorted by certificate, labeled_count).  Exponential in
    the antichain lattice; intended for n <= 5.
    """
    if n > 5:
        raise ValueError("oracle supports n <= 5")
    full = (1 << n) - 1
    masks = list(range(1, full + 1))
    labeled = 0
    seen = {}

    def candidates(chosen):
        nonlocal labeled
        hyps = sorted(full & ~c for c in chosen)
        try:
            m = Matroid.from_hyperplanes(n, hyps)
        except Exception:
            return
        labeled += 1
        cert = certificate_for(m.n, m.rank, m.hyperplanes)
        if cert.bytes not in seen:
            seen[cert.bytes] = MatroidRecord(
                m.n, m.rank, pack_masks(m.hyperplanes), cert.bytes
            )

    def grow(chosen, start):
        candidates(chosen)
        for i in range(start, len(masks)):
            c = masks[i]
            if any(c & d == c or c & d == d for d in chosen):
                continue
            grow(chosen + [c], i + 1)

    grow([], 0)
    return sorted(seen.values(), key=MatroidRecord.sort_key), labeled


@dataclass(frozen=True)
class DualityReport:
    ok: bool
    checked: int
    missing: tuple = ()
    asymmetric_cells: tuple = ()


def verify_duality_closure(records) -> DualityReport:
    """Check each complete n-level is closed under duality with rank symmetry."""
    by_n = {}
    for rec in records:
        by_n.setdefault(rec.n, []).append(rec)
    missing = []
    asym = []
    checked = 0
    for n, recs in sorted(by_n.items()):
        certs = {rec.cert for rec in recs}
        cells = {}
        for rec in recs:
            cells[rec.rank] = cells.get(rec.rank, 0) + 1
            d = rec.matroid().dual()
            checked += 1
            dcert = certificate_for(d.n, d.rank, d.hyperplanes).bytes
            if dcert not in certs:
                missing.append((n, rec.cert.hex()))
        for r, c in cells.items():
            if cells.get(n - r, 0) != c:
                asym.append((n, r, c, cells.get(n - r, 0)))
    return DualityReport(not missing and not asym, checked, tuple(missing), tuple(asym))


def labelled_count_from_classes(records) -> int:
    """Sum of n!/|Aut| over records; the orbit-stabilizer cross-check."""
    total = 0
    for rec in records:
        cert = certificate_for(rec.n, rec.rank, rec.hyperplanes)
        total += _factorial(rec.n) // cert.aut_order
    return total


def _factorial(n):
    return 1 if n <= 1 else n * _factorial(n - 1)
