"""File-backed catalogue, property table, and the conjunctive query engine.

Catalogue files are line-oriented text: a version header, one record per
line as `<id> <n> <rank> <h1,h2,...|->` with lowercase-hex masks sorted
ascending, and a whole-file sha256 footer.  Property tables are TSV with a
fixed header; booleans are 0/1, infinities are `inf`, and columns that a
run did not compute hold `-`.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, replace

from .core import INFINITY, Matroid
from .orderly import MatroidRecord, pack_masks

CATALOGUE_HEADER = "#matcat-catalogue v1"
TABLE_HEADER = "#matcat-properties v1"


class FormatError(ValueError):
    """Malformed catalogue or property file (carries a line number)."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ChecksumMismatch(FormatError):
    pass


class UnknownColumn(KeyError):
    pass


class TypeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CatalogueRecord:
    id: int
    n: int
    rank: int
    hyp_bytes: bytes
    cert: bytes | None = None

    @property
    def hyperplanes(self):
        return tuple(
            int.from_bytes(self.hyp_bytes[i : i + 2], "big")
            for i in range(0, len(self.hyp_bytes), 2)
        )

    def matroid(self) -> Matroid:
        return Matroid(self.n, self.rank, self.hyperplanes)


def assign_ids(records) -> list:
    """Dense ids in (n, rank, certificate) order for MatroidRecords."""
    ordered = sorted(records, key=MatroidRecord.sort_key)
    return [
        CatalogueRecord(i, rec.n, rec.rank, rec.hyp_bytes, rec.cert)
        for i, rec in enumerate(ordered)
    ]


def _record_line(rec: CatalogueRecord) -> str:
    hs = ",".join(format(h, "x") for h in rec.hyperplanes) or "-"
    return f"{rec.id} {rec.n} {rec.rank} {hs}"


def write_catalogue(records, path: str) -> None:
    """Write CatalogueRecords (or MatroidRecords, ids assigned) to a file."""
    if records and isinstance(records[0], MatroidRecord):
        records = assign_ids(records)
    keys = [(r.n, r.rank, r.cert) for r in records]
    if any(k[2] is not None for k in keys) and keys != sorted(keys):
        raise FormatError("records not sorted by (n, rank, certificate)")
    body = CATALOGUE_HEADER + "\n"
    for rec in records:
        body += _record_line(rec) + "\n"
    digest = hashlib.sha256(body.encode()).hexdigest()
    with open(path, "w") as fh:
        fh.write(body)
        fh.write(f"#sha256 {digest}\n")


def read_catalogue(path: str, verify_certificates: bool = False) -> list:
    """Parse and validate a catalogue file.

    Always checks the checksum, dense ids, and (n, rank) sort order;
    verify_certificates additionally recomputes certificates and checks the
    order within each (n, rank) block (slow for large files).
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CATALOGUE_HEADER:
        raise FormatError("missing catalogue header", line=1)
    if not lines[-1].startswith("#sha256 "):
        raise FormatError("missing checksum footer", line=len(lines))
    body = "\n".join(lines[:-1]) + "\n"
    want = lines[-1].split()[1]
    got = hashlib.sha256(body.encode()).hexdigest()
    if want != got:
        raise ChecksumMismatch(f"checksum {got} != recorded {want}")
    records = []
    prev_key = None
    for lineno, line in enumerate(lines[1:-1], start=2):
        parts = line.split()
        if len(parts) != 4:
            raise FormatError("expected `id n rank masks`", line=lineno)
        rid, n, rank = (int(p) for p in parts[:3])
        if rid != len(records):
            raise FormatError(f"ids not dense: saw {rid}", line=lineno)
        masks = (
            ()
            if parts[3] == "-"
            else tuple(int(t, 16) for t in parts[3].split(","))
        )
        if list(masks) != sorted(masks):
            raise FormatError("masks not ascending", line=lineno)
        key = (n, rank)
        if prev_key is not None and key < prev_key:
            raise FormatError("records not sorted by (n, rank)", line=lineno)
        prev_key = key
        records.append(CatalogueRecord(rid, n, rank, pack_masks(masks)))
    if verify_certificates:
        from .canon import certificate_for

        certs = [
            certificate_for(r.n, r.rank, r.hyperplanes).bytes for r in records
        ]
        keys = [(r.n, r.rank, c) for r, c in zip(records, certs)]
        if keys != sorted(keys):
            raise FormatError("records not sorted by certificate within blocks")
        records = [replace(r, cert=c) for r, c in zip(records, certs)]
    return records


# -- property table -------------------------------------------------------------

COLUMNS = (
    "id", "n", "rank",
    "simple", "cosimple", "paving", "sparsePaving", "uniform",
    "minCircuitSize",
    "numBases", "numCircuits", "numFlats", "numHyperplanes",
    "numIndependent", "numCircuitHyperplanes", "numLoops", "numColoops",
    "autOrder", "numOrbits", "connectivity",
    "repGF2", "repGF3", "repGF4", "repGF5",
    "ingletonViolating", "baseOrderable", "stronglyBaseOrderable", "transversal",
    "dualId", "simplificationId",
)

_BOOL_COLUMNS = {
    "simple", "cosimple", "paving", "sparsePaving", "uniform",
    "repGF2", "repGF3", "repGF4", "repGF5",
    "ingletonViolating", "baseOrderable", "stronglyBaseOrderable", "transversal",
}


@dataclass(frozen=True)
class RowOptions:
    """Which expensive columns a property pass computes."""

    gf_fields: tuple = (2, 3, 4, 5)
    ingleton: bool = True
    ingleton_violators8: tuple | None = None
    orderability: bool = True
    transversality: bool = True


def compute_row(rec: CatalogueRecord, opts: RowOptions) -> dict:
    from .canon import certificate_for
    from .orderable import base_orderable, strongly_base_orderable, transversal
    from .props import classify, ingleton_violating
    from .represent import representable

    m = rec.matroid()
    flags = classify(m)
    cert = certificate_for(m.n, m.rank, m.hyperplanes)
    row = {
        "id": rec.id,
        "n": m.n,
        "rank": m.rank,
        "simple": flags.simple,
        "cosimple": flags.cosimple,
        "paving": flags.paving,
        "sparsePaving": flags.sparse_paving,
        "uniform": flags.uniform,
        "minCircuitSize": flags.min_circuit_size,
        "numBases": flags.num_bases,
        "numCircuits": flags.num_circuits,
        "numFlats": flags.num_flats,
        "numHyperplanes": flags.num_hyperplanes,
        "numIndependent": flags.num_independent,
        "numCircuitHyperplanes": flags.num_circuit_hyperplanes,
        "numLoops": flags.num_loops,
        "numColoops": flags.num_coloops,
        "autOrder": cert.aut_order,
        "numOrbits": cert.orbit_count,
        "connectivity": m.connectivity(),
        "dualId": None,
        "simplificationId": None,
    }
    for q in (2, 3, 4, 5):
        col = f"repGF{q}"
        row[col] = (
            (representable(m, q) is not None) if q in opts.gf_fields else None
        )
    if opts.ingleton:
        mode = "minor" if m.n > 8 and opts.ingleton_violators8 else "full"
        row["ingletonViolating"] = (
            ingleton_violating(m, mode=mode, violators8=opts.ingleton_violators8)
            is not None
        )
    else:
        row["ingletonViolating"] = None
    if opts.orderability:
        row["baseOrderable"] = base_orderable(m)
        row["stronglyBaseOrderable"] = (
            strongly_base_orderable(m) if row["baseOrderable"] else False
        )
    else:
        row["baseOrderable"] = row["stronglyBaseOrderable"] = None
    if opts.transversality:
        row["transversal"] = transversal(m) is not None
    else:
        row["transversal"] = None
    # certificates of derived matroids resolve to ids in a later pass
    d = m.dual()
    s = m.simplify()
    row["_dualCert"] = certificate_for(d.n, d.rank, d.hyperplanes).bytes
    row["_simplificationCert"] = certificate_for(s.n, s.rank, s.hyperplanes).bytes
    row["_cert"] = cert.bytes
    return row


def resolve_cross_references(rows) -> list:
    by_cert = {row["_cert"]: row["id"] for row in rows}
    out = []
    for row in rows:
        row = dict(row)
        row["dualId"] = by_cert.get(row.pop("_dualCert"))
        row["simplificationId"] = by_cert.get(row.pop("_simplificationCert"))
        row.pop("_cert")
        out.append(row)
    return out


def build_property_table(records, opts: RowOptions | None = None, pool=None):
    """One row per record with property columns and cross-reference ids."""
    opts = opts or RowOptions()
    if pool is None:
        rows = [compute_row(rec, opts) for rec in records]
    else:
        from functools import partial

        rows = pool.map(partial(compute_row, opts=opts), records, chunksize=16)
    return resolve_cross_references(rows)


def _format_cell(value):
    if value is None:
        return "-"
    if value is True:
        return "1"
    if value is False:
        return "0"
    if value == INFINITY:
        return "inf"
    return str(value)


def render_property_tsv(rows) -> str:
    lines = [TABLE_HEADER, "\t".join(COLUMNS)]
    for row in sorted(rows, key=lambda r: r["id"]):
        lines.append("\t".join(_format_cell(row[c]) for c in COLUMNS))
    return "\n".join(lines) + "\n"


def _parse_cell(column, text):
    if text == "-":
        return None
    if text == "inf":
        return INFINITY
    value = int(text)
    if column in _BOOL_COLUMNS:
        return bool(value)
    return value


def parse_property_tsv(text: str) -> list:
    lines = text.splitlines()
    if not lines or lines[0] != TABLE_HEADER:
        raise FormatError("missing property-table header", line=1)
    header = lines[1].split("\t")
    if tuple(header) != COLUMNS:
        raise FormatError("unexpected column header", line=2)
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        cells = line.split("\t")
        if len(cells) != len(COLUMNS):
            raise FormatError("wrong cell count", line=lineno)
        rows.append(
            {c: _parse_cell(c, t) for c, t in zip(COLUMNS, cells)}
        )
    return rows


# -- query engine ----------------------------------------------------------------

_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}

_ATOM = re.compile(r"^\s*(\w+)\s*(<=|>=|!=|==|=|<|>)\s*(\S+)\s*$")


@dataclass(frozen=True)
class QueryExpr:
    atoms: tuple  # (column, op string, literal)


def parse_query(text: str) -> QueryExpr:
    atoms = []
    text = text.strip()
    if text:
        for pos, part in enumerate(re.split(r"\s+and\s+", text)):
            m = _ATOM.match(part)
            if not m:
                raise FormatError(f"cannot parse condition {part!r} (clause {pos + 1})")
            column, op, literal = m.groups()
            if column not in COLUMNS:
                raise UnknownColumn(column)
            if literal in ("true", "false"):
                value = literal == "true"
            elif literal == "inf":
                value = INFINITY
            else:
                try:
                    value = int(literal)
                except ValueError:
                    raise TypeMismatch(f"literal {literal!r} is not numeric")
            atoms.append((column, op, value))
    return QueryExpr(tuple(atoms))


def _matches(row, expr: QueryExpr) -> bool:
    for column, op, value in expr.atoms:
        cell = row[column]
        if cell is None:
            return False
        if isinstance(cell, bool) != isinstance(value, bool) and not (
            isinstance(value, (int, float)) and isinstance(cell, (int, float))
        ):
            raise TypeMismatch(f"column {column} vs literal {value!r}")
        if not _OPS[op](cell, value):
            return False
    return True


def query(rows, expr: QueryExpr, group_by=(), aggregate="count", distinct_column=None):
    """Filter, optionally group, and aggregate property rows.

    aggregate is "count" or "count-distinct" (with distinct_column); without
    group_by the result is a single aggregate row, or the raw matching rows
    when aggregate is None.
    """
    if distinct_column is not None and distinct_column not in COLUMNS:
        raise UnknownColumn(distinct_column)
    for col in group_by:
        if col not in COLUMNS:
            raise UnknownColumn(col)
    selected = [row for row in rows if _matches(row, expr)]
    if aggregate is None:
        return sorted(selected, key=lambda r: r["id"])
    groups = {}
    for row in selected:
        key = tuple(row[c] for c in group_by)
        groups.setdefault(key, []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: tuple(_sortable(v) for v in k)):
        members = groups[key]
        if aggregate == "count":
            value = len(members)
        elif aggregate == "count-distinct":
            value = len({m[distinct_column] for m in members})
        else:
            raise ValueError(f"unknown aggregate {aggregate!r}")
        out.append(key + (value,))
    return out


def _sortable(v):
    if v is None:
        return (2, 0)
    if v == INFINITY:
        return (1, 0)
    return (0, v)


def missing_base_triples(rows, max_n: int):
    """(n, r, b) with 1 <= b <= C(n,r) realized by no matroid of that shape."""
    present = {}
    for row in rows:
        if row["n"] <= max_n:
            present.setdefault((row["n"], row["rank"]), set()).add(row["numBases"])
    out = []
    for n in range(max_n + 1):
        for r in range(n + 1):
            have = present.get((n, r), set())
            for b in range(1, math.comb(n, r) + 1):
                if b not in have:
                    out.append((n, r, b))
    return out
