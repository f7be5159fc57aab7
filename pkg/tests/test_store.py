import pytest

from matcat.core import INFINITY
from matcat.orderly import enumerate_matroids
from matcat.store import (
    COLUMNS,
    ChecksumMismatch,
    FormatError,
    RowOptions,
    TypeMismatch,
    UnknownColumn,
    assign_ids,
    build_property_table,
    missing_base_triples,
    parse_property_tsv,
    parse_query,
    query,
    read_catalogue,
    render_property_tsv,
    write_catalogue,
)


@pytest.fixture(scope="module")
def catalogued(tmp_path_factory, catalogue6):
    path = tmp_path_factory.mktemp("cat") / "catalogue.txt"
    write_catalogue(assign_ids(catalogue6), str(path))
    return str(path)


@pytest.fixture(scope="module")
def rows6(catalogued):
    return build_property_table(read_catalogue(catalogued))


class TestCatalogueFile:
    def test_round_trip_identity(self, catalogued, catalogue6):
        back = read_catalogue(catalogued, verify_certificates=True)
        assert [(r.n, r.rank, r.hyp_bytes) for r in back] == [
            (r.n, r.rank, r.hyp_bytes) for r in sorted(catalogue6, key=lambda x: x.sort_key())
        ]
        assert [r.id for r in back] == list(range(len(back)))

    def test_checksum_detected(self, catalogued, tmp_path):
        lines = open(catalogued).read().splitlines()
        lines[3] = lines[3] + " "
        bad = tmp_path / "bad.txt"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(ChecksumMismatch):
            read_catalogue(str(bad))

    def test_unsorted_line_rejected(self, catalogue6, tmp_path):
        recs = assign_ids(catalogue6)
        swapped = recs[:]
        a, b = 5, 40  # records in different (n, rank) blocks
        swapped[a], swapped[b] = (
            type(recs[a])(recs[a].id, recs[b].n, recs[b].rank, recs[b].hyp_bytes),
            type(recs[b])(recs[b].id, recs[a].n, recs[a].rank, recs[a].hyp_bytes),
        )
        path = tmp_path / "unsorted.txt"
        import hashlib

        from matcat.store import CATALOGUE_HEADER, _record_line

        body = CATALOGUE_HEADER + "\n"
        for rec in swapped:
            body += _record_line(rec) + "\n"
        digest = hashlib.sha256(body.encode()).hexdigest()
        path.write_text(body + f"#sha256 {digest}\n")
        with pytest.raises(FormatError):
            read_catalogue(str(path))

    def test_missing_header(self, tmp_path):
        p = tmp_path / "x.txt"
        p.write_text("nonsense\n")
        with pytest.raises(FormatError):
            read_catalogue(str(p))

    def test_expected_record_count_through_six(self, catalogued):
        assert len(read_catalogue(catalogued)) == 1 + 2 + 4 + 8 + 17 + 38 + 98


class TestPropertyTable:
    def test_tsv_round_trip(self, rows6):
        tsv = render_property_tsv(rows6)
        rows2 = parse_property_tsv(tsv)
        ordered = sorted(rows6, key=lambda r: r["id"])
        assert rows2 == [{c: r[c] for c in COLUMNS} for r in ordered]

    def test_rerun_idempotent(self, catalogued):
        rows_a = build_property_table(read_catalogue(catalogued))
        rows_b = build_property_table(read_catalogue(catalogued))
        assert render_property_tsv(rows_a) == render_property_tsv(rows_b)

    def test_dual_id_involution(self, rows6):
        by_id = {r["id"]: r for r in rows6}
        for row in rows6:
            assert by_id[row["dualId"]]["dualId"] == row["id"]
            if row["dualId"] == row["id"]:
                assert row["rank"] * 2 == row["n"]

    def test_simplification_points_to_simple(self, rows6):
        by_id = {r["id"]: r for r in rows6}
        for row in rows6:
            target = by_id[row["simplificationId"]]
            assert target["simple"]

    def test_uncomputed_columns_render_as_dash(self, catalogue6):
        records = assign_ids([r for r in catalogue6 if r.n <= 2])
        rows = build_property_table(
            records, RowOptions(gf_fields=(), ingleton=False,
                                orderability=False, transversality=False)
        )
        tsv = render_property_tsv(rows)
        assert "\t-\t" in tsv
        rows2 = parse_property_tsv(tsv)
        assert all(r["repGF2"] is None for r in rows2)


class TestQuery:
    def test_count_distinct_bases_at_63(self, rows6):
        res = query(
            rows6,
            parse_query("n=6 and rank=3"),
            group_by=("n", "rank"),
            aggregate="count-distinct",
            distinct_column="numBases",
        )
        assert res == [(6, 3, 19)]

    def test_simple_filter_count(self, rows6):
        res = query(rows6, parse_query("simple=true and n=6"), aggregate="count")
        assert res == [(26,)]

    def test_empty_filter_counts_everything(self, rows6):
        res = query(rows6, parse_query(""), aggregate="count")
        assert res == [(len(rows6),)]

    def test_rank0_rows(self, rows6):
        res = query(rows6, parse_query("rank=0"), aggregate=None)
        assert len(res) == 7  # one per ground size 0..6

    def test_operators(self, rows6):
        le = query(rows6, parse_query("n<=3"), aggregate="count")[0][0]
        eq = sum(
            query(rows6, parse_query(f"n={k}"), aggregate="count")[0][0]
            for k in range(4)
        )
        assert le == eq == 15

    def test_unknown_column(self):
        with pytest.raises(UnknownColumn):
            parse_query("bogus=1")

    def test_type_mismatch(self):
        with pytest.raises(TypeMismatch):
            parse_query("n=abc")

    def test_row_order_independence(self, rows6):
        import random

        shuffled = rows6[:]
        random.Random(0).shuffle(shuffled)
        q = parse_query("n=6")
        a = query(rows6, q, group_by=("rank",), aggregate="count")
        b = query(shuffled, q, group_by=("rank",), aggregate="count")
        assert a == b


class TestMissingBases:
    def test_through_five_none(self, rows6):
        assert missing_base_triples(rows6, 5) == []

    def test_through_six_exactly_one(self, rows6):
        assert missing_base_triples(rows6, 6) == [(6, 3, 11)]

    def test_cell_52_full(self, rows6):
        present = {
            r["numBases"] for r in rows6 if r["n"] == 5 and r["rank"] == 2
        }
        assert present == set(range(1, 11))  # every 1..C(5,2)
