import csv
import io
import json

import pytest

from tables import (EVAL_COLUMNS, TABLE_COLUMNS, convergence_rows, eval_record, min_m_rows, render_table,
                    tightness_rows)

EVAL_AT_FOUR = {
    "log_mean": 2.164043, "geo_mean": 2.0, "arith_mean": 2.5, "lin_upper": 2.165216,
    "polya_upper": 2.166667, "rational_lower": 2.159465,
    "alpha_m": 2.121320, "beta_m": 2.25, "gamma_m": 3.0, "delta_m": 1.5,
}


def parse_csv(text):
    lines = text.split("\n")
    assert lines[0].startswith("# logmean-bounds")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_eval_record_at_four():
    record = eval_record((4.0, 1.0), 2)
    for name, expected in EVAL_AT_FOUR.items():
        assert record[name] == pytest.approx(expected, abs=1e-6), name


def test_eval_record_at_one():
    record = eval_record((1.0, 1.0), 3)
    for name in EVAL_AT_FOUR:
        assert record[name] == pytest.approx(1.0, rel=1e-15), name


def test_eval_record_is_homogeneous():
    base, doubled = eval_record((4.0, 1.0), 2), eval_record((8.0, 2.0), 2)
    for name in EVAL_AT_FOUR:
        assert doubled[name] == pytest.approx(2 * base[name], rel=1e-14), name


def test_tightness_rows():
    rows = tightness_rows([4.0], [2])
    assert len(rows) == 1
    record = eval_record((4.0, 1.0), 2)
    assert rows[0]["beta_m"] == record["beta_m"]
    assert rows[0]["gap_lin_upper"] == pytest.approx(1.1736e-3, rel=1e-3)
    assert set(rows[0]) == set(TABLE_COLUMNS)


def test_tightness_zero_gaps_at_one():
    rows = tightness_rows([1.0], [1, 4])
    for row in rows:
        for name in TABLE_COLUMNS:
            if name.startswith("gap_"):
                assert row[name] == pytest.approx(0.0, abs=1e-15)


def test_gap_signs_follow_branches():
    for row in tightness_rows([0.01, 0.5, 2.0, 100.0], [1, 3, 10]):
        assert row["gap_alpha_m"] <= 0.0 <= row["gap_beta_m"]
        left, right = row["gap_delta_m"], row["gap_gamma_m"]
        if row["t"] < 1:
            left, right = right, left
        assert left <= 0.0 <= right


def test_convergence_rows():
    rows, fitted = convergence_rows(4.0, [8, 16, 32, 64])
    assert [row["m"] for row in rows] == [8, 16, 32, 64]
    assert rows[0]["alpha_local_order"] is None
    assert 1.8 <= fitted["alpha_order"] <= 2.2
    assert 1.8 <= fitted["beta_order"] <= 2.2
    for row in rows[1:]:
        assert row["beta_local_order"] == pytest.approx(2.0, abs=0.2)


def test_convergence_rejects_one():
    with pytest.raises(ValueError):
        convergence_rows(1.0, [8, 16])


def test_min_m_rows_spell_not_found():
    rows = min_m_rows([{"t": 4.0, "min_m": None, "beta_at_min": None, "lin_upper": 2.0, "log_mean": 2.0}], 10)
    assert rows[0]["min_m"] == "NOT_FOUND(10)"


class TestRender:
    def test_csv_layout(self):
        text = render_table([eval_record((4.0, 1.0), 2)], "eval", "csv")
        assert "\r" not in text and text.endswith("\n")
        lines = text.split("\n")
        assert lines[0] == "# logmean-bounds eval columns v1"
        assert lines[1] == ",".join(EVAL_COLUMNS)
        assert lines[2].split(",")[EVAL_COLUMNS.index("gamma_m")] == "3.0"

    def test_csv_and_json_carry_the_same_numbers(self):
        rows = tightness_rows([0.001, 1.0, 3.7], [1, 5])
        from_csv = parse_csv(render_table(rows, "table", "csv"))
        from_json = json.loads(render_table(rows, "table", "json", {"seed": 1}))["rows"]
        assert len(from_csv) == len(from_json) == 6
        for c_row, j_row in zip(from_csv, from_json):
            for name in TABLE_COLUMNS:
                assert float(c_row[name]) == j_row[name]

    def test_json_meta(self):
        body = json.loads(render_table([], "min-m", "json", {"m_max": 10}))
        assert body["rows"] == []
        assert body["meta"]["m_max"] == 10
        assert body["meta"]["table"] == "min-m"
        assert body["meta"]["columns_version"] == "v1"

    def test_float_round_trip(self):
        text = render_table([{"m": 8, "alpha_error": 0.1 + 0.2}], "converge", "csv")
        assert "0.30000000000000004" in text

    def test_unknown_kind_or_format(self):
        with pytest.raises(ValueError):
            render_table([], "plot")
        with pytest.raises(ValueError):
            render_table([], "eval", "xml")
