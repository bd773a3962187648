"""Column/Table primitives and time point arithmetic."""

import datetime

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubble import MISSING, Column, CubbleError, Kind, Table, TimeKind, TimePoint
from cubble.table import footprint_bytes, kind_of, scalar_to_text


class TestScalars:
    def test_missing_is_singleton(self):
        from cubble.table import _Missing

        assert _Missing() is MISSING
        assert MISSING == MISSING
        assert MISSING != 0
        assert not MISSING

    def test_kind_of(self):
        assert kind_of(1.5) is Kind.FLOAT64
        assert kind_of(3) is Kind.INT64
        assert kind_of(True) is Kind.BOOL
        assert kind_of("x") is Kind.TEXT
        assert kind_of(TimePoint.parse("2020-01-01")) is Kind.TIME
        assert kind_of(MISSING) is None

    def test_unsupported_scalar(self):
        with pytest.raises(CubbleError):
            kind_of(object())


class TestTimePoint:
    @pytest.mark.parametrize(
        "text,kind",
        [
            ("2020-01-05", TimeKind.DATE),
            ("2020-01-05T06:30:00Z", TimeKind.DATETIME),
            ("2020-01", TimeKind.YEARMONTH),
            ("2020-W05", TimeKind.YEARWEEK),
            ("2020-Q3", TimeKind.YEARQUARTER),
        ],
    )
    def test_iso_round_trip(self, text, kind):
        tp = TimePoint.parse(text)
        assert tp.kind is kind
        assert tp.iso() == text

    def test_date_counts_days(self):
        jan1 = TimePoint.parse("2020-01-01")
        assert jan1.add(9).iso() == "2020-01-10"
        assert TimePoint.parse("1970-01-01").count == 0

    def test_yearmonth_arithmetic(self):
        ym = TimePoint.parse("2020-11")
        assert ym.add(3).iso() == "2021-02"

    def test_yearweek_iso_calendar(self):
        yw = TimePoint.yearweek(2020, 1)
        assert yw.iso() == "2020-W01"
        assert yw.to_date() == datetime.date(2019, 12, 30)

    def test_mixed_kind_comparison_rejected(self):
        with pytest.raises(CubbleError):
            TimePoint.parse("2020-01-01") < TimePoint.parse("2020-01")

    @given(st.integers(min_value=-50000, max_value=50000))
    def test_date_iso_bijective(self, count):
        tp = TimePoint(TimeKind.DATE, count)
        assert TimePoint.parse(tp.iso()) == tp

    @given(st.integers(min_value=-2000, max_value=2000))
    def test_yearweek_iso_bijective(self, count):
        tp = TimePoint(TimeKind.YEARWEEK, count)
        assert TimePoint.parse(tp.iso()) == tp


class TestColumn:
    def test_homogeneous_kinds_enforced(self):
        with pytest.raises(CubbleError):
            Column("a", [1, "x"])

    def test_int_float_promotion(self):
        col = Column("a", [1, 2.5, MISSING])
        assert col.kind is Kind.FLOAT64
        assert col.values[0] == 1.0
        assert isinstance(col.values[0], float)

    def test_bool_not_promoted(self):
        with pytest.raises(CubbleError):
            Column("a", [True, 1.5])

    def test_none_becomes_missing(self):
        col = Column("a", [1, None, 3])
        assert col.values[1] is MISSING

    def test_all_missing_defaults_to_text(self):
        assert Column("a", [MISSING, MISSING]).kind is Kind.TEXT

    def test_mixed_time_kinds_rejected(self):
        with pytest.raises(CubbleError):
            Column("a", [TimePoint.parse("2020-01-01"), TimePoint.parse("2020-01")])

    def test_declared_kind_mismatch(self):
        with pytest.raises(CubbleError):
            Column("a", ["x"], Kind.INT64)

    def test_empty_name_rejected(self):
        with pytest.raises(CubbleError):
            Column("", [1])


class TestTable:
    def test_ragged_columns_rejected(self):
        with pytest.raises(CubbleError):
            Table([Column("a", [1, 2]), Column("b", [1])])

    def test_duplicate_names_rejected(self):
        with pytest.raises(CubbleError):
            Table([Column("a", [1]), Column("a", [2])])

    def test_select_filter_take(self):
        t = Table.from_dict({"a": [1, 2, 3], "b": ["x", "y", "z"]})
        assert t.select(["b"]).names == ("b",)
        assert t.filter([True, False, True]).column("a").values == (1, 3)
        assert t.take([2, 0]).column("b").values == ("z", "x")

    def test_with_column_replaces_in_place(self):
        t = Table.from_dict({"a": [1], "b": [2]})
        out = t.with_column(Column("a", [9]))
        assert out.names == ("a", "b")
        assert out.column("a").values == (9,)

    def test_concat_schema_checked(self):
        t1 = Table.from_dict({"a": [1]})
        t2 = Table.from_dict({"a": ["x"]})
        with pytest.raises(CubbleError):
            Table.concat([t1, t2])

    def test_deep_equality(self):
        t1 = Table.from_dict({"a": [1, MISSING]})
        t2 = Table.from_dict({"a": [1, MISSING]})
        t3 = Table.from_dict({"a": [1, 2]})
        assert t1 == t2
        assert t1 != t3

    def test_unknown_column_errors(self):
        t = Table.from_dict({"a": [1]})
        with pytest.raises(CubbleError):
            t.column("zz")


class TestScalarText:
    def test_canonical_forms(self):
        assert scalar_to_text(MISSING) == ""
        assert scalar_to_text(True) == "true"
        assert scalar_to_text(1.5) == "1.5"
        assert scalar_to_text(TimePoint.parse("2020-01-02")) == "2020-01-02"


class TestFootprint:
    def test_wider_table_is_larger(self):
        narrow = Table.from_dict({"a": [1.0] * 100})
        wide = Table.from_dict({"a": [1.0] * 100, "b": [2.0] * 100})
        assert footprint_bytes(wide) > footprint_bytes(narrow)

    def test_missing_is_cheap(self):
        full = Table.from_dict({"a": [1.0] * 100})
        sparse = Table([Column("a", [MISSING] * 100, Kind.FLOAT64)])
        assert footprint_bytes(sparse) < footprint_bytes(full)
