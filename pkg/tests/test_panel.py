"""Panel loading, validation, exclusions, and forward imputation."""

from datetime import date

import numpy as np
import pytest

from foresim.errors import DataError
from foresim.panel import (
    ExclusionList,
    Panel,
    apply_exclusions,
    impute_forward,
    load_exclusions,
    load_panel,
    save_panel,
)

from conftest import make_panel


def write(tmp_path, text, name="panel.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadPanel:
    def test_well_formed(self, tmp_path):
        path = write(tmp_path, "date,price,vol\n"
                               "2020-01-01,1.0,10\n"
                               "2020-01-02,2.0,20\n"
                               "2020-01-03,3.0,30\n")
        panel = load_panel(path, "price")
        assert panel.n_rows == 3
        assert panel.price_column == "price"
        assert not any(np.isnan(v).any() for v in panel.columns.values())

    def test_calendar_gap_becomes_missing_rows(self, tmp_path):
        path = write(tmp_path, "date,price\n2020-01-01,1.0\n2020-01-04,4.0\n")
        panel = load_panel(path, "price")
        assert panel.n_rows == 4
        assert panel.dates == (date(2020, 1, 1), date(2020, 1, 2),
                               date(2020, 1, 3), date(2020, 1, 4))
        assert np.isnan(panel.columns["price"][1:3]).all()

    def test_duplicate_date_errors(self, tmp_path):
        path = write(tmp_path, "date,price\n2020-01-01,1.0\n2020-01-01,2.0\n")
        with pytest.raises(DataError, match="duplicate date"):
            load_panel(path, "price")

    def test_non_increasing_dates_error(self, tmp_path):
        path = write(tmp_path, "date,price\n2020-01-02,1.0\n2020-01-01,2.0\n")
        with pytest.raises(DataError, match="non-increasing"):
            load_panel(path, "price")

    def test_missing_price_column_errors(self, tmp_path):
        path = write(tmp_path, "date,vol\n2020-01-01,1.0\n")
        with pytest.raises(DataError, match="price column"):
            load_panel(path, "price")

    def test_unparsable_cell_identifies_row_and_column(self, tmp_path):
        path = write(tmp_path, "date,price\n2020-01-01,1.0\n2020-01-02,oops\n")
        with pytest.raises(DataError, match="line 3, column 'price'"):
            load_panel(path, "price")

    def test_empty_and_nan_cells_read_as_missing(self, tmp_path):
        path = write(tmp_path, "date,price,vol\n"
                               "2020-01-01,1.0,\n"
                               "2020-01-02,2.0,NaN\n")
        panel = load_panel(path, "price")
        assert np.isnan(panel.columns["vol"]).all()

    def test_nlp_role_assignment(self, tmp_path):
        path = write(tmp_path, "date,price,tweets_score\n2020-01-01,1.0,0.5\n")
        panel = load_panel(path, "price", nlp_columns=("tweets_score",))
        assert panel.roles["tweets_score"] == "nlp_score"


class TestRoundTrip:
    def test_save_load_is_value_exact(self, tmp_path, rng):
        values = rng.standard_normal(50)
        values[::7] = np.nan
        values[0] = np.nan
        panel = make_panel({"price_close": np.abs(rng.standard_normal(50)) + 1,
                            "feat": values})
        out = tmp_path / "roundtrip.csv"
        save_panel(panel, out)
        loaded = load_panel(out, "price_close")
        assert loaded.dates == panel.dates
        for name in panel.columns:
            np.testing.assert_array_equal(loaded.columns[name],
                                          panel.columns[name])


class TestExclusions:
    def test_range_blanked_everything_else_untouched(self):
        panel = make_panel({"price_close": np.arange(1.0, 11.0),
                            "tweet_count": np.arange(10.0)})
        excl = ExclusionList(((("tweet_count"), date(2018, 1, 2),
                               date(2018, 1, 3)),))
        out = apply_exclusions(panel, excl)
        assert np.isnan(out.columns["tweet_count"][1:3]).all()
        np.testing.assert_array_equal(out.columns["tweet_count"][3:],
                                      panel.columns["tweet_count"][3:])
        np.testing.assert_array_equal(out.columns["price_close"],
                                      panel.columns["price_close"])

    def test_empty_list_is_identity(self):
        panel = make_panel({"price_close": np.arange(1.0, 6.0)})
        out = apply_exclusions(panel, ExclusionList(()))
        np.testing.assert_array_equal(out.columns["price_close"],
                                      panel.columns["price_close"])

    def test_unknown_column_errors(self):
        panel = make_panel({"price_close": np.arange(1.0, 6.0)})
        excl = ExclusionList((("ghost", date(2018, 1, 1), date(2018, 1, 2)),))
        with pytest.raises(DataError, match="unknown column"):
            apply_exclusions(panel, excl)

    def test_out_of_span_errors(self):
        panel = make_panel({"price_close": np.arange(1.0, 6.0)})
        excl = ExclusionList((("price_close", date(2017, 1, 1),
                               date(2018, 1, 2)),))
        with pytest.raises(DataError, match="outside panel span"):
            apply_exclusions(panel, excl)

    def test_exclusion_csv_loader(self, tmp_path):
        path = write(tmp_path, "column,start_date,end_date\n"
                               "tweet_count,2020-02-01,2020-02-02\n",
                     name="excl.csv")
        excl = load_exclusions(path)
        assert excl.entries == (("tweet_count", date(2020, 2, 1),
                                 date(2020, 2, 2)),)


class TestImputeForward:
    def test_cascading_fill(self):
        panel = make_panel({"price_close": [1.0, 1, 1, 1],
                            "f": [1.0, np.nan, np.nan, 4.0]})
        out = impute_forward(panel)
        np.testing.assert_array_equal(out.columns["f"], [1.0, 1.0, 1.0, 4.0])

    def test_leading_gap_preserved(self):
        panel = make_panel({"price_close": [1.0, 1, 1],
                            "f": [np.nan, 2.0, np.nan]})
        out = impute_forward(panel)
        assert np.isnan(out.columns["f"][0])
        np.testing.assert_array_equal(out.columns["f"][1:], [2.0, 2.0])
        assert out.first_observed("f") == 1

    def test_fully_observed_unchanged(self):
        panel = make_panel({"price_close": [1.0, 2, 3]})
        out = impute_forward(panel)
        np.testing.assert_array_equal(out.columns["price_close"], [1.0, 2, 3])

    def test_idempotent(self, rng):
        values = rng.standard_normal(100)
        values[rng.random(100) < 0.3] = np.nan
        panel = make_panel({"price_close": np.ones(100), "f": values})
        once = impute_forward(panel)
        twice = impute_forward(once)
        np.testing.assert_array_equal(once.columns["f"], twice.columns["f"])

    def test_exclude_then_impute_preserves_untouched_cells(self, rng):
        values = rng.standard_normal(30)
        panel = make_panel({"price_close": np.ones(30), "f": values})
        excl = ExclusionList((("f", date(2018, 1, 10), date(2018, 1, 12)),))
        out = impute_forward(apply_exclusions(panel, excl))
        mask = np.ones(30, dtype=bool)
        mask[9:12] = False
        np.testing.assert_array_equal(out.columns["f"][mask], values[mask])
        # excluded cells re-filled with the last pre-exclusion value
        np.testing.assert_array_equal(out.columns["f"][9:12],
                                      np.full(3, values[8]))


class TestPanelInvariants:
    def test_exactly_one_price_column_required(self):
        with pytest.raises(DataError, match="exactly one price"):
            Panel(make_panel({"price_close": [1.0]}).dates[:1],
                  {"a": np.ones(1)}, {"a": "feature"})

    def test_column_length_mismatch_rejected(self):
        dates = make_panel({"price_close": [1.0, 2.0]}).dates
        with pytest.raises(DataError, match="values for"):
            Panel(dates, {"price_close": np.ones(3)}, {"price_close": "price"})
