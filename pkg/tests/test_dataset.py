from datetime import date

import numpy as np
import pytest

from scenariolab import common_date_index, load_dataset, load_repository, write_dataset
from scenariolab.errors import (
    CellParseError,
    DateFormatError,
    DuplicateDateError,
    NoOverlapError,
    ParseError,
)

from conftest import make_dataset


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_simple_file(tmp_path):
    path = write(
        tmp_path,
        "date,temp,hum\n"
        "2016-01-01,1.5,10\n"
        "2016-01-02,2.5,20\n"
        "2016-01-03,3.5,30\n",
    )
    ds = load_dataset(path, "a")
    assert ds.source_id == "a"
    assert ds.n_rows == 3
    assert ds.attribute_names == ("temp", "hum")
    assert ds.dates == (date(2016, 1, 1), date(2016, 1, 2), date(2016, 1, 3))
    assert np.array_equal(ds.values, [[1.5, 10], [2.5, 20], [3.5, 30]])


def test_rows_sorted_by_date(tmp_path):
    path = write(
        tmp_path,
        "date,x\n2016-01-03,3\n2016-01-01,1\n2016-01-02,2\n",
    )
    ds = load_dataset(path, "a")
    assert [d.day for d in ds.dates] == [1, 2, 3]
    assert list(ds.values[:, 0]) == [1, 2, 3]


def test_duplicate_date_reports_row(tmp_path):
    path = write(
        tmp_path,
        "date,x\n2016-01-01,1\n2016-01-02,2\n2016-01-02,3\n",
    )
    with pytest.raises(DuplicateDateError) as err:
        load_dataset(path, "a")
    assert err.value.row == 3


def test_bad_date_reports_row(tmp_path):
    path = write(tmp_path, "date,x\n2016-01-01,1\n01/02/2016,2\n")
    with pytest.raises(DateFormatError) as err:
        load_dataset(path, "a")
    assert err.value.row == 2


def test_bad_cell_reports_row_and_column(tmp_path):
    path = write(tmp_path, "date,x,y\n2016-01-01,1,2\n2016-01-02,oops,3\n")
    with pytest.raises(CellParseError) as err:
        load_dataset(path, "a")
    assert err.value.row == 2
    assert err.value.column == "x"


def test_missing_markers(tmp_path):
    path = write(tmp_path, "date,x,y\n2016-01-01,,5\n2016-01-02,?,6\n2016-01-03,1,7\n")
    ds = load_dataset(path, "a")
    assert np.isnan(ds.values[0, 0]) and np.isnan(ds.values[1, 0])
    assert not np.isnan(ds.values[:, 1]).any()


def test_too_few_rows(tmp_path):
    path = write(tmp_path, "date,x\n2016-01-01,1\n")
    with pytest.raises(ParseError):
        load_dataset(path, "a")


def test_load_is_idempotent(tmp_path):
    path = write(tmp_path, "date,x\n2016-01-02,2\n2016-01-01,1\n")
    assert load_dataset(path, "a") == load_dataset(path, "a")


def test_write_then_reload_round_trips(tmp_path):
    ds = make_dataset("a", {"x": [1.25, float("nan"), 3.5], "y": [0.1, 0.2, 0.3]})
    out = tmp_path / "a.csv"
    write_dataset(ds, out)
    assert load_dataset(out, "a") == ds


def test_common_index_single_dataset_identity():
    ds = make_dataset("a", {"x": [1, 2, 3, 4, 5]})
    assert common_date_index([ds]) == ds.dates


def test_common_index_intersection():
    a = make_dataset("a", {"x": [1, 2, 3]}, start=date(2016, 1, 1))
    b = make_dataset("b", {"x": [1, 2, 3]}, start=date(2016, 1, 2))
    assert common_date_index([a, b]) == (date(2016, 1, 2), date(2016, 1, 3))


def test_common_index_drops_dates_with_missing():
    # Overlap on days 2 and 3, but b is missing its value on day 3.
    a = make_dataset("a", {"x": [1, 2, 3]}, start=date(2016, 1, 1))
    b = make_dataset(
        "b", {"x": [5, float("nan"), 7]}, start=date(2016, 1, 2)
    )
    assert common_date_index([a, b]) == (date(2016, 1, 2),)


def test_common_index_shrinks_monotonically(rng):
    datasets = []
    for i in range(4):
        n = int(rng.integers(5, 30))
        offset = int(rng.integers(0, 10))
        vals = rng.normal(size=n)
        vals[rng.random(n) < 0.2] = np.nan
        datasets.append(
            make_dataset(f"s{i}", {"x": vals}, start=date(2016, 1, 1 + offset))
        )
    for k in range(1, len(datasets)):
        try:
            wider = set(common_date_index(datasets[:k]))
        except NoOverlapError:
            break
        try:
            narrower = set(common_date_index(datasets[: k + 1]))
        except NoOverlapError:
            narrower = set()
        assert narrower <= wider


def test_no_overlap_lists_spans():
    a = make_dataset("a", {"x": [1, 2]}, start=date(2016, 1, 1))
    b = make_dataset("b", {"x": [1, 2]}, start=date(2017, 1, 1))
    with pytest.raises(NoOverlapError) as err:
        common_date_index([a, b])
    message = str(err.value)
    assert "a=2016-01-01..2016-01-02" in message
    assert "b=2017-01-01..2017-01-02" in message


def test_load_repository_manifest(tmp_path):
    write(tmp_path, "date,x\n2016-01-01,1\n2016-01-02,2\n", name="a.csv")
    write(tmp_path, "date,x\n2016-01-01,3\n2016-01-02,4\n2016-01-03,5\n", name="b.csv")
    repo = load_repository(tmp_path)
    assert repo.source_ids == ["a", "b"]
    by_id = {m.source_id: m for m in repo.manifest}
    assert by_id["a"].n_rows == repo["a"].n_rows == 2
    assert by_id["b"].n_rows == repo["b"].n_rows == 3
    assert by_id["b"].last_date == date(2016, 1, 3)


def test_load_repository_empty_dir(tmp_path):
    with pytest.raises(ParseError, match="no datasets"):
        load_repository(tmp_path)
