import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsimplex.dataset import (
    Dataset,
    as_matrix,
    default_precision,
    format_float,
    ingest_csv,
    write_dataset,
    write_matrix_csv,
)
from subsimplex.errors import (
    DimensionMismatch,
    EmptyDataset,
    NegativeEntry,
    ParseError,
    RowSumOutOfTolerance,
)


def test_dataset_renormalizes_rows_within_tolerance():
    data = Dataset([[0.5, 0.5 + 5e-7], [0.25, 0.75]], ("a", "b"))
    np.testing.assert_allclose(data.values.sum(axis=1), 1.0, rtol=0.0, atol=1e-15)
    assert data.n_samples == 2
    assert data.n_parts == 2
    assert data.dimension == 1


def test_dataset_rejects_bad_rows():
    with pytest.raises(RowSumOutOfTolerance, match="row 1"):
        Dataset([[0.5, 0.5], [0.5, 0.4]], ("a", "b"))
    with pytest.raises(NegativeEntry, match="column 'b'"):
        Dataset([[1.1, -0.1]], ("a", "b"))
    with pytest.raises(EmptyDataset):
        Dataset(np.empty((0, 3)), ("a", "b", "c"))
    with pytest.raises(DimensionMismatch):
        Dataset([[0.5, 0.5]], ("a", "b", "c"))
    with pytest.raises(DimensionMismatch, match="metadata column 'site'"):
        Dataset([[0.5, 0.5]], ("a", "b"), {"site": ("x", "y")})


def test_dataset_values_are_read_only():
    data = Dataset([[0.5, 0.5]], ("a", "b"))
    with pytest.raises(ValueError):
        data.values[0, 0] = 2.0


def test_as_matrix_accepts_datasets_and_arrays():
    data = Dataset([[0.5, 0.5]], ("a", "b"))
    assert as_matrix(data) is data.values
    np.testing.assert_array_equal(as_matrix([[0.25, 0.75]]), [[0.25, 0.75]])
    with pytest.raises(RowSumOutOfTolerance):
        as_matrix([[0.2, 0.2]])


def test_ingest_csv_with_metadata(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("cluster,V1,V2,V3\n"
                    "1,0.25,0.25,0.5\n"
                    "2,0.1,0.2,0.7\n")
    data = ingest_csv(path, meta=("cluster",))
    assert data.column_labels == ("V1", "V2", "V3")
    assert data.row_metadata["cluster"] == ("1", "2")
    np.testing.assert_allclose(data.values[0], [0.25, 0.25, 0.5])


def test_ingest_csv_error_reporting(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("V1,V2\n0.5,oops\n")
    with pytest.raises(ParseError, match="row 0, column 'V2'"):
        ingest_csv(path)

    path.write_text("V1,V2\n0.5,0.5,0.1\n")
    with pytest.raises(ParseError, match="has 3 cells"):
        ingest_csv(path)

    path.write_text("V1,V2\n0.5,0.5\n")
    with pytest.raises(ParseError, match="metadata column 'site'"):
        ingest_csv(path, meta=("site",))

    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(ParseError, match="is empty"):
        ingest_csv(tmp_path / "empty.csv")

    with pytest.raises(ParseError):
        ingest_csv(tmp_path / "missing.csv")


def test_csv_round_trip_preserves_doubles(tmp_path):
    rng = np.random.default_rng(7)
    raw = rng.random((5, 4))
    data = Dataset(raw / raw.sum(axis=1, keepdims=True),
                   ("a", "b", "c", "d"), {"row": tuple("vwxyz")})
    write_dataset(data, tmp_path / "out.csv")
    back = ingest_csv(tmp_path / "out.csv", meta=("row",))
    # rows are renormalized again on ingestion, which can move entries by
    # one ulp even though 17 significant digits reproduce each double
    np.testing.assert_allclose(back.values, data.values, rtol=0.0, atol=1e-15)
    assert back.row_metadata == data.row_metadata


def test_write_matrix_csv_layout(tmp_path):
    write_matrix_csv(tmp_path / "m.csv", np.array([[0.5, 0.125]]),
                     ["a", "b"], precision=3, text_columns={"mode": ["r1"]})
    assert (tmp_path / "m.csv").read_text() == "mode,a,b\nr1,0.5,0.125\n"
    leftover = [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]
    assert leftover == []


def test_default_precision_env(monkeypatch):
    monkeypatch.delenv("SUBSIMPLEX_PRECISION", raising=False)
    assert default_precision() == 17
    monkeypatch.setenv("SUBSIMPLEX_PRECISION", "6")
    assert default_precision() == 6
    monkeypatch.setenv("SUBSIMPLEX_PRECISION", "18")
    with pytest.raises(ParseError):
        default_precision()
    monkeypatch.setenv("SUBSIMPLEX_PRECISION", "lots")
    with pytest.raises(ParseError):
        default_precision()


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0, allow_subnormal=False))
def test_format_float_round_trips_at_full_precision(x):
    assert float(format_float(x, 17)) == x
