"""CSV round-trip and strict-parse tests."""

import pytest

from matchbench.csvio import ParseError, parse_dataset, write_dataset

from helpers import make_dataset, make_record, random_records


def test_round_trip_bit_exact(tmp_path):
    recs = random_records(seed=3, n=40, feature_dim=5)
    ds = make_dataset(recs, feature_dim=5)
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    back = parse_dataset(path)
    assert len(back) == len(ds)
    assert back.feature_dim == 5
    for a, b in zip(ds, back):
        assert a == b  # audio floats included: repr round-trip is exact


def test_round_trip_missing_audio(tmp_path):
    ds = make_dataset([make_record(id="a", audio=None), make_record(id="b")])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    back = parse_dataset(path)
    assert back.by_id()["a"].audio_features is None
    assert back.by_id()["b"].audio_features == (0.0, 0.0)


def test_rejects_missing_schema_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,age\nr0,30\n")
    with pytest.raises(ParseError, match="schema"):
        parse_dataset(path)


def test_rejects_header_mismatch(tmp_path):
    ds = make_dataset([make_record()])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    text = path.read_text().replace("id,age", "age,id", 1)
    path.write_text(text)
    with pytest.raises(ParseError, match="header"):
        parse_dataset(path)


def test_error_carries_line_and_column(tmp_path):
    ds = make_dataset([make_record(id="a"), make_record(id="b", age=44)])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    path.write_text(path.read_text().replace("44", "forty-four"))
    with pytest.raises(ParseError) as exc:
        parse_dataset(path)
    assert exc.value.column == "age"
    assert exc.value.line == 4  # schema line + header + first record


def test_rejects_unknown_enum_value_with_allowed_list(tmp_path):
    ds = make_dataset([make_record()])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    path.write_text(path.read_text().replace("TestAndTrace", "Phone"))
    with pytest.raises(ParseError, match="React"):
        parse_dataset(path)


def test_rejects_nonstrict_bool(tmp_path):
    ds = make_dataset([make_record()])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    path.write_text(path.read_text().replace("false", "False"))
    with pytest.raises(ParseError):
        parse_dataset(path)


def test_rejects_partial_audio_row(tmp_path):
    ds = make_dataset([make_record(audio=(1.5, -2.5))])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    path.write_text(path.read_text().replace("1.5,-2.5", "1.5,"))
    with pytest.raises(ParseError, match="audio"):
        parse_dataset(path)


def test_rejects_duplicate_ids(tmp_path):
    ds = make_dataset([make_record(id="a"), make_record(id="b")])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    path.write_text(path.read_text().replace("\nb,", "\na,"))
    with pytest.raises(ParseError, match="duplicate"):
        parse_dataset(path)


def test_rejects_wrong_cell_count(tmp_path):
    ds = make_dataset([make_record()])
    path = tmp_path / "ds.csv"
    write_dataset(ds, path)
    lines = path.read_text().splitlines()
    lines[2] += ",extra"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="cells"):
        parse_dataset(path)
