"""Data model validation and CSV round-trip tests."""

import numpy as np
import pytest

from abroca_power import ScoredDataset, read_csv, split_by_group, validate, write_csv
from abroca_power.errors import (
    CsvFormatError,
    EmptyGroup,
    LengthMismatch,
    NonBinaryColumn,
    NonFiniteScore,
    SingleClassGroup,
)


def minimal_dataset():
    return validate([0.1, 0.9, 0.2, 0.8], [0, 1, 0, 1], [0, 0, 1, 1])


def test_minimal_legal_dataset():
    ds = minimal_dataset()
    assert ds.n == 4
    assert ds.score.dtype == np.float64


def test_single_class_group_rejected():
    with pytest.raises(SingleClassGroup) as err:
        validate([0.1, 0.9, 0.2, 0.8], [0, 1, 1, 1], [0, 0, 1, 1])
    assert err.value.group == 1


def test_nan_score_rejected_with_row():
    with pytest.raises(NonFiniteScore) as err:
        validate([0.1, np.nan, 0.2, 0.8], [0, 1, 0, 1], [0, 0, 1, 1])
    assert err.value.row == 1


def test_length_mismatch_rejected():
    with pytest.raises(LengthMismatch):
        validate([0.1, 0.9, 0.2], [0, 1, 0, 1], [0, 0, 1, 1])


def test_missing_group_rejected():
    with pytest.raises(EmptyGroup) as err:
        validate([0.1, 0.9, 0.2, 0.8], [0, 1, 0, 1], [0, 0, 0, 0])
    assert err.value.group == 1


def test_non_binary_label_rejected():
    with pytest.raises(NonBinaryColumn):
        validate([0.1, 0.9, 0.2, 0.8], [0, 2, 0, 1], [0, 0, 1, 1])


def test_arrays_are_immutable():
    ds = minimal_dataset()
    with pytest.raises(ValueError):
        ds.score[0] = 5.0


def test_split_by_group_sizes_and_partition():
    ds = validate(
        [0.1, 0.9, 0.2, 0.8, 0.5, 0.4],
        [0, 1, 0, 1, 1, 0],
        [0, 0, 1, 1, 1, 1],
    )
    (s0, y0), (s1, y1) = split_by_group(ds)
    assert s0.size == 2 and s1.size == 4
    assert s0.size + s1.size == ds.n
    merged = sorted(zip(np.r_[s0, s1], np.r_[y0, y1]))
    original = sorted(zip(ds.score, ds.label))
    assert merged == original


def test_csv_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(77)
    scores = np.concatenate([
        rng.standard_normal(40) * 1e-8,
        rng.standard_normal(40) * 1e12,
        rng.standard_normal(40),
    ])
    labels = (rng.random(120) < 0.5).astype(int)
    labels[:2] = [0, 1]
    labels[60:62] = [0, 1]
    group = np.r_[np.zeros(60, dtype=int), np.ones(60, dtype=int)]
    ds = validate(scores, labels, group)
    path = tmp_path / "roundtrip.csv"
    write_csv(ds, path)
    back, meta = read_csv(path)
    assert np.array_equal(back.score, ds.score)
    assert np.array_equal(back.label, ds.label)
    assert np.array_equal(back.group, ds.group)
    assert meta["label_mapping"] == {"0": 0, "1": 1}


def test_csv_string_categories_map_first_seen(tmp_path):
    path = tmp_path / "cats.csv"
    path.write_text(
        "score,label,group\n"
        "0.9,pass,blue\n"
        "0.8,fail,blue\n"
        "0.3,pass,red\n"
        "0.1,fail,red\n",
        encoding="utf-8",
    )
    ds, meta = read_csv(path)
    assert meta["label_mapping"] == {"pass": 0, "fail": 1}
    assert meta["group_mapping"] == {"blue": 0, "red": 1}
    assert ds.label.tolist() == [0, 1, 0, 1]
    assert ds.group.tolist() == [0, 0, 1, 1]


def test_csv_literal_binary_not_remapped(tmp_path):
    # "1" appearing first must keep meaning 1, not become category 0
    path = tmp_path / "binary.csv"
    path.write_text(
        "score,label,group\n1.0,1,1\n0.9,0,1\n0.2,1,0\n0.1,0,0\n",
        encoding="utf-8",
    )
    ds, meta = read_csv(path)
    assert meta["label_mapping"] == {"1": 1, "0": 0}
    assert ds.label.tolist() == [1, 0, 1, 0]
    assert ds.group.tolist() == [1, 1, 0, 0]


def test_csv_third_category_names_line(tmp_path):
    path = tmp_path / "three.csv"
    path.write_text(
        "score,label,group\n0.9,a,0\n0.8,b,0\n0.3,c,1\n0.1,a,1\n",
        encoding="utf-8",
    )
    with pytest.raises(CsvFormatError) as err:
        read_csv(path)
    assert err.value.line == 4


def test_csv_bad_score_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "score,label,group\n0.9,1,0\nnot-a-number,0,0\n0.3,1,1\n0.1,0,1\n",
        encoding="utf-8",
    )
    with pytest.raises(CsvFormatError) as err:
        read_csv(path)
    assert err.value.line == 3


def test_csv_wrong_header_rejected(tmp_path):
    path = tmp_path / "hdr.csv"
    path.write_text("a,b,c\n1,0,0\n", encoding="utf-8")
    with pytest.raises(CsvFormatError) as err:
        read_csv(path)
    assert err.value.line == 1


def test_csv_wrong_field_count_names_line(tmp_path):
    path = tmp_path / "fields.csv"
    path.write_text("score,label,group\n0.9,1\n", encoding="utf-8")
    with pytest.raises(CsvFormatError) as err:
        read_csv(path)
    assert err.value.line == 2
