"""Scored binary-prediction data model and CSV interchange.

A dataset is a set of (score, outcome label, group id) triples. Scores
may live on any real scale because all downstream analysis is rank-based;
labels and groups are {0, 1}. Each group must contain both outcome
classes, otherwise its ROC curve is undefined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import (
    CsvFormatError,
    EmptyGroup,
    LengthMismatch,
    NonBinaryColumn,
    NonFiniteScore,
    SingleClassGroup,
)

CSV_HEADER = ("score", "label", "group")


@dataclass(frozen=True)
class ScoredDataset:
    """Validated, immutable columns of scored predictions.

    Construction runs all invariant checks; instances are safe to share
    read-only across parallel workers.
    """

    score: np.ndarray
    label: np.ndarray
    group: np.ndarray

    def __post_init__(self):
        score = np.asarray(self.score, dtype=np.float64)
        label = np.asarray(self.label)
        group = np.asarray(self.group)
        if not (score.ndim == label.ndim == group.ndim == 1):
            raise LengthMismatch("score, label, and group must be one-dimensional")
        if not (score.shape[0] == label.shape[0] == group.shape[0]):
            raise LengthMismatch(
                f"column lengths differ: score={score.shape[0]} "
                f"label={label.shape[0]} group={group.shape[0]}"
            )
        bad = np.flatnonzero(~np.isfinite(score))
        if bad.size:
            raise NonFiniteScore(bad[0])
        for name, col in (("label", label), ("group", group)):
            values = np.unique(col)
            if not np.isin(values, (0, 1)).all():
                raise NonBinaryColumn(f"{name} column holds values outside {{0, 1}}")
        label = label.astype(np.int8)
        group = group.astype(np.int8)
        for g in (0, 1):
            mask = group == g
            if not mask.any():
                raise EmptyGroup(g)
            y = label[mask]
            if y.min() == y.max():
                raise SingleClassGroup(g)
        for arr in (score, label, group):
            arr.setflags(write=False)
        object.__setattr__(self, "score", score)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "group", group)

    @classmethod
    def _unchecked(cls, score, label, group):
        # Bypass used by permute_groups: a permuted group column keeps all
        # structural invariants but may transiently break per-group label
        # coverage, which the consumer is expected to detect.
        self = object.__new__(cls)
        object.__setattr__(self, "score", score)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "group", group)
        return self

    @property
    def n(self) -> int:
        return int(self.score.shape[0])


def validate(score, label, group) -> ScoredDataset:
    """Build a dataset from raw columns, raising on the first violated invariant."""
    return ScoredDataset(score, label, group)


def split_by_group(ds: ScoredDataset):
    """Partition into ((scores, labels) of group 0, (scores, labels) of group 1)."""
    m = ds.group == 0
    return (ds.score[m], ds.label[m]), (ds.score[~m], ds.label[~m])


def _category_map(raw_values):
    """Map raw string categories to {0, 1}.

    Literal "0"/"1" columns keep their meaning; anything else is encoded
    by first-seen order. The mapping is returned for run metadata.
    """
    distinct = []
    for v in raw_values:
        if v not in distinct:
            distinct.append(v)
        if len(distinct) > 2:
            break
    if set(distinct) <= {"0", "1"}:
        return {v: int(v) for v in distinct}
    return {v: i for i, v in enumerate(distinct[:2])}


def read_csv(path):
    """Parse a ``score,label,group`` CSV file.

    Returns ``(dataset, metadata)`` where metadata records the category
    mappings applied to the label and group columns. Errors name the
    offending line (1-based, header included).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(1, "file is empty") from None
        if tuple(h.strip().lower() for h in header) != CSV_HEADER:
            raise CsvFormatError(1, f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
        scores = []
        raw_labels = []
        raw_groups = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise CsvFormatError(lineno, f"expected 3 fields, got {len(row)}")
            try:
                s = float(row[0])
            except ValueError:
                raise CsvFormatError(lineno, f"score {row[0]!r} is not a number") from None
            if not np.isfinite(s):
                raise CsvFormatError(lineno, f"score {row[0]!r} is not finite")
            scores.append(s)
            raw_labels.append(row[1].strip())
            raw_groups.append(row[2].strip())
    label_map = _category_map(raw_labels)
    group_map = _category_map(raw_groups)
    for lineno, (lab, grp) in enumerate(zip(raw_labels, raw_groups), start=2):
        if lab not in label_map:
            raise CsvFormatError(lineno, f"label column holds a third category {lab!r}")
        if grp not in group_map:
            raise CsvFormatError(lineno, f"group column holds a third category {grp!r}")
    ds = ScoredDataset(
        np.array(scores, dtype=np.float64),
        np.array([label_map[v] for v in raw_labels], dtype=np.int8),
        np.array([group_map[v] for v in raw_groups], dtype=np.int8),
    )
    metadata = {"label_mapping": label_map, "group_mapping": group_map}
    return ds, metadata


def write_csv(ds: ScoredDataset, path) -> None:
    """Write a dataset in the interchange format.

    Scores use shortest round-trip decimal form, so read_csv(write_csv(ds))
    reproduces them bit-exactly.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for s, y, g in zip(ds.score, ds.label, ds.group):
            fh.write(f"{float(s)!r},{int(y)},{int(g)}\n")
