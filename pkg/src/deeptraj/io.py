"""Trajectory datasets and the CSV formats the command line reads and writes.

Wide trajectory layout::

    subject_id,t0,t1,...,t{T-1}
    s000,10.3,11.9,...

Floats are written with ``repr`` so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DuplicateId, EmptyDataset, NonFiniteValue, ParseError, RaggedRows, SizeMismatch


@dataclass
class TrajectoryDataset:
    """``N`` subjects observed at the same ``T`` time points."""

    values: np.ndarray
    subject_ids: list[str] = field(default_factory=list)
    labels: np.ndarray | None = None
    norm_mean: float | None = None
    norm_sd: float | None = None

    def __post_init__(self):
        self.values = np.array(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise RaggedRows(f"trajectory values must form an N x T array, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteValue("trajectory values must be finite")
        n = self.values.shape[0]
        if not self.subject_ids:
            width = max(3, len(str(max(n - 1, 0))))
            self.subject_ids = [f"s{i:0{width}d}" for i in range(n)]
        self.subject_ids = [str(s) for s in self.subject_ids]
        if len(self.subject_ids) != n:
            raise SizeMismatch(f"{len(self.subject_ids)} ids for {n} trajectories")
        if len(set(self.subject_ids)) != n:
            seen = set()
            dup = next(s for s in self.subject_ids if s in seen or seen.add(s))
            raise DuplicateId(f"duplicate subject_id {dup!r}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if self.labels.shape != (n,):
                raise SizeMismatch(f"{self.labels.shape[0]} labels for {n} trajectories")

    @property
    def n_subjects(self) -> int:
        return self.values.shape[0]

    @property
    def n_times(self) -> int:
        return self.values.shape[1]

    def normalized(self) -> "TrajectoryDataset":
        """Copy z-scored with one global mean and standard deviation."""
        if self.n_subjects == 0:
            raise EmptyDataset("cannot normalize an empty dataset")
        mean = float(self.values.mean())
        sd = float(self.values.std())
        if sd == 0.0:
            sd = 1.0
        return TrajectoryDataset((self.values - mean) / sd, list(self.subject_ids), self.labels, mean, sd)


def _fmt(x) -> str:
    return repr(float(x))


def save_trajectories(dataset: TrajectoryDataset, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id"] + [f"t{j}" for j in range(dataset.n_times)])
        for sid, row in zip(dataset.subject_ids, dataset.values):
            w.writerow([sid] + [_fmt(v) for v in row])


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file")
    return rows[0], rows[1:]


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{where}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise NonFiniteValue(f"{where}: non-finite value {text!r}")
    return v


def load_trajectories(path) -> TrajectoryDataset:
    header, rows = _read_rows(path)
    if header[0] != "subject_id" or len(header) < 2:
        raise ParseError(f"{path}:1: header must start with 'subject_id' followed by time columns")
    n_times = len(header) - 1
    ids, values, seen = [], [], set()
    for lineno, row in enumerate(rows, start=2):
        sid = row[0]
        if len(row) - 1 != n_times:
            raise RaggedRows(f"{path}:{lineno}: subject {sid!r} has {len(row) - 1} values, expected {n_times}")
        if sid in seen:
            raise DuplicateId(f"{path}:{lineno}: duplicate subject_id {sid!r}")
        seen.add(sid)
        ids.append(sid)
        values.append([_parse_float(v, f"{path}:{lineno}:{header[j + 1]}") for j, v in enumerate(row[1:])])
    arr = np.array(values, dtype=np.float64).reshape(len(values), n_times)
    return TrajectoryDataset(arr, ids)


def save_table(path, header: Sequence[str], ids: Sequence[str], rows) -> None:
    """Generic ``id,col1,col2,...`` table of floats (embeddings, memberships)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for sid, row in zip(ids, rows):
            w.writerow([sid] + [_fmt(v) for v in row])


def load_table(path) -> tuple[list[str], list[str], np.ndarray]:
    header, rows = _read_rows(path)
    ids = [r[0] for r in rows]
    for lineno, r in enumerate(rows, start=2):
        if len(r) != len(header):
            raise RaggedRows(f"{path}:{lineno}: row {r[0]!r} has {len(r)} fields, expected {len(header)}")
    vals = np.array([[_parse_float(v, f"{path}:{i + 2}") for v in r[1:]] for i, r in enumerate(rows)],
                    dtype=np.float64).reshape(len(rows), len(header) - 1)
    return header, ids, vals


def save_embedding(path, ids, embedding) -> None:
    embedding = np.asarray(embedding)
    save_table(path, ["subject_id"] + [f"e{j}" for j in range(embedding.shape[1])], ids, embedding)


def save_membership(path, ids, probs) -> None:
    probs = np.asarray(probs)
    save_table(path, ["subject_id"] + [f"p_{j}" for j in range(probs.shape[1])], ids, probs)


def save_labels(path, ids, labels, column: str = "cluster") -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id", column])
        for sid, lab in zip(ids, labels):
            w.writerow([sid, lab.item() if hasattr(lab, "item") else lab])


def load_labels(path) -> tuple[list[str], np.ndarray]:
    header, rows = _read_rows(path)
    if len(header) != 2 or header[0] != "subject_id":
        raise ParseError(f"{path}:1: expected 'subject_id,<label>' header")
    ids = [r[0] for r in rows]
    raw = [r[1] for r in rows]
    try:
        labels = np.array([int(v) for v in raw])
    except ValueError:
        labels = np.array(raw)
    return ids, labels


def save_loss_history(path, history) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "loss"])
        for epoch, loss in enumerate(history, start=1):
            w.writerow([epoch, _fmt(loss)])


def save_matrix(path, names: Sequence[str], matrix) -> None:
    """Square labelled matrix, e.g. the membership correlation matrix."""
    matrix = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + list(names))
        for name, row in zip(names, matrix):
            w.writerow([name] + [_fmt(v) for v in row])


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
