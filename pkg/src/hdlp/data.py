"""Tabular time-series ingestion and stationarity transforms.

Series come in as a CSV with a header row and the time label in the first
column; per-series metadata (transform code 1-6, slow/fast class) lives in
a separate CSV mapping file. Transform codes:

    1  x_t
    2  x_t - x_{t-1}
    3  (x_t - x_{t-1}) - (x_{t-1} - x_{t-2})
    4  log(x_t)
    5  log(x_t) - log(x_{t-1})
    6  (log(x_t) - log(x_{t-1})) - (log(x_{t-1}) - log(x_{t-2}))

Leading entries lost to differencing are marked NaN and trimmed later when
design matrices are built; missing values are never imputed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from hdlp.errors import DataError
from hdlp.numutil import demean  # re-exported: demeaning is a pipeline op

__all__ = [
    "Dataset",
    "apply_transform",
    "transform_dataset",
    "load_csv",
    "load_metadata",
    "attach_metadata",
    "write_matrix_csv",
    "demean",
]

VALID_CODES = frozenset(range(1, 7))
VALID_CLASSES = ("slow", "fast", "none")


@dataclass
class Dataset:
    """A panel of series sharing one time index.

    transform_codes/speed_class are per-series and optional ("none"/code 1
    when a series carries no metadata).
    """

    names: list[str]
    values: np.ndarray  # T_raw x P_raw
    transform_codes: list[int] = field(default_factory=list)
    speed_class: list[str] = field(default_factory=list)
    time_index: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DataError("values must be a T x P matrix")
        t, p = self.values.shape
        if len(self.names) != p:
            raise DataError(f"{len(self.names)} names for {p} columns")
        if not self.transform_codes:
            self.transform_codes = [1] * p
        if not self.speed_class:
            self.speed_class = ["none"] * p
        if not self.time_index:
            self.time_index = [str(i) for i in range(t)]
        if len(self.time_index) != t:
            raise DataError("time index length does not match values")
        if len(self.transform_codes) != p or len(self.speed_class) != p:
            raise DataError("per-series metadata length does not match columns")
        for name, code in zip(self.names, self.transform_codes):
            if code not in VALID_CODES:
                raise DataError(f"series {name!r}: invalid transform code {code}")
        for name, cls in zip(self.names, self.speed_class):
            if cls not in VALID_CLASSES:
                raise DataError(f"series {name!r}: invalid speed class {cls!r}")
        if len(set(self.names)) != len(self.names):
            raise DataError("duplicate series names")
        # Missing values may only form a leading prefix (ragged starts or
        # differencing); internal or trailing gaps are rejected.
        for j, name in enumerate(self.names):
            finite = np.isfinite(self.values[:, j])
            if not finite.any():
                raise DataError(f"series {name!r} has no finite values")
            first = int(np.argmax(finite))
            if not finite[first:].all():
                bad = first + int(np.argmin(finite[first:]))
                raise DataError(f"series {name!r}: internal gap at row {bad}")

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.names.index(name)]
        except ValueError:
            raise DataError(f"unknown series id {name!r}") from None

    def names_by_class(self, cls: str) -> list[str]:
        return [n for n, c in zip(self.names, self.speed_class) if c == cls]


def apply_transform(series, code: int, name: str = "series") -> np.ndarray:
    """Apply one stationarity transform; undefined leading entries are NaN.

    Raises DataError for a code outside 1..6 or a non-positive value under
    a log code (the error names the series and the offending index).
    """
    if code not in VALID_CODES:
        raise DataError(f"series {name!r}: invalid transform code {code}")
    x = np.asarray(series, dtype=float)
    if code >= 4:
        bad = np.where(x <= 0.0)[0]
        if bad.size:
            raise DataError(
                f"series {name!r}: non-positive value at index {bad[0]} "
                f"under log transform code {code}"
            )
        x = np.log(x)
    if code in (1, 4):
        return x.copy()
    d = np.full_like(x, np.nan)
    d[1:] = x[1:] - x[:-1]
    if code in (2, 5):
        return d
    dd = np.full_like(x, np.nan)
    dd[2:] = d[2:] - d[1:-1]
    return dd


def transform_dataset(data: Dataset) -> Dataset:
    """Apply each series' transform code; returns a new Dataset."""
    out = np.column_stack(
        [
            apply_transform(data.values[:, j], data.transform_codes[j], data.names[j])
            for j in range(len(data.names))
        ]
    )
    return replace(data, values=out)


def load_csv(path) -> Dataset:
    """Read a panel CSV: header row, first column is the time label."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    names = [c.strip() for c in rows[0][1:]]
    if not names:
        raise DataError(f"{path}: no series columns")
    time_index = []
    values = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(names) + 1:
            raise DataError(f"{path}: line {i} has {len(row)} fields, expected {len(names) + 1}")
        time_index.append(row[0].strip())
        try:
            values.append([float(c) if c.strip() != "" else np.nan for c in row[1:]])
        except ValueError as exc:
            raise DataError(f"{path}: line {i}: {exc}") from None
    return Dataset(names=names, values=np.array(values), time_index=time_index)


def load_metadata(path) -> dict[str, tuple[int, str]]:
    """Read the series metadata CSV: columns series, transform, class."""
    meta = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip().lower() for f in reader.fieldnames or []]
        for col in ("series", "transform", "class"):
            if col not in fields:
                raise DataError(f"{path}: missing metadata column {col!r}")
        for row in reader:
            row = {k.strip().lower(): v for k, v in row.items()}
            name = row["series"].strip()
            try:
                code = int(row["transform"])
            except ValueError:
                raise DataError(
                    f"{path}: series {name!r}: non-integer transform code "
                    f"{row['transform']!r}"
                ) from None
            if code not in VALID_CODES:
                raise DataError(f"{path}: series {name!r}: invalid transform code {code}")
            cls = row["class"].strip().lower()
            if cls not in VALID_CLASSES:
                raise DataError(f"{path}: series {name!r}: invalid speed class {cls!r}")
            meta[name] = (code, cls)
    return meta


def attach_metadata(data: Dataset, meta: dict[str, tuple[int, str]]) -> Dataset:
    """Return a copy of data with transform codes and speed classes set."""
    codes, classes = [], []
    for name in data.names:
        code, cls = meta.get(name, (1, "none"))
        codes.append(code)
        classes.append(cls)
    return replace(data, transform_codes=codes, speed_class=classes)


def write_matrix_csv(path, matrix, headers, index=None) -> None:
    """Write a matrix as CSV with a header row (optional leading index)."""
    matrix = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(([""] if index is not None else []) + list(headers))
        for i, row in enumerate(matrix):
            prefix = [index[i]] if index is not None else []
            writer.writerow(prefix + [repr(float(v)) for v in row])
