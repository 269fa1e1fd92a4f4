"""Delimited-text ingestion producing labeled samples.

Labels are kept verbatim as strings and never coerced to numbers ("1" and
"1.0" stay distinct categories). Missing markers are the empty cell, "NA"
and "NaN" (case-insensitive); the default policy is to fail on them.
"""

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import EmptyAfterFiltering, InvalidInput, ParseError
from .metric import LabeledSample

_MISSING = {"", "na", "nan"}

MISSING_POLICIES = ("fail", "drop-rows")


@dataclass(frozen=True)
class TableSpec:
    """How to read one delimited file into a labeled sample.

    ``target`` and entries of ``features`` may be column names (requires a
    header) or 0-based indices. ``features=None`` selects every numeric
    column except the target.
    """

    path: str
    target: str | int
    features: tuple | None = None
    missing: str = "fail"
    delimiter: str = ","
    has_header: bool = True


@dataclass(frozen=True)
class LoadedTable:
    """A parsed sample plus the bookkeeping the caller may want to report."""

    sample: LabeledSample
    feature_names: tuple
    target_name: str
    dropped_rows: int


def iris_path() -> Path:
    """Location of the bundled 150-row iris table used in examples and tests."""
    return Path(str(resources.files("ginicorr").joinpath("data/iris.csv")))


def _is_missing(cell: str) -> bool:
    return cell.strip().lower() in _MISSING


def _column_name(header, index: int) -> str:
    return header[index] if header is not None else f"col{index}"


def _resolve_column(token, header, width: int) -> int:
    if header is not None and isinstance(token, str) and token in header:
        if header.count(token) > 1:
            raise InvalidInput(f"column name {token!r} appears more than once in the header")
        return header.index(token)
    try:
        index = int(token)
    except (TypeError, ValueError):
        raise InvalidInput(f"unknown column {token!r}") from None
    if not 0 <= index < width:
        raise InvalidInput(f"column index {index} out of range for {width} columns")
    return index


def _numeric_columns(rows, width: int, skip: int) -> list:
    """Indices of columns whose every non-missing cell parses as a finite real."""
    numeric = []
    for j in range(width):
        if j == skip:
            continue
        seen_value = False
        ok = True
        for row in rows:
            cell = row[j]
            if _is_missing(cell):
                continue
            try:
                value = float(cell)
            except ValueError:
                ok = False
                break
            if not np.isfinite(value):
                ok = False
                break
            seen_value = True
        if ok and seen_value:
            numeric.append(j)
    return numeric


def load(spec: TableSpec) -> LoadedTable:
    """Read ``spec.path`` into a labeled sample.

    Row order is preserved. Under the ``drop-rows`` policy any row with a
    missing feature or label is removed and the dropped count is reported;
    under ``fail`` the first missing or unparseable cell raises
    ``ParseError`` with its file coordinates.
    """
    if spec.missing not in MISSING_POLICIES:
        raise InvalidInput(
            f"missing policy must be one of {MISSING_POLICIES}, got {spec.missing!r}"
        )
    if not isinstance(spec.delimiter, str) or len(spec.delimiter) != 1:
        raise InvalidInput(f"delimiter must be a single character, got {spec.delimiter!r}")

    with open(spec.path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, delimiter=spec.delimiter)
        raw = list(reader)
    if not raw:
        raise InvalidInput(f"{spec.path}: file is empty")

    header = None
    body_start = 0
    if spec.has_header:
        header = [cell.strip() for cell in raw[0]]
        body_start = 1
    rows = raw[body_start:]
    if not rows:
        raise InvalidInput(f"{spec.path}: no data rows")
    width = len(raw[0])
    for offset, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"{spec.path}: line {body_start + offset + 1} has {len(row)} cells, expected {width}",
                row=body_start + offset + 1,
            )

    target_idx = _resolve_column(spec.target, header, width)
    if spec.features is None:
        feature_idx = _numeric_columns(rows, width, skip=target_idx)
        if not feature_idx:
            raise InvalidInput(f"{spec.path}: no numeric feature columns found")
    else:
        feature_idx = [_resolve_column(tok, header, width) for tok in spec.features]
        if not feature_idx:
            raise InvalidInput("feature selection is empty")
        if target_idx in feature_idx:
            raise InvalidInput(
                f"target column {_column_name(header, target_idx)!r} cannot also be a feature"
            )
        if len(set(feature_idx)) != len(feature_idx):
            raise InvalidInput("duplicate feature columns selected")

    data = []
    labels = []
    dropped = 0
    for offset, row in enumerate(rows):
        line = body_start + offset + 1
        label_cell = row[target_idx]
        keep = True
        if _is_missing(label_cell):
            if spec.missing == "fail":
                raise ParseError(
                    f"{spec.path}: missing label at line {line}, "
                    f"column {_column_name(header, target_idx)!r}",
                    row=line,
                    column=_column_name(header, target_idx),
                )
            keep = False
        values = []
        if keep:
            for j in feature_idx:
                cell = row[j]
                if _is_missing(cell):
                    if spec.missing == "fail":
                        raise ParseError(
                            f"{spec.path}: missing value at line {line}, "
                            f"column {_column_name(header, j)!r}",
                            row=line,
                            column=_column_name(header, j),
                        )
                    keep = False
                    break
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{spec.path}: cannot parse {cell!r} at line {line}, "
                        f"column {_column_name(header, j)!r}",
                        row=line,
                        column=_column_name(header, j),
                    ) from None
                if not np.isfinite(value):
                    raise ParseError(
                        f"{spec.path}: non-finite value {cell!r} at line {line}, "
                        f"column {_column_name(header, j)!r}",
                        row=line,
                        column=_column_name(header, j),
                    )
                values.append(value)
        if keep:
            data.append(values)
            labels.append(label_cell)
        else:
            dropped += 1

    if not data:
        raise EmptyAfterFiltering(f"{spec.path}: every row was dropped by the missing-value policy")

    sample = LabeledSample.from_arrays(np.array(data, dtype=np.float64), labels)
    return LoadedTable(
        sample=sample,
        feature_names=tuple(_column_name(header, j) for j in feature_idx),
        target_name=_column_name(header, target_idx),
        dropped_rows=dropped,
    )


def write_csv(sample: LabeledSample, path, feature_names=None, target_name="label") -> None:
    """Write a sample back to CSV with full float precision, so loading the
    file reproduces the sample exactly."""
    names = (
        list(feature_names)
        if feature_names is not None
        else [f"x{j}" for j in range(sample.d)]
    )
    if len(names) != sample.d:
        raise InvalidInput(f"{len(names)} feature names for {sample.d} columns")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([*names, target_name])
        for row, label in zip(sample.data, sample.labels):
            writer.writerow([*(repr(float(v)) for v in row), str(label)])
