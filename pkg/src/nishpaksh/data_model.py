"""Validated tabular dataset: CSV ingestion, group partitioning, proxy scan.

Sign convention used everywhere downstream: sensitive value 1 is the
privileged group, 0 the unprivileged group. Callers map their own
semantics onto {0,1} when they write the column schema.
"""

from __future__ import annotations

import csv
import functools
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import dumps, fingerprint
from .errors import (
    EmptyFileError,
    EmptyGroupError,
    MissingColumnError,
    NonBinaryValueError,
    SchemaValidationError,
    UnknownAttributeError,
)

DEFAULT_PROXY_THRESHOLD = 0.5
MAX_CATEGORICAL_LEVELS = 50

_MISSING_TOKENS = {"", "na", "nan", "null", "none", "n/a"}


@dataclass(frozen=True)
class ColumnSchema:
    """Role assignment for the columns of an audit CSV.

    The five role sets must be pairwise disjoint; the schema is supplied
    out-of-band (CLI flag or API JSON), never inferred from the file.
    """

    feature_columns: tuple[str, ...]
    sensitive_columns: tuple[str, ...]
    label_column: str
    prediction_column: str
    score_column: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(self.feature_columns))
        object.__setattr__(self, "sensitive_columns", tuple(self.sensitive_columns))
        if not self.sensitive_columns:
            raise SchemaValidationError("schema needs at least one sensitive column")
        if not self.label_column or not self.prediction_column:
            raise SchemaValidationError("schema needs label and prediction columns")
        roles = [
            list(self.feature_columns),
            list(self.sensitive_columns),
            [self.label_column],
            [self.prediction_column],
            [self.score_column] if self.score_column else [],
        ]
        flat = [c for group in roles for c in group]
        if len(flat) != len(set(flat)):
            dupes = sorted({c for c in flat if flat.count(c) > 1})
            raise SchemaValidationError(
                f"column roles overlap: {dupes}", details={"columns": dupes}
            )

    @property
    def all_columns(self) -> tuple[str, ...]:
        cols = list(self.feature_columns) + list(self.sensitive_columns)
        cols += [self.label_column, self.prediction_column]
        if self.score_column:
            cols.append(self.score_column)
        return tuple(cols)

    def to_dict(self) -> dict:
        return {
            "feature_columns": list(self.feature_columns),
            "sensitive_columns": list(self.sensitive_columns),
            "label_column": self.label_column,
            "prediction_column": self.prediction_column,
            "score_column": self.score_column,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ColumnSchema":
        try:
            return cls(
                feature_columns=tuple(data.get("feature_columns", ())),
                sensitive_columns=tuple(data["sensitive_columns"]),
                label_column=data["label_column"],
                prediction_column=data["prediction_column"],
                score_column=data.get("score_column"),
            )
        except KeyError as exc:
            raise SchemaValidationError(f"schema JSON missing key {exc}") from exc


@dataclass(frozen=True)
class ProxyFinding:
    """Association between one feature column and one sensitive attribute."""

    feature: str
    sensitive_attribute: str
    association: float
    measure: str  # "abs-pearson" | "cramers-v"
    flagged: bool
    warning: str | None = None

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "sensitive_attribute": self.sensitive_attribute,
            "association": self.association,
            "measure": self.measure,
            "flagged": self.flagged,
            "warning": self.warning,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProxyFinding":
        return cls(
            feature=data["feature"],
            sensitive_attribute=data["sensitive_attribute"],
            association=float(data["association"]),
            measure=data["measure"],
            flagged=bool(data["flagged"]),
            warning=data.get("warning"),
        )


@dataclass(frozen=True)
class AuditDataset:
    """Immutable, validated audit frame.

    labels / predictions / each sensitive vector hold only {0,1}; every
    sensitive attribute has both groups represented. Feature columns are
    either float arrays (NaN marks a missing cell) or string lists (None
    marks a missing cell). Safe for concurrent reads.
    """

    schema: ColumnSchema
    n_rows: int
    labels: np.ndarray
    predictions: np.ndarray
    sensitive: dict[str, np.ndarray]
    features: dict[str, np.ndarray | list]
    scores: np.ndarray | None = None
    rejected_rows: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_rows < 1:
            raise EmptyFileError("dataset has no rows")
        vectors = {"labels": self.labels, "predictions": self.predictions}
        vectors.update({f"sensitive:{a}": v for a, v in self.sensitive.items()})
        for name, vec in vectors.items():
            if len(vec) != self.n_rows:
                raise SchemaValidationError(f"{name} length != n_rows")
            bad = ~np.isin(vec, (0, 1))
            if bad.any():
                idx = int(np.argmax(bad))
                raise NonBinaryValueError(
                    f"{name} contains non-binary value at row {idx}",
                    details={"column": name, "row": idx},
                )
        for attr, vec in self.sensitive.items():
            if vec.sum() == 0 or vec.sum() == len(vec):
                raise EmptyGroupError(
                    f"sensitive attribute {attr!r} has only one group",
                    details={"attribute": attr},
                )
        for col, vals in self.features.items():
            if len(vals) != self.n_rows:
                raise SchemaValidationError(f"feature {col!r} length != n_rows")
        if self.scores is not None:
            if len(self.scores) != self.n_rows:
                raise SchemaValidationError("scores length != n_rows")
            finite = self.scores[~np.isnan(self.scores)]
            if ((finite < 0) | (finite > 1)).any():
                raise SchemaValidationError("scores outside [0,1]")
        for arr in (self.labels, self.predictions, *self.sensitive.values()):
            arr.setflags(write=False)

    # -- derived views ----------------------------------------------------

    def sensitive_vector(self, attribute: str) -> np.ndarray:
        if attribute not in self.sensitive:
            raise UnknownAttributeError(
                f"unknown sensitive attribute {attribute!r}",
                details={"attribute": attribute},
            )
        return self.sensitive[attribute]

    @functools.cached_property
    def fingerprint(self) -> str:
        """Content hash covering schema and every vector, order-sensitive."""
        payload = {
            "schema": self.schema.to_dict(),
            "labels": self.labels.tolist(),
            "predictions": self.predictions.tolist(),
            "sensitive": {a: v.tolist() for a, v in sorted(self.sensitive.items())},
            "features": {
                c: (
                    [None if _is_nan(v) else v for v in vals.tolist()]
                    if isinstance(vals, np.ndarray)
                    else list(vals)
                )
                for c, vals in sorted(self.features.items())
            },
            "scores": None if self.scores is None else self.scores.tolist(),
        }
        return fingerprint(dumps(payload))

    def to_csv_bytes(self) -> bytes:
        """Serialize back to RFC-4180 CSV; load_csv inverts this losslessly."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = self.schema.all_columns
        writer.writerow(cols)
        for i in range(self.n_rows):
            row = []
            for col in cols:
                row.append(_render_cell(self._cell(col, i)))
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")

    def _cell(self, col: str, i: int):
        if col == self.schema.label_column:
            return int(self.labels[i])
        if col == self.schema.prediction_column:
            return int(self.predictions[i])
        if col in self.sensitive:
            return int(self.sensitive[col][i])
        if col == self.schema.score_column and self.scores is not None:
            v = float(self.scores[i])
            return None if math.isnan(v) else v
        vals = self.features[col]
        if isinstance(vals, np.ndarray):
            v = float(vals[i])
            return None if math.isnan(v) else v
        return vals[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, AuditDataset):
            return NotImplemented
        return self.fingerprint == other.fingerprint

    def __hash__(self):
        return hash(self.fingerprint)


def _is_nan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)


def _render_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip form
    return str(v)


def _parse_binary(cell: str, column: str, row: int) -> int:
    try:
        value = float(cell)
    except ValueError:
        raise NonBinaryValueError(
            f"column {column!r} has non-binary value {cell!r} at row {row}",
            details={"column": column, "row": row, "value": cell},
        ) from None
    if value == 0.0:
        return 0
    if value == 1.0:
        return 1
    raise NonBinaryValueError(
        f"column {column!r} has non-binary value {cell!r} at row {row}",
        details={"column": column, "row": row, "value": cell},
    )


def load_csv(data: bytes | str, schema: ColumnSchema) -> AuditDataset:
    """Parse and validate an audit CSV against the supplied schema.

    Rows with a missing label, prediction, or sensitive cell are rejected
    and reported via `rejected_rows` (0-based data row indices); they are
    never imputed. Missing feature cells are kept as NaN/None and handled
    pairwise by the proxy scan.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    if not text.strip():
        raise EmptyFileError("empty CSV input")

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFileError("empty CSV input") from None
    header = [h.strip() for h in header]

    missing = [c for c in schema.all_columns if c not in header]
    if missing:
        raise MissingColumnError(
            f"columns missing from CSV header: {missing}",
            details={"columns": missing},
        )
    col_idx = {c: header.index(c) for c in schema.all_columns}
    critical = [schema.label_column, schema.prediction_column]
    critical += list(schema.sensitive_columns)

    raw_rows: list[list[str]] = []
    row_numbers: list[int] = []  # original 0-based data-row index per kept row
    rejected: list[int] = []
    data_row = 0
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue  # blank line, not a data row
        cells = {c: row[col_idx[c]].strip() if col_idx[c] < len(row) else "" for c in schema.all_columns}
        if any(cells[c].lower() in _MISSING_TOKENS for c in critical):
            rejected.append(data_row)
        else:
            raw_rows.append(row)
            row_numbers.append(data_row)
        data_row += 1

    if not raw_rows:
        raise EmptyFileError("CSV contains no usable data rows")

    n = len(raw_rows)

    def column(name: str) -> list[str]:
        j = col_idx[name]
        return [(r[j].strip() if j < len(r) else "") for r in raw_rows]

    labels = np.array(
        [
            _parse_binary(c, schema.label_column, row_numbers[i])
            for i, c in enumerate(column(schema.label_column))
        ],
        dtype=np.int8,
    )
    predictions = np.array(
        [
            _parse_binary(c, schema.prediction_column, row_numbers[i])
            for i, c in enumerate(column(schema.prediction_column))
        ],
        dtype=np.int8,
    )
    sensitive: dict[str, np.ndarray] = {}
    for attr in schema.sensitive_columns:
        sensitive[attr] = np.array(
            [_parse_binary(c, attr, row_numbers[i]) for i, c in enumerate(column(attr))],
            dtype=np.int8,
        )

    features: dict[str, np.ndarray | list] = {}
    for col in schema.feature_columns:
        cells = column(col)
        features[col] = _parse_feature(cells)

    scores = None
    if schema.score_column:
        cells = column(schema.score_column)
        parsed = np.full(n, np.nan)
        for i, c in enumerate(cells):
            if c.lower() in _MISSING_TOKENS:
                continue
            try:
                parsed[i] = float(c)
            except ValueError:
                raise SchemaValidationError(
                    f"score column has non-numeric value {c!r} at row {i}",
                    details={"column": schema.score_column, "row": i},
                ) from None
        scores = parsed

    return AuditDataset(
        schema=schema,
        n_rows=n,
        labels=labels,
        predictions=predictions,
        sensitive=sensitive,
        features=features,
        scores=scores,
        rejected_rows=tuple(rejected),
    )


def _parse_feature(cells: list[str]) -> np.ndarray | list:
    """Numeric if every present cell parses as float, else categorical."""
    parsed = np.full(len(cells), np.nan)
    numeric = True
    for i, c in enumerate(cells):
        if c.lower() in _MISSING_TOKENS:
            continue
        try:
            parsed[i] = float(c)
        except ValueError:
            numeric = False
            break
    if numeric:
        return parsed
    return [None if c.lower() in _MISSING_TOKENS else c for c in cells]


def group_partition(dataset: AuditDataset, attribute: str) -> tuple[np.ndarray, np.ndarray]:
    """Split row indices into (privileged, unprivileged) by sensitive value."""
    vec = dataset.sensitive_vector(attribute)
    privileged = np.flatnonzero(vec == 1)
    unprivileged = np.flatnonzero(vec == 0)
    return privileged, unprivileged


def detect_proxies(
    dataset: AuditDataset, threshold: float = DEFAULT_PROXY_THRESHOLD
) -> list[ProxyFinding]:
    """Score every (feature, sensitive attribute) pair for association.

    Numeric features use absolute Pearson correlation against the 0/1
    sensitive vector; categorical features use Cramér's V. Zero-variance
    or over-cardinal features are reported with association 0 and a
    warning instead of aborting the scan. Missing feature cells are
    excluded pairwise.
    """
    if not 0.0 <= threshold <= 1.0:
        raise SchemaValidationError("proxy threshold must lie in [0,1]")
    findings: list[ProxyFinding] = []
    for feature, values in dataset.features.items():
        for attr, svec in dataset.sensitive.items():
            if isinstance(values, np.ndarray):
                assoc, warning = _abs_pearson(values, svec)
                measure = "abs-pearson"
            else:
                assoc, warning = _cramers_v(values, svec)
                measure = "cramers-v"
            findings.append(
                ProxyFinding(
                    feature=feature,
                    sensitive_attribute=attr,
                    association=assoc,
                    measure=measure,
                    flagged=warning is None and assoc >= threshold,
                    warning=warning,
                )
            )
    findings.sort(key=lambda f: (-f.association, f.feature, f.sensitive_attribute))
    return findings


def _abs_pearson(values: np.ndarray, svec: np.ndarray) -> tuple[float, str | None]:
    mask = ~np.isnan(values)
    x = values[mask]
    y = svec[mask].astype(float)
    if len(x) < 2:
        return 0.0, "fewer than two complete observations"
    if np.ptp(x) == 0:
        return 0.0, "constant feature (zero variance)"
    if np.ptp(y) == 0:
        return 0.0, "sensitive attribute constant on complete rows"
    r = np.corrcoef(x, y)[0, 1]
    return float(min(abs(r), 1.0)), None


def _cramers_v(values: list, svec: np.ndarray) -> tuple[float, str | None]:
    pairs = [(v, int(s)) for v, s in zip(values, svec) if v is not None]
    if len(pairs) < 2:
        return 0.0, "fewer than two complete observations"
    levels = sorted({v for v, _ in pairs})
    if len(levels) < 2:
        return 0.0, "constant feature (single level)"
    if len(levels) > MAX_CATEGORICAL_LEVELS:
        return 0.0, f"categorical cardinality {len(levels)} exceeds {MAX_CATEGORICAL_LEVELS}"
    level_idx = {v: i for i, v in enumerate(levels)}
    table = np.zeros((len(levels), 2))
    for v, s in pairs:
        table[level_idx[v], s] += 1
    if (table.sum(axis=1) == 0).any() or (table.sum(axis=0) == 0).any():
        return 0.0, "degenerate contingency table"
    n = table.sum()
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    chi2 = float(((table - expected) ** 2 / expected).sum())
    v = math.sqrt(chi2 / (n * (min(table.shape) - 1)))
    return float(min(v, 1.0)), None
