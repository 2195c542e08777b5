"""Rating-file loading, validation, summarization, and report persistence.

Two record shapes are supported, each as JSONL or CSV with fixed field
names:

- rating records: input_id, output_id, system_id, source, kind, value
  ("human" is the error-free source; any other source string names a
  metric; kind is "binary" or "scalar");
- scored samples: input_id, output_id, system_id, score, gold (for
  threshold selection).

Summaries count human rows, metric rows, and the paired subset where both
sources rated the same (input, output) pair. Pairs rated by both sources
are flagged with a warning, never rejected: reusing human-rated pairs as
gold labels for the metric is a legitimate design.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .binarize import ScoredSample
from .estimation import CountSummary
from .exceptions import (
    DataError,
    DomainError,
    DuplicateKeyError,
    OverlapWarning,
    ParseError,
    SchemaError,
)
from .significance import ComparisonResult

__all__ = [
    "RatingRecord",
    "DatasetSummary",
    "HUMAN_SOURCE",
    "load_ratings",
    "load_scored_samples",
    "summarize",
    "summarize_dataset",
    "save_report",
    "load_count_summary",
    "load_comparison_result",
]

HUMAN_SOURCE = "human"

SCHEMA_VERSION = 1

_RATING_FIELDS = ("input_id", "output_id", "system_id", "source", "kind", "value")
_SCORED_FIELDS = ("input_id", "output_id", "system_id", "score", "gold")


@dataclass(frozen=True)
class RatingRecord:
    """One binary rating or scalar score of an (input, output, system) triple."""

    input_id: str
    output_id: str
    system_id: str
    source: str
    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("binary", "scalar"):
            raise DataError(f'kind must be "binary" or "scalar", got {self.kind!r}')
        value = float(self.value)
        if not math.isfinite(value):
            raise DataError(f"value must be finite, got {self.value!r}")
        if self.kind == "binary" and value not in (0.0, 1.0):
            raise DataError(f"binary value must be 0 or 1, got {self.value!r}")
        if self.source == HUMAN_SOURCE and self.kind != "binary":
            raise DataError("human ratings must be binary (kind='binary', value 0 or 1)")
        object.__setattr__(self, "value", value)

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.input_id, self.output_id, self.system_id, self.source)


@dataclass(frozen=True)
class DatasetSummary:
    """Per-(system, source) counts for a whole rating file.

    ``summaries`` maps (system_id, metric_source) to the CountSummary of
    that pairing against the human rows; ``overlap`` gives, per pairing,
    how many (input, output) pairs were rated by both sources.
    """

    summaries: dict[tuple[str, str], CountSummary]
    overlap: dict[tuple[str, str], int]


def _infer_format(path: Path, format: Optional[str]) -> str:
    if format is not None:
        if format not in ("jsonl", "csv"):
            raise DomainError(f'format must be "jsonl" or "csv", got {format!r}')
        return format
    suffix = path.suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    raise DomainError(
        f"cannot infer format from suffix {suffix!r}; pass format='jsonl' or 'csv'"
    )


def _rows_jsonl(path: Path, fields: tuple[str, ...]):
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(row, dict):
                raise ParseError(f"{path}: line {lineno}: expected a JSON object")
            unknown = set(row) - set(fields)
            missing = set(fields) - set(row)
            if unknown or missing:
                raise ParseError(
                    f"{path}: line {lineno}: fields must be exactly {list(fields)} "
                    f"(missing {sorted(missing)}, unknown {sorted(unknown)})"
                )
            yield lineno, row


def _rows_csv(path: Path, fields: tuple[str, ...]):
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return
        if tuple(reader.fieldnames) != fields:
            raise ParseError(
                f"{path}: header must be exactly {','.join(fields)}, "
                f"got {','.join(reader.fieldnames)}"
            )
        for row in reader:
            lineno = reader.line_num
            if None in row or any(v is None for v in row.values()):
                raise ParseError(f"{path}: line {lineno}: wrong number of columns")
            yield lineno, row


def _rows(path: Union[str, Path], format: Optional[str], fields: tuple[str, ...]):
    path = Path(path)
    fmt = _infer_format(path, format)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    return _rows_jsonl(path, fields) if fmt == "jsonl" else _rows_csv(path, fields)


def load_ratings(
    path: Union[str, Path], format: Optional[str] = None
) -> list[RatingRecord]:
    """Load and validate rating records from a JSONL or CSV file.

    The format is inferred from the file suffix unless given. Duplicate
    (input_id, output_id, system_id, source) keys are rejected; binary
    values must be exactly 0 or 1; human rows must be binary.
    """
    records: list[RatingRecord] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, row in _rows(path, format, _RATING_FIELDS):
        try:
            value = float(row["value"])
        except (TypeError, ValueError):
            raise ParseError(
                f"{path}: line {lineno}: value must be numeric, got {row['value']!r}"
            ) from None
        try:
            record = RatingRecord(
                input_id=str(row["input_id"]),
                output_id=str(row["output_id"]),
                system_id=str(row["system_id"]),
                source=str(row["source"]),
                kind=str(row["kind"]),
                value=value,
            )
        except DataError as exc:
            raise type(exc)(f"{path}: line {lineno}: {exc}") from None
        if record.key in seen:
            raise DuplicateKeyError(
                f"{path}: line {lineno}: duplicate rating for key {record.key}; "
                "aggregate repeated annotations upstream"
            )
        seen.add(record.key)
        records.append(record)
    return records


def load_scored_samples(
    path: Union[str, Path], format: Optional[str] = None
) -> list[ScoredSample]:
    """Load scored samples (for threshold selection) from JSONL or CSV."""
    samples: list[ScoredSample] = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, row in _rows(path, format, _SCORED_FIELDS):
        try:
            score = float(row["score"])
            gold = int(float(row["gold"]))
        except (TypeError, ValueError):
            raise ParseError(
                f"{path}: line {lineno}: score must be numeric and gold 0/1"
            ) from None
        if float(row["gold"]) not in (0.0, 1.0):
            raise DataError(f"{path}: line {lineno}: gold must be 0 or 1, got {row['gold']!r}")
        try:
            sample = ScoredSample(
                input_id=str(row["input_id"]),
                output_id=str(row["output_id"]),
                system_id=str(row["system_id"]),
                score=score,
                gold=gold,
            )
        except DomainError as exc:
            raise DataError(f"{path}: line {lineno}: {exc}") from None
        key = (sample.input_id, sample.output_id, sample.system_id)
        if key in seen:
            raise DuplicateKeyError(f"{path}: line {lineno}: duplicate score for {key}")
        seen.add(key)
        samples.append(sample)
    return samples


def _summarize_pair(
    records: Sequence[RatingRecord],
    system: str,
    human_source: str,
    metric_source: Optional[str],
) -> tuple[CountSummary, int]:
    human: dict[tuple[str, str], float] = {}
    metric: dict[tuple[str, str], float] = {}
    for r in records:
        if r.system_id != system:
            continue
        pair = (r.input_id, r.output_id)
        if r.source == human_source:
            if r.kind != "binary":
                raise DataError(
                    f"error-free source {human_source!r} has a scalar rating for "
                    f"{pair}; error-free ratings must be binary"
                )
            human[pair] = r.value
        elif metric_source is not None and r.source == metric_source and r.kind == "binary":
            metric[pair] = r.value
    paired = sorted(set(human) & set(metric))
    n_gold_pos = sum(1 for pair in paired if human[pair] == 1.0)
    n_tp = sum(1 for pair in paired if human[pair] == 1.0 and metric[pair] == 1.0)
    n_gold_neg = len(paired) - n_gold_pos
    n_tn = sum(1 for pair in paired if human[pair] == 0.0 and metric[pair] == 0.0)
    counts = CountSummary(
        n_phi=len(human),
        n_plus=sum(1 for v in human.values() if v == 1.0),
        n_M=len(metric),
        m_plus=sum(1 for v in metric.values() if v == 1.0),
        n_gold_pos=n_gold_pos,
        n_tp=n_tp,
        n_gold_neg=n_gold_neg,
        n_tn=n_tn,
    )
    return counts, len(paired)


def summarize(
    records: Sequence[RatingRecord],
    human_source: str = HUMAN_SOURCE,
    metric_source: Optional[str] = None,
    system: Optional[str] = None,
) -> CountSummary:
    """Sufficient statistics for one (system, metric) from validated records.

    With ``system=None`` the records must all belong to one system; with
    ``metric_source=None`` the records must contain at most one metric
    source (none at all yields n_M = 0 with a warning). Pairs rated by
    both sources become the gold counts for (rho, eta) and are flagged
    with an OverlapWarning since the same evidence then enters twice.
    """
    systems = sorted({r.system_id for r in records})
    if system is None:
        if len(systems) > 1:
            raise DataError(
                f"records contain {len(systems)} systems ({systems}); pass system=..."
            )
        if not systems:
            raise DataError("no records to summarize")
        system = systems[0]
    elif system not in systems:
        raise DataError(f"system {system!r} not found (present: {systems})")
    metric_sources = sorted(
        {r.source for r in records if r.system_id == system and r.source != human_source}
    )
    if metric_source is None:
        if len(metric_sources) > 1:
            raise DataError(
                f"records contain several metric sources ({metric_sources}); "
                "pass metric_source=..."
            )
        if not metric_sources:
            warnings.warn(
                f"no metric ratings for system {system!r}: n_M = 0 and the "
                "(rho, eta) counts are empty",
                UserWarning,
                stacklevel=2,
            )
            metric_source = None
        else:
            metric_source = metric_sources[0]
    elif metric_source not in metric_sources:
        raise DataError(
            f"metric source {metric_source!r} not found for system {system!r} "
            f"(present: {metric_sources})"
        )
    counts, overlap = _summarize_pair(records, system, human_source, metric_source)
    if metric_source is not None and counts.n_M == 0:
        warnings.warn(
            f"metric source {metric_source!r} has no binary ratings for system "
            f"{system!r}: n_M = 0 (scalar scores need binarization first)",
            UserWarning,
            stacklevel=2,
        )
    if overlap:
        warnings.warn(
            f"{overlap} pairs were rated by both {human_source!r} and "
            f"{metric_source!r} for system {system!r}; they are used both as "
            "error-free evidence and as gold labels for (rho, eta)",
            OverlapWarning,
            stacklevel=2,
        )
    return counts


def summarize_dataset(
    records: Sequence[RatingRecord], human_source: str = HUMAN_SOURCE
) -> DatasetSummary:
    """CountSummary per (system, metric source) over a whole file."""
    pairs = sorted(
        {(r.system_id, r.source) for r in records if r.source != human_source}
    )
    systems_with_human_only = sorted(
        {r.system_id for r in records if r.source == human_source}
        - {system for system, _ in pairs}
    )
    summaries: dict[tuple[str, str], CountSummary] = {}
    overlap: dict[tuple[str, str], int] = {}
    for system, source in pairs:
        counts, n_overlap = _summarize_pair(records, system, human_source, source)
        summaries[(system, source)] = counts
        overlap[(system, source)] = n_overlap
    for system in systems_with_human_only:
        counts, n_overlap = _summarize_pair(records, system, human_source, None)
        summaries[(system, human_source)] = counts
        overlap[(system, human_source)] = n_overlap
    return DatasetSummary(summaries=summaries, overlap=overlap)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def save_report(result, path: Union[str, Path]) -> None:
    """Persist a result object as versioned JSON.

    Supports ComparisonResult, CountSummary, and plain dicts (stored under
    their own type tag).
    """
    path = Path(path)
    if isinstance(result, ComparisonResult):
        payload = {"schema_version": SCHEMA_VERSION, "type": "comparison_result"}
        payload.update(result.to_dict())
    elif isinstance(result, CountSummary):
        payload = {"schema_version": SCHEMA_VERSION, "type": "count_summary"}
        payload.update(result.to_dict())
    elif isinstance(result, dict):
        payload = {"schema_version": SCHEMA_VERSION, "type": "report", "payload": result}
    else:
        raise DomainError(f"cannot persist objects of type {type(result).__name__}")
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _load_payload(path: Union[str, Path], expected_type: str) -> dict:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg})") from exc
    _require(isinstance(payload, dict), f"{path}: report must be a JSON object")
    _require(
        payload.get("schema_version") == SCHEMA_VERSION,
        f"{path}: unsupported schema_version {payload.get('schema_version')!r}",
    )
    _require(
        payload.get("type") == expected_type,
        f"{path}: expected a {expected_type} report, got {payload.get('type')!r}",
    )
    return payload


def load_count_summary(path: Union[str, Path]) -> CountSummary:
    """Load a persisted CountSummary, re-validating every field."""
    payload = _load_payload(path, "count_summary")
    fields = ("n_phi", "n_plus", "n_M", "m_plus", "n_gold_pos", "n_tp", "n_gold_neg", "n_tn")
    for name in fields:
        _require(name in payload, f"{path}: missing field {name!r}")
        v = payload[name]
        _require(
            isinstance(v, int) and not isinstance(v, bool) and v >= 0,
            f"{path}: field {name!r} must be a non-negative integer, got {v!r}",
        )
    try:
        return CountSummary(**{name: payload[name] for name in fields})
    except DomainError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def load_comparison_result(path: Union[str, Path]) -> ComparisonResult:
    """Load a persisted ComparisonResult, re-validating every field."""
    payload = _load_payload(path, "comparison_result")
    _require(
        isinstance(payload.get("system_ids"), list) and len(payload["system_ids"]) == 2,
        f"{path}: system_ids must be a two-element list",
    )
    for name in ("mode_1", "mode_2", "epsilon_hat", "prob_greater", "gamma"):
        v = payload.get(name)
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
            f"{path}: field {name!r} must be a finite number, got {v!r}",
        )
    _require(isinstance(payload.get("significant"), bool), f"{path}: significant must be a boolean")
    _require(0.0 <= payload["prob_greater"] <= 1.0, f"{path}: prob_greater must lie in [0, 1]")
    _require(0.0 < payload["gamma"] < 1.0, f"{path}: gamma must lie in (0, 1)")
    return ComparisonResult(
        system_ids=(str(payload["system_ids"][0]), str(payload["system_ids"][1])),
        mode_1=float(payload["mode_1"]),
        mode_2=float(payload["mode_2"]),
        epsilon_hat=float(payload["epsilon_hat"]),
        prob_greater=float(payload["prob_greater"]),
        gamma=float(payload["gamma"]),
        significant=payload["significant"],
    )
