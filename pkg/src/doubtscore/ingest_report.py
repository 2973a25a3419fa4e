"""Prediction files in, score reports and summaries out.

Input records are JSONL (``{"id", "probs" | "logits", "label"?}``) or CSV with
header ``id,kind,v1..vN[,label]`` where kind is ``prob`` or ``logit``.
Reports are JSONL; extended reals are written as numbers or "inf"/"-inf".
"""

import csv
import json
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from doubtscore import extended
from doubtscore.cost import doubt_cost, raw_doubt_cost
from doubtscore.errors import InvalidInputError
from doubtscore.matrix_scores import max_doubt_score
from doubtscore.score_core import (
    neg_log_certainty,
    pairwise_certainty,
    pairwise_doubt,
    raw_certainty,
    raw_doubt,
    softmax,
    validate_logits,
    validate_probs,
)

FIELDS = ("theta", "max_doubt", "neg_log")


class IngestError(Exception):
    """Fatal input problem: unreadable file or unusable header."""


class RecordError(InvalidInputError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class PredictionRecord:
    id: str
    kind: str
    values: list
    true_label: int | None = None
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("probs", "logits"):
            raise InvalidInputError(f"unknown record kind {self.kind!r}")
        if self.kind == "probs":
            validate_probs(self.values)
        else:
            validate_logits(self.values)
        if self.true_label is not None and not 0 <= self.true_label < len(self.values):
            raise InvalidInputError(f"label {self.true_label} out of range")


@dataclass
class ScoreReport:
    id: str
    kind: str
    argmax_index: int
    certainty: list
    doubt: list
    neg_log_certainty: list
    max_doubt: float
    theta: float
    raw_certainty: list | None = None
    raw_doubt: list | None = None
    raw_theta: float | None = None

    def to_dict(self):
        d = {
            "id": self.id,
            "kind": self.kind,
            "argmax_index": self.argmax_index,
            "certainty": [float(c) for c in self.certainty],
            "doubt": extended.encode_list(self.doubt),
            "neg_log_certainty": extended.encode_list(self.neg_log_certainty),
            "max_doubt": extended.encode(self.max_doubt),
            "theta": float(self.theta),
        }
        if self.kind == "logits":
            d["raw_certainty"] = [float(c) for c in self.raw_certainty]
            d["raw_doubt"] = extended.encode_list(self.raw_doubt)
            d["raw_theta"] = float(self.raw_theta)
        return d

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        raw = d.get("kind") == "logits"
        return cls(
            id=d["id"],
            kind=d["kind"],
            argmax_index=int(d["argmax_index"]),
            certainty=[float(c) for c in d["certainty"]],
            doubt=extended.decode_list(d["doubt"]),
            neg_log_certainty=extended.decode_list(d["neg_log_certainty"]),
            max_doubt=extended.decode(d["max_doubt"]),
            theta=float(d["theta"]),
            raw_certainty=[float(c) for c in d["raw_certainty"]] if raw else None,
            raw_doubt=extended.decode_list(d["raw_doubt"]) if raw else None,
            raw_theta=float(d["raw_theta"]) if raw else None,
        )

    @classmethod
    def from_json(cls, line):
        return cls.from_dict(json.loads(line))


def _record_from_json(obj, line):
    if not isinstance(obj, dict):
        raise RecordError(line, "expected a JSON object")
    if "id" not in obj:
        raise RecordError(line, "missing 'id'")
    has_p, has_y = "probs" in obj, "logits" in obj
    if has_p == has_y:
        raise RecordError(line, "need exactly one of 'probs' or 'logits'")
    kind = "probs" if has_p else "logits"
    label = obj.get("label")
    try:
        return PredictionRecord(
            id=str(obj["id"]),
            kind=kind,
            values=[float(v) for v in obj[kind]],
            true_label=None if label is None else int(label),
            line=line,
        )
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise RecordError(line, str(exc)) from exc


_CSV_KINDS = {"prob": "probs", "logit": "logits"}


def _read_jsonl(fh):
    for lineno, text in enumerate(fh, start=1):
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            yield lineno, RecordError(lineno, f"invalid JSON: {exc.msg}")
            continue
        try:
            yield lineno, _record_from_json(obj, lineno)
        except RecordError as exc:
            yield lineno, exc


def _read_csv(fh):
    reader = csv.reader(fh)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        return
    if header[:2] != ["id", "kind"] or len(header) < 4:
        raise IngestError(f"bad CSV header {header!r}; expected id,kind,v1..vN[,label]")
    has_label = header[-1] == "label"
    for row in reader:
        lineno = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        try:
            if len(row) != len(header):
                raise RecordError(lineno, f"expected {len(header)} columns, got {len(row)}")
            kind = _CSV_KINDS.get(row[1].strip())
            if kind is None:
                raise RecordError(lineno, f"kind must be 'prob' or 'logit', got {row[1]!r}")
            cells = row[2:-1] if has_label else row[2:]
            values = [float(c) for c in cells if c.strip()]
            label = row[-1].strip() if has_label else ""
            yield lineno, PredictionRecord(
                id=row[0],
                kind=kind,
                values=values,
                true_label=int(label) if label else None,
                line=lineno,
            )
        except RecordError as exc:
            yield lineno, exc
        except (InvalidInputError, ValueError) as exc:
            yield lineno, RecordError(lineno, str(exc))


def parse_records(path, fmt="jsonl", fail_fast=False):
    """Read prediction records from ``path``.

    Returns ``(records, errors)``. With ``fail_fast`` the first bad record
    raises its ``RecordError`` instead of being collected. An unreadable file
    or a bad CSV header raises ``IngestError``.
    """
    if fmt not in ("jsonl", "csv"):
        raise IngestError(f"unknown format {fmt!r}")
    records, errors = [], []
    try:
        with open(path, newline="" if fmt == "csv" else None) as fh:
            rows = _read_jsonl(fh) if fmt == "jsonl" else _read_csv(fh)
            for _, item in rows:
                if isinstance(item, RecordError):
                    if fail_fast:
                        raise item
                    errors.append(item)
                else:
                    records.append(item)
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestError(f"cannot decode {path}: {exc}") from exc
    return records, errors


def score_record(rec):
    if rec.kind == "probs":
        p = validate_probs(rec.values)
        y = None
    else:
        y = validate_logits(rec.values)
        p = softmax(y)
    cert = pairwise_certainty(p)
    report = ScoreReport(
        id=rec.id,
        kind=rec.kind,
        argmax_index=cert.argmax_index,
        certainty=cert.scores.tolist(),
        doubt=pairwise_doubt(p).scores.tolist(),
        neg_log_certainty=neg_log_certainty(p).scores.tolist(),
        max_doubt=max_doubt_score(p),
        theta=doubt_cost(p),
    )
    if y is not None:
        report.raw_certainty = raw_certainty(y).scores.tolist()
        report.raw_doubt = raw_doubt(y).scores.tolist()
        report.raw_theta = raw_doubt_cost(y)
    return report


def score_batch(records, threads=None):
    """Score every record; output order is input order for any ``threads``."""
    records = list(records)
    if threads is not None and threads <= 1:
        return [score_record(r) for r in records]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(score_record, records))


def read_reports(path):
    with open(path) as fh:
        return [ScoreReport.from_json(line) for line in fh if line.strip()]


def write_reports(reports, fh):
    for r in reports:
        fh.write(r.to_json() + "\n")


def report_value(report, field_name):
    """Scalar used for histograms: theta, max_doubt, or the largest -ln certainty."""
    if field_name == "theta":
        return report.theta
    if field_name == "max_doubt":
        return report.max_doubt
    if field_name == "neg_log":
        return max(v for i, v in enumerate(report.neg_log_certainty) if i != report.argmax_index)
    raise InvalidInputError(f"unknown field {field_name!r}; choose from {FIELDS}")


@dataclass
class Histogram:
    bin_edges: list
    counts: list
    infinite_count: int

    def to_csv(self):
        lines = ["bin_lo,bin_hi,count"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            lines.append(f"{lo!r},{hi!r},{c}")
        lines.append(f"inf,,{self.infinite_count}")
        return "\n".join(lines) + "\n"


def doubt_histogram(reports, field_name="theta", bins=10):
    """Equal-width histogram over the finite values of one report field.

    The last bin is closed on the right. Infinite values are counted in
    ``infinite_count`` and never enter a finite bin.
    """
    if bins < 1:
        raise InvalidInputError(f"bins must be >= 1, got {bins}")
    if not reports:
        raise InvalidInputError("no reports to histogram")
    values = np.array([report_value(r, field_name) for r in reports], dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size:
        counts, edges = np.histogram(finite, bins=bins)
    else:
        counts, edges = np.histogram(finite, bins=bins, range=(0.0, 1.0))
    return Histogram(
        bin_edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
        infinite_count=int(values.size - finite.size),
    )


def compare_models(reports_a, reports_b):
    """Compare two models' reports over their shared ids.

    ``win_fraction_a`` is the share of shared ids where model A has the lower
    theta, with ties counted as half a win.
    """
    a = {r.id: r for r in reports_a}
    b = {r.id: r for r in reports_b}
    shared = [i for i in a if i in b]
    if not shared:
        raise InvalidInputError("the two report sets share no ids")
    ta = [a[i].theta for i in shared]
    tb = [b[i].theta for i in shared]
    wins = sum(1.0 if x < y else 0.5 if x == y else 0.0 for x, y in zip(ta, tb))

    def side(reports, thetas):
        return {
            "mean_theta": statistics.fmean(thetas),
            "median_theta": statistics.median(thetas),
            "infinite_max_doubt": sum(1 for i in shared if math.isinf(reports[i].max_doubt)),
        }

    return {
        "n_shared": len(shared),
        "a": side(a, ta),
        "b": side(b, tb),
        "win_fraction_a": wins / len(shared),
        "missing_in_a": sorted(set(b) - set(a)),
        "missing_in_b": sorted(set(a) - set(b)),
    }
