"""Command-line interface: ``doubtscore {score,matrix,hist,compare,project,train}``.

Data goes to stdout (or ``--output``), diagnostics to stderr. Exit codes:
0 success, 1 fatal input/IO error, 2 record validation failure under
``--fail-fast``.
"""

import argparse
import contextlib
import json
import os
import sys

import numpy as np

from doubtscore import extended
from doubtscore.errors import InvalidInputError
from doubtscore.ingest_report import (
    FIELDS,
    IngestError,
    RecordError,
    compare_models,
    doubt_histogram,
    parse_records,
    read_reports,
    score_batch,
    write_reports,
)
from doubtscore.matrix_scores import matrix_summary
from doubtscore.projective import certainty_projection
from doubtscore.score_core import softmax, sort_descending, validate_probs
from doubtscore.train_demo import make_blobs, metrics_csv, train

EXIT_OK, EXIT_FATAL, EXIT_RECORD = 0, 1, 2


class CliError(Exception):
    pass


def parse_vector(text):
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise CliError(f"malformed vector literal {text!r}") from exc


def _format_for(path, fmt):
    if fmt:
        return fmt
    return "csv" if str(path).lower().endswith(".csv") else "jsonl"


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _matrix_json(m):
    return [extended.encode_list(row) for row in np.asarray(m)]


def cmd_score(args):
    records, errors = parse_records(args.input, _format_for(args.input, args.format), args.fail_fast)
    for err in errors:
        print(f"warning: skipped {err}", file=sys.stderr)
    reports = score_batch(records, threads=args.threads)
    with _output(args.output) as fh:
        write_reports(reports, fh)
    return EXIT_OK


def _probs_from_args(args):
    if args.probs is not None:
        return validate_probs(parse_vector(args.probs))
    if args.input is None:
        raise CliError("give --probs or --input")
    records, _ = parse_records(args.input, _format_for(args.input, args.format), fail_fast=True)
    if not 1 <= args.line <= len(records):
        raise CliError(f"--line {args.line} out of range (1..{len(records)})")
    rec = records[args.line - 1]
    return validate_probs(rec.values) if rec.kind == "probs" else softmax(rec.values)


def cmd_matrix(args):
    s = matrix_summary(_probs_from_args(args))
    out = {
        "offset": _matrix_json(s["offset"]),
        "certainty": _matrix_json(s["certainty"]),
        "doubt": _matrix_json(s["doubt"]),
        "max_doubt": extended.encode(s["max_doubt"]),
        "row_l1_max": s["row_l1_max"],
    }
    with _output(args.output) as fh:
        fh.write(json.dumps(out) + "\n")
    return EXIT_OK


def cmd_hist(args):
    hist = doubt_histogram(read_reports(args.input), args.field, args.bins)
    with _output(args.output) as fh:
        fh.write(hist.to_csv())
    return EXIT_OK


def cmd_compare(args):
    summary = compare_models(read_reports(args.a), read_reports(args.b))
    with _output(args.output) as fh:
        fh.write(json.dumps(summary) + "\n")
    return EXIT_OK


def cmd_project(args):
    p_sorted, _ = sort_descending(parse_vector(args.probs))
    points = certainty_projection(p_sorted)
    with _output(args.output) as fh:
        fh.write(json.dumps([pt.as_list() for pt in points]) + "\n")
    return EXIT_OK


def cmd_train(args):
    data = make_blobs(args.classes, args.n_per_class, args.spread, args.seed)
    _, metrics = train(data, args.lam, args.epochs, args.lr, args.seed)
    with _output(args.output) as fh:
        fh.write(metrics_csv(metrics))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="doubtscore", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--output", metavar="PATH", help="write here instead of stdout")

    p = sub.add_parser("score", help="score a prediction file into a JSONL report")
    p.add_argument("input")
    p.add_argument("--format", choices=("jsonl", "csv"))
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--fail-fast", action="store_true")
    add_output(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("matrix", help="certainty and doubt matrices for one vector")
    p.add_argument("--probs", metavar="P1,P2,...")
    p.add_argument("--input", help="prediction file to take a record from")
    p.add_argument("--line", type=int, default=1, help="1-based record number in --input")
    p.add_argument("--format", choices=("jsonl", "csv"))
    add_output(p)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("hist", help="histogram of a report field as CSV")
    p.add_argument("input", help="report JSONL from `score`")
    p.add_argument("--field", choices=FIELDS, default="theta")
    p.add_argument("--bins", type=int, default=10)
    add_output(p)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("compare", help="compare two models' reports")
    p.add_argument("a")
    p.add_argument("b")
    add_output(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("project", help="projective certainty coordinates of a probability vector")
    p.add_argument("probs", metavar="P1,P2,...")
    add_output(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("train", help="train the blob classifier with a doubt penalty")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--n-per-class", type=int, default=100)
    p.add_argument("--spread", type=float, default=0.3)
    add_output(p)
    p.set_defaults(func=cmd_train)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RecordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RECORD
    except (IngestError, CliError, InvalidInputError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
