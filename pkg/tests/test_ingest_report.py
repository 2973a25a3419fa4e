import json
import math
from pathlib import Path

import mpmath
import pytest

from doubtscore.errors import InvalidInputError
from doubtscore.ingest_report import (
    Histogram,
    IngestError,
    PredictionRecord,
    RecordError,
    ScoreReport,
    compare_models,
    doubt_histogram,
    parse_records,
    read_reports,
    score_batch,
)

DATA = Path(__file__).parent / "data"
HALF_PI = math.pi / 2


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_jsonl_example(tmp_path):
    path = write(tmp_path, "a.jsonl", '{"id":"a","probs":[0.6,0.4]}\n\n{"id":"b","logits":[2,1,0],"label":2}\n')
    records, errors = parse_records(path, "jsonl")
    assert errors == []
    assert [(r.id, r.kind, r.values, r.true_label) for r in records] == [
        ("a", "probs", [0.6, 0.4], None),
        ("b", "logits", [2.0, 1.0, 0.0], 2),
    ]


def test_parse_csv_example(tmp_path):
    path = write(tmp_path, "a.csv", "id,kind,v1,v2,v3\na,logit,2,1,0\nb,prob,0.5,0.5,\n")
    records, errors = parse_records(path, "csv")
    assert errors == []
    assert (records[0].kind, records[0].values) == ("logits", [2.0, 1.0, 0.0])
    assert records[1].values == [0.5, 0.5]


def test_parse_csv_with_label(tmp_path):
    path = write(tmp_path, "a.csv", "id,kind,v1,v2,label\na,prob,0.3,0.7,1\nb,logit,1,2,\n")
    records, _ = parse_records(path, "csv")
    assert [r.true_label for r in records] == [1, None]


def test_bad_sum_names_line(tmp_path):
    path = write(tmp_path, "a.jsonl", '{"id":"ok","probs":[1,0]}\n{"id":"bad","probs":[0.5,0.3]}\n')
    records, errors = parse_records(path, "jsonl")
    assert [r.id for r in records] == ["ok"]
    assert len(errors) == 1 and errors[0].line == 2 and "line 2" in str(errors[0])
    with pytest.raises(RecordError, match="line 2"):
        parse_records(path, "jsonl", fail_fast=True)


@pytest.mark.parametrize(
    "line",
    ["not json", '{"probs":[1,0]}', '{"id":"x","probs":[1,0],"logits":[1,0]}', '{"id":"x","logits":[1]}', "[1,2]"],
)
def test_malformed_jsonl_records(tmp_path, line):
    path = write(tmp_path, "a.jsonl", line + "\n")
    records, errors = parse_records(path, "jsonl")
    assert records == [] and len(errors) == 1


def test_csv_bad_kind_and_header(tmp_path):
    path = write(tmp_path, "a.csv", "id,kind,v1,v2\na,weird,1,0\n")
    _, errors = parse_records(path, "csv")
    assert "kind" in str(errors[0])
    with pytest.raises(IngestError):
        parse_records(write(tmp_path, "b.csv", "x,y\n1,2\n"), "csv")


def test_missing_file(tmp_path):
    with pytest.raises(IngestError):
        parse_records(tmp_path / "nope.jsonl", "jsonl")


def test_score_batch_examples():
    recs = [
        PredictionRecord("tie", "probs", [0.5, 0.5]),
        PredictionRecord("hot", "probs", [1.0, 0.0]),
        PredictionRecord("lg", "logits", [2.0, 1.0, 0.0]),
    ]
    tie, hot, lg = score_batch(recs)
    assert tie.to_dict()["doubt"] == [0.0, "inf"]
    assert tie.theta == HALF_PI
    assert hot.theta == 0.0 and hot.max_doubt == 1.0
    assert lg.raw_doubt == [0.0, 1.0, 0.5]


def test_score_batch_order_independent_of_threads(simplex_corpus):
    recs = [PredictionRecord(str(i), "probs", p.tolist()) for i, p in enumerate(simplex_corpus[:300])]
    serial = [r.to_json() for r in score_batch(recs, threads=1)]
    for threads in (2, 8):
        assert [r.to_json() for r in score_batch(recs, threads=threads)] == serial


def test_report_roundtrip_lossless():
    recs, _ = parse_records(DATA / "sample10.jsonl", "jsonl")
    for rep in score_batch(recs):
        back = ScoreReport.from_json(rep.to_json())
        assert back == rep
        assert back.to_json() == rep.to_json()


def test_report_fields_consistent():
    for rep in read_reports(DATA / "golden_report.jsonl"):
        for i, (c, d) in enumerate(zip(rep.certainty, rep.doubt)):
            if i == rep.argmax_index:
                assert (c, d) == (1.0, 0.0)
            elif c == 0:
                assert d == math.inf
            else:
                assert d == 1.0 / c


def test_golden_theta_against_arcsin():
    # the golden oracle uses the arctan form; check it against the arcsin formula
    for rep in read_reports(DATA / "golden_report.jsonl"):
        for cert, theta in [(rep.certainty, rep.theta), (rep.raw_certainty, rep.raw_theta)]:
            if cert is None:
                continue
            with mpmath.workdps(50):
                prod = mpmath.fprod(mpmath.mpf(c) for i, c in enumerate(cert) if i != rep.argmax_index)
                u = prod**2
                exact = mpmath.asin((1 - u) / (1 + u))
            assert abs(theta - float(exact)) <= 4e-16


def _rep(id_, theta, max_doubt=1.0, neg=(0.0, 0.5)):
    return ScoreReport(id_, "probs", 0, [1.0, 0.5], [0.0, 2.0], list(neg), max_doubt, theta)


class TestHistogram:
    def test_single_value_batch(self):
        h = doubt_histogram([_rep(str(i), 0.0) for i in range(5)], "theta", 4)
        assert sum(h.counts) == 5 and max(h.counts) == 5 and h.infinite_count == 0

    def test_infinite_max_doubt(self):
        h = doubt_histogram([_rep("a", 1.0, math.inf), _rep("b", 0.2, 3.0)], "max_doubt", 3)
        assert h.infinite_count == 1 and sum(h.counts) == 1

    def test_hand_binning(self):
        h = doubt_histogram([_rep("a", 0.0), _rep("b", math.pi / 4), _rep("c", HALF_PI)], "theta", 2)
        assert h.counts == [1, 2]
        assert h.bin_edges == pytest.approx([0, math.pi / 4, HALF_PI])

    def test_neg_log_field_uses_largest(self):
        h = doubt_histogram([_rep("a", 0, neg=(0.0, 2.5)), _rep("b", 0, neg=(0.0, math.inf))], "neg_log", 1)
        assert h.counts == [1] and h.infinite_count == 1 and h.bin_edges == pytest.approx([2.0, 3.0])

    def test_all_infinite(self):
        h = doubt_histogram([_rep("a", 1.0, math.inf)], "max_doubt", 2)
        assert h.counts == [0, 0] and h.infinite_count == 1

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            doubt_histogram([], "theta", 3)
        with pytest.raises(InvalidInputError):
            doubt_histogram([_rep("a", 0)], "theta", 0)
        with pytest.raises(InvalidInputError):
            doubt_histogram([_rep("a", 0)], "nope", 2)

    def test_csv(self):
        text = Histogram([0.0, 0.5, 1.0], [2, 1], 3).to_csv()
        assert text == "bin_lo,bin_hi,count\n0.0,0.5,2\n0.5,1.0,1\ninf,,3\n"

    def test_conservation_on_golden(self):
        reps = read_reports(DATA / "golden_report.jsonl")
        for field in ("theta", "max_doubt", "neg_log"):
            for bins in (1, 3, 7):
                h = doubt_histogram(reps, field, bins)
                assert sum(h.counts) + h.infinite_count == len(reps)
                assert len(h.counts) == len(h.bin_edges) - 1


class TestCompare:
    def test_identical(self):
        reps = read_reports(DATA / "golden_report.jsonl")
        s = compare_models(reps, reps)
        assert s["a"] == s["b"] and s["win_fraction_a"] == 0.5

    def test_onehot_vs_uniform(self):
        a = [_rep(str(i), 0.0) for i in range(4)]
        b = [_rep(str(i), HALF_PI, math.inf) for i in range(4)]
        s = compare_models(a, b)
        assert s["a"]["mean_theta"] == 0 and s["b"]["mean_theta"] == HALF_PI
        assert s["win_fraction_a"] == 1.0 and s["b"]["infinite_max_doubt"] == 4

    def test_mixed_hand_computed(self):
        # thetas A = (0.1, 0.5, 0.9), B = (0.2, 0.5, 0.3) on shared ids x, y, z
        a = [_rep("x", 0.1), _rep("y", 0.5), _rep("z", 0.9), _rep("only_a", 0.0)]
        b = [_rep("x", 0.2), _rep("y", 0.5, math.inf), _rep("z", 0.3), _rep("only_b", 0.0)]
        s = compare_models(a, b)
        assert s["n_shared"] == 3
        # wins: x (1), y tie (0.5), z (0) -> 1.5 / 3
        assert s["win_fraction_a"] == pytest.approx(0.5)
        assert s["a"]["mean_theta"] == pytest.approx(0.5)
        assert s["a"]["median_theta"] == 0.5
        assert s["b"]["mean_theta"] == pytest.approx(1.0 / 3)
        assert s["b"]["median_theta"] == 0.3
        assert s["b"]["infinite_max_doubt"] == 1
        assert s["missing_in_a"] == ["only_b"] and s["missing_in_b"] == ["only_a"]
        json.dumps(s)

    def test_disjoint(self):
        with pytest.raises(InvalidInputError):
            compare_models([_rep("a", 0)], [_rep("b", 0)])
