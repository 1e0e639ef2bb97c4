import gzip
import io

import numpy as np
import pytest

from multinode.ingest import (
    LabelRecord,
    ParseError,
    parse_events,
    parse_labels,
    read_events,
    write_events,
    write_labels,
)
from oracles import random_events


def lines(text):
    return io.BytesIO(text.encode("utf-8"))


class TestParseEvents:
    def test_jsonl_line(self):
        (ev,) = parse_events(lines('{"event_id":"p1","time":2014,"participants":["a","b"]}\n'))
        assert ev.event_id == "p1"
        assert ev.time == 2014
        assert ev.participants == ("a", "b")

    def test_empty_stream(self):
        assert parse_events(lines("")) == []
        assert parse_events(lines(""), "csv") == []

    def test_csv_line(self):
        (ev,) = parse_events(lines("p1,2014,a;b;c\n"), "csv")
        assert ev.participants == ("a", "b", "c")
        assert ev.time == 2014

    def test_csv_header_and_negative_time(self):
        evs = parse_events(lines("event_id,time,participants\np1,-3,a\n"), "csv")
        assert [(e.event_id, e.time) for e in evs] == [("p1", -3)]

    def test_order_preserved(self):
        text = "".join(f'{{"event_id":"e{i}","time":{i},"participants":["x"]}}\n' for i in (3, 1, 2))
        assert [e.event_id for e in parse_events(lines(text))] == ["e3", "e1", "e2"]

    @pytest.mark.parametrize("bad, reason", [
        ('{"event_id":"p2","time":"soon","participants":["a"]}', "integer"),
        ('{"event_id":"p2","time":1,"participants":[]}', "nonempty"),
        ('{"event_id":"p2","time":1}', "missing"),
        ('not json', "invalid JSON"),
        ('{"event_id":"p2","time":1.5,"participants":["a"]}', "integer"),
        ('{"event_id":"p2","time":1,"participants":["a","a"]}', "duplicate participant"),
    ])
    def test_bad_jsonl_line_reports_line_number(self, bad, reason):
        text = '{"event_id":"p1","time":1,"participants":["a"]}\n' + bad + "\n"
        with pytest.raises(ParseError, match=reason) as info:
            parse_events(lines(text))
        assert info.value.line == 2

    @pytest.mark.parametrize("bad", ["p1,2014", "p1,x,a", "p1,2014,a b", "p 1,2014,a", "p1,2014,a;;b"])
    def test_bad_csv_line(self, bad):
        with pytest.raises(ParseError) as info:
            parse_events(lines(bad + "\n"), "csv")
        assert info.value.line == 1

    def test_duplicate_event_id(self):
        with pytest.raises(ParseError, match="duplicate event_id") as info:
            parse_events(lines("p1,1,a\np1,2,b\n"), "csv")
        assert info.value.line == 2

    def test_lenient_collects_all_errors(self):
        text = "p1,1,a;b\nbad\np2,2,b\np3,x,c\np1,3,d\n"
        errors = []
        evs = parse_events(lines(text), "csv", strict=False, errors=errors)
        assert [e.event_id for e in evs] == ["p1", "p2"]
        assert [e.line for e in errors] == [2, 4, 5]

    def test_invalid_utf8(self):
        with pytest.raises(ParseError, match="UTF-8"):
            parse_events(io.BytesIO(b"\xff\xfe\n"))

    @pytest.mark.parametrize("fmt", ["jsonl", "csv"])
    def test_roundtrip(self, fmt):
        events = random_events(np.random.default_rng(0), n_events=40, years=(-5, 2030))
        buf = io.StringIO()
        write_events(events, buf, fmt)
        back = parse_events(io.StringIO(buf.getvalue()), fmt)
        assert back == events

    def test_gzip_file(self, tmp_path):
        path = tmp_path / "ev.csv.gz"
        with gzip.open(path, "wt") as fh:
            fh.write("p1,2014,a;b\n")
        (ev,) = read_events(path)
        assert ev.participants == ("a", "b")


class TestParseLabels:
    def test_single(self):
        assert parse_labels(lines("n1,1\n")) == [LabelRecord("n1", 1)]

    def test_duplicate(self):
        with pytest.raises(ParseError, match="duplicate") as info:
            parse_labels(lines("n1,1\nn1,0\n"))
        assert info.value.line == 2

    def test_bad_label(self):
        with pytest.raises(ParseError, match="0 or 1"):
            parse_labels(lines("n1,2\n"))

    def test_150_rows_counts(self):
        rng = np.random.default_rng(7)
        labels = rng.integers(0, 2, size=150)
        text = "node_id,label\n" + "".join(f"r{i},{l}\n" for i, l in enumerate(labels))
        recs = parse_labels(lines(text))
        assert len(recs) == 150
        # independent scan of the raw text
        raw = text.splitlines()[1:]
        ones = sum(1 for line in raw if line.endswith(",1"))
        zeros = sum(1 for line in raw if line.endswith(",0"))
        assert sum(r.label for r in recs) == ones
        assert sum(1 - r.label for r in recs) == zeros

    def test_roundtrip(self):
        recs = [LabelRecord(f"n{i}", i % 2) for i in range(10)]
        buf = io.StringIO()
        write_labels(recs, buf)
        assert parse_labels(io.StringIO(buf.getvalue())) == recs
