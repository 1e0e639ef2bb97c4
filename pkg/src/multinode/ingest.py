"""Readers and writers for event files and label files.

Event files are JSONL (canonical)::

    {"event_id": "p1", "time": 2014, "participants": ["a", "b"]}

or CSV with ``;``-joined participants and no quoting::

    event_id,time,participants
    p1,2014,a;b;c

Label files are CSV ``node_id,label`` with label 0 (pure) or 1 (multi-node).
Paths ending in ``.gz`` are read and written gzip-compressed.
"""
from __future__ import annotations

import gzip
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .graph import CollabEvent, GraphError

ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")
INT_RE = re.compile(r"^[+-]?\d+$")
EVENT_HEADER = "event_id,time,participants"
LABEL_HEADER = "node_id,label"


class ParseError(ValueError):
    def __init__(self, line: int, reason: str, source: str | None = None):
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {reason}")
        self.line = line
        self.reason = reason
        self.source = source


@dataclass(frozen=True)
class LabelRecord:
    node_id: str
    label: int  # 1 = multi-node (positive), 0 = pure


def _lines(stream) -> Iterator[tuple[int, str]]:
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(lineno, f"invalid UTF-8: {exc}") from None
        yield lineno, line.rstrip("\r\n")


def _parse_int(value, what: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{what} must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and INT_RE.match(value.strip()):
        return int(value)
    raise ValueError(f"{what} must be an integer, got {value!r}")


def _event_from_json(text: str) -> CollabEvent:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ValueError("record is not a JSON object")
    missing = {"event_id", "time", "participants"} - obj.keys()
    if missing:
        raise ValueError(f"missing field(s): {', '.join(sorted(missing))}")
    eid = obj["event_id"]
    if not isinstance(eid, str) or not eid:
        raise ValueError("event_id must be a nonempty string")
    parts = obj["participants"]
    if not isinstance(parts, list) or not parts:
        raise ValueError("participants must be a nonempty list")
    if not all(isinstance(p, str) and p for p in parts):
        raise ValueError("participant ids must be nonempty strings")
    return CollabEvent(eid, _parse_int(obj["time"], "time"), tuple(parts))


def _event_from_csv(text: str) -> CollabEvent:
    fields = text.split(",")
    if len(fields) != 3:
        raise ValueError(f"expected 3 comma-separated fields, got {len(fields)}")
    eid, time, parts = (f.strip() for f in fields)
    if not ID_RE.match(eid):
        raise ValueError(f"bad event_id {eid!r}")
    participants = parts.split(";")
    for p in participants:
        if not ID_RE.match(p):
            raise ValueError(f"bad participant id {p!r}")
    return CollabEvent(eid, _parse_int(time, "time"), tuple(participants))


def parse_events(stream: Iterable, fmt: str = "jsonl", strict: bool = True,
                 errors: list | None = None, source: str | None = None) -> list[CollabEvent]:
    """Parse an event stream (bytes or text lines).

    In strict mode the first bad line raises :class:`ParseError`.  With
    ``strict=False`` bad lines are skipped and their errors appended to
    ``errors`` when a list is given.
    """
    if fmt not in ("jsonl", "csv"):
        raise ValueError(f"unknown event format {fmt!r}")
    parse = _event_from_json if fmt == "jsonl" else _event_from_csv
    events: list[CollabEvent] = []
    seen: set = set()
    for lineno, line in _lines(stream):
        if not line.strip():
            continue
        if fmt == "csv" and lineno == 1 and line.strip() == EVENT_HEADER:
            continue
        try:
            ev = parse(line)
            if ev.event_id in seen:
                raise ValueError(f"duplicate event_id {ev.event_id!r}")
        except (ValueError, GraphError) as exc:
            err = ParseError(lineno, str(exc), source)
            if strict:
                raise err from None
            if errors is not None:
                errors.append(err)
            continue
        seen.add(ev.event_id)
        events.append(ev)
    return events


def parse_labels(stream: Iterable, strict: bool = True, errors: list | None = None,
                 source: str | None = None) -> list[LabelRecord]:
    records: list[LabelRecord] = []
    seen: set = set()
    for lineno, line in _lines(stream):
        text = line.strip()
        if not text:
            continue
        if lineno == 1 and text == LABEL_HEADER:
            continue
        try:
            fields = [f.strip() for f in text.split(",")]
            if len(fields) != 2:
                raise ValueError(f"expected node_id,label, got {len(fields)} field(s)")
            node, label = fields
            if not node:
                raise ValueError("empty node_id")
            if label not in ("0", "1"):
                raise ValueError(f"label must be 0 or 1, got {label!r}")
            if node in seen:
                raise ValueError(f"duplicate node_id {node!r}")
        except ValueError as exc:
            err = ParseError(lineno, str(exc), source)
            if strict:
                raise err from None
            if errors is not None:
                errors.append(err)
            continue
        seen.add(node)
        records.append(LabelRecord(node, int(label)))
    return records


def format_event(ev: CollabEvent, fmt: str = "jsonl") -> str:
    if fmt == "jsonl":
        return json.dumps({"event_id": ev.event_id, "time": ev.time,
                           "participants": list(ev.participants)}, separators=(",", ":"))
    return f"{ev.event_id},{ev.time},{';'.join(ev.participants)}"


def write_events(events: Iterable[CollabEvent], stream: IO[str], fmt: str = "jsonl") -> None:
    if fmt == "csv":
        stream.write(EVENT_HEADER + "\n")
    for ev in events:
        stream.write(format_event(ev, fmt) + "\n")


def write_labels(labels: Iterable[LabelRecord], stream: IO[str]) -> None:
    stream.write(LABEL_HEADER + "\n")
    for rec in labels:
        stream.write(f"{rec.node_id},{rec.label}\n")


def guess_format(path: str | Path) -> str:
    name = str(path)
    if name.endswith(".gz"):
        name = name[:-3]
    return "csv" if name.endswith(".csv") else "jsonl"


def open_binary(path: str | Path) -> IO[bytes]:
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def open_text_out(path: str | Path) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        # mtime=0 keeps compressed output byte-stable across runs
        raw = gzip.GzipFile(filename=str(path), mode="wb", mtime=0)
        return io.TextIOWrapper(raw, encoding="utf-8", newline="\n")
    return open(path, "w", encoding="utf-8", newline="\n")


def read_events(path: str | Path, fmt: str | None = None, strict: bool = True,
                errors: list | None = None) -> list[CollabEvent]:
    with open_binary(path) as fh:
        return parse_events(fh, fmt or guess_format(path), strict, errors, source=str(path))


def read_labels(path: str | Path, strict: bool = True) -> list[LabelRecord]:
    with open_binary(path) as fh:
        return parse_labels(fh, strict, source=str(path))
