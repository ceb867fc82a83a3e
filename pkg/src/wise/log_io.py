"""Readers and writers for the XES subset and for RFC-4180 CSV logs.

XES subset: ``log`` containing ``trace`` elements containing ``event``
elements; attributes are ``string``/``date``/``int``/``float``/``boolean``
children with ``key``/``value``. ``concept:name`` on a trace is the case id,
on an event the activity; ``time:timestamp`` is the event timestamp.

Ingestion orders each case totally by (timestamp ascending, source index
ascending); events without timestamps sort after timestamped ones, keeping
source order. Event attributes constant within a case are hoisted into
case_attributes (trace-level XES attributes land there directly).
"""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime
from xml.sax.saxutils import quoteattr

from .errors import WiseError
from .event_log import (
    AttributeValue,
    Event,
    EventLog,
    TimestampError,
    Trace,
    format_timestamp,
    parse_timestamp,
    to_utc_millis,
)

CASE_KEY = "concept:name"
ACTIVITY_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"


class MalformedXml(WiseError):
    """XML syntax error; carries the (line, column) position."""

    def __init__(self, message: str, position: tuple[int, int] | None = None):
        self.position = position
        if position:
            message = f"{message} at line {position[0]}, column {position[1]}"
        super().__init__(message)


class MissingCaseId(WiseError):
    pass


class MissingActivity(WiseError):
    pass


class MissingColumn(WiseError):
    pass


class BadTimestamp(WiseError):
    pass


class EmptyCaseId(WiseError):
    pass


@dataclass(slots=True)
class ColumnMapping:
    """Names the CSV columns carrying case id, activity and timestamp."""

    case_col: str
    activity_col: str
    time_col: str | None = None
    time_format: str | None = None  # strptime format; None means ISO-8601


def _as_stream(data: bytes | io.IOBase) -> io.IOBase:
    if isinstance(data, (bytes, bytearray)):
        return io.BytesIO(data)
    return data


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _parse_xes_value(tag: str, raw: str, where: str) -> AttributeValue:
    if tag == "string":
        return raw
    if tag == "date":
        try:
            return parse_timestamp(raw)
        except TimestampError as exc:
            raise MalformedXml(f"{where}: bad date value {raw!r}") from exc
    if tag in ("int", "float"):
        try:
            return float(raw)
        except ValueError as exc:
            raise MalformedXml(f"{where}: bad {tag} value {raw!r}") from exc
    if tag == "boolean":
        return raw.strip().lower() == "true"
    return raw


def parse_xes(data: bytes | io.IOBase) -> EventLog:
    """Parse the XES subset from a byte stream into an EventLog.

    Raises MalformedXml (with position), MissingCaseId or MissingActivity;
    the latter two name the offending trace/event by index.
    """
    stream = _as_stream(data)
    traces: list[Trace] = []
    next_event_id = 0
    trace_index = -1

    # Streaming parse: materialize one trace at a time.
    root: ET.Element | None = None
    current_attrs: dict[str, AttributeValue] | None = None  # trace-level attrs
    current_events: list[tuple[int, dict[str, AttributeValue]]] | None = None
    event_attrs: dict[str, AttributeValue] | None = None
    in_event = False
    event_index = 0
    source_index = 0

    try:
        for action, elem in ET.iterparse(stream, events=("start", "end")):
            tag = _strip_ns(elem.tag)
            if action == "start":
                if root is None:
                    root = elem
                if tag == "trace":
                    trace_index += 1
                    event_index = 0
                    current_attrs = {}
                    current_events = []
                elif tag == "event":
                    in_event = True
                    event_attrs = {}
                continue
            # end events
            if tag in ("string", "date", "int", "float", "boolean"):
                key = elem.get("key")
                value = elem.get("value")
                if key is None or value is None:
                    elem.clear()
                    continue
                target = event_attrs if in_event else current_attrs
                if target is not None:
                    where = (
                        f"trace {trace_index}, event {event_index}"
                        if in_event
                        else f"trace {trace_index}"
                    )
                    target[key] = _parse_xes_value(tag, value, where)
                elem.clear()
            elif tag == "event":
                in_event = False
                if current_events is not None and event_attrs is not None:
                    if ACTIVITY_KEY not in event_attrs or not event_attrs[ACTIVITY_KEY]:
                        raise MissingActivity(
                            f"trace {trace_index}, event {event_index}: no {ACTIVITY_KEY}"
                        )
                    current_events.append((source_index, event_attrs))
                event_attrs = None
                event_index += 1
                source_index += 1
                elem.clear()
            elif tag == "trace":
                assert current_attrs is not None and current_events is not None
                case_id = current_attrs.pop(CASE_KEY, None)
                if not isinstance(case_id, str) or not case_id:
                    raise MissingCaseId(f"trace {trace_index}: no {CASE_KEY}")
                next_event_id = _materialize_trace(
                    traces, str(case_id), current_attrs, current_events, next_event_id
                )
                current_attrs = None
                current_events = None
                elem.clear()
                if root is not None:
                    root.clear()  # drop completed trace husks; bounds memory
    except ET.ParseError as exc:
        raise MalformedXml("malformed XML", exc.position) from exc

    return EventLog(traces)


def _materialize_trace(
    traces: list[Trace],
    case_id: str,
    trace_attrs: dict[str, AttributeValue],
    raw_events: list[tuple[int, dict[str, AttributeValue]]],
    next_event_id: int,
) -> int:
    ordered = _order_events(raw_events)
    events = []
    for _, attrs in ordered:
        activity = attrs.pop(ACTIVITY_KEY)
        ts = attrs.pop(TIMESTAMP_KEY, None)
        if ts is not None and not isinstance(ts, datetime):
            ts = parse_timestamp(str(ts))
        events.append(
            Event(
                event_id=next_event_id,
                activity=str(activity),
                case_id=case_id,
                timestamp=ts,
                attributes=attrs,
            )
        )
        next_event_id += 1
    case_attributes = dict(trace_attrs)
    _hoist_constants(events, case_attributes)
    traces.append(Trace.from_sequence(case_id, events, case_attributes))
    return next_event_id


def _order_events(
    raw: list[tuple[int, dict[str, AttributeValue]]]
) -> list[tuple[int, dict[str, AttributeValue]]]:
    timed = [(i, a) for i, a in raw if isinstance(a.get(TIMESTAMP_KEY), datetime)]
    untimed = [(i, a) for i, a in raw if not isinstance(a.get(TIMESTAMP_KEY), datetime)]
    timed.sort(key=lambda item: (item[1][TIMESTAMP_KEY], item[0]))  # type: ignore[index]
    return timed + untimed


def _hoist_constants(
    events: list[Event], case_attributes: dict[str, AttributeValue]
) -> None:
    """Copy per-case-constant event attributes into case_attributes.

    Trace-level values already present win the name; event maps are left
    untouched so serialization stays lossless.
    """
    seen: dict[str, set[str]] = {}
    first: dict[str, AttributeValue] = {}
    for ev in events:
        for name, val in ev.attributes.items():
            if val is None:
                continue
            rendered = _hoist_key(val)
            seen.setdefault(name, set()).add(rendered)
            if name not in first:
                first[name] = val
    for name, rendered_values in seen.items():
        if len(rendered_values) == 1 and name not in case_attributes:
            case_attributes[name] = first[name]


def _hoist_key(val: AttributeValue) -> str:
    if isinstance(val, datetime):
        return format_timestamp(val)
    return f"{type(val).__name__}:{val!r}"


def write_xes(log: EventLog) -> bytes:
    """Serialize an EventLog to the XES subset (UTF-8 bytes)."""
    out = io.StringIO()
    out.write('<?xml version="1.0" encoding="UTF-8"?>\n<log>\n')
    for tr in log.traces:
        out.write("  <trace>\n")
        _write_attr(out, "    ", CASE_KEY, tr.case_id)
        for name in sorted(tr.case_attributes):
            _write_attr(out, "    ", name, tr.case_attributes[name])
        for ev in tr.events:
            out.write("    <event>\n")
            _write_attr(out, "      ", ACTIVITY_KEY, ev.activity)
            if ev.timestamp is not None:
                _write_attr(out, "      ", TIMESTAMP_KEY, ev.timestamp)
            for name in sorted(ev.attributes):
                val = ev.attributes[name]
                if val is not None:
                    _write_attr(out, "      ", name, val)
            out.write("    </event>\n")
        out.write("  </trace>\n")
    out.write("</log>\n")
    return out.getvalue().encode("utf-8")


def _hoisted_names(tr: Trace) -> set[str]:
    """Case attributes that re-hoist from event attributes on re-parse."""
    candidates: dict[str, set[str]] = {}
    for ev in tr.events:
        for name, val in ev.attributes.items():
            if val is None:
                continue
            candidates.setdefault(name, set()).add(_hoist_key(val))
    out = set()
    for name, rendered in candidates.items():
        if len(rendered) == 1 and name in tr.case_attributes:
            first = next(
                v for ev in tr.events for k, v in ev.attributes.items() if k == name and v is not None
            )
            if tr.case_attributes[name] == first:
                out.add(name)
    return out


def _write_attr(out: io.StringIO, indent: str, key: str, value: AttributeValue) -> None:
    if isinstance(value, bool):
        tag, text = "boolean", "true" if value else "false"
    elif isinstance(value, datetime):
        tag, text = "date", format_timestamp(value)
    elif isinstance(value, (int, float)):
        tag, text = "float", repr(float(value))
    else:
        tag, text = "string", str(value)
    out.write(f"{indent}<{tag} key={quoteattr(key)} value={quoteattr(text)}/>\n")


def parse_csv(data: bytes | io.IOBase, mapping: ColumnMapping) -> EventLog:
    """Parse a header-first CSV log; one event per row, grouped by case.

    All non-core columns become text attributes (empty cell means missing).
    Raises MissingColumn, BadTimestamp (with row index) or EmptyCaseId.
    """
    stream = _as_stream(data)
    text = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("empty input: no header row") from None

    for col in (mapping.case_col, mapping.activity_col, mapping.time_col):
        if col is not None and col not in header:
            raise MissingColumn(f"column {col!r} not in header {header}")
    case_ix = header.index(mapping.case_col)
    act_ix = header.index(mapping.activity_col)
    time_ix = header.index(mapping.time_col) if mapping.time_col else None
    attr_cols = [
        (i, name)
        for i, name in enumerate(header)
        if i not in (case_ix, act_ix) and i != time_ix
    ]

    grouped: dict[str, list[tuple[int, str, datetime | None, dict[str, AttributeValue]]]] = {}
    case_order: list[str] = []
    for row_index, row in enumerate(reader):
        if not row or all(cell == "" for cell in row):
            continue
        case_id = row[case_ix] if case_ix < len(row) else ""
        if not case_id:
            raise EmptyCaseId(f"row {row_index}: empty case id")
        activity = row[act_ix] if act_ix < len(row) else ""
        if not activity:
            raise MissingActivity(f"row {row_index}: empty activity")
        ts: datetime | None = None
        if time_ix is not None and time_ix < len(row) and row[time_ix] != "":
            ts = _parse_csv_timestamp(row[time_ix], mapping.time_format, row_index)
        attrs: dict[str, AttributeValue] = {}
        for i, name in attr_cols:
            cell = row[i] if i < len(row) else ""
            if cell != "":
                attrs[name] = cell
        if case_id not in grouped:
            grouped[case_id] = []
            case_order.append(case_id)
        grouped[case_id].append((row_index, activity, ts, attrs))

    traces: list[Trace] = []
    next_event_id = 0
    for case_id in case_order:
        rows = _order_csv_rows(grouped[case_id])
        events = []
        for _, activity, ts, attrs in rows:
            events.append(
                Event(
                    event_id=next_event_id,
                    activity=activity,
                    case_id=case_id,
                    timestamp=ts,
                    attributes=attrs,
                )
            )
            next_event_id += 1
        case_attributes: dict[str, AttributeValue] = {}
        _hoist_constants(events, case_attributes)
        traces.append(Trace.from_sequence(case_id, events, case_attributes))
    return EventLog(traces)


def _order_csv_rows(rows):
    timed = [r for r in rows if r[2] is not None]
    untimed = [r for r in rows if r[2] is None]
    timed.sort(key=lambda r: (r[2], r[0]))
    untimed.sort(key=lambda r: r[0])
    return timed + untimed


def _parse_csv_timestamp(cell: str, fmt: str | None, row_index: int) -> datetime:
    try:
        if fmt:
            return to_utc_millis(datetime.strptime(cell, fmt))
        return parse_timestamp(cell)
    except (TimestampError, ValueError) as exc:
        raise BadTimestamp(f"row {row_index}: bad timestamp {cell!r}") from exc


def write_csv(log: EventLog, mapping: ColumnMapping) -> bytes:
    """Serialize an EventLog to CSV using the given column mapping.

    Attribute columns are the sorted union of event attribute names; case
    attributes that were hoisted from events are emitted through the event
    rows, others are replicated on every row of the case.
    """
    event_attr_names: set[str] = set()
    pure_case_names: set[str] = set()
    for tr in log.traces:
        hoisted = _hoisted_names(tr)
        for ev in tr.events:
            event_attr_names.update(k for k, v in ev.attributes.items() if v is not None)
        pure_case_names.update(
            k for k, v in tr.case_attributes.items() if v is not None and k not in hoisted
        )
    pure_case_names -= event_attr_names
    attr_names = sorted(event_attr_names | pure_case_names)

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = [mapping.case_col, mapping.activity_col]
    if mapping.time_col:
        header.append(mapping.time_col)
    header.extend(attr_names)
    writer.writerow(header)
    for tr in log.traces:
        for ev in tr.events:
            row = [tr.case_id, ev.activity]
            if mapping.time_col:
                row.append(_format_csv_timestamp(ev.timestamp, mapping.time_format))
            for name in attr_names:
                val = ev.attributes.get(name)
                if val is None and name in pure_case_names:
                    val = tr.case_attributes.get(name)
                row.append("" if val is None else _csv_cell(val))
            writer.writerow(row)
    return out.getvalue().encode("utf-8")


def _format_csv_timestamp(ts: datetime | None, fmt: str | None) -> str:
    if ts is None:
        return ""
    if fmt:
        return ts.strftime(fmt)
    return format_timestamp(ts)


def _csv_cell(val: AttributeValue) -> str:
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, datetime):
        return format_timestamp(val)
    if isinstance(val, float):
        return repr(val)
    return str(val)
