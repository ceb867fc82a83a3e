"""Event log model: attributed events grouped into partially ordered traces.

An event log is the single source of truth for scoring and aggregation.
Traces carry a strict partial order over their events (stored as a set of
precedes-pairs whose transitive closure is the order); logs produced by the
parsers are totally ordered per case.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import WiseError

# An attribute value is text, a 64-bit float, a UTC timestamp (millisecond
# precision), a boolean, or missing (absent key / None).
AttributeValue = str | float | bool | datetime | None


class TimestampError(WiseError):
    """Raised for unparseable timestamp text."""


def parse_timestamp(text: str) -> datetime:
    """Parse ISO-8601 text into a UTC datetime truncated to milliseconds.

    Accepts a trailing 'Z' or a numeric offset; naive timestamps are taken
    as UTC.
    """
    t = text.strip()
    if t.endswith(("Z", "z")):
        t = t[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(t)
    except ValueError as exc:
        raise TimestampError(f"not an ISO-8601 timestamp: {text!r}") from exc
    return to_utc_millis(dt)


def to_utc_millis(dt: datetime) -> datetime:
    """Normalize to UTC and truncate sub-millisecond digits."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=dt.microsecond // 1000 * 1000)


def format_timestamp(dt: datetime) -> str:
    """Serialize to ISO-8601 with millisecond precision and +00:00 offset."""
    return to_utc_millis(dt).isoformat(timespec="milliseconds")


def render_attribute(value: AttributeValue) -> str:
    """Render a value as the string used for grouping and display.

    Missing renders as "(missing)", distinct from empty text.
    """
    if value is None:
        return "(missing)"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, datetime):
        return format_timestamp(value)
    if isinstance(value, float):
        return repr(value)
    return value


def attribute_kind(value: AttributeValue) -> str | None:
    """Classify a single value as categorical, numeric or timestamp."""
    if value is None:
        return None
    if isinstance(value, bool):
        return "categorical"
    if isinstance(value, datetime):
        return "timestamp"
    if isinstance(value, (int, float)):
        return "numeric"
    return "categorical"


@dataclass(slots=True)
class Event:
    """One attributed event. ``activity`` and ``case_id`` are mandatory."""

    event_id: int
    activity: str
    case_id: str
    timestamp: datetime | None = None
    attributes: dict[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError(f"event {self.event_id}: empty activity")
        if not self.case_id:
            raise ValueError(f"event {self.event_id}: empty case_id")


@dataclass(slots=True)
class Trace:
    """All events of one case plus a strict partial order over them.

    ``order`` holds generating precedes-pairs keyed by event_id; the actual
    order is their transitive closure. Ingested traces are total: the pairs
    chain consecutive events of ``events``.
    """

    case_id: str
    events: list[Event]
    order: frozenset[tuple[int, int]]
    case_attributes: dict[str, AttributeValue] = field(default_factory=dict)
    _pos: dict[int, int] = field(init=False, repr=False, compare=False, default_factory=dict)
    _total: bool = field(init=False, repr=False, compare=False, default=False)
    _counts: Counter | None = field(init=False, repr=False, compare=False, default=None)
    _act_pos: dict[str, list[int]] | None = field(init=False, repr=False, compare=False, default=None)
    _succ: dict[int, list[int]] | None = field(init=False, repr=False, compare=False, default=None)
    _reach: dict[int, frozenset[int]] | None = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        ids = set()
        for ev in self.events:
            if ev.case_id != self.case_id:
                raise ValueError(
                    f"trace {self.case_id!r}: event {ev.event_id} belongs to case {ev.case_id!r}"
                )
            if ev.event_id in ids:
                raise ValueError(f"trace {self.case_id!r}: duplicate event_id {ev.event_id}")
            ids.add(ev.event_id)
        for a, b in self.order:
            if a == b:
                raise ValueError(f"trace {self.case_id!r}: reflexive order pair ({a}, {b})")
            if a not in ids or b not in ids:
                raise ValueError(f"trace {self.case_id!r}: order pair ({a}, {b}) names unknown event")
        self._pos = {ev.event_id: i for i, ev in enumerate(self.events)}
        self._check_acyclic()
        chain = {
            (self.events[i].event_id, self.events[i + 1].event_id)
            for i in range(len(self.events) - 1)
        }
        self._total = self.order == frozenset(chain)

    @classmethod
    def from_sequence(
        cls,
        case_id: str,
        events: list[Event],
        case_attributes: dict[str, AttributeValue] | None = None,
    ) -> "Trace":
        """Build a totally ordered trace from an event sequence."""
        pairs = frozenset(
            (events[i].event_id, events[i + 1].event_id) for i in range(len(events) - 1)
        )
        return cls(case_id, events, pairs, dict(case_attributes or {}))

    def _check_acyclic(self) -> None:
        indeg = {ev.event_id: 0 for ev in self.events}
        succ: dict[int, list[int]] = {ev.event_id: [] for ev in self.events}
        for a, b in self.order:
            succ[a].append(b)
            indeg[b] += 1
        queue = [n for n, d in indeg.items() if d == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for m in succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        if seen != len(self.events):
            raise ValueError(f"trace {self.case_id!r}: order contains a cycle")
        self._succ = succ

    def activity_counts(self) -> Counter:
        if self._counts is None:
            self._counts = Counter(ev.activity for ev in self.events)
        return self._counts

    def _activity_positions(self) -> dict[str, list[int]]:
        if self._act_pos is None:
            pos: dict[str, list[int]] = {}
            for i, ev in enumerate(self.events):
                pos.setdefault(ev.activity, []).append(i)
            self._act_pos = pos
        return self._act_pos

    def _reachable(self, eid: int) -> frozenset[int]:
        if self._reach is None:
            self._reach = {}
        cached = self._reach.get(eid)
        if cached is not None:
            return cached
        out: set[int] = set()
        stack = list(self._succ[eid]) if self._succ else []
        while stack:
            n = stack.pop()
            if n in out:
                continue
            out.add(n)
            stack.extend(self._succ[n])  # type: ignore[index]
        result = frozenset(out)
        self._reach[eid] = result
        return result

    def precedes(self, eid1: int, eid2: int) -> bool:
        """True iff event eid1 strictly precedes event eid2."""
        if self._total:
            return self._pos[eid1] < self._pos[eid2]
        return eid2 in self._reachable(eid1)


def eventually_precedes(trace: Trace, a1: str, a2: str) -> bool:
    """True iff some event with activity a1 strictly precedes one with a2.

    The events need not be adjacent; on a single occurrence of an activity
    the strict order makes (a, a) false.
    """
    positions = trace._activity_positions()
    p1 = positions.get(a1)
    p2 = positions.get(a2)
    if not p1 or not p2:
        return False
    if trace._total:
        return p1[0] < p2[-1]
    for i in p1:
        e1 = trace.events[i].event_id
        for j in p2:
            if trace.precedes(e1, trace.events[j].event_id):
                return True
    return False


def count_activity(trace: Trace, activity: str) -> int:
    """Number of events in the trace carrying the given activity."""
    return trace.activity_counts().get(activity, 0)


@dataclass(slots=True)
class FeatureInfo:
    """Catalog entry for one attribute name observed in a log."""

    name: str
    level: str  # "case" | "event"
    kind: str  # "categorical" | "numeric" | "timestamp"
    distinct_values: int


@dataclass(slots=True)
class EventLog:
    """Immutable-by-convention collection of traces plus derived catalogs."""

    traces: list[Trace]
    activity_alphabet: frozenset[str] = field(init=False, compare=False, default=frozenset())
    feature_catalog: list[FeatureInfo] = field(init=False, compare=False, default_factory=list)
    _by_case: dict[str, Trace] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        by_case: dict[str, Trace] = {}
        for tr in self.traces:
            if tr.case_id in by_case:
                raise ValueError(f"duplicate case_id {tr.case_id!r}")
            by_case[tr.case_id] = tr
        self._by_case = by_case
        self.activity_alphabet = frozenset(
            ev.activity for tr in self.traces for ev in tr.events
        )
        self.feature_catalog = self._build_catalog()

    def _build_catalog(self) -> list[FeatureInfo]:
        # An attribute is case-level iff every trace mentioning it carries it
        # in case_attributes (hoisting guarantees that for per-case-constant
        # event attributes).
        values: dict[str, set[str]] = {}
        kinds: dict[str, set[str]] = {}
        case_level: dict[str, bool] = {}
        for tr in self.traces:
            names_here: set[str] = set(tr.case_attributes)
            for name, val in tr.case_attributes.items():
                if val is not None:
                    values.setdefault(name, set()).add(render_attribute(val))
                    kinds.setdefault(name, set()).add(attribute_kind(val))  # type: ignore[arg-type]
            for ev in tr.events:
                for name, val in ev.attributes.items():
                    names_here.add(name)
                    if val is not None:
                        values.setdefault(name, set()).add(render_attribute(val))
                        kinds.setdefault(name, set()).add(attribute_kind(val))  # type: ignore[arg-type]
            for name in names_here:
                hoisted = name in tr.case_attributes
                case_level[name] = case_level.get(name, True) and hoisted
        catalog = []
        for name in sorted(case_level):
            ks = kinds.get(name, set())
            if ks == {"numeric"}:
                kind = "numeric"
            elif ks == {"timestamp"}:
                kind = "timestamp"
            else:
                kind = "categorical"
            catalog.append(
                FeatureInfo(
                    name=name,
                    level="case" if case_level[name] else "event",
                    kind=kind,
                    distinct_values=len(values.get(name, set())),
                )
            )
        return catalog

    def trace(self, case_id: str) -> Trace:
        return self._by_case[case_id]

    def feature(self, name: str) -> FeatureInfo | None:
        for info in self.feature_catalog:
            if info.name == name:
                return info
        return None

    @property
    def event_count(self) -> int:
        return sum(len(tr.events) for tr in self.traces)
