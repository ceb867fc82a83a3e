"""Seeded synthetic event logs with controlled violation injection.

Every case starts from a conforming template sequence; injection rules
matching the case's drawn feature values then mutate it (drop a mandatory
activity, swap a pair, unbalance a group, duplicate a singular activity,
insert an excluded one). The ground truth records what was applied and the
expected raw violations, recomputed straight from the penalty definitions
by :func:`oracle_score`, which is kept independent of the scoring module.

Randomness comes from splitmix64 (Steele et al.'s 64-bit mix sequence:
state advances by the golden-gamma constant 0x9E3779B97F4A7C15 and outputs
pass the murmur-style finalizer). Each case gets its own stream seeded by
finalizing the generator seed against the case index, so generation is
reproducible per case and across platforms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .errors import WiseError
from .event_log import Event, EventLog, Trace
from .norm import LayerId, View, pair_key

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 output finalizer (bijective avalanche mix)."""
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit generator; documented in the module docstring."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    @classmethod
    def for_case(cls, seed: int, case_index: int) -> "SplitMix64":
        """Independent per-case stream: hash the seed against the index."""
        return cls(_mix64(seed & _MASK64) ^ _mix64((case_index + 1) * _GAMMA & _MASK64))

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def random(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def choice_weighted(self, values: tuple[str, ...], weights: tuple[float, ...]) -> str:
        total = sum(weights)
        u = self.random() * total
        acc = 0.0
        for value, w in zip(values, weights):
            acc += w
            if u < acc:
                return value
        return values[-1]


class NonConformingTemplate(WiseError):
    """The base sequence already violates the reference view."""


@dataclass(slots=True)
class DropMandatory:
    activity: str


@dataclass(slots=True)
class SwapPair:
    first: str
    second: str


@dataclass(slots=True)
class Unbalance:
    group_index: int
    delta: int


@dataclass(slots=True)
class Duplicate:
    activity: str
    times: int = 1


@dataclass(slots=True)
class InsertExcluded:
    activity: str
    times: int = 1


Violation = DropMandatory | SwapPair | Unbalance | Duplicate | InsertExcluded


@dataclass(slots=True)
class InjectionRule:
    """Applies ``violation`` with ``probability`` to cases whose feature
    values equal every entry of ``target`` (empty target matches all)."""

    violation: Violation
    probability: float = 1.0
    target: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


@dataclass(slots=True)
class FeatureSpec:
    name: str
    values: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.weights):
            raise ValueError(f"feature {self.name!r}: values/weights length mismatch")
        if any(w <= 0 for w in self.weights):
            raise ValueError(f"feature {self.name!r}: weights must be positive")


@dataclass(slots=True)
class GeneratorSpec:
    seed: int
    n_cases: int
    base_sequence: tuple[str, ...]
    features: tuple[FeatureSpec, ...] = ()
    injections: tuple[InjectionRule, ...] = ()

    def __post_init__(self) -> None:
        if self.n_cases < 0:
            raise ValueError("n_cases must be >= 0")


@dataclass(slots=True)
class CaseTruth:
    case_id: str
    features: dict[str, str]
    applied: list[str]
    expected_f: tuple[float, float, float, float, float]


@dataclass(slots=True)
class GroundTruth:
    """Per-case expectations plus generator bookkeeping totals."""

    cases: list[CaseTruth]
    n_cases: int
    event_count: int
    activity_counts: dict[str, int]


_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)


def _matches(rule: InjectionRule, features: dict[str, str]) -> bool:
    return all(features.get(k) == v for k, v in rule.target.items())


def _apply(violation: Violation, sequence: list[str], view: View) -> str | None:
    if isinstance(violation, DropMandatory):
        if violation.activity in sequence:
            sequence.remove(violation.activity)
            return f"drop_mandatory:{violation.activity}"
        return None
    if isinstance(violation, SwapPair):
        try:
            i = sequence.index(violation.first)
            j = sequence.index(violation.second)
        except ValueError:
            return None
        sequence[i], sequence[j] = sequence[j], sequence[i]
        return f"swap_pair:{violation.first}<->{violation.second}"
    if isinstance(violation, Unbalance):
        groups = view.constraints.equilibrium
        if not 0 <= violation.group_index < len(groups):
            return None
        member = groups[violation.group_index][1]
        if violation.delta >= 0:
            sequence.extend([member] * violation.delta)
        else:
            for _ in range(-violation.delta):
                if member in sequence:
                    sequence.remove(member)
        return f"unbalance:{violation.group_index}:{violation.delta:+d}"
    if isinstance(violation, Duplicate):
        sequence.extend([violation.activity] * violation.times)
        return f"duplicate:{violation.activity}:{violation.times}"
    sequence.extend([violation.activity] * violation.times)
    return f"insert_excluded:{violation.activity}:{violation.times}"


def generate(spec: GeneratorSpec, norm_view: View) -> tuple[EventLog, GroundTruth]:
    """Generate a log plus its ground truth; deterministic per seed."""
    template = _build_trace("template", 0, 0, list(spec.base_sequence), {})
    if any(oracle_score(norm_view, template)[0]):
        raise NonConformingTemplate(
            f"base sequence {list(spec.base_sequence)} violates view {norm_view.name!r}"
        )

    traces: list[Trace] = []
    truths: list[CaseTruth] = []
    activity_counts: dict[str, int] = {}
    next_event_id = 0
    for i in range(spec.n_cases):
        rng = SplitMix64.for_case(spec.seed, i)
        features = {
            f.name: rng.choice_weighted(f.values, f.weights) for f in spec.features
        }
        sequence = list(spec.base_sequence)
        applied: list[str] = []
        for rule in spec.injections:
            if _matches(rule, features) and rng.random() < rule.probability:
                tag = _apply(rule.violation, sequence, norm_view)
                if tag:
                    applied.append(tag)
        case_id = f"case-{i:05d}"
        trace = _build_trace(case_id, i, next_event_id, sequence, dict(features))
        next_event_id += len(sequence)
        traces.append(trace)
        for activity in sequence:
            activity_counts[activity] = activity_counts.get(activity, 0) + 1
        f_vector = oracle_score(norm_view, trace)[0]
        truths.append(CaseTruth(case_id, features, applied, f_vector))

    log = EventLog(traces)
    truth = GroundTruth(
        cases=truths,
        n_cases=spec.n_cases,
        event_count=log.event_count,
        activity_counts=dict(sorted(activity_counts.items())),
    )
    return log, truth


def _build_trace(
    case_id: str,
    case_index: int,
    first_event_id: int,
    sequence: list[str],
    features: dict[str, str],
) -> Trace:
    base = _EPOCH + timedelta(minutes=case_index)
    events = []
    for j, activity in enumerate(sequence):
        events.append(
            Event(
                event_id=first_event_id + j,
                activity=activity,
                case_id=case_id,
                timestamp=base + timedelta(seconds=j),
                attributes={},
            )
        )
    return Trace.from_sequence(case_id, events, dict(features))


def oracle_score(
    view: View, trace: Trace
) -> tuple[tuple[float, float, float, float, float], float, float, float]:
    """Naive per-definition recomputation of (f1..f5, penalty, score, normalized).

    Set-membership scans, all-pairs order checks and explicit count maps;
    no code shared with the scoring module.
    """
    cs = view.constraints
    activities = [ev.activity for ev in trace.events]

    counts: dict[str, int] = {}
    for a in activities:
        counts[a] = counts.get(a, 0) + 1

    f1 = 0.0
    for a in cs.mandatory:
        present = False
        for b in activities:
            if b == a:
                present = True
                break
        if not present:
            f1 += cs.element_weight(LayerId.FOUNDATIONAL, a)

    f2 = 0.0
    for a1, a2 in cs.sequential:
        fulfilled = False
        for e1 in trace.events:
            if e1.activity != a1:
                continue
            for e2 in trace.events:
                if e2.activity == a2 and trace.precedes(e1.event_id, e2.event_id):
                    fulfilled = True
                    break
            if fulfilled:
                break
        if not fulfilled:
            f2 += cs.element_weight(LayerId.SEQUENTIAL, pair_key(a1, a2))

    f3 = 0.0
    for group in cs.equilibrium:
        reference_count = counts.get(group[0], 0)
        for member in group[1:]:
            f3 += cs.element_weight(LayerId.EQUILIBRIUM, member) * abs(
                counts.get(member, 0) - reference_count
            )

    f4 = 0.0
    for a in cs.singularity:
        f4 += cs.element_weight(LayerId.SINGULARITY, a) * max(0, counts.get(a, 0) - 1)

    f5 = 0.0
    for a in cs.exclusion:
        f5 += cs.element_weight(LayerId.EXCLUSION, a) * counts.get(a, 0)

    fs = (f1, f2, f3, f4, f5)
    penalty = 0.0
    for layer, f in zip(LayerId, fs):
        penalty += view.weights[layer] * f
    score = 1.0 - penalty
    normalized = score if score > 0.0 else 0.0
    return fs, penalty, score, normalized


def ground_truth_to_json(truth: GroundTruth) -> str:
    doc = {
        "n_cases": truth.n_cases,
        "event_count": truth.event_count,
        "activity_counts": truth.activity_counts,
        "cases": [
            {
                "case_id": c.case_id,
                "features": c.features,
                "applied": c.applied,
                "expected_f": list(c.expected_f),
            }
            for c in truth.cases
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_generator_spec(data: bytes | str) -> GeneratorSpec:
    """Parse a GeneratorSpec JSON document (the synth subcommand input)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    features = tuple(
        FeatureSpec(
            name=f["name"],
            values=tuple(f["values"]),
            weights=tuple(float(w) for w in f.get("weights", [1.0] * len(f["values"]))),
        )
        for f in doc.get("features", [])
    )
    injections = []
    for raw in doc.get("injections", []):
        v = raw["violation"]
        kind = v["kind"]
        if kind == "drop_mandatory":
            violation: Violation = DropMandatory(v["activity"])
        elif kind == "swap_pair":
            violation = SwapPair(v["first"], v["second"])
        elif kind == "unbalance":
            violation = Unbalance(int(v["group_index"]), int(v["delta"]))
        elif kind == "duplicate":
            violation = Duplicate(v["activity"], int(v.get("times", 1)))
        elif kind == "insert_excluded":
            violation = InsertExcluded(v["activity"], int(v.get("times", 1)))
        else:
            raise ValueError(f"unknown violation kind {kind!r}")
        injections.append(
            InjectionRule(
                violation=violation,
                probability=float(raw.get("probability", 1.0)),
                target=dict(raw.get("target", {})),
            )
        )
    return GeneratorSpec(
        seed=int(doc["seed"]),
        n_cases=int(doc["n_cases"]),
        base_sequence=tuple(doc["base_sequence"]),
        features=features,
        injections=tuple(injections),
    )
