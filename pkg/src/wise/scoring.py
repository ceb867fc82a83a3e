"""Per-trace violation counting and weighted scoring against a view.

Each layer yields a raw violation count for a trace (how many mandatory
activities are missing, how many ordering pairs are unfulfilled, the summed
count imbalance per equilibrium group, excess repetitions of singular
activities, and occurrences of excluded activities). The trace penalty is
the layer-weighted sum of those counts, the score is one minus the penalty,
and the normalized score clamps negatives to zero. Raw counts are literal
and unbounded; analysts control magnitude through the weights.

Floats accumulate in a fixed order (layers 1 to 5, elements in schema
order) so outputs are bit-reproducible regardless of scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .event_log import EventLog, Trace, count_activity, eventually_precedes
from .norm import ConstraintSet, LayerId, ProcessNorm, View, pair_key, view_digest


@dataclass(slots=True)
class ViolatedElement:
    """One constraint element that contributed violation magnitude > 0.

    ``vacuous`` marks a sequential pair unfulfilled because at least one of
    its activities never occurs, as opposed to occurring in the wrong order.
    """

    element: str
    magnitude: float
    vacuous: bool = False


@dataclass(slots=True)
class LayerResult:
    layer: LayerId
    raw_violation: float
    weighted_penalty: float
    layer_score: float
    violated_elements: list[ViolatedElement] = field(default_factory=list)


@dataclass(slots=True)
class InstanceScore:
    """Scores of one trace under one view."""

    case_id: str
    view_name: str
    layers: dict[LayerId, LayerResult]
    penalty: float
    score: float
    normalized_score: float


@dataclass(slots=True)
class ScoreTable:
    """One InstanceScore per trace, in log trace order."""

    view_name: str
    rows: list[InstanceScore]
    norm_digest: str


def _eval_mandatory(cs: ConstraintSet, trace: Trace) -> tuple[float, list[ViolatedElement]]:
    raw = 0.0
    violated = []
    for activity in cs.mandatory:
        if count_activity(trace, activity) == 0:
            magnitude = cs.element_weight(LayerId.FOUNDATIONAL, activity)
            raw += magnitude
            violated.append(ViolatedElement(activity, magnitude))
    return raw, violated


def _eval_sequential(cs: ConstraintSet, trace: Trace) -> tuple[float, list[ViolatedElement]]:
    raw = 0.0
    violated = []
    for a1, a2 in cs.sequential:
        if not eventually_precedes(trace, a1, a2):
            key = pair_key(a1, a2)
            magnitude = cs.element_weight(LayerId.SEQUENTIAL, key)
            raw += magnitude
            vacuous = count_activity(trace, a1) == 0 or count_activity(trace, a2) == 0
            violated.append(ViolatedElement(key, magnitude, vacuous=vacuous))
    return raw, violated


def _eval_equilibrium(cs: ConstraintSet, trace: Trace) -> tuple[float, list[ViolatedElement]]:
    raw = 0.0
    violated = []
    for group in cs.equilibrium:
        reference = group[0]
        ref_count = count_activity(trace, reference)
        for member in group[1:]:
            diff = abs(count_activity(trace, member) - ref_count)
            if diff:
                weight = cs.element_weight(LayerId.EQUILIBRIUM, member)
                raw += weight * diff
                violated.append(ViolatedElement(f"{reference}~{member}", weight * diff))
    return raw, violated


def _eval_singularity(cs: ConstraintSet, trace: Trace) -> tuple[float, list[ViolatedElement]]:
    raw = 0.0
    violated = []
    for activity in cs.singularity:
        excess = count_activity(trace, activity) - 1
        if excess > 0:
            weight = cs.element_weight(LayerId.SINGULARITY, activity)
            raw += weight * excess
            violated.append(ViolatedElement(activity, weight * excess))
    return raw, violated


def _eval_exclusion(cs: ConstraintSet, trace: Trace) -> tuple[float, list[ViolatedElement]]:
    raw = 0.0
    violated = []
    for activity in cs.exclusion:
        hits = count_activity(trace, activity)
        if hits:
            weight = cs.element_weight(LayerId.EXCLUSION, activity)
            raw += weight * hits
            violated.append(ViolatedElement(activity, weight * hits))
    return raw, violated


_EVALUATORS = {
    LayerId.FOUNDATIONAL: _eval_mandatory,
    LayerId.SEQUENTIAL: _eval_sequential,
    LayerId.EQUILIBRIUM: _eval_equilibrium,
    LayerId.SINGULARITY: _eval_singularity,
    LayerId.EXCLUSION: _eval_exclusion,
}


def penalty_mandatory(constraints: ConstraintSet, trace: Trace) -> float:
    """Summed element weight of mandatory activities missing from the trace."""
    return _eval_mandatory(constraints, trace)[0]


def penalty_sequential(constraints: ConstraintSet, trace: Trace) -> float:
    """Summed element weight of ordering pairs not fulfilled by the trace.

    A pair counts as violated even when neither activity occurs.
    """
    return _eval_sequential(constraints, trace)[0]


def penalty_equilibrium(constraints: ConstraintSet, trace: Trace) -> float:
    """Weighted absolute count differences against each group's reference."""
    return _eval_equilibrium(constraints, trace)[0]


def penalty_singularity(constraints: ConstraintSet, trace: Trace) -> float:
    """Weighted occurrences beyond the first of each singular activity."""
    return _eval_singularity(constraints, trace)[0]


def penalty_exclusion(constraints: ConstraintSet, trace: Trace) -> float:
    """Weighted occurrence count of excluded activities."""
    return _eval_exclusion(constraints, trace)[0]


def _clamp01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def score_trace(view: View, trace: Trace) -> InstanceScore:
    """Score one trace: layer results, penalty, score, normalized score."""
    layers: dict[LayerId, LayerResult] = {}
    penalty = 0.0
    for layer in LayerId:
        raw, violated = _EVALUATORS[layer](view.constraints, trace)
        w = view.weights[layer]
        weighted = w * raw
        layers[layer] = LayerResult(
            layer=layer,
            raw_violation=raw,
            weighted_penalty=weighted,
            layer_score=_clamp01(1.0 - weighted),
            violated_elements=violated,
        )
        penalty += weighted
    score = 1.0 - penalty
    return InstanceScore(
        case_id=trace.case_id,
        view_name=view.name,
        layers=layers,
        penalty=penalty,
        score=score,
        normalized_score=score if score > 0.0 else 0.0,
    )


def score_log(view: View, log: EventLog, threads: int = 1) -> ScoreTable:
    """Score every trace of the log under one view.

    Rows land in log trace order whatever the thread count, so output is
    identical for any parallelism.
    """
    if threads > 1 and len(log.traces) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda tr: score_trace(view, tr), log.traces))
    else:
        rows = [score_trace(view, tr) for tr in log.traces]
    return ScoreTable(view_name=view.name, rows=rows, norm_digest=view_digest(view))


def score_all_views(norm: ProcessNorm, log: EventLog, threads: int = 1) -> list[ScoreTable]:
    """One ScoreTable per view; a trace may score differently across views."""
    return [score_log(view, log, threads=threads) for view in norm.views]


SCORE_CSV_COLUMNS = (
    "case_id",
    "view",
    "f1",
    "f2",
    "f3",
    "f4",
    "f5",
    "p1",
    "p2",
    "p3",
    "p4",
    "p5",
    "penalty",
    "score",
    "normalized_score",
)


def _fmt(x: float) -> str:
    return repr(x)


def score_table_to_csv(table: ScoreTable) -> str:
    """Fixed-column CSV rendering of a score table."""
    lines = [",".join(SCORE_CSV_COLUMNS)]
    for row in table.rows:
        cells = [_csv_escape(row.case_id), _csv_escape(row.view_name)]
        cells += [_fmt(row.layers[layer].raw_violation) for layer in LayerId]
        cells += [_fmt(row.layers[layer].weighted_penalty) for layer in LayerId]
        cells += [_fmt(row.penalty), _fmt(row.score), _fmt(row.normalized_score)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _csv_escape(text: str) -> str:
    if any(c in text for c in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text


def instance_score_to_dict(row: InstanceScore) -> dict:
    violated = {}
    for layer in LayerId:
        elements = row.layers[layer].violated_elements
        if elements:
            violated[layer.key] = [
                {"element": e.element, "magnitude": e.magnitude, "vacuous": e.vacuous}
                if layer is LayerId.SEQUENTIAL
                else {"element": e.element, "magnitude": e.magnitude}
                for e in elements
            ]
    out = {"case_id": row.case_id, "view": row.view_name}
    for layer in LayerId:
        out[f"f{layer.value}"] = row.layers[layer].raw_violation
    for layer in LayerId:
        out[f"p{layer.value}"] = row.layers[layer].weighted_penalty
    for layer in LayerId:
        out[f"layer_score_{layer.value}"] = row.layers[layer].layer_score
    out["penalty"] = row.penalty
    out["score"] = row.score
    out["normalized_score"] = row.normalized_score
    out["violated_elements"] = violated
    return out


def score_table_to_json(table: ScoreTable) -> str:
    doc = {
        "view": table.view_name,
        "norm_digest": table.norm_digest,
        "rows": [instance_score_to_dict(r) for r in table.rows],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
