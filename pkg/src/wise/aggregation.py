"""Group instance scores by feature value, build heatmaps, run drill-downs.

Heatmap rows are feature values sorted worst-first by mean normalized score;
columns are the five layers plus an overall column. Boxplot statistics use
median-inclusive linear interpolation for quartiles. Drill-down keeps the
cases matching every feature=value conjunct and, when set, those at or below
the chosen quantile of normalized score.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import WiseError
from .event_log import EventLog, render_attribute
from .norm import LayerId
from .scoring import InstanceScore, ScoreTable

MISSING_VALUE = "(missing)"

#: Column order of every heatmap: layer columns then the overall column.
HEATMAP_COLUMNS = tuple(layer.key for layer in LayerId) + ("overall",)


class UnknownFeature(WiseError):
    pass


class NonCategoricalFeature(WiseError):
    pass


class UnknownView(WiseError):
    pass


@dataclass(slots=True)
class AggregationCell:
    """Score statistics of one (feature, value, layer) population."""

    feature: str
    value: str
    layer: LayerId | None  # None is the overall (normalized score) column
    n_cases: int
    mean: float
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @property
    def layer_key(self) -> str:
        return "overall" if self.layer is None else self.layer.key


@dataclass(slots=True)
class HeatmapMatrix:
    """Mean scores per (feature value, layer), rows sorted worst-first."""

    feature: str
    columns: tuple[str, ...]
    rows: list[str]
    cells: list[list[float]]
    volumes: list[int]


@dataclass(slots=True)
class FilterSpec:
    """Drill-down predicate: equality conjuncts plus a low-score quantile."""

    view: str
    equals: list[tuple[str, str]] = field(default_factory=list)
    score_quantile: float | None = None

    def __post_init__(self) -> None:
        if not self.equals and self.score_quantile is None:
            raise ValueError("filter needs at least one criterion")
        if self.score_quantile is not None and not 0.0 < self.score_quantile <= 1.0:
            raise ValueError(f"score_quantile {self.score_quantile} outside (0, 1]")


def quantile_inclusive(values: list[float], q: float) -> float:
    """Median-inclusive linear interpolation at fraction q of sorted data."""
    ordered = sorted(values)
    n = len(ordered)
    if n == 0:
        raise ValueError("no values")
    if n == 1:
        return ordered[0]
    h = (n - 1) * q
    lo = math.floor(h)
    hi = math.ceil(h)
    return ordered[lo] + (h - lo) * (ordered[hi] - ordered[lo])


def _stats(feature: str, value: str, layer: LayerId | None, scores: list[float]) -> AggregationCell:
    return AggregationCell(
        feature=feature,
        value=value,
        layer=layer,
        n_cases=len(scores),
        mean=sum(scores) / len(scores),
        min=min(scores),
        q1=quantile_inclusive(scores, 0.25),
        median=quantile_inclusive(scores, 0.5),
        q3=quantile_inclusive(scores, 0.75),
        max=max(scores),
    )


def _require_groupable(log: EventLog, feature: str) -> None:
    info = log.feature(feature)
    if info is None:
        raise UnknownFeature(f"feature {feature!r} not in the log's catalog")
    if info.level != "case":
        raise NonCategoricalFeature(
            f"feature {feature!r} varies within cases; only case-level features group"
        )
    if info.kind != "categorical":
        raise NonCategoricalFeature(
            f"feature {feature!r} is {info.kind}; bin it first (not supported here)"
        )


def _case_value(log: EventLog, case_id: str, feature: str) -> str:
    value = log.trace(case_id).case_attributes.get(feature)
    return MISSING_VALUE if value is None else render_attribute(value)


def aggregate(table: ScoreTable, log: EventLog, feature: str) -> list[AggregationCell]:
    """Cells for every (distinct value, layer or overall) of one feature.

    Cases without a value group under ``(missing)``. Output is sorted by
    value then layer so repeated calls are identical. An empty log (e.g. a
    drill-down that matched nothing) yields no cells; it has no catalog to
    validate the feature against.
    """
    if not log.traces:
        return []
    _require_groupable(log, feature)
    members: dict[str, list[InstanceScore]] = {}
    for row in table.rows:
        members.setdefault(_case_value(log, row.case_id, feature), []).append(row)

    cells: list[AggregationCell] = []
    for value in sorted(members):
        rows = members[value]
        for layer in LayerId:
            cells.append(_stats(feature, value, layer, [r.layers[layer].layer_score for r in rows]))
        cells.append(_stats(feature, value, None, [r.normalized_score for r in rows]))
    return cells


def build_heatmap(
    table: ScoreTable, log: EventLog, feature: str, statistic: str = "mean"
) -> HeatmapMatrix:
    """Assemble aggregate cells into a matrix, worst first.

    ``statistic`` picks the cell value ("mean" or "median"); rows sort by
    that statistic on the overall column, ties by value string.
    """
    if statistic not in ("mean", "median"):
        raise ValueError(f"statistic must be 'mean' or 'median', not {statistic!r}")
    cells = aggregate(table, log, feature)
    by_value: dict[str, dict[str, AggregationCell]] = {}
    for cell in cells:
        by_value.setdefault(cell.value, {})[cell.layer_key] = cell

    def pick(cell: AggregationCell) -> float:
        return cell.mean if statistic == "mean" else cell.median

    ordered = sorted(by_value, key=lambda v: (pick(by_value[v]["overall"]), v))
    rows: list[str] = []
    matrix: list[list[float]] = []
    volumes: list[int] = []
    for value in ordered:
        rows.append(value)
        matrix.append([pick(by_value[value][col]) for col in HEATMAP_COLUMNS])
        volumes.append(by_value[value]["overall"].n_cases)
    return HeatmapMatrix(
        feature=feature, columns=HEATMAP_COLUMNS, rows=rows, cells=matrix, volumes=volumes
    )


def apply_filter(
    log: EventLog, table: ScoreTable, spec: FilterSpec
) -> tuple[EventLog, ScoreTable]:
    """Restrict log and table to the cases satisfying the filter.

    The quantile threshold is computed over the whole input table, then
    cases must satisfy every equals-conjunct and score at or below it.
    An empty result is a valid outcome, not an error.
    """
    if spec.view != table.view_name:
        raise UnknownView(f"filter targets view {spec.view!r}, table is {table.view_name!r}")
    for feature, _ in spec.equals:
        _require_filterable(log, feature)

    threshold: float | None = None
    if spec.score_quantile is not None and table.rows:
        threshold = quantile_inclusive(
            [r.normalized_score for r in table.rows], spec.score_quantile
        )

    keep: set[str] = set()
    for row in table.rows:
        if threshold is not None and row.normalized_score > threshold:
            continue
        if all(_case_value(log, row.case_id, f) == v for f, v in spec.equals):
            keep.add(row.case_id)

    sub_log = EventLog([tr for tr in log.traces if tr.case_id in keep])
    sub_table = ScoreTable(
        view_name=table.view_name,
        rows=[r for r in table.rows if r.case_id in keep],
        norm_digest=table.norm_digest,
    )
    return sub_log, sub_table


def _require_filterable(log: EventLog, feature: str) -> None:
    info = log.feature(feature)
    if info is None:
        raise UnknownFeature(f"feature {feature!r} not in the log's catalog")
    if info.level != "case":
        raise UnknownFeature(f"feature {feature!r} is not case-level")


def rank_feature_values(
    cells: list[AggregationCell], min_support: int = 1
) -> list[tuple[str, str, float, int]]:
    """Order (feature, value) pairs by score deficit, largest first.

    The deficit is (1 - overall mean) * n_cases; rows with fewer cases than
    ``min_support`` are dropped. Ties break on (feature, value) ascending.
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    ranked = [
        (cell.feature, cell.value, (1.0 - cell.mean) * cell.n_cases, cell.n_cases)
        for cell in cells
        if cell.layer is None and cell.n_cases >= min_support
    ]
    ranked.sort(key=lambda r: (-r[2], r[0], r[1]))
    return ranked


def heatmap_to_json(matrix: HeatmapMatrix) -> str:
    doc = {
        "feature": matrix.feature,
        "columns": list(matrix.columns),
        "rows": [
            {"value": value, "n_cases": volume, "means": means}
            for value, volume, means in zip(matrix.rows, matrix.volumes, matrix.cells)
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def cells_to_csv(cells: list[AggregationCell]) -> str:
    """Long-form CSV: feature,value,layer,n,mean,min,q1,median,q3,max."""
    lines = ["feature,value,layer,n,mean,min,q1,median,q3,max"]
    for c in cells:
        lines.append(
            ",".join(
                [
                    _escape(c.feature),
                    _escape(c.value),
                    c.layer_key,
                    str(c.n_cases),
                    repr(c.mean),
                    repr(c.min),
                    repr(c.q1),
                    repr(c.median),
                    repr(c.q3),
                    repr(c.max),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _escape(text: str) -> str:
    if any(ch in text for ch in ',"\n\r'):
        return '"' + text.replace('"', '""') + '"'
    return text
