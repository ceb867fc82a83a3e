"""Deterministic ranked findings plus the pluggable external-advisor hook.

Findings turn aggregation cells into templated sentences: the worst-scoring
layer of each low-performing feature value maps to a fixed diagnosis
(excluded activity hits read as manual changes, singularity as rework, and
so on). The built-in advisor re-renders findings as a narrative and is a
pure function of its request; an external HTTP advisor can replace it, but
its output is tagged non-deterministic and stays out of any verification.
Requests carry aggregates only, never raw events.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import requests

from .aggregation import AggregationCell, rank_feature_values
from .errors import WiseError
from .norm import LayerId, View

#: Fixed layer-to-diagnosis templates used in finding statements.
DIAGNOSES = {
    LayerId.FOUNDATIONAL: "missing steps",
    LayerId.SEQUENTIAL: "order violations",
    LayerId.EQUILIBRIUM: "imbalance/quantity mismatch",
    LayerId.SINGULARITY: "rework/repetition",
    LayerId.EXCLUSION: "manual changes",
}


class AdvisorUnreachable(WiseError):
    pass


class AdvisorMalformedResponse(WiseError):
    pass


@dataclass(slots=True)
class Finding:
    """One ranked observation about a low-performing feature value."""

    rank: int
    feature: str
    value: str
    layer: LayerId
    deficit: float
    n_cases: int
    statement: str
    evidence: list[tuple[str, str, str]] = field(default_factory=list)


def derive_findings(
    cells: list[AggregationCell], k: int, min_support: int = 1
) -> list[Finding]:
    """Top-k findings by score deficit, each naming its worst layer.

    Deterministic and stable under permutation of the input cells.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    by_key: dict[tuple[str, str], dict[str, AggregationCell]] = {}
    for cell in cells:
        by_key.setdefault((cell.feature, cell.value), {})[cell.layer_key] = cell

    findings = []
    for rank, (feature, value, deficit, n_cases) in enumerate(
        rank_feature_values(cells, min_support)[:k], start=1
    ):
        layer_cells = by_key[(feature, value)]
        worst = min(LayerId, key=lambda layer: (layer_cells[layer.key].mean, layer.value))
        statement = (
            f"{feature}={value} ({n_cases} cases) loses the most score in the "
            f"{worst.key} layer (mean {layer_cells[worst.key].mean:.3f}), "
            f"which points to {DIAGNOSES[worst]}."
        )
        columns = [layer.key for layer in LayerId] + ["overall"]
        findings.append(
            Finding(
                rank=rank,
                feature=feature,
                value=value,
                layer=worst,
                deficit=deficit,
                n_cases=n_cases,
                statement=statement,
                evidence=[(feature, value, col) for col in columns if col in layer_cells],
            )
        )
    return findings


@dataclass(slots=True)
class AdvisorRequest:
    """What an advisor sees: norm summary, findings and aggregates only."""

    norm_summary: dict
    findings: list[Finding]
    aggregates: list[AggregationCell]
    version: int = 1


@dataclass(slots=True)
class AdvisorResponse:
    narrative: str
    follow_up_filters: list[dict]
    deterministic: bool


def summarize_view(view: View) -> dict:
    return {
        "name": view.name,
        "weights": {layer.key: view.weights[layer] for layer in LayerId},
        "constraint_counts": {
            "mandatory": len(view.constraints.mandatory),
            "sequential": len(view.constraints.sequential),
            "equilibrium": len(view.constraints.equilibrium),
            "singularity": len(view.constraints.singularity),
            "exclusion": len(view.constraints.exclusion),
        },
    }


def advisor_request_to_dict(request: AdvisorRequest) -> dict:
    return {
        "version": request.version,
        "norm_summary": request.norm_summary,
        "findings": [
            {
                "rank": f.rank,
                "feature": f.feature,
                "value": f.value,
                "layer": f.layer.key,
                "deficit": f.deficit,
                "n_cases": f.n_cases,
                "statement": f.statement,
            }
            for f in request.findings
        ],
        "aggregates": [
            {
                "feature": c.feature,
                "value": c.value,
                "layer": c.layer_key,
                "n_cases": c.n_cases,
                "mean": c.mean,
                "min": c.min,
                "q1": c.q1,
                "median": c.median,
                "q3": c.q3,
                "max": c.max,
            }
            for c in request.aggregates
        ],
    }


def _echo_advice(request: AdvisorRequest) -> AdvisorResponse:
    lines = [f"{f.rank}. {f.statement}" for f in request.findings]
    filters = [
        {"equals": [[f.feature, f.value]], "score_quantile": None}
        for f in request.findings
    ]
    narrative = "\n".join(lines) if lines else "No findings above the support threshold."
    return AdvisorResponse(narrative=narrative, follow_up_filters=filters, deterministic=True)


def advise(
    request: AdvisorRequest, endpoint: str | None = None, timeout: float = 10.0
) -> AdvisorResponse:
    """Route the request to the built-in echo advisor or an HTTP endpoint.

    The external advisor receives the request as JSON POST and must answer
    with {"narrative": str, "follow_up_filters": list}.
    """
    if endpoint is None:
        return _echo_advice(request)
    try:
        reply = requests.post(
            endpoint, json=advisor_request_to_dict(request), timeout=timeout
        )
    except (requests.ConnectionError, requests.Timeout) as exc:
        raise AdvisorUnreachable(f"advisor at {endpoint} unreachable: {exc}") from exc
    try:
        body = reply.json()
    except (json.JSONDecodeError, requests.exceptions.JSONDecodeError) as exc:
        raise AdvisorMalformedResponse(f"advisor returned non-JSON: {exc}") from exc
    if not isinstance(body, dict) or "narrative" not in body:
        raise AdvisorMalformedResponse(f"advisor reply misses 'narrative': {body!r}")
    filters = body.get("follow_up_filters", [])
    if not isinstance(filters, list):
        raise AdvisorMalformedResponse("'follow_up_filters' must be a list")
    return AdvisorResponse(
        narrative=str(body["narrative"]),
        follow_up_filters=filters,
        deterministic=False,
    )
