"""Weighted instance scoring for event logs.

Evaluates every process instance against a five-layer declarative norm
(mandatory, sequential, equilibrium, singularity, exclusion constraints),
then aggregates the deviation scores per data feature so the root causes of
low performance can be drilled into.
"""

from .aggregation import (
    AggregationCell,
    FilterSpec,
    HeatmapMatrix,
    aggregate,
    apply_filter,
    build_heatmap,
    rank_feature_values,
)
from .event_log import (
    AttributeValue,
    Event,
    EventLog,
    Trace,
    count_activity,
    eventually_precedes,
)
from .errors import WiseError
from .insights import AdvisorRequest, AdvisorResponse, Finding, advise, derive_findings
from .log_io import ColumnMapping, parse_csv, parse_xes, write_csv, write_xes
from .norm import (
    ConstraintSet,
    LayerId,
    ProcessNorm,
    View,
    load_norm,
    serialize_norm,
    validate_against_log,
)
from .scoring import (
    InstanceScore,
    LayerResult,
    ScoreTable,
    penalty_equilibrium,
    penalty_exclusion,
    penalty_mandatory,
    penalty_sequential,
    penalty_singularity,
    score_all_views,
    score_log,
    score_trace,
)
from .synthlog import GeneratorSpec, GroundTruth, InjectionRule, generate, oracle_score

__version__ = "0.1.0"

__all__ = [
    "AdvisorRequest",
    "AdvisorResponse",
    "AggregationCell",
    "AttributeValue",
    "ColumnMapping",
    "ConstraintSet",
    "Event",
    "EventLog",
    "FilterSpec",
    "Finding",
    "GeneratorSpec",
    "GroundTruth",
    "HeatmapMatrix",
    "InjectionRule",
    "InstanceScore",
    "LayerId",
    "LayerResult",
    "ProcessNorm",
    "ScoreTable",
    "Trace",
    "View",
    "WiseError",
    "advise",
    "aggregate",
    "apply_filter",
    "build_heatmap",
    "count_activity",
    "derive_findings",
    "eventually_precedes",
    "generate",
    "load_norm",
    "oracle_score",
    "parse_csv",
    "parse_xes",
    "penalty_equilibrium",
    "penalty_exclusion",
    "penalty_mandatory",
    "penalty_sequential",
    "penalty_singularity",
    "rank_feature_values",
    "score_all_views",
    "score_log",
    "score_trace",
    "serialize_norm",
    "validate_against_log",
    "write_csv",
    "write_xes",
]
