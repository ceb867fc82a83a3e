"""Process norms: five-layer constraint bundles with weights and named views.

A norm is a list of views. Each view carries its own constraint sets for the
five layers plus one weight per layer in [0, 1]; optional per-element weights
(default 1.0) scale individual violations before the layer weight applies.
The first activity of an equilibrium group is the reference the others are
balanced against, so group order is significant.
"""

from __future__ import annotations

import hashlib
import json
import io
from dataclasses import dataclass, field
from enum import IntEnum

from .errors import WiseError
from .event_log import EventLog


class LayerId(IntEnum):
    """The five constraint layers, in canonical order."""

    FOUNDATIONAL = 1
    SEQUENTIAL = 2
    EQUILIBRIUM = 3
    SINGULARITY = 4
    EXCLUSION = 5

    @property
    def key(self) -> str:
        """Lowercase schema/JSON key, e.g. ``foundational``."""
        return self.name.lower()


LAYER_BY_KEY = {layer.key: layer for layer in LayerId}


class SchemaViolation(WiseError):
    """Norm document does not follow the schema; carries the JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class WeightOutOfRange(SchemaViolation):
    pass


class EmptyEquilibriumGroup(SchemaViolation):
    pass


class DuplicateViewName(WiseError):
    pass


def pair_key(a1: str, a2: str) -> str:
    """Element-weight key for a sequential pair."""
    return f"{a1}->{a2}"


@dataclass(slots=True)
class ConstraintSet:
    """Constraints of one view, grouped by layer.

    ``element_weights`` maps a layer to per-element weights (activity name,
    or :func:`pair_key` for sequential pairs); absent elements weigh 1.0.
    """

    mandatory: tuple[str, ...] = ()
    sequential: tuple[tuple[str, str], ...] = ()
    equilibrium: tuple[tuple[str, ...], ...] = ()
    singularity: tuple[str, ...] = ()
    exclusion: tuple[str, ...] = ()
    element_weights: dict[LayerId, dict[str, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, items in (
            ("mandatory", self.mandatory),
            ("singularity", self.singularity),
            ("exclusion", self.exclusion),
            ("sequential", self.sequential),
        ):
            if len(set(items)) != len(items):
                raise SchemaViolation(label, "duplicate entries")
        for i, group in enumerate(self.equilibrium):
            if len(set(group)) != len(group) or len(group) < 2:
                raise EmptyEquilibriumGroup(
                    f"equilibrium[{i}]", "needs at least 2 distinct activities"
                )
        for layer, weights in self.element_weights.items():
            for key, w in weights.items():
                if not 0.0 <= w <= 1.0:
                    raise WeightOutOfRange(
                        f"element_weights.{layer.key}.{key}", f"weight {w} outside [0, 1]"
                    )

    def element_weight(self, layer: LayerId, key: str) -> float:
        return self.element_weights.get(layer, {}).get(key, 1.0)

    def activities(self, layer: LayerId) -> tuple[str, ...]:
        """Distinct activity names referenced by one layer, in schema order."""
        if layer is LayerId.FOUNDATIONAL:
            return self.mandatory
        if layer is LayerId.SEQUENTIAL:
            seen: dict[str, None] = {}
            for a1, a2 in self.sequential:
                seen.setdefault(a1)
                seen.setdefault(a2)
            return tuple(seen)
        if layer is LayerId.EQUILIBRIUM:
            seen = {}
            for group in self.equilibrium:
                for a in group:
                    seen.setdefault(a)
            return tuple(seen)
        if layer is LayerId.SINGULARITY:
            return self.singularity
        return self.exclusion


@dataclass(slots=True)
class View:
    """One named (constraints, weights) configuration of a norm."""

    name: str
    constraints: ConstraintSet
    weights: dict[LayerId, float]
    description: str | None = None

    def __post_init__(self) -> None:
        for layer in LayerId:
            if layer not in self.weights:
                raise SchemaViolation(
                    f"views.{self.name}.weights", f"missing weight for {layer.key}"
                )
            w = self.weights[layer]
            if not 0.0 <= w <= 1.0:
                raise WeightOutOfRange(
                    f"views.{self.name}.weights.{layer.key}", f"weight {w} outside [0, 1]"
                )


@dataclass(slots=True)
class ProcessNorm:
    """A non-empty collection of views plus free-form metadata."""

    views: tuple[View, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.views:
            raise SchemaViolation("views", "a norm needs at least one view")
        seen = set()
        for view in self.views:
            if view.name in seen:
                raise DuplicateViewName(f"duplicate view name {view.name!r}")
            seen.add(view.name)

    def view(self, name: str) -> View | None:
        for v in self.views:
            if v.name == name:
                return v
        return None


def _expect(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise SchemaViolation(path, message)


def _string_list(raw: object, path: str) -> tuple[str, ...]:
    _expect(isinstance(raw, list), path, "expected a list")
    out = []
    for i, item in enumerate(raw):  # type: ignore[union-attr]
        _expect(isinstance(item, str) and item != "", f"{path}[{i}]", "expected a non-empty string")
        out.append(item)
    return tuple(out)


def _parse_constraints(raw: object, path: str) -> ConstraintSet:
    _expect(isinstance(raw, dict), path, "expected an object")
    assert isinstance(raw, dict)
    known = {"mandatory", "sequential", "equilibrium", "singularity", "exclusion"}
    for key in raw:
        _expect(key in known, f"{path}.{key}", "unknown constraint layer")
    mandatory = _string_list(raw.get("mandatory", []), f"{path}.mandatory")
    singularity = _string_list(raw.get("singularity", []), f"{path}.singularity")
    exclusion = _string_list(raw.get("exclusion", []), f"{path}.exclusion")

    seq_raw = raw.get("sequential", [])
    _expect(isinstance(seq_raw, list), f"{path}.sequential", "expected a list")
    sequential = []
    for i, pair in enumerate(seq_raw):
        p = f"{path}.sequential[{i}]"
        _expect(isinstance(pair, list) and len(pair) == 2, p, "expected a pair [a1, a2]")
        _expect(all(isinstance(a, str) and a for a in pair), p, "activities must be non-empty strings")
        sequential.append((pair[0], pair[1]))

    eq_raw = raw.get("equilibrium", [])
    _expect(isinstance(eq_raw, list), f"{path}.equilibrium", "expected a list")
    equilibrium = []
    for i, group in enumerate(eq_raw):
        p = f"{path}.equilibrium[{i}]"
        _expect(isinstance(group, list), p, "expected a list of activities")
        if not isinstance(group, list) or len(group) < 2 or len(set(group)) != len(group):
            raise EmptyEquilibriumGroup(p, "needs at least 2 distinct activities")
        _expect(all(isinstance(a, str) and a for a in group), p, "activities must be non-empty strings")
        equilibrium.append(tuple(group))

    return ConstraintSet(
        mandatory=mandatory,
        sequential=tuple(sequential),
        equilibrium=tuple(equilibrium),
        singularity=singularity,
        exclusion=exclusion,
    )


def _parse_element_weights(raw: object, path: str) -> dict[LayerId, dict[str, float]]:
    _expect(isinstance(raw, dict), path, "expected an object")
    assert isinstance(raw, dict)
    out: dict[LayerId, dict[str, float]] = {}
    for key, weights in raw.items():
        _expect(key in LAYER_BY_KEY, f"{path}.{key}", "unknown layer")
        _expect(isinstance(weights, dict), f"{path}.{key}", "expected an object")
        layer_map: dict[str, float] = {}
        for element, w in weights.items():
            p = f"{path}.{key}.{element}"
            _expect(isinstance(w, (int, float)) and not isinstance(w, bool), p, "expected a number")
            if not 0.0 <= float(w) <= 1.0:
                raise WeightOutOfRange(p, f"weight {w} outside [0, 1]")
            layer_map[element] = float(w)
        out[LAYER_BY_KEY[key]] = layer_map
    return out


def load_norm(data: bytes | str | io.IOBase) -> ProcessNorm:
    """Load and validate a norm document (JSON) into a ProcessNorm."""
    if isinstance(data, io.IOBase):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from exc

    _expect(isinstance(doc, dict), "$", "expected a top-level object")
    _expect("views" in doc, "$.views", "missing")
    raw_views = doc["views"]
    _expect(isinstance(raw_views, list) and raw_views, "$.views", "expected a non-empty list")

    views = []
    for i, raw_view in enumerate(raw_views):
        path = f"$.views[{i}]"
        _expect(isinstance(raw_view, dict), path, "expected an object")
        name = raw_view.get("name")
        _expect(isinstance(name, str) and name != "", f"{path}.name", "expected a non-empty string")

        raw_weights = raw_view.get("weights")
        _expect(isinstance(raw_weights, dict), f"{path}.weights", "expected an object")
        weights: dict[LayerId, float] = {}
        for key in LAYER_BY_KEY:
            _expect(key in raw_weights, f"{path}.weights.{key}", "missing")
            w = raw_weights[key]
            _expect(
                isinstance(w, (int, float)) and not isinstance(w, bool),
                f"{path}.weights.{key}",
                "expected a number",
            )
            if not 0.0 <= float(w) <= 1.0:
                raise WeightOutOfRange(f"{path}.weights.{key}", f"weight {w} outside [0, 1]")
            weights[LAYER_BY_KEY[key]] = float(w)
        for key in raw_weights:
            _expect(key in LAYER_BY_KEY, f"{path}.weights.{key}", "unknown layer")

        constraints = _parse_constraints(raw_view.get("constraints", {}), f"{path}.constraints")
        if "element_weights" in raw_view:
            constraints.element_weights.update(
                _parse_element_weights(raw_view["element_weights"], f"{path}.element_weights")
            )

        description = raw_view.get("description")
        if description is not None:
            _expect(isinstance(description, str), f"{path}.description", "expected a string")

        views.append(View(name=name, constraints=constraints, weights=weights, description=description))

    metadata = doc.get("metadata", {})
    _expect(isinstance(metadata, dict), "$.metadata", "expected an object")

    return ProcessNorm(views=tuple(views), metadata=dict(metadata))


def view_to_dict(view: View) -> dict:
    out: dict = {
        "name": view.name,
        "weights": {layer.key: view.weights[layer] for layer in LayerId},
        "constraints": {
            "mandatory": list(view.constraints.mandatory),
            "sequential": [list(p) for p in view.constraints.sequential],
            "equilibrium": [list(g) for g in view.constraints.equilibrium],
            "singularity": list(view.constraints.singularity),
            "exclusion": list(view.constraints.exclusion),
        },
    }
    if view.description is not None:
        out["description"] = view.description
    if view.constraints.element_weights:
        out["element_weights"] = {
            layer.key: dict(weights)
            for layer, weights in sorted(view.constraints.element_weights.items())
        }
    return out


def serialize_norm(norm: ProcessNorm) -> str:
    """Serialize a norm so that load_norm inverts it structurally."""
    doc: dict = {"views": [view_to_dict(v) for v in norm.views]}
    if norm.metadata:
        doc["metadata"] = dict(norm.metadata)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def view_digest(view: View) -> str:
    """Content hash of a view; identifies the norm used by a score table."""
    canonical = json.dumps(view_to_dict(view), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(slots=True)
class NormWarning:
    """A norm/log mismatch that never blocks scoring."""

    view: str
    layer: LayerId
    activity: str
    message: str


def validate_against_log(norm: ProcessNorm, log: EventLog) -> list[NormWarning]:
    """Warn about constraint activities that never occur in the log.

    One warning per (view, layer, absent activity); equilibrium references
    get a sharper message since balancing against a never-seen reference
    penalizes every occurrence of the other group members.
    """
    warnings: list[NormWarning] = []
    alphabet = log.activity_alphabet
    for view in norm.views:
        per_view: list[NormWarning] = []
        for layer in LayerId:
            missing = [a for a in view.constraints.activities(layer) if a not in alphabet]
            references = (
                {g[0] for g in view.constraints.equilibrium}
                if layer is LayerId.EQUILIBRIUM
                else set()
            )
            for activity in sorted(set(missing)):
                if activity in references:
                    message = (
                        f"equilibrium reference {activity!r} never occurs in the log"
                    )
                else:
                    message = f"{layer.key} constraint names {activity!r}, absent from the log"
                per_view.append(NormWarning(view.name, layer, activity, message))
        per_view.sort(key=lambda w: (w.layer, w.activity))
        warnings.extend(per_view)
    return warnings
