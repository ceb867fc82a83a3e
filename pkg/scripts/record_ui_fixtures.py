#!/usr/bin/env python3
"""Record real API exchanges for the frontend tests.

Builds a Logistic-skewed synthetic log, serves it through the actual app
(in-process) and captures request/response pairs the vitest suite replays
through a mock fetch. Run from the repository root:

    python3 scripts/record_ui_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from wise import log_io, synthlog
from wise.norm import load_norm
from wise.server import create_app

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures" / "api_recorded.json"

NORM = {
    "views": [
        {
            "name": "standardization",
            "weights": {
                "foundational": 0.2,
                "sequential": 0.2,
                "equilibrium": 0.2,
                "singularity": 0.2,
                "exclusion": 0.2,
            },
            "constraints": {
                "mandatory": ["Create", "Receive"],
                "sequential": [["Create", "Receive"]],
                "equilibrium": [["Receive", "Invoice"]],
                "singularity": ["Approve"],
                "exclusion": ["Rework"],
            },
        },
        {
            "name": "costs",
            "weights": {
                "foundational": 0.5,
                "sequential": 0.15,
                "equilibrium": 0.25,
                "singularity": 0.25,
                "exclusion": 0.15,
            },
            "constraints": {
                "mandatory": ["Create", "Receive"],
                "sequential": [["Create", "Receive"]],
                "equilibrium": [["Receive", "Invoice"]],
                "singularity": ["Approve"],
                "exclusion": ["Rework"],
            },
        },
    ]
}


def logistic_log():
    view = load_norm(json.dumps(NORM)).views[0]
    spec = synthlog.GeneratorSpec(
        seed=1010,
        n_cases=200,
        base_sequence=("Create", "Approve", "Receive", "Invoice"),
        features=(
            synthlog.FeatureSpec(
                "Category", ("Logistic", "Service", "Packaging", "Marketing"),
                (1.0, 1.0, 1.0, 1.0),
            ),
            synthlog.FeatureSpec("Vendor", ("vendor-a", "vendor-b"), (1.0, 1.0)),
        ),
        injections=(
            synthlog.InjectionRule(
                synthlog.InsertExcluded("Rework", 2), 1.0, {"Category": "Logistic"}
            ),
            synthlog.InjectionRule(
                synthlog.Duplicate("Approve", 1), 1.0, {"Category": "Logistic"}
            ),
        ),
    )
    log, _ = synthlog.generate(spec, view)
    return log


def main() -> None:
    exchanges = []

    with tempfile.TemporaryDirectory() as tmp:
        log_path = Path(tmp) / "logistic_200.xes"
        log_path.write_bytes(log_io.write_xes(logistic_log()))
        client = TestClient(create_app(allow_dir=tmp))

        def record(method: str, path: str, body=None):
            if method == "GET":
                reply = client.get(path)
            else:
                reply = client.post(path, json=body)
            exchanges.append(
                {
                    "method": method,
                    "path": path,
                    "body": body,
                    "status": reply.status_code,
                    "response": reply.json(),
                }
            )
            return reply.json()

        record("GET", "/api/health")
        record(
            "POST", "/api/session", {"log_path": "logistic_200.xes", "norm": NORM}
        )
        record("GET", "/api/health")
        # root heatmap, the drill-down and its sibling direct call
        record("POST", "/api/heatmap", {"view": "standardization", "feature": "Category"})
        record(
            "POST",
            "/api/heatmap",
            {
                "view": "standardization",
                "feature": "Vendor",
                "filter": {"equals": [["Category", "Logistic"]], "score_quantile": None},
            },
        )
        # quantile drill-down variant; 0.2 lands below the Logistic share so
        # the threshold actually restricts the population
        record(
            "POST",
            "/api/heatmap",
            {
                "view": "standardization",
                "feature": "Category",
                "filter": {"equals": [], "score_quantile": 0.2},
            },
        )
        # other view for the toggle
        record("POST", "/api/heatmap", {"view": "costs", "feature": "Category"})
        record("POST", "/api/findings", {"view": "standardization", "k": 5, "min_support": 1})
        record("POST", "/api/findings", {"view": "costs", "k": 5, "min_support": 1})
        record("GET", "/api/scores?view=standardization&offset=0&limit=3")

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"norm": NORM, "exchanges": exchanges}, indent=2) + "\n")
    print(f"{len(exchanges)} exchanges recorded to {OUT}")


if __name__ == "__main__":
    main()
