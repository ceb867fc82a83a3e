#!/usr/bin/env python3
"""Regenerate the shipped fixtures deterministically.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from wise import log_io, synthlog
from wise.norm import load_norm

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

EXAMPLE_NORM = {
    "views": [
        {
            "name": "standardization",
            "description": "Procurement cycle hygiene: essentials present, no manual edits.",
            "weights": {
                "foundational": 0.2,
                "sequential": 0.2,
                "equilibrium": 0.2,
                "singularity": 0.2,
                "exclusion": 0.2,
            },
            "constraints": {
                "mandatory": ["Create Purchase Order Item", "Record Goods Receipt"],
                "sequential": [["Create Purchase Order Item", "Record Goods Receipt"]],
                "equilibrium": [["Record Goods Receipt", "Record Invoice Receipt"]],
                "singularity": ["Approve Purchase Order"],
                "exclusion": ["Change Price", "Change Vendor"],
            },
        }
    ],
    "metadata": {"author": "fixtures", "business_goal": "procurement standardization"},
}

TWO_VIEW_NORM = {
    "views": [
        {
            "name": "standardization",
            "weights": {
                "foundational": 0.05,
                "sequential": 0.15,
                "equilibrium": 0.25,
                "singularity": 0.45,
                "exclusion": 0.40,
            },
            "constraints": {
                "mandatory": ["Create Purchase Order Item", "Record Goods Receipt"],
                "sequential": [["Create Purchase Order Item", "Record Goods Receipt"]],
                "equilibrium": [["Record Goods Receipt", "Record Invoice Receipt"]],
                "singularity": ["Approve Purchase Order"],
                "exclusion": ["Change Price"],
            },
        },
        {
            "name": "costs",
            "weights": {
                "foundational": 0.50,
                "sequential": 0.15,
                "equilibrium": 0.25,
                "singularity": 0.25,
                "exclusion": 0.15,
            },
            "constraints": {
                "mandatory": ["Create Purchase Order Item", "Record Goods Receipt"],
                "sequential": [["Create Purchase Order Item", "Record Goods Receipt"]],
                "equilibrium": [["Record Goods Receipt", "Record Invoice Receipt"]],
                "singularity": ["Approve Purchase Order"],
                "exclusion": ["Change Price"],
            },
        },
    ]
}

GEN_SPEC_SAMPLE = {
    "seed": 20240101,
    "n_cases": 50,
    "base_sequence": [
        "Create Purchase Order Item",
        "Approve Purchase Order",
        "Record Goods Receipt",
        "Record Invoice Receipt",
        "Clear Invoice",
    ],
    "features": [
        {
            "name": "Category",
            "values": ["Logistic", "Service", "Packaging", "Marketing"],
            "weights": [3, 3, 2, 2],
        },
        {
            "name": "Vendor",
            "values": ["vendor-a", "vendor-b", "vendor-c"],
            "weights": [2, 1, 1],
        },
    ],
    "injections": [
        {
            "target": {"Category": "Logistic"},
            "violation": {"kind": "insert_excluded", "activity": "Change Price", "times": 2},
            "probability": 0.8,
        },
        {
            "target": {"Category": "Service"},
            "violation": {"kind": "duplicate", "activity": "Approve Purchase Order", "times": 1},
            "probability": 0.5,
        },
        {
            "target": {"Vendor": "vendor-a"},
            "violation": {"kind": "drop_mandatory", "activity": "Record Goods Receipt"},
            "probability": 0.3,
        },
        {
            "target": {"Category": "Packaging"},
            "violation": {
                "kind": "swap_pair",
                "first": "Create Purchase Order Item",
                "second": "Record Goods Receipt",
            },
            "probability": 0.25,
        },
    ],
}


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "example_norm.json").write_text(
        json.dumps(EXAMPLE_NORM, indent=2) + "\n", encoding="utf-8"
    )
    (FIXTURES / "two_view_norm.json").write_text(
        json.dumps(TWO_VIEW_NORM, indent=2) + "\n", encoding="utf-8"
    )
    (FIXTURES / "gen_spec_sample.json").write_text(
        json.dumps(GEN_SPEC_SAMPLE, indent=2) + "\n", encoding="utf-8"
    )

    view = load_norm(json.dumps(EXAMPLE_NORM)).views[0]

    spec = synthlog.load_generator_spec(json.dumps(GEN_SPEC_SAMPLE))
    log, truth = synthlog.generate(spec, view)
    (FIXTURES / "sample_50.xes").write_bytes(log_io.write_xes(log))
    (FIXTURES / "sample_50.truth.json").write_text(
        synthlog.ground_truth_to_json(truth), encoding="utf-8"
    )

    conforming = synthlog.GeneratorSpec(
        seed=7,
        n_cases=20,
        base_sequence=spec.base_sequence,
        features=spec.features,
        injections=(),
    )
    log20, _ = synthlog.generate(conforming, view)
    (FIXTURES / "conforming_20.xes").write_bytes(log_io.write_xes(log20))

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
