"""Shared builders for tests: tiny traces, views and random (view, trace) pairs."""

from __future__ import annotations

import random

from wise.event_log import Event, Trace
from wise.norm import ConstraintSet, LayerId, View

ALPHABET = tuple(chr(ord("A") + i) for i in range(8))


def make_trace(activities, case_id="c1", case_attrs=None, start_id=0) -> Trace:
    events = [
        Event(event_id=start_id + i, activity=a, case_id=case_id)
        for i, a in enumerate(activities)
    ]
    return Trace.from_sequence(case_id, events, dict(case_attrs or {}))


def make_view(
    name="v",
    weight=1.0,
    weights=None,
    mandatory=(),
    sequential=(),
    equilibrium=(),
    singularity=(),
    exclusion=(),
    element_weights=None,
) -> View:
    cs = ConstraintSet(
        mandatory=tuple(mandatory),
        sequential=tuple(tuple(p) for p in sequential),
        equilibrium=tuple(tuple(g) for g in equilibrium),
        singularity=tuple(singularity),
        exclusion=tuple(exclusion),
        element_weights=element_weights or {},
    )
    if weights is None:
        weights = {layer: weight for layer in LayerId}
    return View(name=name, constraints=cs, weights=weights)


def random_view_and_trace(rng: random.Random) -> tuple[View, Trace]:
    """Random small norm view and trace (alphabet <= 8, length <= 12)."""
    alpha = list(ALPHABET[: rng.randint(1, 8)])
    length = rng.randint(0, 12)
    sequence = [rng.choice(alpha) for _ in range(length)]

    mandatory = tuple(rng.sample(alpha, rng.randint(0, min(3, len(alpha)))))
    pairs = set()
    for _ in range(rng.randint(0, 3)):
        pairs.add((rng.choice(alpha), rng.choice(alpha)))
    groups = []
    if len(alpha) >= 2:
        for _ in range(rng.randint(0, 2)):
            size = rng.randint(2, min(3, len(alpha)))
            groups.append(tuple(rng.sample(alpha, size)))
    singularity = tuple(rng.sample(alpha, rng.randint(0, min(2, len(alpha)))))
    exclusion = tuple(rng.sample(alpha, rng.randint(0, min(2, len(alpha)))))
    weights = {layer: rng.choice([0.0, 0.05, 0.2, 0.5, 1.0]) for layer in LayerId}

    view = View(
        name="random",
        constraints=ConstraintSet(
            mandatory=mandatory,
            sequential=tuple(sorted(pairs)),
            equilibrium=tuple(groups),
            singularity=singularity,
            exclusion=exclusion,
        ),
        weights=weights,
    )
    return view, make_trace(sequence)
