"""Seeded random step functions shared by tests, benchmarks and the search seeds."""

from __future__ import annotations

import random
from fractions import Fraction

from .stepfn import StepFunction, indicator, make_step

F1 = indicator(0, 1)
F2 = make_step([0, 1, 2, 3], [0, 1, 0, 1, 0])


def random_step(
    rng: random.Random,
    max_pieces: int = 8,
    max_den: int = 16,
    span: int = 4,
    value_range: int = 4,
    signed: bool = True,
) -> StepFunction:
    """At most ``max_pieces`` pieces; breakpoints in ``[-span, span]``, all denominators ``<= max_den``."""
    n_bps = rng.randint(0, max_pieces - 1)
    bps: set[Fraction] = set()
    while len(bps) < n_bps:
        den = rng.randint(1, max_den)
        bps.add(Fraction(rng.randint(-span * den, span * den), den))
    lo = -value_range if signed else 0
    vals = []
    for _ in range(n_bps + 1):
        den = rng.randint(1, max_den)
        vals.append(Fraction(rng.randint(lo * den, value_range * den), den))
    return make_step(sorted(bps), vals)


def random_corpus(count: int = 1000, seed: int = 20240601, **kw) -> list[StepFunction]:
    rng = random.Random(seed)
    return [random_step(rng, **kw) for _ in range(count)]


def random_points(rng: random.Random, count: int, span: int = 6, max_den: int = 16) -> list[Fraction]:
    out = []
    for _ in range(count):
        den = rng.randint(1, max_den)
        out.append(Fraction(rng.randint(-span * den, span * den), den))
    return out
