"""Centered maximal operator on the integers, with windows of ``2r + 1`` cells."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional

from . import _kernels
from .stepfn import RationalLike, format_rational, to_rational


@dataclass(frozen=True)
class DiscreteSignal:
    """``values[i]`` at ``lo + i``; ``left`` below ``lo`` and ``right`` above the last cell."""

    lo: int
    values: tuple[Fraction, ...]
    left: Fraction = Fraction(0)
    right: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("a signal needs at least one explicit cell")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __call__(self, n: int) -> Fraction:
        if n < self.lo:
            return self.left
        if n > self.hi:
            return self.right
        return self.values[n - self.lo]

    @property
    def support(self) -> dict[int, Fraction]:
        return {self.lo + i: v for i, v in enumerate(self.values)}

    def to_json_obj(self) -> dict:
        return {
            "support": {str(n): format_rational(v) for n, v in self.support.items()},
            "left": format_rational(self.left),
            "right": format_rational(self.right),
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "DiscreteSignal":
        support = {int(k): v for k, v in obj.get("support", {}).items()}
        return make_signal(support, obj.get("left", 0), obj.get("right", 0))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def make_signal(
    support: Mapping[int, RationalLike], left: RationalLike = 0, right: RationalLike = 0
) -> DiscreteSignal:
    """Cells missing between the smallest and largest key take the value 0."""
    left, right = to_rational(left), to_rational(right)
    if not support:
        if left != right:
            raise ValueError("an empty support needs equal tails")
        return DiscreteSignal(0, (left,), left, right)
    lo, hi = min(support), max(support)
    vals = tuple(to_rational(support.get(n, 0)) for n in range(lo, hi + 1))
    return DiscreteSignal(lo, vals, left, right)


def delta(n: int = 0, height: RationalLike = 1) -> DiscreteSignal:
    return make_signal({n: height})


def discrete_absolute(f: DiscreteSignal) -> DiscreteSignal:
    return DiscreteSignal(f.lo, tuple(abs(v) for v in f.values), abs(f.left), abs(f.right))


def tail_limits(f: DiscreteSignal) -> tuple[Fraction, Fraction]:
    """Limits of the maximal function at minus and plus infinity."""
    a, b = abs(f.left), abs(f.right)
    mid = (a + b) / 2
    return max(a, mid), max(b, mid)


def discrete_max_at(f: DiscreteSignal, ns) -> list[Fraction]:
    """Exact ``max_r (2r + 1)^{-1} sum_{|k| <= r} |f(n + k)|`` at each ``n``.

    Radii up to the one whose window covers the explicit cells are scanned;
    beyond it the average moves monotonically toward ``(|left| + |right|) / 2``,
    which is added as a final candidate.
    """
    ns = [int(n) for n in ns]
    g = discrete_absolute(f)
    den = lcm(*(v.denominator for v in (*g.values, g.left, g.right)))
    ivals = [int(v * den) for v in g.values]
    nums, dens = _kernels.discrete_max(ivals, g.lo, int(g.left * den), int(g.right * den), ns)
    return [Fraction(p, q * den) for p, q in zip(nums, dens)]


def discrete_max(f: DiscreteSignal, pad: Optional[int] = None) -> DiscreteSignal:
    """The maximal function on ``[lo - pad, hi + pad]`` with the limits as tails.

    Values inside the window are exact.  Past the explicit cells the maximal
    function is monotone on each side (a maximum of a constant and of terms
    ``c / (2D + const)`` that decrease in the distance ``D``), so replacing
    the outer tails by their limits leaves the variation unchanged.  ``pad``
    defaults to the number of explicit cells and must be at least 1.
    """
    pad = len(f.values) if pad is None else pad
    if pad < 1:
        raise ValueError("pad must be at least 1")
    ns = list(range(f.lo - pad, f.hi + pad + 1))
    left, right = tail_limits(f)
    return DiscreteSignal(ns[0], tuple(discrete_max_at(f, ns)), left, right)


def discrete_variation(f: DiscreteSignal) -> Fraction:
    """Sum of ``|f(n + 1) - f(n)|`` over all integers, tail transitions included."""
    seq = (f.left, *f.values, f.right)
    return sum((abs(b - a) for a, b in zip(seq, seq[1:])), Fraction(0))


@dataclass(frozen=True)
class SweepResult:
    best_ratio: Fraction
    argmax: Optional[DiscreteSignal]
    signals: int
    skipped: int

    def to_json_obj(self) -> dict:
        return {
            "best_ratio": format_rational(self.best_ratio),
            "argmax": self.argmax.to_json_obj() if self.argmax is not None else None,
            "signals": self.signals,
            "skipped_constant": self.skipped,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def exhaustive_sweep(width: int = 6, max_value: int = 3) -> SweepResult:
    """``Var Mf / Var f`` over every signal on ``[0, width)`` with values ``0..max_value``.

    Signals are visited in lexicographic order; the first maximizer is kept.
    """
    best, arg, count, skipped = Fraction(0), None, 0, 0
    for vals in itertools.product(range(max_value + 1), repeat=width):
        count += 1
        f = DiscreteSignal(0, tuple(Fraction(v) for v in vals))
        var_f = discrete_variation(f)
        if var_f == 0:
            skipped += 1
            continue
        ratio = discrete_variation(discrete_max(f, pad=1)) / var_f
        if ratio > best:
            best, arg = ratio, f
    return SweepResult(best, arg, count, skipped)
