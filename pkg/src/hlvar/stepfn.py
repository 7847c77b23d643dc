"""Rational step functions with constant tails.

A step function is stored as ``N`` strictly increasing breakpoints and
``N + 1`` values; ``values[0]`` holds on ``(-inf, x_1)``, ``values[i]`` on
``(x_i, x_{i+1})`` and ``values[N]`` on ``(x_N, inf)``.  Every quantity is a
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

RationalLike = Union[Fraction, int, str]


class StepFunctionError(ValueError):
    """Base class for invalid step-function input."""


class NonMonotonicBreakpoints(StepFunctionError):
    pass


class LengthMismatch(StepFunctionError):
    pass


class EmptyInterval(StepFunctionError):
    pass


def to_rational(value: RationalLike) -> Fraction:
    """Parse ``value`` as an exact rational.

    Accepts ``Fraction``, ``int`` and strings of the form ``"p/q"`` or
    ``"p"``.  Floats are rejected because they would silently lose exactness.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE_ "):
            raise ValueError(f"not an exact rational string: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(value: Fraction) -> str:
    """Serialise as ``"p/q"`` or ``"p"``; round-trips through :func:`to_rational`."""
    return str(Fraction(value))


@dataclass(frozen=True)
class StepFunction:
    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    _prefix: "PrefixIntegral" = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.values) != len(self.breakpoints) + 1:
            raise LengthMismatch(
                f"{len(self.values)} values for {len(self.breakpoints)} breakpoints"
            )
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise NonMonotonicBreakpoints(f"breakpoints not increasing at {a}, {b}")
        object.__setattr__(self, "_prefix", PrefixIntegral(self))

    # -- basic accessors -------------------------------------------------

    @property
    def n_breakpoints(self) -> int:
        return len(self.breakpoints)

    @property
    def left_tail(self) -> Fraction:
        return self.values[0]

    @property
    def right_tail(self) -> Fraction:
        return self.values[-1]

    def piece_index(self, x: Fraction) -> int:
        """Index of the open piece containing ``x`` (``x`` not a breakpoint)."""
        return bisect_right(self.breakpoints, x)

    def left_limit(self, x: Fraction) -> Fraction:
        return self.values[bisect_left(self.breakpoints, x)]

    def right_limit(self, x: Fraction) -> Fraction:
        return self.values[bisect_right(self.breakpoints, x)]

    def __call__(self, x: RationalLike) -> Fraction:
        return eval_point(self, x)

    def pieces(self) -> list[tuple[Fraction | None, Fraction | None, Fraction]]:
        """``(lo, hi, value)`` for every open piece; ``None`` marks an infinite end."""
        ends: list[Fraction | None] = [None, *self.breakpoints, None]
        return [(ends[i], ends[i + 1], v) for i, v in enumerate(self.values)]

    def integral(self, a: Fraction, b: Fraction) -> Fraction:
        return self._prefix.integral(a, b)

    def is_constant(self) -> bool:
        return not self.breakpoints

    # -- JSON ------------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "breakpoints": [format_rational(x) for x in self.breakpoints],
            "values": [format_rational(v) for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "StepFunction":
        if not isinstance(obj, dict) or "breakpoints" not in obj or "values" not in obj:
            raise StepFunctionError("expected an object with 'breakpoints' and 'values'")
        if not isinstance(obj["breakpoints"], list) or not isinstance(obj["values"], list):
            raise StepFunctionError("'breakpoints' and 'values' must be lists")
        try:
            return make_step(obj["breakpoints"], obj["values"])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, StepFunctionError):
                raise
            raise StepFunctionError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "StepFunction":
        return cls.from_json_obj(json.loads(text))


class PrefixIntegral:
    """Cumulative integrals anchored at the first breakpoint.

    ``cumulative[i]`` is the integral of ``f`` over ``(x_1, x_{i+1})``, so
    ``cumulative[0] == 0``.  :meth:`antiderivative` extends linearly into both
    tails, which makes ``integral(a, b)`` a difference of two lookups.
    """

    __slots__ = ("owner", "cumulative")

    def __init__(self, owner: StepFunction) -> None:
        self.owner = owner
        bps, vals = owner.breakpoints, owner.values
        cum = [Fraction(0)] * len(bps)
        for i in range(1, len(bps)):
            cum[i] = cum[i - 1] + vals[i] * (bps[i] - bps[i - 1])
        self.cumulative = tuple(cum)

    def antiderivative(self, x: Fraction) -> Fraction:
        bps, vals = self.owner.breakpoints, self.owner.values
        if not bps:
            return vals[0] * x
        i = bisect_right(bps, x)
        if i == 0:
            return vals[0] * (x - bps[0])
        return self.cumulative[i - 1] + vals[i] * (x - bps[i - 1])

    def integral(self, a: Fraction, b: Fraction) -> Fraction:
        return self.antiderivative(b) - self.antiderivative(a)


def _canonical(bps: Sequence[Fraction], vals: Sequence[Fraction]):
    out_b: list[Fraction] = []
    out_v: list[Fraction] = [vals[0]]
    for x, v in zip(bps, vals[1:]):
        if v == out_v[-1]:
            continue
        out_b.append(x)
        out_v.append(v)
    return tuple(out_b), tuple(out_v)


def make_step(breakpoints: Iterable[RationalLike], values: Iterable[RationalLike]) -> StepFunction:
    """Validate and build a canonical step function (adjacent equal values merged)."""
    bps = [to_rational(x) for x in breakpoints]
    vals = [to_rational(v) for v in values]
    if len(vals) != len(bps) + 1:
        raise LengthMismatch(f"{len(vals)} values for {len(bps)} breakpoints")
    for a, b in zip(bps, bps[1:]):
        if not a < b:
            raise NonMonotonicBreakpoints(f"breakpoints not increasing at {a}, {b}")
    return StepFunction(*_canonical(bps, vals))


def constant(c: RationalLike) -> StepFunction:
    return make_step([], [c])


def indicator(a: RationalLike, b: RationalLike, height: RationalLike = 1) -> StepFunction:
    return make_step([a, b], [0, height, 0])


def eval_point(f: StepFunction, x: RationalLike) -> Fraction:
    """Value at ``x``; at a breakpoint the larger one-sided limit is returned."""
    x = to_rational(x)
    i = bisect_left(f.breakpoints, x)
    if i < len(f.breakpoints) and f.breakpoints[i] == x:
        return max(f.values[i], f.values[i + 1])
    return f.values[i]


def average(f: StepFunction, a: RationalLike, b: RationalLike) -> Fraction:
    a, b = to_rational(a), to_rational(b)
    if not a < b:
        raise EmptyInterval(f"average over empty interval ({a}, {b})")
    return f.integral(a, b) / (b - a)


def variation(f: StepFunction) -> Fraction:
    return sum((abs(b - a) for a, b in zip(f.values, f.values[1:])), Fraction(0))


def absolute(f: StepFunction) -> StepFunction:
    if all(v >= 0 for v in f.values):
        return f
    return StepFunction(*_canonical(f.breakpoints, [abs(v) for v in f.values]))


def scale(f: StepFunction, c: RationalLike) -> StepFunction:
    c = to_rational(c)
    if c == 0:
        return constant(0)
    return StepFunction(f.breakpoints, tuple(c * v for v in f.values))


def add(f: StepFunction, g: StepFunction) -> StepFunction:
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    probes = _piece_probes(bps)
    return make_step(bps, [eval_point(f, p) + eval_point(g, p) for p in probes])


def reflect(f: StepFunction) -> StepFunction:
    """``x -> f(-x)``."""
    return StepFunction(
        tuple(-x for x in reversed(f.breakpoints)), tuple(reversed(f.values))
    )


def shift(f: StepFunction, h: RationalLike) -> StepFunction:
    h = to_rational(h)
    return StepFunction(tuple(x + h for x in f.breakpoints), f.values)


def restrict(f: StepFunction, a: RationalLike, b: RationalLike) -> StepFunction:
    """``f`` on ``(a, b)`` and zero outside."""
    a, b = to_rational(a), to_rational(b)
    if not a < b:
        raise EmptyInterval(f"restrict to empty interval ({a}, {b})")
    inner = [x for x in f.breakpoints if a < x < b]
    bps = [a, *inner, b]
    probes = _piece_probes(bps)[1:-1]
    return make_step(bps, [0, *(eval_point(f, p) for p in probes), 0])


def _piece_probes(bps: Sequence[Fraction]) -> list[Fraction]:
    """One interior point per piece of the partition induced by ``bps``."""
    if not bps:
        return [Fraction(0)]
    probes = [bps[0] - 1]
    probes += [(x + y) / 2 for x, y in zip(bps, bps[1:])]
    probes.append(bps[-1] + 1)
    return probes


def sup_on(f: StepFunction, a: Fraction, b: Fraction) -> Fraction:
    """Pointwise supremum of ``f`` over the open interval ``(a, b)``."""
    return max(v for _, _, v in _pieces_meeting(f, a, b))


def inf_on(f: StepFunction, a: Fraction, b: Fraction) -> Fraction:
    return min(v for _, _, v in _pieces_meeting(f, a, b))


def _pieces_meeting(f: StepFunction, a: Fraction, b: Fraction):
    out = []
    for lo, hi, v in f.pieces():
        lo_c = a if lo is None else max(lo, a)
        hi_c = b if hi is None else min(hi, b)
        if lo_c < hi_c:
            out.append((lo_c, hi_c, v))
    return out


def argmax_point(f: StepFunction, a: Fraction, b: Fraction) -> Fraction:
    """Midpoint of the highest piece meeting ``(a, b)``; first such piece on ties."""
    lo, hi, _ = max(_pieces_meeting(f, a, b), key=lambda p: p[2])
    return (lo + hi) / 2


def argmin_point(f: StepFunction, a: Fraction, b: Fraction) -> Fraction:
    lo, hi, _ = min(_pieces_meeting(f, a, b), key=lambda p: p[2])
    return (lo + hi) / 2
