"""Exact pointwise maximal operators of step functions.

Why a finite candidate list is exact: for fixed ``x`` the window integral
``A(r) = int_{x-r}^{x+r} |f|`` is piecewise linear in ``r`` with kinks only
where ``x +- r`` hits a breakpoint, i.e. at ``r = |x - x_i|``.  Between two
kinks ``A(r) = a + b r`` and the average ``a / (2r) + b / 2`` is monotone, so
the supremum over any radius range is reached at a kink, at an end of the
range, or as one of the limits ``r -> 0+`` / ``r -> inf``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from . import _kernels
from .stepfn import RationalLike, StepFunction, absolute, format_rational, to_rational


class NonPositiveRadius(ValueError):
    pass


class NotAttained(ValueError):
    """The supremum is only a limit; no finite radius achieves it."""


@dataclass(frozen=True)
class RadiusCandidate:
    kind: str  # "kink", "radius", "zero", "infinity", "interval"
    value: Fraction
    radius: Optional[Fraction] = None
    interval: Optional[tuple[Optional[Fraction], Optional[Fraction]]] = None

    def describe(self) -> dict:
        out: dict = {"kind": self.kind, "value": format_rational(self.value)}
        if self.radius is not None:
            out["radius"] = format_rational(self.radius)
        if self.interval is not None:
            out["interval"] = [
                None if e is None else format_rational(e) for e in self.interval
            ]
        return out


@dataclass(frozen=True)
class MaxEval:
    value: Fraction
    achieved_by: RadiusCandidate
    all_candidates: tuple[RadiusCandidate, ...]


def window_average(g: StepFunction, x: Fraction, r: Fraction) -> Fraction:
    return g.integral(x - r, x + r) / (2 * r)


def zero_limit(g: StepFunction, x: Fraction) -> Fraction:
    return (g.left_limit(x) + g.right_limit(x)) / 2


def infinity_limit(g: StepFunction) -> Fraction:
    return (g.left_tail + g.right_tail) / 2


def kink_radii(f: StepFunction, x: Fraction) -> list[Fraction]:
    return sorted({abs(x - b) for b in f.breakpoints} - {Fraction(0)})


def _pick(cands: list[RadiusCandidate]) -> MaxEval:
    best = cands[0]
    for c in cands[1:]:
        if c.value > best.value:
            best = c
    return MaxEval(best.value, best, tuple(cands))


def centered_max(f: StepFunction, x: RationalLike) -> MaxEval:
    x = to_rational(x)
    g = absolute(f)
    cands = [RadiusCandidate("zero", zero_limit(g, x))]
    cands += [
        RadiusCandidate("kink", window_average(g, x, r), radius=r) for r in kink_radii(g, x)
    ]
    cands.append(RadiusCandidate("infinity", infinity_limit(g)))
    return _pick(cands)


def truncated_max(f: StepFunction, x: RationalLike, r: RationalLike) -> MaxEval:
    """Supremum over radii ``>= r``."""
    x, r = to_rational(x), to_rational(r)
    if r <= 0:
        raise NonPositiveRadius(f"radius must be positive, got {r}")
    g = absolute(f)
    cands = [RadiusCandidate("radius", window_average(g, x, r), radius=r)]
    cands += [
        RadiusCandidate("kink", window_average(g, x, k), radius=k)
        for k in kink_radii(g, x)
        if k > r
    ]
    cands.append(RadiusCandidate("infinity", infinity_limit(g)))
    return _pick(cands)


def local_max(f: StepFunction, x: RationalLike, d: RationalLike) -> MaxEval:
    """Supremum over radii in ``(0, d]``."""
    x, d = to_rational(x), to_rational(d)
    if d <= 0:
        raise NonPositiveRadius(f"radius must be positive, got {d}")
    g = absolute(f)
    cands = [RadiusCandidate("zero", zero_limit(g, x))]
    cands += [
        RadiusCandidate("kink", window_average(g, x, k), radius=k)
        for k in kink_radii(g, x)
        if k < d
    ]
    cands.append(RadiusCandidate("radius", window_average(g, x, d), radius=d))
    return _pick(cands)


def noncentered_max(f: StepFunction, x: RationalLike) -> MaxEval:
    """Supremum of averages over intervals containing ``x``.

    For a fixed right end the average is monotone in the left end between
    breakpoints (and vice versa), so it suffices to try ends drawn from the
    breakpoints and ``x`` itself, together with the one-sided shrinking limits
    and the two tail limits.
    """
    x = to_rational(x)
    g = absolute(f)
    lefts = [b for b in g.breakpoints if b <= x] + [x]
    rights = [x] + [b for b in g.breakpoints if b >= x]
    cands = [
        RadiusCandidate("interval", g.left_limit(x), interval=(x, x)),
        RadiusCandidate("interval", g.right_limit(x), interval=(x, x)),
    ]
    for a in sorted(set(lefts)):
        for b in sorted(set(rights)):
            if a < b:
                cands.append(
                    RadiusCandidate("interval", g.integral(a, b) / (b - a), interval=(a, b))
                )
    cands.append(RadiusCandidate("interval", g.left_tail, interval=(None, x)))
    cands.append(RadiusCandidate("interval", g.right_tail, interval=(x, None)))
    return _pick(cands)


def _segments(g: StepFunction, x: Fraction):
    """``(lo, hi, a, b)`` with ``A(r) = a + b r`` on ``lo < r < hi`` (``hi`` may be None)."""
    kinks = kink_radii(g, x)
    ends = [Fraction(0), *kinks]
    out = []
    for i, lo in enumerate(ends):
        hi = ends[i + 1] if i + 1 < len(ends) else None
        probe = (lo + hi) / 2 if hi is not None else lo + 1
        slope = g.right_limit(x + probe) + g.left_limit(x - probe)
        a = g.integral(x - probe, x + probe) - slope * probe
        out.append((lo, hi, a, slope))
    return out


def omega_max(f: StepFunction, x: RationalLike, m: RationalLike) -> Fraction:
    """Largest radius whose window average equals ``m``.

    On each linear segment of ``A(r)`` the equation ``a/(2r) + b/2 = m`` is
    linear in ``r``; segments are scanned from the outside in.
    """
    x, m = to_rational(x), to_rational(m)
    g = absolute(f)
    for lo, hi, a, b in reversed(_segments(g, x)):
        if a == 0:
            if b == 2 * m:
                if hi is None:
                    raise NotAttained(f"average equals {m} for all large radii")
                return hi
            continue
        if 2 * m == b:
            continue
        r = a / (2 * m - b)
        if r > lo and (hi is None or r <= hi):
            return r
    raise NotAttained(f"no radius attains average {m} at {x}")


# -- fast value-only path -------------------------------------------------


def _scaled(g: StepFunction, xs: list[Fraction]):
    dx = lcm(*(b.denominator for b in g.breakpoints), *(x.denominator for x in xs), 1)
    dv = lcm(*(v.denominator for v in g.values), 1)
    bps = [int(b * dx) for b in g.breakpoints]
    vals = [int(v * dv) for v in g.values]
    return bps, vals, [int(x * dx) for x in xs]


def centered_values(f: StepFunction, xs: list[RationalLike]) -> list[Fraction]:
    """``centered_max(f, x).value`` for many points through the kernel layer."""
    xs = [to_rational(x) for x in xs]
    if not xs:
        return []
    g = absolute(f)
    bps, vals, sx = _scaled(g, xs)
    winners = _kernels.centered_argmax(bps, vals, sx)
    out = []
    for x, w in zip(xs, winners):
        if w == _kernels.ZERO_LIMIT:
            out.append(zero_limit(g, x))
        elif w == _kernels.INFINITY_LIMIT:
            out.append(infinity_limit(g))
        else:
            out.append(window_average(g, x, abs(x - g.breakpoints[w])))
    return out


def centered_value(f: StepFunction, x: RationalLike) -> Fraction:
    return centered_values(f, [x])[0]
