"""Peaks of a sampled maximal function and the essential/non-essential split."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..maxop import NotAttained, omega_max
from ..stepfn import StepFunction, absolute, argmax_point, eval_point, sup_on, variation
from .report import ChainReport, OmegaNotAttained, UnsortedPoints, at_least, at_most


@dataclass(frozen=True)
class Peak:
    p: Fraction
    r: Fraction
    q: Fraction
    mp: Fraction
    mr: Fraction
    mq: Fraction

    def __post_init__(self) -> None:
        if not (self.p < self.r < self.q and self.mp < self.mr and self.mq < self.mr):
            raise ValueError(f"not a peak: {self}")

    @property
    def var_peak(self) -> Fraction:
        return (self.mr - self.mp) + (self.mr - self.mq)


@dataclass(frozen=True)
class EssentialPeak:
    base: Peak
    omega: Fraction

    # shorthands used throughout the witness constructions
    @property
    def p(self) -> Fraction:
        return self.base.p

    @property
    def r(self) -> Fraction:
        return self.base.r

    @property
    def q(self) -> Fraction:
        return self.base.q

    @property
    def var_peak(self) -> Fraction:
        return self.base.var_peak


@dataclass(frozen=True)
class PeakSystem:
    """``b_0 <= a_1 < b_1 < ... < a_{s+1} <= b_{s+1}`` with the values of ``M`` at each."""

    a: tuple[tuple[Fraction, Fraction], ...]
    b: tuple[tuple[Fraction, Fraction], ...]
    peaks: tuple[Peak, ...]

    @property
    def left_boundary(self) -> Fraction:
        return self.b[0][1] - self.a[0][1]

    @property
    def right_boundary(self) -> Fraction:
        return self.b[-1][1] - self.a[-1][1]

    @property
    def var_peaks(self) -> Fraction:
        return sum((pk.var_peak for pk in self.peaks), Fraction(0))


def sampled_variation(m_values: Sequence[tuple[Fraction, Fraction]]) -> Fraction:
    return sum((abs(b[1] - a[1]) for a, b in zip(m_values, m_values[1:])), Fraction(0))


def extract_peaks(m_values: Sequence[tuple[Fraction, Fraction]]) -> PeakSystem:
    """Reduce sampled ``(x, M(x))`` to alternating minima ``a_i`` and maxima ``b_i``.

    Runs of equal values collapse to their first point, then only turning
    points are kept, which leaves the sum of ``|dM|`` unchanged.
    """
    pts = [(Fraction(x), Fraction(v)) for x, v in m_values]
    if not pts:
        raise UnsortedPoints("no sample points")
    for (x, _), (y, _) in zip(pts, pts[1:]):
        if not x < y:
            raise UnsortedPoints(f"points not strictly increasing at {x}, {y}")
    dedup = [pts[0]]
    for pt in pts[1:]:
        if pt[1] != dedup[-1][1]:
            dedup.append(pt)
    turns = [dedup[0]]
    for prev, cur, nxt in zip(dedup, dedup[1:], dedup[2:]):
        if (cur[1] - prev[1]) * (nxt[1] - cur[1]) < 0:
            turns.append(cur)
    if len(dedup) > 1:
        turns.append(dedup[-1])

    if len(turns) == 1:
        return PeakSystem((turns[0],), (turns[0], turns[0]), ())
    a: list = []
    b: list = []
    rising = turns[1][1] > turns[0][1]
    if rising:
        b.append(turns[0])  # b_0 = a_1
        rest = turns
    else:
        b.append(turns[0])
        rest = turns[1:]
    # rest alternates min, max, min, ...
    for i, pt in enumerate(rest):
        (a if i % 2 == 0 else b).append(pt)
    if len(a) == len(b):
        b.append(a[-1])  # ended on a minimum: a_{s+1} = b_{s+1}
    peaks = tuple(
        Peak(a[i][0], b[i + 1][0], a[i + 1][0], a[i][1], b[i + 1][1], a[i + 1][1])
        for i in range(len(a) - 1)
    )
    return PeakSystem(tuple(a), tuple(b), peaks)


@dataclass(frozen=True)
class FilterResult:
    essential: tuple[EssentialPeak, ...]
    nonessential: tuple[Peak, ...]
    witnesses: dict  # non-essential peak -> x with f(x) >= M(r) - var/4


def essential_filter(f: StepFunction, peaks: Sequence[Peak], report: ChainReport | None = None) -> FilterResult:
    g = absolute(f)
    ess, non, wit = [], [], {}
    for pk in peaks:
        top = sup_on(g, pk.p, pk.q)
        limit = pk.mr - pk.var_peak / 4
        if top > limit:
            non.append(pk)
            wit[pk] = argmax_point(g, pk.p, pk.q)
            continue
        try:
            om = omega_max(g, pk.r, pk.mr)
        except NotAttained as exc:
            raise OmegaNotAttained(f"essential peak at {pk.r}: {exc}") from exc
        if report is not None:
            report.add(at_most("essential: sup of f inside peak", top, limit, r=pk.r))
            report.add(at_least("essential: omega reaches past p", pk.p - (pk.r - om), 0, r=pk.r, strict=True))
            report.add(at_least("essential: omega reaches past q", pk.r + om - pk.q, 0, r=pk.r, strict=True))
        if not (pk.r - om < pk.p and pk.q < pk.r + om):
            raise OmegaNotAttained(f"omega side conditions fail at {pk.r}")
        ess.append(EssentialPeak(pk, om))
    return FilterResult(tuple(ess), tuple(non), wit)


def nonessential_bound(f: StepFunction, system: PeakSystem, filt: FilterResult, report: ChainReport) -> Fraction:
    """Check ``var(P minus E) <= 2 Var f`` through an explicit point system.

    Around every ``a_i`` a point ``y_i`` with ``f(y_i) <= M(a_i)`` is taken
    within ``eps`` of ``a_i``, where ``eps`` is half the smallest gap between
    the ``a_i`` and the witnesses ``x_j``.
    """
    g = absolute(f)
    var_g = variation(g)
    non = set(filt.nonessential)
    total_var = sum((pk.var_peak for pk in non), Fraction(0))
    report.add(at_most("non-essential: var(P \\ E) <= 2 Var f", total_var, 2 * var_g))
    if not non:
        return total_var
    a_pts = [x for x, _ in system.a]
    xs = [filt.witnesses[pk] for pk in system.peaks if pk in non]
    gaps = [y - x for x, y in zip(a_pts, a_pts[1:])]
    gaps += [abs(a - x) for a in a_pts for x in xs]
    eps = min(gaps) / 2
    bps = g.breakpoints
    ys = []
    for a in a_pts:
        if a not in bps:
            ys.append(a)
            continue
        i = bps.index(a)
        room = [eps]
        if i > 0:
            room.append(a - bps[i - 1])
        if i + 1 < len(bps):
            room.append(bps[i + 1] - a)
        delta = min(room) / 2
        ys.append(a - delta if g.values[i] <= g.values[i + 1] else a + delta)
    excess = max(eval_point(g, y) - ma for (_, ma), y in zip(system.a, ys))
    report.add(at_most("non-essential: f(y_i) <= M(a_i)", excess, 0))
    total_terms = Fraction(0)
    ordered = True
    for i, pk in enumerate(system.peaks):
        if pk not in non:
            continue
        x = filt.witnesses[pk]
        y0, y1 = ys[i], ys[i + 1]
        ordered = ordered and y0 < x < y1
        term = abs(eval_point(g, x) - eval_point(g, y0)) + abs(eval_point(g, y1) - eval_point(g, x))
        report.add(at_least("non-essential: per-peak term >= var/2", term, pk.var_peak / 2, r=pk.r))
        total_terms += term
    report.add(at_least("non-essential: y_i < x_i < y_{i+1}", int(ordered), 1))
    report.add(at_most("non-essential: point-system sum <= Var f", total_terms, var_g, peaks=len(non)))
    return total_var
