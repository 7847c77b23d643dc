"""Witness points: the pinned-window witness, s<u<v<t systems and the A/B split."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..maxop import centered_value
from ..stepfn import StepFunction, absolute, argmax_point, average, eval_point, reflect
from .peaks import EssentialPeak
from .report import ConstructionFailed, HypothesisViolated, InvalidWitness, PreconditionViolated


def lemm0_witness(f: StepFunction, r, omega, p) -> Fraction:
    """A point ``t`` in ``(2p - (r - omega), r + omega)`` where ``f`` beats both bounds.

    ``t`` is the midpoint of the highest piece meeting that interval, so
    ``f(t)`` is at least the average there, which the window identity turns
    into ``f(t) >= M(r)`` and ``f(t) >= M(p) + omega (M(r) - M(p)) / (r - p)``.
    """
    g = absolute(f)
    r, omega, p = Fraction(r), Fraction(omega), Fraction(p)
    if omega <= 0:
        raise PreconditionViolated("omega must be positive")
    mr, mp = centered_value(g, r), centered_value(g, p)
    if average(g, r - omega, r + omega) != mr:
        raise PreconditionViolated(f"average over (r - omega, r + omega) is not M(r) = {mr}")
    if not r - omega < p < r:
        raise PreconditionViolated(f"need r - omega < p < r, got p = {p}")
    if mp > mr:
        raise PreconditionViolated(f"M(p) = {mp} exceeds M(r) = {mr}")
    lo, hi = 2 * p - (r - omega), r + omega
    t = argmax_point(g, lo, hi)
    ft = eval_point(g, t)
    if ft < mr or ft < mp + (mr - mp) / (r - p) * omega:
        raise ConstructionFailed("lemm0", f"f(t) = {ft} misses a bound at t = {t}")
    return t


def lemm0_mirror(f: StepFunction, r, omega, q) -> Fraction:
    """Left-hand counterpart: ``s`` in ``(r - omega, 2q - (r + omega))``."""
    return -lemm0_witness(reflect(absolute(f)), -Fraction(r), omega, -Fraction(q))


@dataclass(frozen=True)
class WitnessSUVT:
    s: Fraction
    u: Fraction
    v: Fraction
    t: Fraction
    lam: Fraction
    L: Fraction
    k: int
    case: str = ""
    n: int = 0

    def gap(self, g: StepFunction) -> Fraction:
        return min(eval_point(g, self.s), eval_point(g, self.t)) - average(g, self.u, self.v)

    def violations(self, g: StepFunction, lo_mult: int = 50, hi_mult: int = 51) -> list[str]:
        """Failed hypotheses for anchor ``k`` at scale ``L``; empty when valid."""
        k, L = self.k, self.L
        out = []
        if not self.s < self.u < self.v < self.t:
            out.append("s < u < v < t")
            return out
        if self.s < (k - lo_mult) * L:
            out.append(f"(k-{lo_mult})L <= s")
        if self.t > (k + hi_mult) * L:
            out.append(f"t <= (k+{hi_mult})L")
        if self.u - self.s < 4 * L:
            out.append("u - s >= 4L")
        if self.v - self.u < L:
            out.append("v - u >= L")
        if self.t - self.v < 4 * L:
            out.append("t - v >= 4L")
        if self.gap(g) < self.lam:
            out.append("min(f(s), f(t)) - avg(u, v) >= lambda")
        return out


def _check_chain(x: Fraction, y: Fraction, L: Fraction, peaks: Sequence[EssentialPeak]) -> None:
    if not peaks:
        raise HypothesisViolated("a non-empty system of peaks is required")
    if y - x != L or L <= 0:
        raise HypothesisViolated("need y - x = L > 0")
    for pk in peaks:
        if not 25 * L < pk.omega <= 50 * L:
            raise HypothesisViolated(f"omega({pk.r}) = {pk.omega} outside (25L, 50L]")
    if not x <= peaks[0].r:
        raise HypothesisViolated("x <= r_1")
    if not peaks[-1].r <= y:
        raise HypothesisViolated("r_m <= y")
    for a, b in zip(peaks, peaks[1:]):
        if not (a.q <= b.p and a.r < b.r):
            raise HypothesisViolated(f"peaks at {a.r} and {b.r} are not interleaved")


def _single(g, x, y, L, pk: EssentialPeak):
    b = pk.base
    t = lemm0_witness(g, b.r, pk.omega, b.p)
    s = lemm0_mirror(g, b.r, pk.omega, b.q)
    if b.q - b.p < 10 * L:
        c = b.p if b.mp <= b.mq else b.q
        return s, c - L / 2, c + L / 2, t, "I.a"
    mid = (b.p + b.q) / 2
    return s, mid - L / 2, mid + L / 2, t, "I.b"


def _interior(g, x, y, L, peaks: Sequence[EssentialPeak]):
    m = len(peaks)
    e: list[tuple[Fraction, Fraction]] = [(peaks[0].p, peaks[0].base.mp)]
    for i in range(1, m):
        prev, cur = peaks[i - 1].base, peaks[i].base
        # ties go to p_i, the first listed option
        e.append((cur.p, cur.mp) if cur.mp <= prev.mq else (prev.q, prev.mq))
    e.append((peaks[-1].q, peaks[-1].base.mq))
    mr = [pk.base.mr for pk in peaks]
    var_mod = sum((2 * mr[i] - e[i][1] - e[i + 1][1] for i in range(m)), Fraction(0))

    def s_of(i):
        return lemm0_mirror(g, peaks[i].r, peaks[i].omega, e[i + 1][0])

    def t_of(i):
        return lemm0_witness(g, peaks[i].r, peaks[i].omega, e[i][0])

    first, last = e[0][1], e[m][1]
    if abs(last - first) > var_mod / 2:
        if last > first:
            c = e[0][0]
            return s_of(m - 1), c - L / 2, c + L / 2, t_of(m - 1), "II.a"
        c = e[m][0]
        return s_of(0), c - L / 2, c + L / 2, t_of(0), "II.a"
    down = [(mr[i] - e[i + 1][1]) / (e[i + 1][0] - peaks[i].r) for i in range(m)]
    up = [(mr[i] - e[i][1]) / (peaks[i].r - e[i][0]) for i in range(m)]
    j = down.index(max(down))
    k = up.index(max(up))
    cand = [e[j + 1], e[k]]
    c = cand[0][0] if cand[0][1] <= cand[1][1] else cand[1][0]
    return s_of(j), c - L / 2, c + L / 2, t_of(k), "II.b"


def lemmsuvt_construct(
    f: StepFunction, x, y, L, peaks: Sequence[EssentialPeak], n: int = 0
) -> WitnessSUVT:
    """Points ``s < u < v < t`` near ``[x, y]`` with ``min(f(s), f(t)) - avg(u, v) >= var / 12``."""
    g = absolute(f)
    x, y, L = Fraction(x), Fraction(y), Fraction(L)
    peaks = sorted(peaks, key=lambda pk: pk.r)
    _check_chain(x, y, L, peaks)
    total = sum((pk.var_peak for pk in peaks), Fraction(0))
    parts = [
        [pk for pk in peaks if pk.p < x],
        [pk for pk in peaks if x <= pk.p and pk.q <= y],
        [pk for pk in peaks if x <= pk.p and y < pk.q],
    ]
    for idx, part in enumerate(parts, start=1):
        var_part = sum((pk.var_peak for pk in part), Fraction(0))
        if part and 3 * var_part >= total:
            break
    else:  # pragma: no cover - the three parts cover the system
        raise ConstructionFailed("lemmsuvt", "no subsystem carries a third of the variation")
    if len(part) == 1:
        s, u, v, t, case = _single(g, x, y, L, part[0])
    else:
        s, u, v, t, case = _interior(g, x, y, L, part)
    k = x / L
    if k.denominator != 1:
        k_int = int(k // 1)
    else:
        k_int = int(k)
    w = WitnessSUVT(s, u, v, t, total / 12, L, k_int, case=f"P{idx}:{case}", n=n)
    # the construction's own frame is [x - 50L, y + 50L]; for x = kL that is the (n, k) frame
    bad = []
    if s < x - 50 * L:
        bad.append("x - 50L <= s")
    if t > y + 50 * L:
        bad.append("t <= y + 50L")
    bad += [b for b in _spacing(w) if b]
    if w.gap(g) < var_part / 4:
        bad.append("improved bound >= var(subsystem) / 4")
    if w.gap(g) < w.lam:
        bad.append("bound >= var / 12")
    if bad:
        raise ConstructionFailed("lemmsuvt " + w.case, "; ".join(bad))
    return w


def _spacing(w: WitnessSUVT) -> list[str]:
    out = []
    if w.u - w.s < 4 * w.L:
        out.append("u - s >= 4L")
    if w.v - w.u < w.L:
        out.append("v - u >= L")
    if w.t - w.v < 4 * w.L:
        out.append("t - v >= 4L")
    return out


@dataclass(frozen=True)
class ABWitness:
    tag: str  # "A" or "B"
    points: tuple[Fraction, ...]
    guarantee: Fraction
    lam: Fraction
    L: Fraction
    k: int
    n: int = 0
    detail: dict = field(default_factory=dict, compare=False)

    # A: (s, alpha, beta, gamma, delta, t); B: (alpha, beta, u, v, gamma, delta)
    def named(self) -> dict:
        keys = ("s", "alpha", "beta", "gamma", "delta", "t") if self.tag == "A" else (
            "alpha", "beta", "u", "v", "gamma", "delta")
        return dict(zip(keys, self.points))


def claimAB_split(f: StepFunction, w: WitnessSUVT) -> ABWitness:
    g = absolute(f)
    bad = w.violations(g)
    if bad:
        raise InvalidWitness("; ".join(bad))
    L = w.L
    al, be, ga, de = w.u - 3 * L, w.u - 2 * L, w.v + 2 * L, w.v + 3 * L
    top = min(eval_point(g, w.s), eval_point(g, w.t))
    a_uv = average(g, w.u, w.v)
    a_ab, a_gd = average(g, al, be), average(g, ga, de)
    threshold = (top + a_uv) / 2
    if min(a_ab, a_gd) >= threshold:
        ab = ABWitness("B", (al, be, w.u, w.v, ga, de), min(a_ab, a_gd) - a_uv, w.lam, L, w.k, w.n)
    elif a_ab < threshold:
        ab = ABWitness("A", (w.s, al, be, w.u, w.v, w.t), top - max(a_ab, a_uv), w.lam, L, w.k, w.n)
    else:
        ab = ABWitness("A", (w.s, w.u, w.v, ga, de, w.t), top - max(a_uv, a_gd), w.lam, L, w.k, w.n)
    bad = ab_violations(g, ab)
    if bad:
        raise ConstructionFailed("claimAB " + ab.tag, "; ".join(bad))
    return ab


def ab_violations(g: StepFunction, ab: ABWitness) -> list[str]:
    L, k = ab.L, ab.k
    pts = ab.points
    out = []
    if any(b <= a for a, b in zip(pts, pts[1:])):
        return ["points increasing"]
    if pts[0] < (k - 50) * L or pts[-1] > (k + 51) * L:
        out.append("inside ((k-50)L, (k+51)L)")
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    if ab.tag == "A":
        s, al, be, ga, de, t = pts
        if gaps[2] != 2 * L:
            out.append("gamma - beta = 2L")
        if min(gaps[0], gaps[1], gaps[3], gaps[4]) < L:
            out.append("spacings >= L")
        achieved = min(eval_point(g, s), eval_point(g, t)) - max(average(g, al, be), average(g, ga, de))
    else:
        al, be, u, v, ga, de = pts
        if min(gaps) < L:
            out.append("spacings >= L")
        achieved = min(average(g, al, be), average(g, ga, de)) - average(g, u, v)
    if achieved != ab.guarantee:
        out.append("recorded guarantee")
    if achieved < ab.lam / 2:
        out.append("guarantee >= lambda / 2")
    return out
