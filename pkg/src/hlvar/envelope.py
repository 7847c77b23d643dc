"""Maximal functions of step functions as exact upper envelopes.

For a fixed breakpoint ``b`` the average over the window pinned at ``b``
(``(2x-b, b)`` left of ``b``, ``(b, 2x-b)`` right of it) is a piecewise
degree-(1,1) rational function of ``x``.  The centred maximal function is
the pointwise maximum of these curves together with the half-sum curve
(``r -> 0``) and the constant tail limit (``r -> inf``).  The non-centred
operator has the same shape with windows ``(x, x_k)``, ``(x_i, x)`` and
``(x_i, x_k)``.

Pieces of the envelope are monotone, so the variation is a finite sum of
endpoint differences plus the jumps at rational boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence

from . import algebraic
from .algebraic import Abscissa, QuadraticRoot, Surd, compare, rational_between
from .maxop import centered_values
from .stepfn import RationalLike, StepFunction, absolute, format_rational, to_rational


class DegenerateCrossing(RuntimeError):
    """Internal consistency check failed while building an envelope."""


ZERO = Fraction(0)


@dataclass(frozen=True)
class Mobius:
    """``x -> (p x + q) / (s x + t)`` in a normal form so equal maps compare equal."""

    p: Fraction
    q: Fraction
    s: Fraction
    t: Fraction

    @classmethod
    def make(cls, p, q, s, t) -> "Mobius":
        p, q, s, t = (Fraction(c) for c in (p, q, s, t))
        if s == 0 and t == 0:
            raise DegenerateCrossing("vanishing denominator")
        if p * t - q * s == 0:
            # constant map; the value is the ratio of any non-zero column
            c = p / s if s else q / t
            return cls(ZERO, c, ZERO, Fraction(1))
        lead = s if s else t
        return cls(p / lead, q / lead, s / lead, t / lead)

    @classmethod
    def constant(cls, c: Fraction) -> "Mobius":
        return cls(ZERO, Fraction(c), ZERO, Fraction(1))

    @property
    def det(self) -> Fraction:
        return self.p * self.t - self.q * self.s

    def is_constant(self) -> bool:
        return self.det == 0

    def at(self, x: Fraction) -> Fraction:
        den = self.s * x + self.t
        if den == 0:
            raise DegenerateCrossing(f"pole at {x}")
        return (self.p * x + self.q) / den

    def at_root(self, x: QuadraticRoot) -> Surd:
        """Exact value at an irrational root, rationalised by the conjugate."""
        sx = x.as_surd()
        n0, n1 = self.p * sx.a + self.q, self.p * sx.b
        d0, d1 = self.s * sx.a + self.t, self.s * sx.b
        norm = d0 * d0 - d1 * d1 * sx.d
        if norm == 0:
            raise DegenerateCrossing("pole at an irrational root")
        return Surd((n0 * d0 - n1 * d1 * sx.d) / norm, (n1 * d0 - n0 * d1) / norm, sx.d)

    def value(self, x: Abscissa) -> Fraction | Surd:
        if isinstance(x, Fraction):
            return self.at(x)
        return self.at_root(x)

    def limit(self) -> Fraction:
        """Value as ``x -> +-inf`` (bounded maps only)."""
        if self.s:
            return self.p / self.s
        if self.p:
            raise DegenerateCrossing("unbounded curve")
        return self.q / self.t

    def end_value(self, x: Optional[Abscissa]) -> Fraction | Surd:
        return self.limit() if x is None else self.value(x)

    def crossings(self, other: "Mobius") -> list[Abscissa]:
        """Roots of ``(p1 x + q1)(s2 x + t2) - (p2 x + q2)(s1 x + t1)``."""
        a = self.p * other.s - other.p * self.s
        b = self.p * other.t + self.q * other.s - other.p * self.t - other.q * self.s
        c = self.q * other.t - other.q * self.t
        return algebraic.real_roots(a, b, c)

    def coefficient_strings(self) -> list[str]:
        return [format_rational(c) for c in (self.p, self.q, self.s, self.t)]


@dataclass(frozen=True)
class MobiusPiece:
    """One Möbius map on the open interval ``(lo, hi)``; ``None`` is an infinite end."""

    lo: Optional[Abscissa]
    hi: Optional[Abscissa]
    mobius: Mobius

    @property
    def p(self) -> Fraction:
        return self.mobius.p

    @property
    def q(self) -> Fraction:
        return self.mobius.q

    @property
    def s(self) -> Fraction:
        return self.mobius.s

    @property
    def t(self) -> Fraction:
        return self.mobius.t


@dataclass(frozen=True)
class SourceCurve:
    """A candidate curve: open pieces with rational ends plus isolated point values."""

    label: str
    pieces: tuple[MobiusPiece, ...]
    points: dict = field(default_factory=dict, hash=False, compare=False)

    def kinks(self) -> set[Fraction]:
        out = set(self.points)
        for pc in self.pieces:
            out.update(e for e in (pc.lo, pc.hi) if e is not None)
        return out

    def piece_on(self, lo: Optional[Fraction], hi: Optional[Fraction]) -> Optional[Mobius]:
        """Map covering the whole gap ``(lo, hi)``, or ``None`` when undefined there."""
        for pc in self.pieces:
            if _le(pc.lo, lo, lower=True) and _le(hi, pc.hi, lower=False):
                return pc.mobius
        return None

    def value_at(self, x: Fraction) -> Optional[Fraction]:
        if x in self.points:
            return self.points[x]
        for pc in self.pieces:
            inside_lo = pc.lo is None or pc.lo < x
            inside_hi = pc.hi is None or x < pc.hi
            if inside_lo and inside_hi:
                return pc.mobius.at(x)
        # a kink between two pieces of a continuous curve; open domain ends are excluded
        before = [pc for pc in self.pieces if pc.hi == x]
        after = [pc for pc in self.pieces if pc.lo == x]
        if before and after:
            return before[0].mobius.at(x)
        return None


def _le(a, b, lower: bool) -> bool:
    # ordering on rationals extended by None; ``lower`` says None means -inf
    if a is None and b is None:
        return True
    if a is None:
        return lower
    if b is None:
        return not lower
    return a <= b


# -- candidate families -----------------------------------------------------


def _anchors(g: StepFunction) -> list[tuple[Fraction, Fraction]]:
    """``(anchor, G(anchor))`` per piece so that ``G(y) = G(a) + v (y - a)`` on it."""
    bps = g.breakpoints
    pre = g._prefix
    out = [(bps[0], ZERO)]
    out += [(b, pre.antiderivative(b)) for b in bps]
    return out


def candidate_curves(f: StepFunction) -> list[SourceCurve]:
    """The ``2N + 2`` curves whose pointwise maximum is the centred maximal function."""
    g = absolute(f)
    bps, vals = g.breakpoints, g.values
    curves: list[SourceCurve] = []
    if bps:
        anchors = _anchors(g)
        ends: list[Optional[Fraction]] = [None, *bps, None]
        for j, b in enumerate(bps, start=1):
            Gb = g._prefix.antiderivative(b)
            left = []
            for i in range(0, j):
                a, Ga = anchors[i]
                w = vals[i]
                lo = None if ends[i] is None else (ends[i] + b) / 2
                hi = (ends[i + 1] + b) / 2
                mob = Mobius.make(-2 * w, Gb - Ga + w * (b + a), -2, 2 * b)
                left.append(MobiusPiece(lo, hi, mob))
            curves.append(SourceCurve(f"left:{format_rational(b)}", tuple(left)))
            right = []
            for i in range(j, len(vals)):
                a, Ga = anchors[i]
                w = vals[i]
                lo = (ends[i] + b) / 2
                hi = None if ends[i + 1] is None else (ends[i + 1] + b) / 2
                mob = Mobius.make(2 * w, Ga - w * (b + a) - Gb, 2, -2 * b)
                right.append(MobiusPiece(lo, hi, mob))
            curves.append(SourceCurve(f"right:{format_rational(b)}", tuple(right)))
    curves.append(_step_curve("zero-limit", g, lambda lo, hi: (lo + hi) / 2))
    curves.append(
        SourceCurve("infinity", (MobiusPiece(None, None, Mobius.constant((vals[0] + vals[-1]) / 2)),))
    )
    return curves


def _step_curve(label: str, g: StepFunction, at_jump) -> SourceCurve:
    pieces = tuple(MobiusPiece(lo, hi, Mobius.constant(v)) for lo, hi, v in g.pieces())
    points = {
        b: at_jump(g.values[i], g.values[i + 1]) for i, b in enumerate(g.breakpoints)
    }
    return SourceCurve(label, pieces, points)


def noncentered_curves(f: StepFunction) -> list[SourceCurve]:
    """Curves whose pointwise maximum is the non-centred maximal function."""
    g = absolute(f)
    bps, vals = g.breakpoints, g.values
    curves: list[SourceCurve] = []
    if bps:
        anchors = _anchors(g)
        ends: list[Optional[Fraction]] = [None, *bps, None]
        G = g._prefix.antiderivative
        for k, xk in enumerate(bps, start=1):
            # averages over (x, x_k) for x < x_k
            pcs = []
            for i in range(0, k):
                a, Ga = anchors[i]
                w = vals[i]
                pcs.append(MobiusPiece(ends[i], ends[i + 1], Mobius.make(-w, G(xk) - Ga + w * a, -1, xk)))
            curves.append(SourceCurve(f"to:{format_rational(xk)}", tuple(pcs)))
        for i, xi in enumerate(bps, start=1):
            # averages over (x_i, x) for x > x_i
            pcs = []
            for j in range(i, len(vals)):
                a, Ga = anchors[j]
                w = vals[j]
                pcs.append(MobiusPiece(ends[j], ends[j + 1], Mobius.make(w, Ga - w * a - G(xi), 1, -xi)))
            curves.append(SourceCurve(f"from:{format_rational(xi)}", tuple(pcs)))
        for i, xi in enumerate(bps):
            for xk in bps[i + 1:]:
                c = (G(xk) - G(xi)) / (xk - xi)
                curves.append(
                    SourceCurve(
                        f"pair:{format_rational(xi)}:{format_rational(xk)}",
                        (MobiusPiece(xi, xk, Mobius.constant(c)),),
                        {xi: c, xk: c},
                    )
                )
    curves.append(_step_curve("value", g, max))
    curves.append(SourceCurve("left-tail", (MobiusPiece(None, None, Mobius.constant(vals[0])),)))
    curves.append(SourceCurve("right-tail", (MobiusPiece(None, None, Mobius.constant(vals[-1])),)))
    return curves


# -- the envelope -----------------------------------------------------------


@dataclass(frozen=True)
class Boundary:
    """Where two envelope pieces meet; values are exact (surds at irrational ``x``)."""

    x: Abscissa
    left: Fraction | Surd
    point: Fraction | Surd
    right: Fraction | Surd

    @property
    def rational(self) -> bool:
        return isinstance(self.x, Fraction)


@dataclass(frozen=True)
class EnvelopePiece(MobiusPiece):
    source: str = ""


@dataclass(frozen=True)
class Envelope:
    pieces: tuple[EnvelopePiece, ...]
    boundaries: tuple[Boundary, ...]

    def evaluate(self, x: RationalLike) -> Fraction:
        x = to_rational(x)
        lo, hi = 0, len(self.boundaries)
        while lo < hi:
            mid = (lo + hi) // 2
            if compare(self.boundaries[mid].x, x) < 0:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.boundaries) and self.boundaries[lo].x == x:
            return self.boundaries[lo].point
        return self.pieces[lo].mobius.at(x)

    def rational_boundaries(self) -> list[Fraction]:
        return [b.x for b in self.boundaries if b.rational]

    def to_json_obj(self) -> dict:
        return {
            "pieces": [
                {
                    "lo": _describe(pc.lo, "-inf"),
                    "hi": _describe(pc.hi, "+inf"),
                    "coefficients": pc.mobius.coefficient_strings(),
                    "source": pc.source,
                }
                for pc in self.pieces
            ],
            "boundaries": [
                {
                    "x": _describe(b.x, ""),
                    "left": _describe_value(b.left),
                    "point": _describe_value(b.point),
                    "right": _describe_value(b.right),
                }
                for b in self.boundaries
            ],
        }


def _describe(x: Optional[Abscissa], inf: str):
    if x is None:
        return {"kind": "infinite", "value": inf}
    if isinstance(x, Fraction):
        return {"kind": "rational", "value": format_rational(x)}
    return x.describe()


def _describe_value(v: Fraction | Surd):
    if isinstance(v, Fraction):
        return format_rational(v)
    return {"a": format_rational(v.a), "b": format_rational(v.b), "radicand": format_rational(v.d)}


def _cmp(x: Abscissa, y: Abscissa) -> int:
    return compare(x, y)


def _inside(x: Abscissa, lo: Optional[Fraction], hi: Optional[Fraction]) -> bool:
    return (lo is None or compare(x, lo) > 0) and (hi is None or compare(x, hi) < 0)


def _gap_envelope(active: list[tuple[int, Mobius]], lo, hi):
    """Dominance pieces ``(lo, hi, curve, map)`` of ``active`` on the gap ``(lo, hi)``."""
    uniq: dict[Mobius, int] = {}
    for idx, mob in active:
        uniq.setdefault(mob, idx)
    maps = list(uniq.items())
    if len(maps) > 1:
        # drop maps whose largest value on the gap is below another map's smallest
        ranges = []
        for mob, _ in maps:
            a, b = mob.end_value(lo), mob.end_value(hi)
            ranges.append((min(a, b), max(a, b)))
        floor = max(r[0] for r in ranges)
        maps = [m for m, r in zip(maps, ranges) if r[1] >= floor]
    cuts: list[Abscissa] = []
    for i in range(len(maps)):
        for j in range(i + 1, len(maps)):
            for root in maps[i][0].crossings(maps[j][0]):
                if _inside(root, lo, hi):
                    cuts.append(root)
    cuts.sort(key=cmp_to_key(_cmp))
    dedup: list[Abscissa] = []
    for c in cuts:
        if not dedup or compare(dedup[-1], c) != 0:
            dedup.append(c)
    ends = [lo, *dedup, hi]
    out = []
    for a, b in zip(ends, ends[1:]):
        x = rational_between(a, b)
        best_mob, best_idx, best_val = None, -1, None
        for mob, idx in maps:
            v = mob.at(x)
            if best_val is None or v > best_val:
                best_mob, best_idx, best_val = mob, idx, v
        if out and out[-1][3] == best_mob:
            out[-1] = (out[-1][0], b, best_idx, best_mob)
        else:
            out.append((a, b, best_idx, best_mob))
    return out


def upper_envelope(curves: Sequence[SourceCurve]) -> Envelope:
    """Exact pointwise maximum of ``curves`` as monotone Möbius pieces."""
    kinks = sorted(set().union(*(c.kinks() for c in curves)))
    gaps: list[tuple[Optional[Fraction], Optional[Fraction]]] = list(
        zip([None, *kinks], [*kinks, None])
    )
    raw = []
    for lo, hi in gaps:
        active = []
        for idx, c in enumerate(curves):
            mob = c.piece_on(lo, hi)
            if mob is not None:
                active.append((idx, mob))
        if not active:
            raise DegenerateCrossing(f"no curve defined on ({lo}, {hi})")
        raw.extend(_gap_envelope(active, lo, hi))

    pieces: list[EnvelopePiece] = []
    boundaries: list[Boundary] = []
    for a, b, idx, mob in raw:
        if pieces:
            prev = pieces[-1]
            if isinstance(a, Fraction):
                left, right = prev.mobius.at(a), mob.at(a)
                vals = [v for v in (c.value_at(a) for c in curves) if v is not None]
                point = max(vals)
                if prev.mobius == mob and left == point:
                    pieces[-1] = EnvelopePiece(prev.lo, b, mob, source=prev.source)
                    continue
            else:
                left, right = prev.mobius.at_root(a), mob.at_root(a)
                if left != right:
                    raise DegenerateCrossing(f"discontinuous crossing at {a}")
                point = left
                if prev.mobius == mob:
                    pieces[-1] = EnvelopePiece(prev.lo, b, mob, source=prev.source)
                    continue
            boundaries.append(Boundary(a, left, point, right))
        pieces.append(EnvelopePiece(a, b, mob, source=curves[idx].label))
    return Envelope(tuple(pieces), tuple(boundaries))


def centered_envelope(f: StepFunction) -> Envelope:
    return upper_envelope(candidate_curves(f))


def noncentered_envelope(f: StepFunction) -> Envelope:
    return upper_envelope(noncentered_curves(f))


# -- variation --------------------------------------------------------------


@dataclass(frozen=True)
class VariationEnclosure:
    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def to_json_obj(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}


class _SurdSum:
    """Rational part plus one coefficient per radicand."""

    def __init__(self) -> None:
        self.rational = ZERO
        self.radicals: dict[Fraction, Fraction] = {}

    def add(self, v: Fraction | Surd, sign: int = 1) -> None:
        if isinstance(v, Fraction):
            self.rational += sign * v
            return
        self.rational += sign * v.a
        if v.b:
            self.radicals[v.d] = self.radicals.get(v.d, ZERO) + sign * v.b

    def add_abs(self, v: Fraction | Surd) -> None:
        s = v.sign() if isinstance(v, Surd) else (v > 0) - (v < 0)
        self.add(v, 1 if s >= 0 else -1)


def variation_enclosure(env: Envelope, eps: RationalLike = Fraction(1, 10**6)) -> VariationEnclosure:
    """Certified ``[lo, hi]`` around the pointwise variation of ``env``, ``hi - lo <= eps``."""
    eps = to_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    total = _SurdSum()
    for pc in env.pieces:
        sgn = (pc.mobius.det > 0) - (pc.mobius.det < 0)
        if sgn:
            total.add(pc.mobius.end_value(pc.hi), sgn)
            total.add(pc.mobius.end_value(pc.lo), -sgn)
    for b in env.boundaries:
        if b.rational:
            total.add_abs(b.left - b.point)
            total.add_abs(b.point - b.right)
    terms = [(c, d) for d, c in sorted(total.radicals.items()) if c]
    bits = 8
    while True:
        lo = hi = total.rational
        for c, d in terms:
            rl, rh = algebraic.sqrt_enclosure(d, bits)
            a, b = c * rl, c * rh
            lo += min(a, b)
            hi += max(a, b)
        if hi - lo <= eps:
            return VariationEnclosure(lo, hi)
        bits *= 2


def grid_lower_bound(f: StepFunction, points: Iterable[RationalLike]) -> Fraction:
    """``sum |Mf(p_{j+1}) - Mf(p_j)|`` over the sorted points; never exceeds ``Var Mf``."""
    pts = sorted(to_rational(p) for p in points)
    vals = centered_values(f, pts)
    return sum((abs(b - a) for a, b in zip(vals, vals[1:])), ZERO)
