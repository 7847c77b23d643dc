"""Per-residue-class point systems that bound summed gaps by the variation.

Each class ``(N, K)`` is processed scale by scale (``n = N, N + 10, ...``).
The system of the previous scale is refined on its long intervals and then
every remaining cell of the current scale is inserted, which raises the
system's sum by at least a fifth of the gaps added at that scale.

The A side tracks points and intervals ``y_1 < (c_1, d_1) < y_2 < ...``
with sum ``f(y_i) + f(y_{i+1}) - 2 avg(c_i, d_i)``; the B side replaces the
points by intervals ``(mu_i, nu_i)`` and uses their averages instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..stepfn import StepFunction, absolute, argmax_point, argmin_point, average, eval_point, variation
from .grid import POSITION_CLASSES, GridEntry, LambdaGrid
from .report import ChainReport, ClassEmpty, ConstructionFailed, _jsonable, at_least, at_most

Interval = tuple[Fraction, Fraction]


def _ceil_congruent(x: Fraction, K: int, strict: bool) -> int:
    """Smallest integer ``g = K (mod 200)`` with ``g > x`` (strict) or ``g >= x``."""
    base = x.__floor__() + 1 if strict else x.__ceil__()
    return base + (K - base) % POSITION_CLASSES


def perp(c: Fraction, d: Fraction, l: int, L: Fraction) -> bool:
    """``(c, d)`` keeps distance at least ``L`` from the frame of cell ``l``."""
    return d <= (l - 50) * L - L or c >= (l + 51) * L + L


def _dist(x: Fraction, iv: Interval) -> Fraction:
    return max(iv[0] - x, x - iv[1], Fraction(0))


def lemmUV(g: StepFunction, U, V, K: int, L, moreover: bool = False) -> tuple[Fraction, Fraction, int, bool]:
    """A piece ``(U', V')`` of ``(U, V)`` aligned to a cell ``k = K (mod 200)``.

    The average over the piece is at most the average over ``(U, V)`` (at
    least, with ``moreover``).  Returns ``(U', V', k, left)`` where ``left``
    says that ``U' = (k - 100) L``; otherwise ``V' = (k + 100) L``.
    """
    U, V, L = Fraction(U), Fraction(V), Fraction(L)
    if V - U <= 210 * L:
        raise ConstructionFailed("subinterval", f"interval ({U}, {V}) is not longer than 210L")
    lo_k = _ceil_congruent(U / L - 95, K, strict=True)
    hi_k = _ceil_congruent(V / L - 105, K, strict=False)
    if not lo_k < hi_k:
        raise ConstructionFailed("subinterval", "cell range collapsed")
    whole = average(g, U, V)
    for k in range(lo_k, hi_k + 1, POSITION_CLASSES):
        a = max(U, (k - 100) * L)
        b = min(V, (k + 100) * L)
        avg = average(g, a, b)
        if (avg >= whole) if moreover else (avg <= whole):
            return a, b, k, a == (k - 100) * L
    raise ConstructionFailed("subinterval", "no piece on the required side of the average")


@dataclass
class ClassSystem:
    """Final system of one residue class plus the per-scale history."""

    tag: str
    N: int
    K: int
    points: list  # A: ys (Fractions); B: (mu, nu) intervals
    intervals: list[Interval]
    total_lambda: Fraction
    value: Fraction
    levels: list[dict] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return _jsonable({
            "tag": self.tag, "N": self.N, "K": self.K,
            "points": self.points, "intervals": self.intervals,
            "total_lambda": self.total_lambda, "value": self.value,
            "levels": self.levels,
        })


def _claim(used: set[int], k: Optional[int], stage: str) -> None:
    if k is None:
        return
    if k in used:
        raise ConstructionFailed(stage, f"cell {k} used twice")
    used.add(k)


# A side


def _a_value(g, ys, cds) -> Fraction:
    return sum(
        (eval_point(g, ys[i]) + eval_point(g, ys[i + 1]) - 2 * average(g, *cds[i]) for i in range(len(cds))),
        Fraction(0),
    )


def _a_data(ents: dict[int, GridEntry], xs: list[Fraction], L: Fraction) -> dict[int, tuple]:
    """Per cell: ``(s, alpha, beta, t, lam)`` with the pair chosen clear of every ``X``."""
    out = {}
    for k, e in ents.items():
        s, a1, b1, a2, b2, t = e.ab.points
        for pair in ((a1, b1), (a2, b2)):
            if all(_dist(x, pair) >= L for x in xs):
                out[k] = (s, pair[0], pair[1], t, e.lam)
                break
        else:
            raise ConstructionFailed("A pair choice", f"both low intervals of cell {k} are near a point")
    return out


def _a_refine(g, U, V, K, L, data) -> tuple[list, Optional[int], str]:
    """One long interval: returns the replacement ``[cd]`` or ``[cd, y, cd']``."""
    U1, V1, k, left = lemmUV(g, U, V, K, L)
    if k not in data:
        return [(U1, V1)], None, "i"
    s, al, be, t, lam = data[k]
    base = average(g, U1, V1)
    if left:
        W = U1 + (V1 - U1) / 5
        if average(g, W, V1) <= base - lam / 10:
            return [(W, V1)], k, "ii"
        return [(U1, W), s, (al, be)], k, "iii"
    W = V1 - (V1 - U1) / 5
    if average(g, U1, W) <= base - lam / 10:
        return [(U1, W)], k, "ii"
    return [(al, be), t, (W, V1)], k, "iii"


def _a_level(g, L, K, ents, ys, cds, rep: ChainReport, n: int):
    prev_value = _a_value(g, ys, cds)
    data = _a_data(ents, ys, L)
    used: set[int] = set()
    new_ys, new_cds = [ys[0]], []
    cases = []
    for I, (U, V) in enumerate(cds):
        pieces, k, case = _a_refine(g, U, V, K, L, data)
        cases.append(case)
        _claim(used, k, "A refine")
        for item in pieces:
            (new_cds if isinstance(item, tuple) else new_ys).append(item)
        new_ys.append(ys[I + 1])
    if cds:
        lam_used = sum((data[k][4] for k in used), Fraction(0))
        rep.add(at_least(
            "A refine: sum >= previous + lambda(used)/5",
            _a_value(g, new_ys, new_cds), prev_value + lam_used / 5, n=n, K=K, cases=",".join(cases),
        ))
    ys, cds = new_ys, new_cds
    for k in sorted(set(data) - used):
        s, al, be, t, _ = data[k]
        lo = (k - 50) * L
        if not all(perp(c, d, k, L) for c, d in cds):
            raise ConstructionFailed("A insert", f"cell {k} frame meets an interval of the system")
        i = sum(1 for _, d in cds if d <= lo - L)
        yi = ys[i]
        gy = eval_point(g, yi)
        y = yi if yi <= al - L and gy >= eval_point(g, s) else s
        y2 = yi if yi >= be + L and gy >= eval_point(g, t) else t
        ys[i:i + 1] = [y, y2]
        cds.insert(i, (al, be))
    return ys, cds, prev_value


def _a_check_shape(ys, cds, L) -> list[str]:
    seq: list[Fraction] = [ys[0]]
    for (c, d), y in zip(cds, ys[1:]):
        seq += [c, d, y]
    return [f"spacing at {a}" for a, b in zip(seq, seq[1:]) if b - a < L]


def propA_build(f: StepFunction, N: int, K: int, grid: LambdaGrid) -> tuple[ClassSystem, ChainReport]:
    g = absolute(f)
    levels = grid.members(N, K, tag="A")
    if not levels:
        raise ClassEmpty(f"no A cells in class ({N}, {K})")
    rep = ChainReport()
    ys: list[Fraction] = []
    cds: list[Interval] = []
    history = []
    total = Fraction(0)
    for n, ents in sorted(levels.items()):
        L = grid.L(n)
        if not ys:
            ys = [(min(ents) - 51) * L]
        else:
            gaps = _a_check_shape(ys, cds, 1024 * L)
            rep.add(at_least("A previous spacing >= 1024 L_n", 0 if gaps else 1, 1, n=n, K=K))
        lam_n = sum((e.lam for e in ents.values()), Fraction(0))
        ys, cds, prev_value = _a_level(g, L, K, ents, ys, cds, rep, n)
        value = _a_value(g, ys, cds)
        bad = _a_check_shape(ys, cds, L)
        if bad:
            raise ConstructionFailed("A spacing", f"n={n}: {bad[0]}")
        if value < prev_value + lam_n / 5:
            raise ConstructionFailed("A level", f"n={n}: sum {value} below {prev_value} + {lam_n}/5")
        rep.add(at_least("A level: sum >= previous + lambda/5", value, prev_value + lam_n / 5, n=n, K=K))
        rep.add(at_least("A level: spacing >= L_n", 1, 1, n=n, K=K, points=len(ys) + 2 * len(cds)))
        total += lam_n
        history.append({"n": n, "cells": sorted(ents), "value": value})
    system = ClassSystem("A", N, K, ys, cds, total, value, history)
    _a_corollary(g, system, rep)
    return system, rep


def _a_corollary(g, system: ClassSystem, rep: ChainReport) -> None:
    ys, cds = system.points, system.intervals
    ws = [argmin_point(g, c, d) for c, d in cds]
    worst = max((eval_point(g, w) - average(g, c, d) for w, (c, d) in zip(ws, cds)), default=Fraction(0))
    rep.add(at_most("A corollary: f(w_i) <= avg(u_i, v_i)", worst, 0, K=system.K))
    jumps = sum(
        (abs(eval_point(g, w) - eval_point(g, ys[i])) + abs(eval_point(g, ys[i + 1]) - eval_point(g, w))
         for i, w in enumerate(ws)),
        Fraction(0),
    )
    drops = sum(
        (eval_point(g, ys[i]) + eval_point(g, ys[i + 1]) - 2 * eval_point(g, w) for i, w in enumerate(ws)),
        Fraction(0),
    )
    var_g = variation(g)
    N, K = system.N, system.K
    rep.add(at_most("A corollary: point sum <= Var f", jumps, var_g, N=N, K=K))
    rep.add(at_least("A corollary: drops >= system sum", drops, system.value, N=N, K=K))
    rep.add(at_least("A corollary: system sum >= lambda/5", system.value, system.total_lambda / 5, N=N, K=K))
    rep.add(at_most("A class sum <= 5 Var f", system.total_lambda, 5 * var_g, N=N, K=K))


# B side


def _b_value(g, mns, cds) -> Fraction:
    return sum(
        (average(g, *mns[i]) + average(g, *mns[i + 1]) - 2 * average(g, *cds[i]) for i in range(len(cds))),
        Fraction(0),
    )


def _b_data(ents: dict[int, GridEntry]) -> dict[int, tuple]:
    return {k: tuple(e.ab.points) + (e.lam,) for k, e in ents.items()}


def _b_refine_low(g, S, T, K, L, data) -> tuple[list, Optional[int], str]:
    """An interval to be averaged from below: ``[cd]`` or ``[cd, mn, cd']``."""
    S1, T1, k, left = lemmUV(g, S, T, K, L)
    if k not in data:
        return [(S1, T1)], None, "i"
    al, be, u, v, ga, de, lam = data[k]
    base = average(g, S1, T1)
    if left:
        W = S1 + (T1 - S1) / 5
        if average(g, W, T1) <= base - lam / 10:
            return [(W, T1)], k, "ii"
        return [(S1, W), (al, be), (u, v)], k, "iii"
    W = T1 - (T1 - S1) / 5
    if average(g, S1, W) <= base - lam / 10:
        return [(S1, W)], k, "ii"
    return [(u, v), (ga, de), (W, T1)], k, "iii"


def _b_refine_high(g, P, Q, K, L, data, end: bool) -> tuple[list, Optional[int], str]:
    """An interval to be averaged from above: ``[mn]`` or ``[mn, cd, mn']``.

    End intervals of the system carry weight one instead of two, so they use
    the doubled thresholds.
    """
    P1, Q1, k, left = lemmUV(g, P, Q, K, L, moreover=True)
    if k not in data:
        return [(P1, Q1)], None, "i*"
    al, be, u, v, ga, de, lam = data[k]
    base = average(g, P1, Q1)
    step = lam / 5 if end else lam / 10
    if left:
        Th = P1 + (Q1 - P1) / 5
        if average(g, Th, Q1) >= base + step:
            return [(Th, Q1)], k, "ii*"
        first = (P1, Th) if average(g, P1, Th) >= average(g, al, be) else (al, be)
        return [first, (u, v), (ga, de)], k, "iii*"
    Th = Q1 - (Q1 - P1) / 5
    if average(g, P1, Th) >= base + step:
        return [(P1, Th)], k, "ii*"
    last = (Th, Q1) if average(g, Th, Q1) >= average(g, ga, de) else (ga, de)
    return [(al, be), (u, v), last], k, "iii*"


def _b_level(g, L, K, ents, mns, cds, rep: ChainReport, n: int):
    prev_value = _b_value(g, mns, cds)
    data = _b_data(ents)
    used: set[int] = set()
    cases = []
    if cds:
        M = len(cds)
        seq: list[Interval] = []
        for I in range(M + 1):
            pieces, k, case = _b_refine_high(g, *mns[I], K, L, data, end=I in (0, M))
            cases.append(case)
            _claim(used, k, "B refine")
            seq += pieces
            if I < M:
                pieces, k, case = _b_refine_low(g, *cds[I], K, L, data)
                cases.append(case)
                _claim(used, k, "B refine")
                seq += pieces
        mns, cds = seq[0::2], seq[1::2]
        lam_used = sum((data[k][6] for k in used), Fraction(0))
        rep.add(at_least(
            "B refine: sum >= previous + lambda(used)/5",
            _b_value(g, mns, cds), prev_value + lam_used / 5, n=n, K=K, cases=",".join(cases),
        ))
    for k in sorted(set(data) - used):
        al, be, u, v, ga, de, _ = data[k]
        lo = (k - 50) * L
        if not all(perp(c, d, k, L) for c, d in cds):
            raise ConstructionFailed("B insert", f"cell {k} frame meets an interval of the system")
        i = sum(1 for _, d in cds if d <= lo - L)
        mi, ni = mns[i]
        a_i = average(g, mi, ni)
        first = (mi, ni) if ni <= u - L and a_i >= average(g, al, be) else (al, be)
        last = (mi, ni) if mi >= v + L and a_i >= average(g, ga, de) else (ga, de)
        mns[i:i + 1] = [first, last]
        cds.insert(i, (u, v))
    return mns, cds, prev_value


def _b_check_shape(mns, cds, L) -> list[str]:
    seq: list[Fraction] = list(mns[0])
    for cd, mn in zip(cds, mns[1:]):
        seq += [*cd, *mn]
    return [f"spacing at {a}" for a, b in zip(seq, seq[1:]) if b - a < L]


def propB_build(f: StepFunction, N: int, K: int, grid: LambdaGrid) -> tuple[ClassSystem, ChainReport]:
    g = absolute(f)
    levels = grid.members(N, K, tag="B")
    if not levels:
        raise ClassEmpty(f"no B cells in class ({N}, {K})")
    rep = ChainReport()
    mns: list[Interval] = []
    cds: list[Interval] = []
    history = []
    total = Fraction(0)
    for n, ents in sorted(levels.items()):
        L = grid.L(n)
        if not mns:
            nu = (min(ents) - 51) * L
            mns = [(nu - L, nu)]
        else:
            gaps = _b_check_shape(mns, cds, 1024 * L)
            rep.add(at_least("B previous spacing >= 1024 L_n", 0 if gaps else 1, 1, n=n, K=K))
        lam_n = sum((e.lam for e in ents.values()), Fraction(0))
        mns, cds, prev_value = _b_level(g, L, K, ents, list(mns), list(cds), rep, n)
        value = _b_value(g, mns, cds)
        bad = _b_check_shape(mns, cds, L)
        if bad:
            raise ConstructionFailed("B spacing", f"n={n}: {bad[0]}")
        if value < prev_value + lam_n / 5:
            raise ConstructionFailed("B level", f"n={n}: sum {value} below {prev_value} + {lam_n}/5")
        rep.add(at_least("B level: sum >= previous + lambda/5", value, prev_value + lam_n / 5, n=n, K=K))
        rep.add(at_least("B level: spacing >= L_n", 1, 1, n=n, K=K, points=2 * (len(mns) + len(cds))))
        total += lam_n
        history.append({"n": n, "cells": sorted(ents), "value": value})
    system = ClassSystem("B", N, K, mns, cds, total, value, history)
    _b_corollary(g, system, rep)
    return system, rep


def _b_corollary(g, system: ClassSystem, rep: ChainReport) -> None:
    mns, cds = system.points, system.intervals
    thetas = [argmax_point(g, a, b) for a, b in mns]
    zs = [argmin_point(g, c, d) for c, d in cds]
    N, K = system.N, system.K
    worst_hi = max(average(g, a, b) - eval_point(g, th) for th, (a, b) in zip(thetas, mns))
    worst_lo = max((eval_point(g, z) - average(g, c, d) for z, (c, d) in zip(zs, cds)), default=Fraction(0))
    rep.add(at_most("B corollary: f(theta_i) >= avg(phi_i, psi_i)", worst_hi, 0, N=N, K=K))
    rep.add(at_most("B corollary: f(z_i) <= avg(s_i, t_i)", worst_lo, 0, N=N, K=K))
    ft = [eval_point(g, th) for th in thetas]
    fz = [eval_point(g, z) for z in zs]
    jumps = sum((abs(fz[i] - ft[i]) + abs(ft[i + 1] - fz[i]) for i in range(len(zs))), Fraction(0))
    drops = sum((ft[i] + ft[i + 1] - 2 * fz[i] for i in range(len(zs))), Fraction(0))
    var_g = variation(g)
    rep.add(at_most("B corollary: point sum <= Var f", jumps, var_g, N=N, K=K))
    rep.add(at_least("B corollary: drops >= system sum", drops, system.value, N=N, K=K))
    rep.add(at_least("B corollary: system sum >= lambda/5", system.value, system.total_lambda / 5, N=N, K=K))
    rep.add(at_most("B class sum <= 5 Var f", system.total_lambda, 5 * var_g, N=N, K=K))
