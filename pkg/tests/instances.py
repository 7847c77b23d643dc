"""Hand-built inputs that reach construction branches random functions rarely hit."""

from __future__ import annotations

from fractions import Fraction

from hlvar.maxop import centered_value
from hlvar.proofpipe import EssentialPeak, GridEntry, LambdaGrid, Peak
from hlvar.proofpipe.witnesses import ABWitness
from hlvar.stepfn import StepFunction, average, eval_point, make_step

# A heavy spike at 0 and light spikes at 10, 10 + 1/16, 10 + 1/8: the windows
# pinned at the heavy spike give Mf a sawtooth with tops 1/32 apart near x = 5.
SAWTOOTH = make_step(
    ["0", "1/64", "10", "641/64", "161/16", "645/64", "81/8", "649/64"],
    ["0", "64", "0", "1/2", "0", "1/2", "0", "1/2", "0"],
)
SAW_TOPS = [Fraction(641, 128), Fraction(645, 128), Fraction(649, 128)]
SAW_DIPS = [Fraction(1282, 257), Fraction(83205, 16576), Fraction(42185, 8352)]


def peak_at(f: StepFunction, p, r, q) -> EssentialPeak:
    """An essential peak whose window radius is ``r`` (the heavy spike is at 0)."""
    p, r, q = Fraction(p), Fraction(r), Fraction(q)
    base = Peak(p, r, q, centered_value(f, p), centered_value(f, r), centered_value(f, q))
    return EssentialPeak(base, r)


A_OFFSETS = (-10, -5, -4, -2, -1, 5)
B_OFFSETS = (-3, -2, 0, 1, 3, 4)


def ab_grid(cells, tag: str) -> tuple[StepFunction, LambdaGrid]:
    """Cells ``(n, k, height)`` with ``L0 = 1``; bumps of ``height`` mark the high parts.

    Each cell gets an A or B witness at fixed offsets from ``k L_n``, with the
    guarantee measured on the assembled function and ``lambda`` twice that.
    """
    grid = LambdaGrid(Fraction(1))
    bumps, frames = [], []
    for n, k, h in cells:
        L = grid.L(n)
        pts = tuple((k + c) * L for c in (A_OFFSETS if tag == "A" else B_OFFSETS))
        if tag == "A":
            bumps += [(pts[0] - L, pts[0] + L, h), (pts[5] - L, pts[5] + L, h)]
        else:
            bumps += [(pts[0], pts[1], h), (pts[4], pts[5], h)]
        frames.append((n, k, L, pts))
    bumps.sort()
    bps, vals = [], [0]
    for a, b, h in bumps:
        bps += [a, b]
        vals += [h, 0]
    f = make_step(bps, vals)
    for n, k, L, pts in frames:
        if tag == "A":
            s, al, be, ga, de, t = pts
            gar = min(eval_point(f, s), eval_point(f, t)) - max(average(f, al, be), average(f, ga, de))
        else:
            al, be, u, v, ga, de = pts
            gar = min(average(f, al, be), average(f, ga, de)) - average(f, u, v)
        grid.entries[(n, k)] = GridEntry(2 * gar, ab=ABWitness(tag, pts, gar, 2 * gar, L, k, n))
    return f, grid
