"""End-to-end check of the centered variation bound on a finite point system."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from ..algebraic import rational_between
from ..envelope import centered_envelope
from ..maxop import centered_values
from ..stepfn import RationalLike, StepFunction, absolute, to_rational, variation
from .grid import dyadic_bucket, keylemma_verify
from .peaks import essential_filter, extract_peaks, nonessential_bound, sampled_variation
from .propositions import propA_build, propB_build
from .report import ChainReport, at_least, at_most

TOTAL_CONSTANT = 1 + 1 + 2 + 12 * 20000


def default_sample_points(f: StepFunction) -> list[Fraction]:
    """Rational boundaries of the centered envelope plus one rational inside each piece."""
    env = centered_envelope(f)
    pts = set(env.rational_boundaries())
    for pc in env.pieces:
        pts.add(rational_between(pc.lo, pc.hi))
    return sorted(pts)


def theorem_trace(f: StepFunction, sample_points: Optional[Iterable[RationalLike]] = None) -> ChainReport:
    """Run every stage of the bound on ``|f|`` and record each inequality with its margin."""
    g = absolute(f)
    var_g = variation(g)
    if sample_points is None:
        pts = default_sample_points(g)
    else:
        pts = sorted({to_rational(x) for x in sample_points})
    rep = ChainReport()
    summary = rep.summary
    summary.update(var_f=var_g, points=len(pts))
    if not pts:
        summary.update(sampled_variation=Fraction(0), ratio=None)
        return rep
    mvals = list(zip(pts, centered_values(g, pts)))
    sampled = sampled_variation(mvals)
    system = extract_peaks(mvals)
    booked = system.left_boundary + system.right_boundary + system.var_peaks
    rep.add(at_most("peaks: bookkeeping matches sampled variation", abs(booked - sampled), 0))
    rep.add(at_most("boundary: left term <= Var f", system.left_boundary, var_g))
    rep.add(at_most("boundary: right term <= Var f", system.right_boundary, var_g))

    filt = essential_filter(g, system.peaks, rep)
    var_non = nonessential_bound(g, system, filt, rep)
    var_ess = sum((pk.var_peak for pk in filt.essential), Fraction(0))
    summary.update(peaks=len(system.peaks), essential=len(filt.essential))

    if filt.essential:
        grid = dyadic_bucket(filt.essential, g)
        for (n, k), e in sorted(grid.entries.items()):
            Ln = grid.L(n)
            for pk in e.bucket:
                rep.add(at_least("bucket: omega > 25 L_n", pk.omega - 25 * Ln, 0, n=n, k=k, strict=True))
                rep.add(at_most("bucket: omega <= 50 L_n", pk.omega, 50 * Ln, n=n, k=k))
                rep.add(at_least("bucket: k L_n <= r", pk.r, k * Ln, n=n, k=k))
                rep.add(at_least("bucket: r < (k+1) L_n", (k + 1) * Ln - pk.r, 0, n=n, k=k, strict=True))
            w, ab = e.witness, e.ab
            rep.add(at_least("witness: gap >= var(bucket)/12", w.gap(g), e.lam, n=n, k=k, case=w.case))
            rep.add(at_least(f"split {ab.tag}: guarantee >= lambda/2", ab.guarantee, e.lam / 2, n=n, k=k))
        rep.extend(keylemma_verify(grid, g))
        tags = {}
        for (n, k), e in grid.entries.items():
            tags.setdefault((n % 10, k % 200), set()).add(e.ab.tag)
        for (N, K), present in sorted(tags.items()):
            if "A" in present:
                rep.extend(propA_build(g, N, K, grid)[1])
            if "B" in present:
                rep.extend(propB_build(g, N, K, grid)[1])
        rep.add(at_most("essential: var(E) <= 12 * 20000 Var f", var_ess, 12 * 20000 * var_g))
        summary.update(cells=len(grid.entries), classes=len(tags), L0=grid.L0)
    rep.add(at_most("total: sum |dM| <= 240004 Var f", sampled, TOTAL_CONSTANT * var_g))
    summary.update(
        sampled_variation=sampled,
        nonessential_variation=var_non,
        essential_variation=var_ess,
        ratio=(sampled / var_g) if var_g else None,
    )
    return rep
