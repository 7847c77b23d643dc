"""Dyadic bucketing of essential peaks and the summed-gap check over residue classes."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from ..stepfn import StepFunction, absolute, variation
from .peaks import EssentialPeak
from .report import ChainReport, EmptyInput, WitnessInvalid, at_least, at_most
from .witnesses import ABWitness, WitnessSUVT, claimAB_split, lemmsuvt_construct

SCALE_CLASSES = 10
POSITION_CLASSES = 200


@dataclass
class GridEntry:
    lam: Fraction
    bucket: list[EssentialPeak] = field(default_factory=list)
    witness: Optional[WitnessSUVT] = None
    ab: Optional[ABWitness] = None


@dataclass
class LambdaGrid:
    L0: Fraction
    entries: dict[tuple[int, int], GridEntry] = field(default_factory=dict)

    def L(self, n: int) -> Fraction:
        return self.L0 / 2**n

    @property
    def total(self) -> Fraction:
        return sum((e.lam for e in self.entries.values()), Fraction(0))

    def classes(self) -> dict[tuple[int, int], Fraction]:
        """Summed gap per occupied residue class ``(n mod 10, k mod 200)``."""
        out: dict[tuple[int, int], Fraction] = {}
        for (n, k), e in self.entries.items():
            key = (n % SCALE_CLASSES, k % POSITION_CLASSES)
            out[key] = out.get(key, Fraction(0)) + e.lam
        return out

    def members(self, N: int, K: int, tag: Optional[str] = None) -> dict[int, dict[int, GridEntry]]:
        """Entries of class ``(N, K)`` grouped by scale, optionally restricted to an A/B tag."""
        out: dict[int, dict[int, GridEntry]] = {}
        for (n, k), e in sorted(self.entries.items()):
            if n % SCALE_CLASSES != N or k % POSITION_CLASSES != K:
                continue
            if tag is not None and (e.ab is None or e.ab.tag != tag):
                continue
            out.setdefault(n, {})[k] = e
        return out


def scale_index(omega: Fraction, L0: Fraction) -> int:
    """The unique ``n >= 0`` with ``25 L_n < omega <= 50 L_n``."""
    rho = 50 * L0 / omega
    return (rho.numerator // rho.denominator).bit_length() - 1


def dyadic_bucket(peaks: Sequence[EssentialPeak], f: Optional[StepFunction] = None) -> LambdaGrid:
    """Place each peak at ``(n, k)``; with ``f`` given, also attach witnesses and A/B splits."""
    if not peaks:
        raise EmptyInput("no essential peaks to bucket")
    L0 = max(pk.omega for pk in peaks) / 50
    grid = LambdaGrid(L0)
    for pk in peaks:
        n = scale_index(pk.omega, L0)
        Ln = grid.L(n)
        k = (pk.r / Ln).__floor__()
        grid.entries.setdefault((n, k), GridEntry(Fraction(0))).bucket.append(pk)
    for (n, k), e in grid.entries.items():
        e.bucket.sort(key=lambda pk: pk.r)
        e.lam = sum((pk.var_peak for pk in e.bucket), Fraction(0)) / 12
        if f is not None:
            Ln = grid.L(n)
            e.witness = lemmsuvt_construct(f, k * Ln, (k + 1) * Ln, Ln, e.bucket, n=n)
            e.ab = claimAB_split(f, e.witness)
    return grid


def keylemma_verify(grid: LambdaGrid, f: StepFunction, rho: Optional[Fraction] = None) -> ChainReport:
    """Check every witness against its ``(n, k)`` frame and bound the summed gaps.

    With ``rho`` given, each witness is also measured against the symmetric
    frame ``[(k - rho) L_n, (k + rho) L_n]`` with unit spacings; those
    records are informational.
    """
    g = absolute(f)
    var_g = variation(g)
    rep = ChainReport()
    for (n, k), e in sorted(grid.entries.items()):
        w = e.witness
        if w is None:
            raise WitnessInvalid(n, k, "no witness attached")
        if w.L != grid.L(n) or w.k != k:
            raise WitnessInvalid(n, k, "witness frame does not match its grid cell")
        if w.lam != e.lam:
            raise WitnessInvalid(n, k, "witness gap differs from the grid entry")
        bad = w.violations(g)
        if bad:
            raise WitnessInvalid(n, k, bad[0])
        rep.add(at_least("witness: min(f(s), f(t)) - avg(u, v) >= lambda", w.gap(g), e.lam, n=n, k=k))
        if rho is not None:
            L = w.L
            rep.add(_info(at_least("symmetric frame: s >= (k - rho)L", w.s, (k - rho) * L, n=n, k=k)))
            rep.add(_info(at_most("symmetric frame: t <= (k + rho)L", w.t, (k + rho) * L, n=n, k=k)))
            rep.add(_info(at_least("symmetric frame: spacing >= L", min(w.u - w.s, w.v - w.u, w.t - w.v), L, n=n, k=k)))
    sums = grid.classes()
    worst = max(sums.values(), default=Fraction(0))
    for (N, K), total in sorted(sums.items()):
        rep.add(at_most("residue class sum <= 10 Var f", total, 10 * var_g, N=N, K=K))
    rep.add(at_most(
        "residue class sums <= 10 Var f (all classes)", worst, 10 * var_g,
        classes=SCALE_CLASSES * POSITION_CLASSES, occupied=len(sums),
    ))
    rep.add(at_most("sum of lambda <= 20000 Var f", grid.total, 20000 * var_g))
    return rep


def _info(rec):
    return replace(rec, informational=True)
