from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import step_functions
from instances import SAW_DIPS, SAW_TOPS, SAWTOOTH, ab_grid, peak_at
from hlvar.corpus import F1, F2, random_corpus
from hlvar.maxop import centered_value, centered_values, omega_max
from hlvar.proofpipe import (
    ChainReport,
    ClassEmpty,
    EmptyInput,
    EssentialPeak,
    HypothesisViolated,
    InvalidWitness,
    Peak,
    PreconditionViolated,
    UnsortedPoints,
    WitnessInvalid,
    WitnessSUVT,
    claimAB_split,
    dyadic_bucket,
    essential_filter,
    extract_peaks,
    keylemma_verify,
    lemm0_witness,
    lemmsuvt_construct,
    propA_build,
    propB_build,
    scale_index,
    theorem_trace,
)
from hlvar.proofpipe.propositions import lemmUV, perp
from hlvar.proofpipe.trace import default_sample_points
from hlvar.proofpipe.witnesses import ab_violations, lemm0_mirror
from hlvar.stepfn import absolute, average, constant, eval_point, make_step, sup_on, variation


def sampled(f, pts=None):
    pts = default_sample_points(absolute(f)) if pts is None else [Fraction(x) for x in pts]
    return list(zip(pts, centered_values(f, pts)))


def pipeline_grid(f):
    system = extract_peaks(sampled(f))
    filt = essential_filter(f, system.peaks)
    return dyadic_bucket(filt.essential, f)


def dummy_peak(r, omega, var=Fraction(1)):
    return EssentialPeak(Peak(r - 1, r, r + 1, Fraction(0), var / 2, Fraction(0)), Fraction(omega))


class TestExtractPeaks:
    def test_two_peaks(self):
        sysm = extract_peaks([(i, v) for i, v in enumerate([1, 3, 2, 4, 1])])
        got = [(pk.p, pk.r, pk.q, pk.var_peak) for pk in sysm.peaks]
        assert got == [(0, 1, 2, 3), (2, 3, 4, 5)]
        assert sysm.left_boundary == 0 and sysm.right_boundary == 0

    def test_monotone(self):
        sysm = extract_peaks([(i, i * i) for i in range(5)])
        assert sysm.peaks == ()
        assert sysm.left_boundary + sysm.right_boundary == 16

    def test_equal_neighbours_merge(self):
        sysm = extract_peaks([(0, 1), (1, 3), (2, 3), (3, 1)])
        assert len(sysm.peaks) == 1
        assert sysm.peaks[0].var_peak == 4

    def test_unsorted(self):
        with pytest.raises(UnsortedPoints):
            extract_peaks([(1, 0), (0, 1)])
        with pytest.raises(UnsortedPoints):
            extract_peaks([(0, 0), (0, 1)])

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=30))
    def test_bookkeeping(self, vals):
        pts = [(Fraction(i), Fraction(v)) for i, v in enumerate(vals)]
        sysm = extract_peaks(pts)
        total = sum(abs(b - a) for a, b in zip(vals, vals[1:]))
        assert sysm.left_boundary + sysm.right_boundary + sysm.var_peaks == total
        assert sysm.left_boundary >= 0 and sysm.right_boundary >= 0
        for pk in sysm.peaks:
            assert pk.mp < pk.mr > pk.mq


class TestEssentialFilter:
    def test_indicator_single_top(self):
        # the maximal function of an indicator is unimodal; sampling both sides of
        # its plateau yields one peak, and f reaches M there, so it is not essential
        sysm = extract_peaks(sampled(F1))
        filt = essential_filter(F1, sysm.peaks)
        assert len(sysm.peaks) == 1 and filt.essential == ()
        assert len(filt.nonessential) == 1

    def test_two_bumps_three_points(self):
        sysm = extract_peaks(sampled(F2, ["1/2", "3/2", "5/2"]))
        assert sysm.peaks == ()

    def test_two_bumps_centres(self):
        sysm = extract_peaks(sampled(F2, [-1, "1/2", "3/2", "5/2", 4]))
        assert [pk.r for pk in sysm.peaks] == [Fraction(1, 2), Fraction(5, 2)]
        filt = essential_filter(F2, sysm.peaks)
        # f equals M at each top, so neither peak passes the quarter test
        for pk in sysm.peaks:
            assert sup_on(F2, pk.p, pk.q) > pk.mr - pk.var_peak / 4
        assert filt.essential == ()
        for pk, x in filt.witnesses.items():
            assert eval_point(F2, x) >= pk.mr - pk.var_peak / 4

    def test_sawtooth_essential(self):
        sysm = extract_peaks(sampled(SAWTOOTH))
        filt = essential_filter(SAWTOOTH, sysm.peaks)
        tops = [e.r for e in filt.essential]
        assert SAW_TOPS[:2] == tops[:2]
        for e in filt.essential:
            assert sup_on(SAWTOOTH, e.p, e.q) <= e.base.mr - e.var_peak / 4
            assert e.r - e.omega < e.p and e.q < e.r + e.omega
            assert e.omega == omega_max(SAWTOOTH, e.r, e.base.mr)

    def test_partition(self, corpus):
        for f in corpus[:150]:
            sysm = extract_peaks(sampled(f))
            filt = essential_filter(f, sysm.peaks)
            ess = {e.base for e in filt.essential}
            assert ess.isdisjoint(filt.nonessential)
            assert ess | set(filt.nonessential) == set(sysm.peaks)


class TestLemm0:
    def test_indicator(self):
        t = lemm0_witness(F1, Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
        assert Fraction(1, 2) < t < 1
        assert eval_point(F1, t) == 1

    def test_mirror(self):
        s = lemm0_mirror(F1, Fraction(1, 2), Fraction(1, 2), Fraction(3, 4))
        assert 0 < s < Fraction(1, 2)
        assert eval_point(F1, s) == 1

    def test_mp_above_mr(self):
        # the window (0, 4) attains M(2) = 1/4, but M(1/2) = 1 is larger
        with pytest.raises(PreconditionViolated):
            lemm0_witness(F1, 2, 2, Fraction(1, 2))

    def test_p_outside_window(self):
        with pytest.raises(PreconditionViolated):
            lemm0_witness(F1, Fraction(1, 2), Fraction(1, 2), 0)

    def test_window_not_maximal(self):
        with pytest.raises(PreconditionViolated):
            lemm0_witness(F1, Fraction(1, 2), 1, Fraction(1, 4))

    def test_second_bound(self):
        r, p = SAW_TOPS[0], SAW_DIPS[0]
        t = lemm0_witness(SAWTOOTH, r, r, p)
        mr, mp = centered_value(SAWTOOTH, r), centered_value(SAWTOOTH, p)
        assert 2 * p - 0 < t < 2 * r
        assert eval_point(SAWTOOTH, t) >= mp + r * (mr - mp) / (r - p)


class TestLemmSUVT:
    def test_empty(self):
        with pytest.raises(HypothesisViolated):
            lemmsuvt_construct(F1, 0, 1, 1, [])

    def test_omega_out_of_range(self):
        with pytest.raises(HypothesisViolated):
            lemmsuvt_construct(F1, 0, 1, 1, [dummy_peak(Fraction(1, 2), 10)])

    def test_not_interleaved(self):
        pks = [dummy_peak(Fraction(1, 4), 30), dummy_peak(Fraction(1, 2), 30)]
        with pytest.raises(HypothesisViolated):
            lemmsuvt_construct(F1, 0, 1, 1, pks)

    def test_single_peak_narrow(self):
        f = random_corpus(1000)[189]
        grid = pipeline_grid(f)
        hits = [e for e in grid.entries.values() if e.witness.case.endswith("I.a")]
        assert hits
        g = absolute(f)
        for e in hits:
            w = e.witness
            var = sum(pk.var_peak for pk in e.bucket)
            assert w.gap(g) >= var / 4
            assert w.violations(g) == []

    def test_interior_case_b(self):
        pks = [peak_at(SAWTOOTH, SAW_DIPS[0], SAW_TOPS[0], SAW_DIPS[1]),
               peak_at(SAWTOOTH, SAW_DIPS[1], SAW_TOPS[1], SAW_DIPS[2])]
        x, L = Fraction(498, 100), Fraction(19, 100)
        w = lemmsuvt_construct(SAWTOOTH, x, x + L, L, pks)
        assert w.case == "P2:II.b"
        var = sum(pk.var_peak for pk in pks)
        assert w.gap(SAWTOOTH) >= var / 12
        assert x - 50 * L <= w.s and w.t <= x + 51 * L
        assert w.u - w.s >= 4 * L and w.v - w.u >= L and w.t - w.v >= 4 * L

    def test_interior_case_a(self):
        x, L = SAW_DIPS[0], Fraction(1, 5)
        pks = [peak_at(SAWTOOTH, SAW_DIPS[0], SAW_TOPS[0], SAW_DIPS[1]),
               peak_at(SAWTOOTH, SAW_DIPS[1], SAW_TOPS[1], x + L)]
        w = lemmsuvt_construct(SAWTOOTH, x, x + L, L, pks)
        assert w.case == "P2:II.a"
        assert w.gap(SAWTOOTH) >= sum(pk.var_peak for pk in pks) / 12

    def test_three_part_split(self):
        pks = [peak_at(SAWTOOTH, SAW_DIPS[0], SAW_TOPS[0], SAW_DIPS[1]),
               peak_at(SAWTOOTH, SAW_DIPS[1], SAW_TOPS[1], SAW_DIPS[2]),
               peak_at(SAWTOOTH, SAW_DIPS[2], SAW_TOPS[2], 6)]
        x, L = Fraction(498, 100), Fraction(19, 100)
        w = lemmsuvt_construct(SAWTOOTH, x, x + L, L, pks)
        assert w.case.startswith("P3")
        assert w.gap(SAWTOOTH) >= sum(pk.var_peak for pk in pks) / 12


# a function with high shoulders and a well at (10, 11)
WELL = make_step([10, 11], [1, 0, 1])
# low plateau at (7, 8) and a shallower well at (10, 11)
PLATEAU = make_step([7, 8, 10, 11], [1, 0, 1, Fraction(1, 2), 1])


class TestClaimAB:
    def test_geometry(self):
        w = WitnessSUVT(Fraction(0), Fraction(10), Fraction(11), Fraction(21), Fraction(1), Fraction(1), 10)
        ab = claimAB_split(WELL, w)
        named = ab.named()
        assert (named["alpha"], named["beta"], named["gamma"], named["delta"]) == (7, 8, 13, 14)

    def test_branch_b(self):
        w = WitnessSUVT(Fraction(0), Fraction(10), Fraction(11), Fraction(21), Fraction(1), Fraction(1), 10)
        ab = claimAB_split(WELL, w)
        assert ab.tag == "B"
        assert ab.guarantee == 1 >= w.lam / 2
        assert ab_violations(WELL, ab) == []

    def test_branch_a(self):
        w = WitnessSUVT(Fraction(0), Fraction(10), Fraction(11), Fraction(21), Fraction(1, 2), Fraction(1), 10)
        ab = claimAB_split(PLATEAU, w)
        assert ab.tag == "A"
        assert ab.points == (0, 7, 8, 10, 11, 21)
        assert ab.guarantee == Fraction(1, 2) >= w.lam / 2

    def test_invalid(self):
        w = WitnessSUVT(Fraction(0), Fraction(10), Fraction(21, 2), Fraction(21), Fraction(1), Fraction(1), 10)
        with pytest.raises(InvalidWitness):
            claimAB_split(WELL, w)

    def test_corpus_guarantees(self, corpus):
        for f in corpus[:300]:
            sysm = extract_peaks(sampled(f))
            filt = essential_filter(f, sysm.peaks)
            if not filt.essential:
                continue
            for e in dyadic_bucket(filt.essential, f).entries.values():
                assert e.ab.guarantee >= e.lam / 2


class TestDyadicBucket:
    def test_scale_index(self):
        assert [scale_index(Fraction(w), Fraction(1)) for w in (50, 30, 12)] == [0, 0, 2]

    @given(st.fractions(min_value=Fraction(1, 10**6), max_value=50))
    def test_scale_interval(self, omega):
        n = scale_index(omega, Fraction(1))
        Ln = Fraction(1, 2**n)
        assert n >= 0 and 25 * Ln < omega <= 50 * Ln

    def test_position(self):
        grid = dyadic_bucket([dummy_peak(Fraction(33, 10), 12), dummy_peak(Fraction(0), 50)])
        assert grid.L0 == 1 and grid.L(2) == Fraction(1, 4)
        assert (2, 13) in grid.entries and (0, 0) in grid.entries

    def test_single(self):
        pk = dummy_peak(Fraction(1, 3), 7, var=Fraction(6))
        grid = dyadic_bucket([pk])
        # L0 = 7/50, so r = 1/3 lands at k = floor(50/21) = 2
        assert list(grid.entries) == [(0, 2)]
        assert grid.entries[(0, 2)].lam == Fraction(1, 2)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            dyadic_bucket([])

    def test_each_peak_once(self, corpus):
        for f in corpus[:300]:
            sysm = extract_peaks(sampled(f))
            filt = essential_filter(f, sysm.peaks)
            if not filt.essential:
                continue
            grid = dyadic_bucket(filt.essential)
            placed = [pk for e in grid.entries.values() for pk in e.bucket]
            assert sorted(placed, key=lambda p: p.r) == sorted(filt.essential, key=lambda p: p.r)
            for (n, k), e in grid.entries.items():
                Ln = grid.L(n)
                for pk in e.bucket:
                    assert 25 * Ln < pk.omega <= 50 * Ln and k * Ln <= pk.r < (k + 1) * Ln


class TestKeyLemma:
    def test_single_entry(self):
        f = random_corpus(1000)[189]
        grid = pipeline_grid(f)
        one = type(grid)(grid.L0, dict([next(iter(grid.entries.items()))]))
        rep = keylemma_verify(one, f)
        assert rep.ok
        total = next(r for r in rep.records if r.name.startswith("sum of lambda"))
        lam = next(iter(one.entries.values())).lam
        assert total.margin == 20000 * variation(absolute(f)) - lam

    def test_narrow_witness(self):
        f = random_corpus(1000)[189]
        grid = pipeline_grid(f)
        (key, e), *_ = grid.entries.items()
        e.witness = replace(e.witness, v=e.witness.u + e.witness.L / 2)
        with pytest.raises(WitnessInvalid) as exc:
            keylemma_verify(grid, f)
        assert exc.value.n == key[0] and exc.value.k == key[1]

    def test_residue_sums_sawtooth(self):
        grid = pipeline_grid(SAWTOOTH)
        rep = keylemma_verify(grid, SAWTOOTH, rho=Fraction(51))
        assert rep.ok
        worst = next(r for r in rep.records if r.name.endswith("(all classes)"))
        assert worst.detail["classes"] == 2000
        assert any(r.informational for r in rep.records)


class TestPropositions:
    def test_lemm_uv(self):
        g = constant(1)
        U, V, L = Fraction(0), Fraction(300), Fraction(1)
        a, b, k, left = lemmUV(g, U, V, 0, L)
        assert k % 200 == 0 and U <= a < b <= V and b - a >= 5 * L
        assert left == (a == (k - 100) * L) or b == (k + 100) * L

    def test_perp(self):
        assert perp(Fraction(0), Fraction(48), 100, Fraction(1))
        assert not perp(Fraction(0), Fraction(50), 100, Fraction(1))
        assert perp(Fraction(152), Fraction(160), 100, Fraction(1))

    @pytest.mark.parametrize("tag,build", [("A", propA_build), ("B", propB_build)])
    def test_empty_class(self, tag, build):
        f, grid = ab_grid([(0, 0, 1)], tag)
        with pytest.raises(ClassEmpty):
            build(f, 0, 1, grid)
        other = propB_build if tag == "A" else propA_build
        with pytest.raises(ClassEmpty):
            other(f, 0, 0, grid)

    @pytest.mark.parametrize("tag,build", [("A", propA_build), ("B", propB_build)])
    def test_single_cell(self, tag, build):
        f, grid = ab_grid([(0, 0, 1)], tag)
        system, rep = build(f, 0, 0, grid)
        assert rep.ok
        assert system.value >= system.total_lambda / 5
        assert 5 * variation(f) >= system.total_lambda

    @pytest.mark.parametrize("tag,build", [("A", propA_build), ("B", propB_build)])
    def test_two_scales(self, tag, build):
        f, grid = ab_grid([(0, 0, 4), (0, 400, 4), (10, 102400, 1), (10, -204800, 1)], tag)
        system, rep = build(f, 0, 0, grid)
        assert rep.ok, [r.name for r in rep.failures()]
        assert [lv["n"] for lv in system.levels] == [0, 10]
        assert any("1024" in r.name for r in rep.records)
        assert system.value >= system.total_lambda / 5

    @pytest.mark.parametrize("tag,k,case", [("A", -5200, "iii"), ("B", 3000, "iii*")])
    def test_refinement(self, tag, k, case):
        f, grid = ab_grid([(0, 0, 4), (10, k, 1)], tag)
        build = propA_build if tag == "A" else propB_build
        system, rep = build(f, 0, 0, grid)
        assert rep.ok
        cases = [r.detail["cases"] for r in rep.records if "cases" in r.detail]
        assert any(case in c.split(",") for c in cases)

    def test_corpus_class(self):
        grids = []
        for f in random_corpus(1000)[:120]:
            sysm = extract_peaks(sampled(f))
            filt = essential_filter(f, sysm.peaks)
            if filt.essential:
                grids.append((f, dyadic_bucket(filt.essential, f)))
        assert grids
        for f, grid in grids:
            for (N, K) in grid.classes():
                if grid.members(N, K, "A"):
                    system, rep = propA_build(f, N, K, grid)
                    assert rep.ok
                    assert system.to_json_obj()["tag"] == "A"


class TestTheoremTrace:
    def test_constant(self):
        rep = theorem_trace(constant(4))
        assert rep.ok
        assert rep.summary["sampled_variation"] == 0 and rep.summary["var_f"] == 0

    def test_indicator(self):
        rep = theorem_trace(F1)
        assert rep.ok
        s = rep.summary
        assert s["peaks"] == 1 and s["essential"] == 0
        assert s["sampled_variation"] <= 2 * s["var_f"]

    def test_two_bumps_many_points(self):
        pts = [Fraction(i, 40) - 1 for i in range(200)]
        rep = theorem_trace(F2, pts)
        assert rep.ok
        assert rep.summary["points"] == 200
        assert 0 < rep.summary["ratio"] <= 240004

    def test_sawtooth(self):
        rep = theorem_trace(SAWTOOTH)
        assert rep.ok
        assert rep.summary["essential"] >= 3
        names = {r.name.split(":")[0] for r in rep.records}
        assert {"bucket", "witness", "essential", "total"} <= names

    def test_json(self):
        obj = json.loads(json.dumps(theorem_trace(F2).to_json_obj()))
        assert obj["ok"] is True
        for st_ in obj["stages"]:
            assert {"name", "bound", "achieved", "margin"} <= set(st_)
            assert isinstance(st_["margin"], str)

    @given(step_functions(max_pieces=5))
    def test_random(self, f):
        assert theorem_trace(f).ok

    def test_report_negative_margin(self):
        from hlvar.proofpipe.report import at_most

        rep = ChainReport()
        rep.add(at_most("x", 2, 1))
        assert not rep.ok and rep.failures()[0].margin == -1
