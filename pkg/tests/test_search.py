from __future__ import annotations

import csv
import random
from fractions import Fraction

import pytest

from hlvar.corpus import F1, F2
from hlvar.search import (
    ConfigInvalid,
    SearchConfig,
    evaluate,
    propose,
    search_corpus,
    search_ratio,
)
from hlvar.stepfn import constant, make_step


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [{"iterations": 0}, {"max_pieces": 0}, {"value_den": 0}, {"bp_den": 0}, {"mode": "greedy"},
         {"eps": Fraction(0)}, {"workers": 0}, {"t_end": 1.0}],
    )
    def test_invalid(self, kw):
        with pytest.raises(ConfigInvalid):
            SearchConfig(**kw).validate()
        with pytest.raises(ConfigInvalid):
            search_ratio(SearchConfig(**kw))

    def test_json(self):
        obj = SearchConfig(seed=3).to_json_obj()
        assert obj["seed"] == 3 and obj["eps"] == "1/1000000"


class TestEvaluate:
    def test_indicator(self):
        ev = evaluate(F1)
        assert ev.ratio_lo == ev.ratio_hi == 1
        assert ev.pieces == 3

    def test_two_bumps(self):
        ev = evaluate(F2)
        assert ev.ratio_lo == Fraction(10, 3) / 4

    def test_constant(self):
        ev = evaluate(constant(2))
        assert ev.ratio_lo is None


class TestSearch:
    def test_deterministic(self):
        cfg = SearchConfig(seed=42, iterations=100)
        a, b = search_ratio(cfg), search_ratio(cfg)
        assert a.to_json() == b.to_json()
        assert a.evaluated == 100 and len(a.history) == 100
        assert a.best_ratio_lo is not None and a.best_ratio_lo >= 1

    def test_seeds_differ(self):
        a = search_ratio(SearchConfig(seed=1, iterations=50))
        b = search_ratio(SearchConfig(seed=2, iterations=50))
        assert a.history != b.history

    def test_constant_corpus(self):
        res = search_corpus([constant(0), constant(3), constant(Fraction(-1, 2))])
        assert res.empty and res.best_ratio_lo is None
        assert res.skipped == 3 and res.to_json_obj()["empty"] is True

    def test_indicator_seed_candidate(self):
        res = search_corpus([F1])
        assert res.best_ratio_lo == 1 and res.argmax == F1

    def test_random_mode(self):
        cfg = SearchConfig(seed=5, iterations=40, mode="random")
        res = search_ratio(cfg)
        assert res.evaluated == 40
        assert res.to_json() == search_ratio(cfg).to_json()

    def test_exhaustive_mode(self):
        cfg = SearchConfig(iterations=30, mode="exhaustive-discrete", value_range=2, max_pieces=5)
        res = search_ratio(cfg)
        assert res.evaluated == 30
        # k = 1 gives 0, 1, 2 on [0, 1]; k = 2 starts after that
        assert res.history[0][1] is None and res.skipped >= 1
        assert res.argmax.breakpoints[0] == 0

    def test_workers_match(self):
        cfg = SearchConfig(seed=7, iterations=40)
        a = search_ratio(cfg)
        b = search_ratio(SearchConfig(seed=7, iterations=40, workers=2))
        assert a.to_json() == b.to_json()

    def test_history_csv(self, tmp_path):
        res = search_ratio(SearchConfig(seed=1, iterations=10))
        path = tmp_path / "h.csv"
        res.write_history_csv(path)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["iteration", "ratio_lo", "pieces"]
        assert len(rows) == 11
        for row in rows[1:]:
            Fraction(row[1])
            int(row[2])

    def test_ratio_bounded(self):
        res = search_ratio(SearchConfig(seed=3, iterations=60))
        assert all(r is None or r <= 240004 for _, r, _ in res.history)


class TestMoves:
    def test_propose_on_grid(self):
        cfg = SearchConfig()
        rng = random.Random(0)
        f = make_step([0, 1], [0, 1, 0])
        for _ in range(200):
            f = propose(f, rng, cfg)
            assert len(f.values) <= cfg.max_pieces
            assert all((x * cfg.bp_den).denominator == 1 and abs(x) <= cfg.span for x in f.breakpoints)
            assert all((v * cfg.value_den).denominator == 1 and 0 <= v <= cfg.value_range for v in f.values)
