"""Seeded search for step functions with a large ``Var Mf / Var f``.

Every candidate is scored by a certified lower bound on the ratio, and is
checked against both the non-centered bound ``Var M~f <= Var f`` and the
centered bound with constant 240004.  Proposals are generated in fixed-size
batches from one ``random.Random(seed)`` stream, scored concurrently, and
accepted in batch order, so results do not depend on the worker count.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .corpus import F1, random_step
from .envelope import centered_envelope, noncentered_envelope, variation_enclosure
from .stepfn import StepFunction, absolute, format_rational, make_step, variation

MODES = ("anneal", "exhaustive-discrete", "random")
CENTERED_CONSTANT = 240004


class ConfigInvalid(ValueError):
    pass


class VerificationFailure(RuntimeError):
    """A candidate broke one of the proven bounds; indicates a bug."""


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 0
    iterations: int = 1000
    max_pieces: int = 8
    value_den: int = 8
    bp_den: int = 8
    eps: Fraction = Fraction(1, 10**6)
    mode: str = "anneal"
    span: int = 4
    value_range: int = 4
    batch: int = 8
    workers: int = 1
    t_start: float = 0.05
    t_end: float = 0.0005

    def validate(self) -> None:
        if self.iterations <= 0:
            raise ConfigInvalid("iterations must be positive")
        for name in ("max_pieces", "value_den", "bp_den", "span", "value_range", "batch", "workers"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be at least 1")
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {', '.join(MODES)}")
        if self.eps <= 0:
            raise ConfigInvalid("eps must be positive")
        if not 0 < self.t_end <= self.t_start:
            raise ConfigInvalid("need 0 < t_end <= t_start")

    def to_json_obj(self) -> dict:
        out = asdict(self)
        out["eps"] = format_rational(self.eps)
        return out


@dataclass(frozen=True)
class Evaluation:
    ratio_lo: Optional[Fraction]  # None when Var f = 0
    ratio_hi: Optional[Fraction]
    pieces: int


@dataclass
class SearchResult:
    best_ratio_lo: Optional[Fraction]
    argmax: Optional[StepFunction]
    history: list[tuple[int, Optional[Fraction], int]] = field(default_factory=list)
    evaluated: int = 0
    skipped: int = 0

    @property
    def empty(self) -> bool:
        return self.argmax is None

    def to_json_obj(self) -> dict:
        return {
            "best_ratio_lo": format_rational(self.best_ratio_lo) if self.best_ratio_lo is not None else None,
            "argmax": self.argmax.to_json_obj() if self.argmax is not None else None,
            "empty": self.empty,
            "evaluated": self.evaluated,
            "skipped_constant": self.skipped,
            "history": [[i, format_rational(r) if r is not None else None, p] for i, r, p in self.history],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    def write_history_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "ratio_lo", "pieces"])
            for i, r, p in self.history:
                w.writerow([i, format_rational(r) if r is not None else "", p])


def evaluate(f: StepFunction, eps: Fraction = Fraction(1, 10**6)) -> Evaluation:
    """Certified ratio bounds for ``f`` after checking both variation bounds."""
    g = absolute(f)
    var_f = variation(f)
    var_g = variation(g)
    pieces = len(f.values)
    nc = variation_enclosure(noncentered_envelope(g), eps)
    if nc.hi > var_g:
        raise VerificationFailure(f"non-centered variation {nc.hi} exceeds Var |f| = {var_g} for {f.to_json()}")
    c = variation_enclosure(centered_envelope(g), eps)
    if c.hi > CENTERED_CONSTANT * var_g:
        raise VerificationFailure(f"centered variation {c.hi} exceeds 240004 Var |f| for {f.to_json()}")
    if var_f == 0:
        return Evaluation(None, None, pieces)
    return Evaluation(c.lo / var_f, c.hi / var_f, pieces)


def _evaluate_packed(args):
    f, eps = args
    return evaluate(f, eps)


class _Scorer:
    """Evaluates batches in order, with a cache and an optional process pool."""

    def __init__(self, eps: Fraction, workers: int) -> None:
        self.eps = eps
        self.cache: dict[StepFunction, Evaluation] = {}
        self.pool = ProcessPoolExecutor(workers) if workers > 1 else None

    def __enter__(self) -> "_Scorer":
        return self

    def __exit__(self, *exc) -> None:
        if self.pool is not None:
            self.pool.shutdown()

    def score(self, fs: Sequence[StepFunction]) -> list[Evaluation]:
        todo = list(dict.fromkeys(f for f in fs if f not in self.cache))
        if self.pool is not None and len(todo) > 1:
            results = list(self.pool.map(_evaluate_packed, [(f, self.eps) for f in todo]))
        else:
            results = [evaluate(f, self.eps) for f in todo]
        self.cache.update(zip(todo, results))
        return [self.cache[f] for f in fs]


# -- moves -----------------------------------------------------------------


def _grid_value(rng: random.Random, cfg: SearchConfig) -> Fraction:
    return Fraction(rng.randint(0, cfg.value_range * cfg.value_den), cfg.value_den)


def _grid_point(rng: random.Random, cfg: SearchConfig) -> Fraction:
    return Fraction(rng.randint(-cfg.span * cfg.bp_den, cfg.span * cfg.bp_den), cfg.bp_den)


def _jitter_breakpoint(f, rng, cfg):
    if not f.breakpoints:
        return None
    bps = list(f.breakpoints)
    i = rng.randrange(len(bps))
    bps[i] += Fraction(rng.choice((-2, -1, 1, 2)), cfg.bp_den)
    if any(b <= a for a, b in zip(bps, bps[1:])) or abs(bps[i]) > cfg.span:
        return None
    return make_step(bps, f.values)


def _jitter_value(f, rng, cfg):
    vals = list(f.values)
    i = rng.randrange(len(vals))
    v = vals[i] + Fraction(rng.choice((-2, -1, 1, 2)), cfg.value_den)
    if not 0 <= v <= cfg.value_range:
        return None
    vals[i] = v
    return make_step(f.breakpoints, vals)


def _split(f, rng, cfg):
    if len(f.values) >= cfg.max_pieces:
        return None
    x = _grid_point(rng, cfg)
    if x in f.breakpoints:
        return None
    bps = sorted((*f.breakpoints, x))
    i = bps.index(x)
    vals = list(f.values)
    vals.insert(i + 1, _grid_value(rng, cfg))
    return make_step(bps, vals)


def _merge(f, rng, cfg):
    if not f.breakpoints:
        return None
    i = rng.randrange(len(f.breakpoints))
    bps = list(f.breakpoints)
    vals = list(f.values)
    del bps[i]
    del vals[i + rng.randint(0, 1)]
    return make_step(bps, vals)


MOVES = (_jitter_breakpoint, _jitter_value, _split, _merge)


def propose(f: StepFunction, rng: random.Random, cfg: SearchConfig) -> StepFunction:
    """A neighbour of ``f`` on the configured grids that differs from ``f``."""
    while True:
        g = rng.choice(MOVES)(f, rng, cfg)
        if g is not None and g != f:
            return g


# -- drivers ---------------------------------------------------------------


def _record(result: SearchResult, it: int, f: StepFunction, ev: Evaluation) -> None:
    result.evaluated += 1
    result.history.append((it, ev.ratio_lo, ev.pieces))
    if ev.ratio_lo is None:
        result.skipped += 1
        return
    if result.best_ratio_lo is None or ev.ratio_lo > result.best_ratio_lo:
        result.best_ratio_lo, result.argmax = ev.ratio_lo, f


def search_corpus(functions: Iterable[StepFunction], cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Score a fixed list; constant functions are skipped and counted."""
    fs = list(functions)
    result = SearchResult(None, None)
    with _Scorer(cfg.eps, cfg.workers) as scorer:
        for it, (f, ev) in enumerate(zip(fs, scorer.score(fs))):
            _record(result, it, f, ev)
    return result


def _discrete_family(cfg: SearchConfig):
    """Unit pieces on ``[0, k]`` with integer values, zero tails, shortest first."""
    for k in range(1, cfg.max_pieces - 1):
        for vals in itertools.product(range(cfg.value_range + 1), repeat=k):
            yield make_step(range(k + 1), (0, *vals, 0))


def search_ratio(cfg: SearchConfig) -> SearchResult:
    cfg.validate()
    rng = random.Random(cfg.seed)
    if cfg.mode == "exhaustive-discrete":
        return search_corpus(itertools.islice(_discrete_family(cfg), cfg.iterations), cfg)
    if cfg.mode == "random":
        fs = [
            random_step(rng, cfg.max_pieces, max(cfg.bp_den, cfg.value_den), cfg.span, cfg.value_range, signed=False)
            for _ in range(cfg.iterations)
        ]
        return search_corpus(fs, cfg)
    return _anneal(cfg, rng)


def _anneal(cfg: SearchConfig, rng: random.Random) -> SearchResult:
    result = SearchResult(None, None)
    with _Scorer(cfg.eps, cfg.workers) as scorer:
        cur = F1
        cur_ev = scorer.score([cur])[0]
        it = 0
        while it < cfg.iterations:
            n = min(cfg.batch, cfg.iterations - it)
            props = [propose(cur, rng, cfg) for _ in range(n)]
            evs = scorer.score(props)
            for f, ev in zip(props, evs):
                _record(result, it, f, ev)
                temp = cfg.t_start * (cfg.t_end / cfg.t_start) ** (it / cfg.iterations)
                it += 1
                if ev.ratio_lo is None:
                    continue
                delta = float(ev.ratio_lo - cur_ev.ratio_lo)
                u = rng.random()
                if delta >= 0 or u < math.exp(delta / temp):
                    cur, cur_ev = f, ev
    return result
