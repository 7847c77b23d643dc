"""Time the compiled kernels against the pure-Python ones on the seeded corpus.

    python3 benchmarks/bench_kernels.py --functions 200 --points 50

Both backends must return identical results; the script exits non-zero if
they do not.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass

from hlvar import _kernels
from hlvar.corpus import random_corpus, random_points
from hlvar.maxop import _scaled
from hlvar.stepfn import absolute


@dataclass
class Timing:
    kernel: str
    backend: str
    seconds: float


def _centered_jobs(n_functions: int, n_points: int, seed: int):
    rng = random.Random(seed)
    jobs = []
    for f in random_corpus(n_functions, seed=seed):
        g = absolute(f)
        jobs.append(_scaled(g, random_points(rng, n_points)))
    return jobs


def _discrete_jobs(n_signals: int, width: int, seed: int):
    rng = random.Random(seed)
    jobs = []
    for _ in range(n_signals):
        vals = [rng.randint(0, 50) for _ in range(width)]
        ns = list(range(-2 * width, 3 * width))
        jobs.append((vals, 0, rng.randint(0, 5), rng.randint(0, 5), ns))
    return jobs


def _run(fn, jobs, repeat: int) -> tuple[float, list]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [fn(*job) for job in jobs]
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--functions", type=int, default=200)
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--signals", type=int, default=200)
    ap.add_argument("--width", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the Python backend is available", file=sys.stderr)
    kernels = {
        "centered_argmax": _centered_jobs(args.functions, args.points, args.seed),
        "discrete_max": _discrete_jobs(args.signals, args.width, args.seed),
    }
    timings: list[Timing] = []
    mismatch = False
    try:
        for kernel, jobs in kernels.items():
            results = {}
            for b in backends:
                _kernels.use_backend(b)
                secs, results[b] = _run(getattr(_kernels, kernel), jobs, args.repeat)
                timings.append(Timing(kernel, b, secs))
            if len({repr(r) for r in results.values()}) > 1:
                print(f"{kernel}: backends disagree", file=sys.stderr)
                mismatch = True
    finally:
        _kernels.use_backend(backends[-1])

    print(f"{'kernel':<18}{'backend':<10}{'seconds':>10}{'speedup':>10}")
    base = {t.kernel: t.seconds for t in timings if t.backend == "python"}
    for t in timings:
        print(f"{t.kernel:<18}{t.backend:<10}{t.seconds:>10.4f}{base[t.kernel] / t.seconds:>9.1f}x")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
