"""Hot loops behind a stable interface.

The compiled ``_ckernels`` module is used when it was built; otherwise the
pure-Python ``_pykernels`` module is selected at import.  Both take and return
plain integers (or float arrays for the sampling oracle) and must agree
exactly; :func:`use_backend` switches explicitly, which the tests and the
benchmark use to compare them.
"""

from __future__ import annotations

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

ZERO_LIMIT = _pykernels.ZERO_LIMIT
INFINITY_LIMIT = _pykernels.INFINITY_LIMIT

# scaled coordinates above this would overflow the 128-bit products in C
_NATIVE_BOUND = 1 << 40
# discrete sums must stay inside int64
_DISCRETE_BOUND = 1 << 28

_impl = _ckernels if _ckernels is not None else _pykernels


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def backend() -> str:
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def use_backend(name: str) -> None:
    global _impl
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        _impl = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")


def _fits(bound: int, *seqs) -> bool:
    return all(abs(v) < bound for seq in seqs for v in seq)


def centered_argmax(bps: list[int], vals: list[int], xs: list[int]) -> list[int]:
    if _impl is not _pykernels and _fits(_NATIVE_BOUND, bps, vals, xs):
        return _impl.centered_argmax(bps, vals, xs)
    return _pykernels.centered_argmax(bps, vals, xs)


def discrete_max(vals: list[int], lo: int, left: int, right: int, ns: list[int]):
    span = len(vals) + max((abs(n) for n in ns), default=0) + abs(lo) + 1
    # window sums times window lengths must fit in int64
    big = max([abs(left), abs(right), *map(abs, vals)]) * (2 * span + 1) ** 2
    if _impl is not _pykernels and big < (1 << 62) and _fits(_DISCRETE_BOUND, ns):
        return _impl.discrete_max(vals, lo, left, right, ns)
    return _pykernels.discrete_max(vals, lo, left, right, ns)


def window_averages(bps, vals, x: float, radii):
    return _impl.window_averages(bps, vals, x, radii)
