from __future__ import annotations

import random
import subprocess
import sys
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals, step_functions
from hlvar import _kernels
from hlvar.corpus import random_corpus, random_points
from hlvar.discrete import discrete_max_at, make_signal
from hlvar.maxop import _scaled, centered_values
from hlvar.stepfn import absolute

needs_cython = pytest.mark.skipif(
    "cython" not in _kernels.available_backends(), reason="compiled kernels not built"
)


@contextmanager
def backend(name):
    before = _kernels.backend()
    _kernels.use_backend(name)
    try:
        yield
    finally:
        _kernels.use_backend(before)


def both(fn, *args):
    with backend("python"):
        a = fn(*args)
    with backend("cython"):
        b = fn(*args)
    return a, b


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")


def test_python_always_available():
    assert _kernels.available_backends()[0] == "python"


@needs_cython
def test_default_is_compiled():
    assert _kernels.backend() == "cython"


@needs_cython
def test_centered_argmax_corpus():
    rng = random.Random(3)
    for f in random_corpus(200, seed=11):
        job = _scaled(absolute(f), random_points(rng, 20))
        a, b = both(_kernels.centered_argmax, *job)
        assert a == b


@needs_cython
@given(step_functions(max_pieces=8), st.lists(rationals(), min_size=1, max_size=10))
def test_centered_values_agree(f, xs):
    a, b = both(centered_values, f, xs)
    assert a == b


@needs_cython
def test_large_coordinates_fall_back():
    # scaled integers past the native bound go through the Python kernel
    bps, vals, xs = [0, 3 * 10**15], [0, 10**18, 1], [10**16, -(10**15)]
    a, b = both(_kernels.centered_argmax, bps, vals, xs)
    assert a == b


@needs_cython
@given(
    st.lists(st.integers(-50, 50), min_size=1, max_size=10),
    st.integers(-5, 5),
    st.integers(0, 9),
    st.integers(0, 9),
)
def test_discrete_agree(vals, lo, left, right):
    ns = list(range(lo - 12, lo + len(vals) + 12))
    a, b = both(_kernels.discrete_max, [abs(v) for v in vals], lo, left, right, ns)
    assert a == b


@needs_cython
def test_discrete_overflow_guard():
    f = make_signal({0: 10**17, 3: 1})
    a, b = both(discrete_max_at, f, range(-20, 20))
    assert a == b
    assert a[20] == 10**17


@needs_cython
def test_window_averages_agree():
    radii = np.linspace(0.01, 10, 1000)
    a, b = both(_kernels.window_averages, [0.0, 1.0, 2.5], [0.0, 1.0, 3.0, 0.5], 0.7, radii)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_window_averages_exact_on_grid():
    with backend("python"):
        out = _kernels.window_averages([0.0, 1.0], [0.0, 1.0, 0.0], 2.0, np.array([1.0, 2.0, 4.0]))
    np.testing.assert_allclose(out, [0.0, 0.25, 0.125])
    assert Fraction(out[1]) == Fraction(1, 4)


def test_import_falls_back_without_extension():
    code = (
        "import sys; sys.modules['hlvar._kernels._ckernels'] = None\n"
        "from hlvar import _kernels\n"
        "from hlvar.maxop import centered_max\n"
        "from hlvar.corpus import F1\n"
        "assert _kernels.backend() == 'python', _kernels.backend()\n"
        "assert _kernels.available_backends() == ['python']\n"
        "print(centered_max(F1, 2).value)\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "1/4"
