"""Pure-Python kernels; the reference the compiled module must match bit for bit.

All exact kernels work on scaled integers: positions share one denominator,
values share another, so every average is an integer ratio and comparisons
are cross-multiplications.
"""

from __future__ import annotations

import numpy as np

ZERO_LIMIT = -1
INFINITY_LIMIT = -2


def _antiderivative(bps, vals, y):
    # G(y) with G(bps[0]) == 0, extended linearly into the tails
    n = len(bps)
    if n == 0:
        return vals[0] * y
    if y < bps[0]:
        return vals[0] * (y - bps[0])
    acc = 0
    i = 0
    while i + 1 < n and bps[i + 1] <= y:
        acc += vals[i + 1] * (bps[i + 1] - bps[i])
        i += 1
    return acc + vals[i + 1] * (y - bps[i])


def centered_argmax(bps, vals, xs):
    """Winning candidate of the centred maximal function at each ``x``.

    ``vals`` must be nonnegative.  Returns ``ZERO_LIMIT``, ``INFINITY_LIMIT``
    or the index ``i`` of the breakpoint whose distance is the optimal radius.
    Candidates are scanned zero-limit first, then breakpoints in index order,
    then the infinity limit; the first strict maximum wins.
    """
    n = len(bps)
    out = []
    for x in xs:
        # zero-limit candidate (vl + vr) / 2
        j = 0
        while j < n and bps[j] < x:
            j += 1
        vl = vals[j]
        vr = vals[j + 1] if (j < n and bps[j] == x) else vals[j]
        best_num, best_den, best = vl + vr, 2, ZERO_LIMIT
        for i in range(n):
            r = x - bps[i] if x > bps[i] else bps[i] - x
            if r == 0:
                continue
            num = _antiderivative(bps, vals, x + r) - _antiderivative(bps, vals, x - r)
            den = 2 * r
            if num * best_den > best_num * den:
                best_num, best_den, best = num, den, i
        num = vals[0] + vals[n]
        if num * best_den > best_num * 2:
            best = INFINITY_LIMIT
        out.append(best)
    return out


def discrete_max(vals, lo, left, right, ns):
    """Exact discrete centred maximal function at each integer in ``ns``.

    ``vals[k]`` is the (nonnegative) signal at ``lo + k``; ``left``/``right``
    are the tail magnitudes.  Returns parallel lists of numerators and
    denominators of the maximal average (not reduced).
    """
    hi = lo + len(vals) - 1

    def at(m):
        if m < lo:
            return left
        if m > hi:
            return right
        return vals[m - lo]

    nums, dens = [], []
    for n in ns:
        r_cover = max(n - lo, hi - n, 0)
        s = at(n)
        best_num, best_den = s, 1
        for r in range(1, r_cover + 1):
            s += at(n - r) + at(n + r)
            den = 2 * r + 1
            if s * best_den > best_num * den:
                best_num, best_den = s, den
        if (left + right) * best_den > best_num * 2:
            best_num, best_den = left + right, 2
        nums.append(best_num)
        dens.append(best_den)
    return nums, dens


def window_averages(bps, vals, x, radii):
    """Float averages of ``vals`` over ``(x - r, x + r)`` for each radius."""
    bps = np.asarray(bps, dtype=np.float64)
    vals = np.asarray(vals, dtype=np.float64)
    radii = np.asarray(radii, dtype=np.float64)
    if bps.size == 0:
        return np.full(radii.shape, vals[0])
    cum = np.concatenate(([0.0], np.cumsum(vals[1:-1] * np.diff(bps))))

    def G(y):
        i = np.searchsorted(bps, y, side="right")
        base = np.where(i == 0, 0.0, cum[np.maximum(i - 1, 0)])
        anchor = np.where(i == 0, bps[0], bps[np.maximum(i - 1, 0)])
        return base + vals[i] * (y - anchor)

    return (G(x + radii) - G(x - radii)) / (2.0 * radii)
