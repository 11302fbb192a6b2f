"""Deterministic compensated summation.

Reductions go through :func:`math.fsum` (correctly rounded), applied per
fixed-size chunk and then across chunk partials, so the result does not
depend on how chunks are scheduled.
"""

from __future__ import annotations

import math

import numpy as np

CHUNK = 1 << 16


def fsum(values, chunk: int = CHUNK) -> float:
    arr = np.asarray(values, dtype=float).ravel()
    partials = [math.fsum(arr[i:i + chunk]) for i in range(0, arr.size, chunk)]
    return math.fsum(partials)


def csum(values, chunk: int = CHUNK) -> complex:
    arr = np.asarray(values)
    if not np.iscomplexobj(arr):
        return complex(fsum(arr, chunk))
    return complex(fsum(arr.real, chunk), fsum(arr.imag, chunk))


def compensated_cumsum(values) -> tuple[np.ndarray, np.ndarray]:
    """Neumaier running sums.

    Returns ``(sums, residuals)``; ``sums[i] + residuals[i]`` tracks the
    exact prefix sum far better than ``sums[i]`` alone.
    """
    arr = np.asarray(values, dtype=float)
    sums = np.empty_like(arr)
    res = np.empty_like(arr)
    s = 0.0
    c = 0.0
    for i, x in enumerate(arr.tolist()):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        sums[i] = s + c
        res[i] = c - ((s + c) - s)
    return sums, res
