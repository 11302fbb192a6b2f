"""Heuristic growth envelopes used for truncation-tail bounds.

Tails beyond the available coefficients are bounded with Deligne's bound
|a(n)| <= d(n) n^{(k-1)/2} together with d(n) <= C_eps n^eps, where C_eps
is the maximum of d(n) n^{-eps} over a sieved range.  Beyond that range
the divisor envelope is an assumption, so every bound built on it is
labelled ``heuristic-envelope``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .qseries import divisor_count

LABEL = "heuristic-envelope"
SIEVE_LIMIT = 1 << 20
EPS = 0.1


@lru_cache(maxsize=None)
def _divisors() -> np.ndarray:
    return divisor_count(SIEVE_LIMIT)


@lru_cache(maxsize=16)
def divisor_constant(eps: float = EPS) -> float:
    """max over 1 <= n <= 2^20 of d(n) n^{-eps}."""
    d = _divisors()[1:].astype(float)
    n = np.arange(1, SIEVE_LIMIT + 1, dtype=float)
    return float(np.max(d * n**-eps))


def power_tail(n: int, p: float) -> float:
    """Upper bound for sum_{m > n} m^{-p} (p > 1) by integral comparison."""
    if p <= 1:
        return math.inf
    return float(n) ** (1.0 - p) / (p - 1.0)


def log_power_tail(n: int, q: float) -> float:
    """Upper bound for sum_{m > n} m^{-q} (1 + ln m), q > 1, n >= 1."""
    if q <= 1:
        return math.inf
    ln = math.log(max(n, 1))
    return float(n) ** (1.0 - q) * ((1.0 + ln) / (q - 1.0) + 1.0 / (q - 1.0) ** 2)


def partial_sum_constant(values: np.ndarray, weight: int, exponent: float) -> float:
    """max_n |S(n)| n^{-(k-1)/2 - exponent} over the available range."""
    vals = np.abs(np.asarray(values, dtype=float))
    if vals.size == 0:
        return 0.0
    n = np.arange(1, vals.size + 1, dtype=float)
    return float(np.max(vals * n ** (-(weight - 1) / 2 - exponent)))


def mean_square_tail(weights: np.ndarray, n: int, sigma: float) -> float:
    """Bound sum_{m > n} c(m) m^{-sigma} for c(m) >= 0, sigma > 1.

    Assumes the running mean (1/x) sum_{m<=x} c(m) stays below alpha, the
    largest running mean observed on [n/10, n]; for c = |lambda(m)|^2 the
    Rankin-Selberg asymptotic makes it converge.  Partial summation then
    gives sigma alpha n^{1-sigma} / (sigma - 1).
    """
    if sigma <= 1:
        return math.inf
    c = np.asarray(weights, dtype=float)[:n]
    running = np.cumsum(c) / np.arange(1, c.size + 1)
    alpha = float(np.max(running[max(c.size // 10, 1) - 1:]))
    return sigma * alpha * float(n) ** (1.0 - sigma) / (sigma - 1.0)
