"""Reference computations that share no code with the package."""

from __future__ import annotations

from math import comb

import numpy as np
from sympy.ntheory.modular import crt

# Primes near 2^30, disjoint from the ones the package uses.
ORACLE_PRIMES = (1073741789, 1073741783, 1073741741, 1073741723)


def _eta24_mod(n: int, p: int) -> np.ndarray:
    """prod_{m<=n} (1 - q^m)^24 mod p, coefficients of q^0..q^n."""
    c = np.zeros(n + 1, dtype=np.int64)
    c[0] = 1
    for m in range(1, n + 1):
        out = c.copy()
        for j in range(1, min(24, n // m) + 1):
            coef = (comb(24, j) * (-1) ** j) % p
            out[j * m:] = (out[j * m:] + coef * c[: n + 1 - j * m]) % p
        c = out
    return c


def tau_oracle(n: int) -> list[int]:
    """tau(1..n) from q prod (1 - q^m)^24 by direct multiplication, CRT-combined."""
    residues = [_eta24_mod(n - 1, p) for p in ORACLE_PRIMES]
    out = []
    for i in range(n):
        value, _ = crt(ORACLE_PRIMES, [int(r[i]) for r in residues], symmetric=True)
        out.append(int(value))
    return out


def sigma(power: int, n: int) -> int:
    return sum(d**power for d in range(1, n + 1) if n % d == 0)


def cauchy_exact(a: list[int], b: list[int], n: int) -> list[int]:
    """Coefficients of q^0..q^n of the product of two series given from q^0."""
    return [sum(a[i] * b[m - i] for i in range(m + 1)) for m in range(n + 1)]


def regrouped_terms(a: list[int], b: list[int]) -> list[int]:
    """T(m) = sum over pairs (m, h), h <= m, of the diagonal and both off-diagonal
    orders, by brute force: a(m)b(m) + sum_{h<m} [a(m)b(h) + a(h)b(m)]."""
    terms = []
    for m in range(1, len(a) + 1):
        t = a[m - 1] * b[m - 1]
        for h in range(1, m):
            t += a[m - 1] * b[h - 1] + a[h - 1] * b[m - 1]
        terms.append(t)
    return terms
