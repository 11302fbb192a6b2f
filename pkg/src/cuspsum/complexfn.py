"""Complex Gamma, log-Gamma and Riemann zeta in double precision.

All three functions accept a Python scalar or a numpy array and return a
complex scalar or complex array of the same shape.  ``gamma`` and
``log_gamma`` use different algorithms (Lanczos vs. Stirling with upward
recurrence), so agreement between them is a meaningful check.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, PoleError

# Even-index Bernoulli numbers B_2 .. B_24.
BERNOULLI = {
    2: Fraction(1, 6),
    4: Fraction(-1, 30),
    6: Fraction(1, 42),
    8: Fraction(-1, 30),
    10: Fraction(5, 66),
    12: Fraction(-691, 2730),
    14: Fraction(7, 6),
    16: Fraction(-3617, 510),
    18: Fraction(43867, 798),
    20: Fraction(-174611, 330),
    22: Fraction(854513, 138),
    24: Fraction(-236364091, 2730),
}

# Lanczos g = 7, n = 9 coefficients (Godfrey's set, as tabulated in
# Numerical Recipes 3rd ed. and widely reproduced).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_STIRLING_MIN = 15.0
_STIRLING = tuple(
    float(BERNOULLI[2 * m] / (2 * m * (2 * m - 1))) for m in range(1, 11)
)


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite argument")
    return arr


def _check_poles(z: np.ndarray) -> None:
    on_axis = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(on_axis):
        bad = z[on_axis].ravel()[0]
        raise PoleError(f"Gamma has a pole at z = {bad.real:g}")


def _wrap(result: np.ndarray, scalar: bool):
    return complex(result) if scalar else result


def _lanczos(z: np.ndarray) -> np.ndarray:
    # Valid for Re z >= 0.5.
    zm = z - 1.0
    acc = np.full(z.shape, _LANCZOS[0], dtype=complex)
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return np.sqrt(2.0 * np.pi) * acc * np.exp((zm + 0.5) * np.log(t) - t)


def gamma(z):
    """Gamma function; reflection formula below Re z = 1/2."""
    arr = _as_complex(z)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    _check_poles(arr)
    out = np.empty(arr.shape, dtype=complex)
    right = arr.real >= 0.5
    out[right] = _lanczos(arr[right])
    left = ~right
    if np.any(left):
        zl = arr[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * _lanczos(1.0 - zl))
    return _wrap(out[0] if scalar else out, scalar)


def _loggamma_stirling(z: np.ndarray) -> np.ndarray:
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros(z.shape, dtype=complex)
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    series = series * inv
    return (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    # Re z >= 0.5: shift upward until |z + m| is large, then Stirling.
    shift = np.zeros(z.shape, dtype=complex)
    w = z.copy()
    small = np.abs(w) < _STIRLING_MIN
    while np.any(small):
        shift[small] += np.log(w[small])
        w[small] += 1.0
        small = np.abs(w) < _STIRLING_MIN
    return _loggamma_stirling(w) - shift


def _log_sinpi_upper(z: np.ndarray) -> np.ndarray:
    # Analytic branch of log(sin(pi z)) on Im z >= 0.
    e = np.exp(2j * np.pi * z)
    return -math.log(2.0) + 0.5j * np.pi - 1j * np.pi * z + np.log1p(-e)


def log_gamma(z):
    """Principal branch of log Gamma (cut along the negative real axis).

    For real negative arguments the limit from the upper half plane is
    returned.
    """
    arr = _as_complex(z)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    _check_poles(arr)
    out = np.empty(arr.shape, dtype=complex)
    right = arr.real >= 0.5
    out[right] = _loggamma_right(arr[right])
    left = ~right
    if np.any(left):
        zl = arr[left]
        lower = zl.imag < 0
        zu = np.where(lower, np.conj(zl), zl)
        val = _LOG_PI - _log_sinpi_upper(zu) - _loggamma_right(1.0 - zu)
        out[left] = np.where(lower, np.conj(val), val)
    return _wrap(out[0] if scalar else out, scalar)


def zeta_em(z, n_terms: int | None = None, order: int = 10):
    """Euler-Maclaurin evaluation of zeta with explicit node count and order.

    ``n_terms`` defaults to ``max(20, ceil(max |Im z|))``; ``order`` is the
    number of Bernoulli correction terms (at most 12).
    """
    arr = _as_complex(z)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr.real <= 0):
        raise DomainError("zeta is only supported for Re z > 0")
    if np.any(arr == 1.0):
        raise PoleError("zeta has a pole at z = 1")
    if not 0 <= order <= len(BERNOULLI):
        raise ValueError(f"order must be between 0 and {len(BERNOULLI)}")
    if n_terms is None:
        n_terms = max(20, int(math.ceil(float(np.max(np.abs(arr.imag))))))
    big_n = float(n_terms)

    n = np.arange(n_terms - 1, 0, -1, dtype=float)  # small terms first
    head = np.exp(-np.outer(arr, np.log(n))).sum(axis=1) if n.size else 0.0
    n_pow = np.exp(-arr * math.log(big_n))
    total = head + big_n * n_pow / (arr - 1.0) + 0.5 * n_pow

    rising = arr.copy()  # s (s+1) ... (s+2j-2)
    term_pow = n_pow / big_n  # N^{-s-2j+1} for j = 1
    fact = 2.0  # (2j)!
    for j in range(1, order + 1):
        total = total + float(BERNOULLI[2 * j]) / fact * rising * term_pow
        rising = rising * (arr + 2 * j - 1) * (arr + 2 * j)
        term_pow = term_pow / (big_n * big_n)
        fact *= (2 * j + 1) * (2 * j + 2)
    return _wrap(total[0] if scalar else total, scalar)


def zeta(z):
    """Riemann zeta for Re z > 0, z != 1."""
    return zeta_em(z)
