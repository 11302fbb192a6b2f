"""Truncated Dirichlet series in their regions of absolute convergence.

Every evaluation returns a :class:`SeriesValue` carrying an absolute bound
on the omitted tail.  Tail bounds rest on the divisor envelope from
:mod:`cuspsum.envelope` and are labelled accordingly.

Coefficients are handled in the normalized form ``a(n) n^{-(k-1)/2}`` so
that weight-26 forms at n ~ 10^6 stay well inside double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import envelope
from .complexfn import gamma, zeta
from .errors import DomainError, InsufficientCoefficientsError, WeightMismatchError
from .qseries import QExpansion
from .sums import PartialSumSeries
from .summation import compensated_cumsum, csum

POLICY_ABSCISSA = 2.5
_BLOCK = 2048


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    truncation_bound: float
    n_used: int
    bound_kind: str = envelope.LABEL

    def __post_init__(self):
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise DomainError("series value is not finite")
        if not (self.truncation_bound >= 0 and math.isfinite(self.truncation_bound)):
            raise DomainError("truncation bound must be finite and non-negative")


@dataclass(frozen=True)
class ConstantPair:
    """The main-term constant computed along two routes.

    ``c_direct`` sums ``a(n) b(n) n^{-k-1/2}`` directly; ``c_lfun`` goes
    through ``Gamma(3/2) L(3/2, f x g) / (4 pi^2 zeta(3))``.
    """

    c_direct: complex
    c_lfun: complex
    discrepancy: float
    truncation_bound: float
    n_used: int
    conjugated: bool
    # Residue of W at s = 1/2; quoted for comparison, not asserted.
    residue_half: complex = 0j


def _check_pair(f: QExpansion, g: QExpansion, n: int) -> int:
    if f.weight != g.weight:
        raise WeightMismatchError(f"weights differ: {f.weight} vs {g.weight}")
    if n is None:
        n = min(f.n_max, g.n_max)
    if n > min(f.n_max, g.n_max):
        raise InsufficientCoefficientsError(
            f"N = {n} exceeds available coefficients ({min(f.n_max, g.n_max)})"
        )
    return n


def normalized(f: QExpansion, n: int) -> np.ndarray:
    """a(m) m^{-(k-1)/2} for m = 1..n."""
    a = np.asarray(f.coeffs[:n], dtype=float if not np.iscomplexobj(f.coeffs) else complex)
    m = np.arange(1, n + 1, dtype=float)
    return a * m ** (-(f.weight - 1) / 2)


def _maybe_conj(x: np.ndarray, conjugated: bool) -> np.ndarray:
    return np.conj(x) if conjugated else x


def dirichlet_eval(coeffs: np.ndarray, s) -> np.ndarray:
    """sum_{n=1}^{N} coeffs[n-1] n^{-s} for an array of ``s`` sharing one real part.

    Evaluated as ``sum_n (c_n n^{-sigma}) exp(-i t log n)`` in n-blocks.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    sigma = s.real
    if not np.allclose(sigma, sigma[0]):
        return np.array([dirichlet_eval(coeffs, [x])[0] for x in s])
    n = np.arange(1, len(coeffs) + 1, dtype=float)
    logn = np.log(n)
    weighted = np.asarray(coeffs) * np.exp(-sigma[0] * logn)
    out = np.zeros(s.shape, dtype=complex)
    t = s.imag
    for start in range(0, len(coeffs), _BLOCK):
        sl = slice(start, start + _BLOCK)
        phase = np.outer(t, logn[sl])
        w = weighted[sl]
        out += np.cos(phase) @ w - 1j * (np.sin(phase) @ w)
    return out


def _series_at(coeffs: np.ndarray, s: complex) -> complex:
    n = np.arange(1, len(coeffs) + 1, dtype=float)
    return csum(coeffs * np.exp(-complex(s) * np.log(n)))


def _require(s: complex, abscissa: float, what: str) -> None:
    if complex(s).real < abscissa:
        raise DomainError(f"{what} needs Re s >= {abscissa}, got {complex(s).real}")


# -- diagonal ----------------------------------------------------------------


def rankin_coefficients(f, g, n: int, conjugated: bool = True) -> np.ndarray:
    """a(m) conj(b(m)) m^{-(k-1)} for m = 1..n."""
    return normalized(f, n) * _maybe_conj(normalized(g, n), conjugated)


def rankin_L(s, f: QExpansion, g: QExpansion, n: int | None = None,
             conjugated: bool = True) -> SeriesValue:
    """zeta(2s) sum_{m<=N} a(m) conj(b(m)) m^{-(s+k-1)}, Re s > 1."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError("Rankin-Selberg series needs Re s > 1")
    n = _check_pair(f, g, n)
    z2 = complex(zeta(2 * s))
    partial = _series_at(rankin_coefficients(f, g, n, conjugated), s)
    # |a conj(b)| <= (|a|^2 + |b|^2) / 2 feeds the mean-square envelope.
    sq = 0.5 * (np.abs(normalized(f, n)) ** 2 + np.abs(normalized(g, n)) ** 2)
    tail = abs(z2) * envelope.mean_square_tail(sq, n, s.real)
    return SeriesValue(z2 * partial, tail, n)


def constant_C(f: QExpansion, g: QExpansion, n: int | None = None,
               conjugated: bool = True) -> ConstantPair:
    """Main-term constant of the smoothed second moment, two ways."""
    n = _check_pair(f, g, n)
    k = f.weight
    coeffs = rankin_coefficients(f, g, n, conjugated)
    m = np.arange(1, n + 1, dtype=float)
    pref = math.gamma(1.5) / (4 * math.pi**2)
    direct = pref * csum(coeffs * m**-1.5)
    lval = rankin_L(1.5, f, g, n, conjugated)
    z3 = complex(zeta(3.0))
    via_l = complex(gamma(1.5)).real / (4 * math.pi**2) * lval.value / z3
    tail = pref * lval.truncation_bound / abs(z3)
    residue = (k - 0.5) / (4 * math.pi**2) * lval.value / z3
    return ConstantPair(direct, via_l, abs(direct - via_l), tail, n, conjugated, residue)


# -- off-diagonal ------------------------------------------------------------


def _shift_terms(fa: np.ndarray, gb: np.ndarray, h: int, weight: int) -> np.ndarray:
    """[a(m) b(m-h) + a(m-h) b(m)] m^{-(k-1)} for m = h+1..N (normalized inputs)."""
    n = len(fa)
    m = np.arange(h + 1, n + 1, dtype=float)
    ratio = ((m - h) / m) ** ((weight - 1) / 2)
    return (fa[h:] * gb[:n - h] + fa[:n - h] * gb[h:]) * ratio


def shifted_D(s, h: int, f: QExpansion, g: QExpansion, n: int | None = None,
              conjugated: bool = True) -> SeriesValue:
    """D_{f,g}(s; h) truncated to m <= N; a(m) = 0 for m <= 0."""
    s = complex(s)
    _require(s, POLICY_ABSCISSA, "shifted_D")
    n = _check_pair(f, g, n)
    if h < 1:
        raise DomainError("shift h must be >= 1")
    c_env = envelope.divisor_constant()
    tail = 2 * c_env**2 * envelope.power_tail(max(n, h), s.real - 0.2)
    if h >= n:
        return SeriesValue(0j, tail, n)
    fa = normalized(f, n)
    gb = _maybe_conj(normalized(g, n), conjugated)
    terms = _shift_terms(fa, gb, h, f.weight)
    m = np.arange(h + 1, n + 1, dtype=float)
    return SeriesValue(csum(terms * np.exp(-s * np.log(m))), tail, n)


def _shifted_prefix(x: np.ndarray) -> np.ndarray:
    """[0, x1, x1+x2, ...] of length len(x), compensated per component."""
    if np.iscomplexobj(x):
        return _shifted_prefix(x.real) + 1j * _shifted_prefix(x.imag)
    sums, res = compensated_cumsum(x)
    return np.concatenate([[0.0], (sums + res)[:-1]])


def offdiagonal_coefficients(f, g, n: int, conjugated: bool = True) -> np.ndarray:
    """Coefficients of Z(s, 0): [a(m) conj(S_g(m-1)) + S_f(m-1) conj(b(m))] m^{-(k-1)}."""
    k = f.weight
    m = np.arange(1, n + 1, dtype=float)
    kind = complex if np.iscomplexobj(f.coeffs) or np.iscomplexobj(g.coeffs) else float
    a = np.asarray(f.coeffs[:n], dtype=kind)
    b = _maybe_conj(np.asarray(g.coeffs[:n], dtype=kind), conjugated)
    sf = _shifted_prefix(a)
    sg = _shifted_prefix(b)
    scale = m ** (-(k - 1) / 2)
    # Split the m^{-(k-1)} factor to keep magnitudes moderate.
    return (a * scale) * (sg * scale) + (sf * scale) * (b * scale)


def _z_tail(n: int, sigma: float, w_re: float) -> float:
    # |inner sum over h| <= 2 C^2 n^{k-1+0.2} n^{max(0,1-Re w)} (1 + ln n)
    c_env = envelope.divisor_constant()
    q = sigma - 0.2 - max(0.0, 1.0 - w_re)
    return 2 * c_env**2 * envelope.log_power_tail(n, q)


def Z_sum(s, w, f: QExpansion, g: QExpansion, n: int | None = None,
          conjugated: bool = True) -> SeriesValue:
    """sum_{h>=1} D_{f,g}(s; h) h^{-w} over m <= N.

    ``w == 0`` collapses the h-sum into partial sums.  Otherwise h runs
    upward, each stripe summed in ascending m, and stops once the
    remaining h-tail is provably below 1e-18 of the running total.
    """
    s = complex(s)
    w = complex(w)
    _require(s, POLICY_ABSCISSA, "Z_sum")
    _require(s + w, POLICY_ABSCISSA, "Z_sum (s + w)")
    n = _check_pair(f, g, n)
    tail = _z_tail(n, s.real, w.real)
    if w == 0:
        coeffs = offdiagonal_coefficients(f, g, n, conjugated)
        return SeriesValue(_series_at(coeffs, s), tail, n)

    fa = normalized(f, n)
    gb = _maybe_conj(normalized(g, n), conjugated)
    amax = float(np.max(np.abs(fa))) if n else 0.0
    bmax = float(np.max(np.abs(gb))) if n else 0.0
    logm = np.log(np.arange(1, n + 1, dtype=float))
    powers = np.exp(-s * logm)
    stripes = []
    running = 0j
    h_tail = 0.0
    exponent = s.real + w.real - 2.0
    for h in range(1, n):
        terms = _shift_terms(fa, gb, h, f.weight) * powers[h:]
        stripes.append(csum(terms) * np.exp(-w * math.log(h)))
        running += stripes[-1]
        h_tail = 0.0
        if exponent > 0:
            # |D_h| <= 2 amax bmax h^{1-sigma}/(sigma-1), summed over later h.
            h_tail = 2 * amax * bmax / (s.real - 1) * float(h) ** (-exponent) / exponent
            if h_tail <= 1e-18 * abs(running):
                break
    value = csum(np.array(stripes)) if stripes else 0j
    return SeriesValue(value, tail + h_tail, n)


def W_eval(s, f: QExpansion, g: QExpansion, n: int | None = None,
           conjugated: bool = True) -> SeriesValue:
    """L(s, f x g)/zeta(2s) + Z(s, 0, f x g), truncated at N."""
    s = complex(s)
    _require(s, POLICY_ABSCISSA, "W_eval")
    n = _check_pair(f, g, n)
    coeffs = w_coefficients(f, g, n, conjugated)
    c_env = envelope.divisor_constant()
    tail = c_env**2 * envelope.power_tail(n, s.real - 0.2) + _z_tail(n, s.real, 0.0)
    return SeriesValue(_series_at(coeffs, s), tail, n)


def w_coefficients(f, g, n: int, conjugated: bool = True) -> np.ndarray:
    """Dirichlet coefficients of W(s; f, g) (times m^{-(k-1)}), m = 1..n."""
    return rankin_coefficients(f, g, n, conjugated) + offdiagonal_coefficients(
        f, g, n, conjugated
    )


# -- partial-sum series ------------------------------------------------------

HAFNER_IVIC_EXPONENT = 1.0 / 3.0


def d_coefficients(S_f: PartialSumSeries, S_g: PartialSumSeries, n: int,
                   conjugated: bool = True) -> np.ndarray:
    """S_f(m) conj(S_g(m)) m^{-(k-1)} for m = 1..n."""
    m = np.arange(1, n + 1, dtype=float)
    scale = m ** (-(S_f.weight - 1) / 2)
    sf = np.asarray(S_f.values[:n], dtype=float) * scale
    sg = np.asarray(S_g.values[:n], dtype=float) * scale
    return sf * _maybe_conj(sg, conjugated)


def d_tail(S_f: PartialSumSeries, S_g: PartialSumSeries, n: int, sigma: float) -> float:
    """Tail bound assuming |S(m)| <= B m^{(k-1)/2 + 1/3} beyond the data."""
    bf = envelope.partial_sum_constant(S_f.values[:n], S_f.weight, HAFNER_IVIC_EXPONENT)
    bg = envelope.partial_sum_constant(S_g.values[:n], S_g.weight, HAFNER_IVIC_EXPONENT)
    return bf * bg * envelope.power_tail(n, sigma - 2 * HAFNER_IVIC_EXPONENT)


def D_series(s, S_f: PartialSumSeries, S_g: PartialSumSeries, conjugated: bool = True,
             n: int | None = None) -> SeriesValue:
    """sum_{m<=N} S_f(m) conj?(S_g(m)) m^{-(s+k-1)}."""
    s = complex(s)
    _require(s, POLICY_ABSCISSA, "D_series")
    if S_f.weight != S_g.weight:
        raise WeightMismatchError("partial sums come from different weights")
    avail = min(S_f.n_max, S_g.n_max)
    n = avail if n is None else n
    if n > avail:
        raise InsufficientCoefficientsError(f"N = {n} exceeds {avail}")
    coeffs = d_coefficients(S_f, S_g, n, conjugated)
    return SeriesValue(_series_at(coeffs, s), d_tail(S_f, S_g, n, s.real), n)
