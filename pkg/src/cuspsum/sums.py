"""Partial sums S_f(n), the classical-conjecture statistic and the
sharp-cutoff mean square against its Chandrasekharan-Narasimhan constant.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import envelope
from .errors import InsufficientCoefficientsError, PreconditionError
from .qseries import QExpansion
from .summation import CHUNK, compensated_cumsum, fsum

OMEGA_CONTEXT = (
    "B(X) = Omega(X^{k-1/4} (log log log X)^3 / log X) and the sharper "
    "Hafner-Ivic Omega bound are recorded as context only"
)


@dataclass(frozen=True)
class PartialSumSeries:
    """S(n) = a(1) + ... + a(n) for n = 1..n_max, as doubles.

    ``values[n-1] + residuals[n-1]`` is the compensated estimate of S(n).
    """

    values: np.ndarray
    residuals: np.ndarray
    form_id: str
    weight: int
    exact_source: bool = False

    @property
    def n_max(self) -> int:
        return len(self.values)

    def __call__(self, n: int) -> float:
        return float(self.values[n - 1]) if n >= 1 else 0.0

    def truncate(self, n: int) -> "PartialSumSeries":
        if n > self.n_max:
            raise InsufficientCoefficientsError(f"only {self.n_max} partial sums")
        return PartialSumSeries(
            self.values[:n], self.residuals[:n], self.form_id, self.weight,
            self.exact_source,
        )


def partial_sums(f: QExpansion) -> PartialSumSeries:
    if f.exact:
        exact = list(itertools.accumulate(int(x) for x in f.coeffs))
        values = np.array([float(x) for x in exact])
        residuals = np.array(
            [float(x - int(v)) for x, v in zip(exact, values.tolist())]
        )
    else:
        values, residuals = compensated_cumsum(f.coeffs)
    values.setflags(write=False)
    residuals.setflags(write=False)
    return PartialSumSeries(values, residuals, f.form_id, f.weight, f.exact)


def classical_statistic(S: PartialSumSeries, X: int) -> float:
    """|S(X)| X^{-(k-1)/2 - 1/4}."""
    if not 1 <= X <= S.n_max:
        raise PreconditionError(f"X = {X} outside 1..{S.n_max}")
    return abs(S(X)) * float(X) ** (-(S.weight - 1) / 2 - 0.25)


@dataclass(frozen=True)
class AverageConstant:
    """C = (1/((4k+2) pi^2)) sum |a(n)|^2 n^{-k-1/2}, truncated."""

    value: float
    series: float
    tail_bound: float
    n_used: int
    envelope: str = field(default="heuristic-envelope")


def average_constant(f: QExpansion, n_terms: int | None = None) -> AverageConstant:
    n_terms = f.n_max if n_terms is None else n_terms
    if n_terms > f.n_max:
        raise InsufficientCoefficientsError(f"{f.form_id}: {f.n_max} < {n_terms}")
    k = f.weight
    a = np.asarray(f.coeffs[:n_terms], dtype=float)
    n = np.arange(1, n_terms + 1, dtype=float)
    normalized = a / n ** ((k - 1) / 2)
    series = fsum(normalized * normalized / n**1.5)
    tail = envelope.mean_square_tail(normalized * normalized, n_terms, 1.5)
    pref = 1.0 / ((4 * k + 2) * math.pi**2)
    return AverageConstant(pref * series, series, pref * tail, n_terms)


@dataclass(frozen=True)
class AverageReport:
    X: int
    lhs: float
    main: float
    ratio: float
    C: float
    C_tail_bound: float
    chunk_size: int = CHUNK
    context: str = OMEGA_CONTEXT


def sharp_average(S: PartialSumSeries, X: int, C: float | AverageConstant) -> AverageReport:
    """sum_{n<=X} |S(n)|^2 against C X^{k+1/2}."""
    if not 1 <= X <= S.n_max:
        raise PreconditionError(f"X = {X} outside 1..{S.n_max}")
    tail = C.tail_bound if isinstance(C, AverageConstant) else float("nan")
    c_val = C.value if isinstance(C, AverageConstant) else float(C)
    vals = np.asarray(S.values[:X], dtype=float)
    lhs = fsum(vals * vals)
    main = c_val * float(X) ** (S.weight + 0.5)
    return AverageReport(X, lhs, main, lhs / main, c_val, tail)


def mean_square_curve(S: PartialSumSeries, xs) -> np.ndarray:
    """sum_{n<=X} |S(n)|^2 for each X in ``xs`` (nondecreasing in X)."""
    vals = np.asarray(S.values, dtype=float)
    sq = vals * vals
    return np.array([fsum(sq[:int(x)]) for x in xs])


def export_csv(S: PartialSumSeries, path, start: int = 1, stop: int | None = None) -> None:
    stop = S.n_max if stop is None else stop
    if not 1 <= start <= stop <= S.n_max:
        raise PreconditionError(f"range {start}..{stop} outside 1..{S.n_max}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "S"])
        for n in range(start, stop + 1):
            w.writerow([n, repr(float(S.values[n - 1]))])
