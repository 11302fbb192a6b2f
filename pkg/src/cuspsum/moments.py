"""Smoothed second moments of partial sums against the C X^{1/2} main term.

For a pair of weight-k forms the smoothed moment is

    M(X) = (1/X) sum_n S_f(n) conj(S_g(n)) n^{1-k} e^{-n/X},

which grows like C X^{1/2} with an error O(X^{-1/2+eps}) at level one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dirichlet, envelope, qseries
from .errors import (DegenerateFitError, InsufficientCoefficientsError, UnsupportedWeightError,
                     PreconditionError, WeightMismatchError)
from .sums import PartialSumSeries, partial_sums
from .summation import csum

TAIL_FACTOR = 30
# Envelope exponent for |S(n)| n^{-(k-1)/2}: square-root cancellation on
# average, with the constant taken from the data.
SUM_EXPONENT = 0.25
THETA = 0.0
THETA_NOTE = "For SL2(Z) we know that theta = 0 (Selberg's eigenvalue conjecture holds at level one)"
NOISE_FACTOR = 10.0


@dataclass(frozen=True)
class MomentValue:
    X: float
    value: complex
    tail_bound: float
    n_used: int


def _check_sums(S_f: PartialSumSeries, S_g: PartialSumSeries) -> int:
    if S_f.weight != S_g.weight:
        raise WeightMismatchError("partial sums come from different weights")
    return min(S_f.n_max, S_g.n_max)


def moment_tail(X: float, n: int, amplitude: float) -> float:
    """Bound (1/X) sum_{m>n} A m^{2e} e^{-m/X} for n >= 30 X, e = SUM_EXPONENT.

    With p = 2e < 1 the summand decreases beyond pX, so the sum is at most
    its first term plus the integral from n, and the integral is at most
    n^p X e^{-n/X} / (1 - pX/n).
    """
    p = 2 * SUM_EXPONENT
    head = float(n) ** p * math.exp(-n / X)
    return amplitude * head * (1.0 / X + 1.0 / (1.0 - p * X / n))


def _amplitude(S_f: PartialSumSeries, S_g: PartialSumSeries, n: int) -> float:
    # Factor 2 keeps the envelope above the data's running maximum.
    bf = envelope.partial_sum_constant(S_f.values[:n], S_f.weight, SUM_EXPONENT)
    bg = envelope.partial_sum_constant(S_g.values[:n], S_g.weight, SUM_EXPONENT)
    return 2.0 * bf * bg


def smoothed_moment(X: float, S_f: PartialSumSeries, S_g: PartialSumSeries,
                    conjugated: bool = True, n: int | None = None,
                    _coeffs: np.ndarray | None = None) -> MomentValue:
    """(1/X) sum_{m<=N} S_f(m) conj?(S_g(m)) m^{1-k} e^{-m/X} with a tail bound."""
    if not X > 0:
        raise PreconditionError("X must be positive")
    avail = _check_sums(S_f, S_g)
    n = avail if n is None else n
    if n > avail:
        raise InsufficientCoefficientsError(f"N = {n} exceeds {avail} partial sums")
    if n < TAIL_FACTOR * X:
        raise InsufficientCoefficientsError(
            f"smoothed moment at X = {X} needs N >= {math.ceil(TAIL_FACTOR * X)}, have {n}"
        )
    coeffs = _coeffs if _coeffs is not None else dirichlet.d_coefficients(S_f, S_g, n, conjugated)
    m = np.arange(1, n + 1, dtype=float)
    value = csum(coeffs[:n] * np.exp(-m / X)) / X
    if not np.iscomplexobj(coeffs):
        value = complex(value.real, 0.0)
    return MomentValue(X, value, moment_tail(X, n, _amplitude(S_f, S_g, n)), n)


# -- exponent fit ------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    n_used: int
    excluded: tuple = ()


def exponent_fit(grid, residuals, bounds=None) -> FitResult:
    """Least-squares slope of log|r(X)| against log X.

    Points whose residual is within ``NOISE_FACTOR`` of its bound are left
    out and listed in ``excluded``.  ``stderr`` is the residual standard
    error of the fit (0 for two points or an exact power law).
    """
    xs = np.asarray(grid, dtype=float)
    rs = np.abs(np.asarray(residuals, dtype=complex))
    bs = np.zeros_like(xs) if bounds is None else np.asarray(bounds, dtype=float)
    if xs.size < 6:
        raise PreconditionError("exponent fit needs at least 6 grid points")
    if np.any(np.diff(xs) <= 0) or xs[0] <= 0:
        raise PreconditionError("grid must be positive and strictly increasing")
    if xs[-1] / xs[0] < 100 * (1 - 1e-12):
        raise PreconditionError("grid must span at least two decades")
    keep = (rs > NOISE_FACTOR * bs) & (rs > 0)
    excluded = tuple(float(x) for x in xs[~keep])
    if keep.sum() < 2:
        raise DegenerateFitError(f"only {int(keep.sum())} grid points above the noise floor")
    lx, ly = np.log(xs[keep]), np.log(rs[keep])
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    dof = lx.size - 2
    resid = ly - (slope * lx + intercept)
    stderr = float(math.sqrt(float(resid @ resid) / dof)) if dof > 0 else 0.0
    return FitResult(float(slope), float(intercept), stderr, int(keep.sum()), excluded)


# -- experiment --------------------------------------------------------------


def geometric_grid(start: float, stop: float, points: int) -> list[float]:
    if not (0 < start < stop and points >= 2):
        raise PreconditionError("geometric grid needs 0 < start < stop and >= 2 points")
    ratio = math.log10(stop / start) / (points - 1)
    return [start * 10 ** (j * ratio) for j in range(points)]


def parse_grid(spec: str) -> list[float]:
    """``geometric:START:STOP:POINTS`` or a comma-separated list."""
    if spec.startswith("geometric:"):
        try:
            _, a, b, c = spec.split(":")
            return geometric_grid(float(a), float(b), int(c))
        except ValueError as exc:
            raise PreconditionError(f"bad grid spec {spec!r}") from exc
    try:
        return [float(x) for x in spec.split(",")]
    except ValueError as exc:
        raise PreconditionError(f"bad grid spec {spec!r}") from exc


PROFILES = {
    "default": {"grid": "geometric:100:10000:7", "n_max": 300_000},
    "large": {"grid": "geometric:100:100000:10", "n_max": 3_000_000},
}


@dataclass(frozen=True)
class MomentConfig:
    weight: int = 12
    grid: tuple = tuple(geometric_grid(100, 10_000, 7))
    n_max: int = 300_000
    conjugated: bool = True
    profile: str = "default"

    @classmethod
    def from_profile(cls, name: str = "default", **overrides) -> "MomentConfig":
        if name not in PROFILES:
            raise PreconditionError(f"unknown profile {name!r}")
        base = PROFILES[name]
        grid = overrides.pop("grid", None) or base["grid"]
        if isinstance(grid, str):
            grid = parse_grid(grid)
        n_max = overrides.pop("n_max", None) or base["n_max"]
        return cls(grid=tuple(grid), n_max=int(n_max), profile=name, **overrides)

    def validate(self) -> None:
        if self.weight not in qseries.EIGENFORM_WEIGHTS:
            raise UnsupportedWeightError(f"unsupported weight {self.weight}")
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0 or np.any(np.diff(g) <= 0) or g[0] <= 0:
            raise PreconditionError("grid must be positive and strictly increasing")
        if self.n_max < TAIL_FACTOR * g[-1]:
            raise InsufficientCoefficientsError(
                f"N = {self.n_max} below {TAIL_FACTOR} x largest grid point {g[-1]}"
            )


@dataclass(frozen=True)
class MomentReport:
    grid: tuple
    smoothed: tuple
    main: tuple
    residual: tuple
    ratio: tuple
    tail_bound: tuple
    secondary: tuple
    C: float
    C_bound: float
    C_discrepancy: float
    fit: FitResult | None
    weight: int
    n_max: int
    conjugated: bool
    form_id: str
    theta_used: float = THETA
    theta_note: str = THETA_NOTE
    bound_kind: str = envelope.LABEL
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def fitted_slope(self) -> float | None:
        return None if self.fit is None else self.fit.slope

    def rows(self):
        for row in zip(self.grid, self.smoothed, self.main, self.residual,
                       self.ratio, self.tail_bound):
            yield row

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["X", "smoothed", "main", "residual", "ratio", "tail_bound"])
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("meta")
        return d


def run_experiment(config: MomentConfig | None = None, form=None) -> MomentReport:
    """Smoothed moments of the level-one eigenform of ``config.weight`` with itself."""
    config = config or MomentConfig()
    config.validate()
    n = config.n_max
    f = form if form is not None else qseries.eigenform(config.weight, n)
    if f.n_max < n:
        raise InsufficientCoefficientsError(f"form has {f.n_max} < {n} coefficients")
    f = f.truncate(n).to_float() if f.n_max > n else f.to_float()
    S = partial_sums(f)
    pair = dirichlet.constant_C(f, f, n, config.conjugated)
    C = float(pair.c_direct.real)
    coeffs = dirichlet.d_coefficients(S, S, n, config.conjugated)

    smoothed, main, resid, ratio, tails, second = [], [], [], [], [], []
    for X in config.grid:
        mv = smoothed_moment(X, S, S, config.conjugated, n, _coeffs=coeffs)
        val = mv.value.real
        m = C * math.sqrt(X)
        smoothed.append(val)
        main.append(m)
        resid.append(val - m)
        ratio.append(val / m)
        tails.append(mv.tail_bound)
        # Contribution of the pole at s = 1/2 of the W-part, divided by X.
        second.append(float(pair.residue_half.real) * math.sqrt(math.pi) / math.sqrt(X))

    fit = None
    if len(config.grid) >= 6 and config.grid[-1] / config.grid[0] >= 100 * (1 - 1e-12):
        fit = exponent_fit(config.grid, resid, tails)
    return MomentReport(
        grid=tuple(float(x) for x in config.grid),
        smoothed=tuple(smoothed),
        main=tuple(main),
        residual=tuple(resid),
        ratio=tuple(ratio),
        tail_bound=tuple(tails),
        secondary=tuple(second),
        C=C,
        C_bound=float(pair.truncation_bound),
        C_discrepancy=float(pair.discrepancy),
        fit=fit,
        weight=config.weight,
        n_max=n,
        conjugated=config.conjugated,
        form_id=f.form_id,
    )
