"""Vertical-line quadrature and the identity checks built on it.

Integrals ``(1/2 pi i) int_{(c)} F(z) dz`` are computed with the trapezoid
rule on ``[-T, T]``.  The integrands here are analytic in a strip around
the line, so the rule converges geometrically in 1/h; the error estimate
is the change under step halving plus an exponential-decay tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dirichlet
from .complexfn import gamma, log_gamma, zeta
from .errors import InsufficientCoefficientsError, PreconditionError, QuadratureError
from .qseries import QExpansion
from .sums import partial_sums
from .summation import csum

NODE_BUDGET = 10_000_000
EDGE_TOLERANCE = 1e-3
# Worst relative error of the special functions against a 50-digit
# reference; bounds evaluation error in integrands and closed forms.
EVAL_REL_ACCURACY = 5e-13


@dataclass(frozen=True)
class ContourSpec:
    abscissa: float
    height: float = 80.0
    step: float = 0.125
    rule: str = "trapezoid"

    def __post_init__(self):
        if not (self.height > 0 and self.step > 0):
            raise PreconditionError("height and step must be positive")
        if self.height / self.step > NODE_BUDGET:
            raise PreconditionError("node budget exceeded (T/h > 1e7)")
        if self.rule not in ("trapezoid", "adaptive"):
            raise PreconditionError(f"unknown rule {self.rule!r}")

    @staticmethod
    def height_for(tol: float, sigma: float = 2.0) -> float:
        """Smallest T with |Gamma(sigma + iT)| ~ e^{-pi T/2} T^{sigma-1/2} below ``tol``."""
        t = 1.0
        while math.exp(-math.pi * t / 2) * t ** (sigma - 0.5) > tol:
            t += 1.0
        return t


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    coarse_value: complex
    tail_bound: float
    edge_magnitude: float
    n_nodes: int


@dataclass(frozen=True)
class IdentityReport:
    lhs: complex
    rhs: complex
    abs_diff: float
    rel_diff: float
    quadrature_error_estimate: float
    truncation_bounds: float

    @classmethod
    def compare(cls, lhs, rhs, quad_err: float, trunc: float) -> "IdentityReport":
        lhs, rhs = complex(lhs), complex(rhs)
        diff = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        return cls(lhs, rhs, diff, diff / scale, quad_err, trunc)

    def holds(self, rel_tol: float) -> bool:
        return self.rel_diff <= rel_tol


def line_integral(integrand, spec: ContourSpec, decay: float) -> QuadratureResult:
    """(1/2 pi i) times the integral of ``integrand`` up the line Re z = abscissa.

    ``integrand`` maps a complex array of nodes to values.  ``decay`` is the
    caller's rate c with |F(c0 + iy)| <~ exp(-c |y|).  Raises
    :class:`QuadratureError` when the integrand at +-iT is not small
    against the integral.
    """
    if decay <= 0:
        raise PreconditionError("decay rate must be positive")
    if spec.rule == "adaptive":
        return _adaptive(integrand, spec, decay)
    half = spec.step / 2
    m = int(round(spec.height / half))
    y = half * np.arange(-m, m + 1)
    z = spec.abscissa + 1j * y
    vals = np.asarray(integrand(z), dtype=complex)
    weights = np.ones(vals.shape)
    weights[0] = weights[-1] = 0.5
    fine = half * csum(vals * weights) / (2 * math.pi)
    coarse_vals = vals[::2]
    cw = np.ones(coarse_vals.shape)
    cw[0] = cw[-1] = 0.5
    coarse = spec.step * csum(coarse_vals * cw) / (2 * math.pi)
    edge = max(abs(vals[0]), abs(vals[-1]))
    tail = 2 * edge / decay / (2 * math.pi)
    if edge > EDGE_TOLERANCE * abs(fine):
        raise QuadratureError(
            f"integrand at height {spec.height} is {edge:.3e}, integral is "
            f"{abs(fine):.3e}; increase the height cutoff"
        )
    rounding = EVAL_REL_ACCURACY * half * float(np.sum(np.abs(vals))) / (2 * math.pi)
    err = abs(fine - coarse) + tail + rounding
    return QuadratureResult(fine, err, coarse, tail, edge, vals.size)


def _adaptive(integrand, spec: ContourSpec, decay: float) -> QuadratureResult:
    # Diagnostic only: Gauss-Legendre panels on [-T, T], refined once.
    def panels(count):
        x, w = np.polynomial.legendre.leggauss(20)
        edges = np.linspace(-spec.height, spec.height, count + 1)
        total = 0j
        for a, b in zip(edges[:-1], edges[1:]):
            yy = 0.5 * (b - a) * x + 0.5 * (a + b)
            total += 0.5 * (b - a) * csum(np.asarray(integrand(spec.abscissa + 1j * yy)) * w)
        return total / (2 * math.pi)

    count = max(8, int(spec.height / (10 * spec.step)))
    coarse = panels(count)
    fine = panels(2 * count)
    edge = float(np.max(np.abs(integrand(spec.abscissa + 1j * np.array([-spec.height, spec.height])))))
    tail = 2 * edge / decay / (2 * math.pi)
    if edge > EDGE_TOLERANCE * abs(fine):
        raise QuadratureError("integrand has not decayed at the height cutoff")
    return QuadratureResult(fine, abs(fine - coarse) + tail, coarse, tail, edge, 40 * count)


# -- Barnes integral ---------------------------------------------------------


def barnes_check(beta, t, spec: ContourSpec) -> IdentityReport:
    """Compare the Barnes integral of Gamma(-s) Gamma(beta+s) t^s with Gamma(beta)(1+t)^-beta."""
    beta = complex(beta)
    t = complex(t)
    c = spec.abscissa
    if not (0 > c > -beta.real):
        raise PreconditionError(f"need 0 > gamma > -Re(beta); got gamma = {c}")
    if t == 0 or abs(np.angle(t)) >= math.pi:
        raise PreconditionError("need |arg t| < pi and t != 0")
    log_t = np.log(t)

    def integrand(s):
        return np.exp(log_gamma(-s) + log_gamma(beta + s) + s * log_t)

    quad = line_integral(integrand, spec, decay=math.pi - abs(np.angle(t)))
    rhs = complex(gamma(beta)) * np.exp(-beta * np.log(1 + t))
    return IdentityReport.compare(quad.value, rhs, quad.error_estimate,
                                  EVAL_REL_ACCURACY * abs(rhs))


# -- decomposition of D(s, S_f x S_g) ----------------------------------------


def verify_decomposition(s, f: QExpansion, g: QExpansion, n: int,
                         spec: ContourSpec | None = None,
                         conjugated: bool = True) -> IdentityReport:
    """D(s) against W(s) + (1/2 pi i) int W(s-z) zeta(z) Gamma(z) Gamma(s-z+k-1)/Gamma(s+k-1) dz."""
    s = complex(s)
    spec = spec or ContourSpec(abscissa=2.0)
    c = spec.abscissa
    if s.real < 6:
        raise PreconditionError("decomposition check needs Re s >= 6")
    if not (1 < c < s.real - 1):
        raise PreconditionError(f"need 1 < gamma < Re s - 1; got gamma = {c}")
    if n > min(f.n_max, g.n_max):
        raise InsufficientCoefficientsError(f"N = {n} exceeds available coefficients")
    k = f.weight
    f, g = f.truncate(n).to_float(), g.truncate(n).to_float()
    S_f, S_g = partial_sums(f), partial_sums(g)

    lhs = dirichlet.D_series(s, S_f, S_g, conjugated)
    w_at_s = dirichlet.W_eval(s, f, g, n, conjugated)
    w_coeffs = dirichlet.w_coefficients(f, g, n, conjugated)
    log_norm = complex(log_gamma(s + k - 1))

    def integrand(z):
        w_vals = dirichlet.dirichlet_eval(w_coeffs, s - z)  # one pass over the fixed grid
        ratio = np.exp(log_gamma(z) + log_gamma(s - z + k - 1) - log_norm)
        return w_vals * zeta(z) * ratio

    quad = line_integral(integrand, spec, decay=math.pi / 2)
    rhs = w_at_s.value + quad.value
    w_shift_tail = dirichlet.W_eval(s - c, f, g, n, conjugated).truncation_bound
    # On the line |zeta(z) Gamma(z) Gamma(s-z+k-1)/Gamma(s+k-1)| integrates to at most this.
    kernel_mass = float(zeta(c).real) * abs(complex(gamma(c))) * abs(
        complex(gamma(s - c + k - 1)) / complex(gamma(s + k - 1))
    )
    trunc = lhs.truncation_bound + w_at_s.truncation_bound + w_shift_tail * kernel_mass
    return IdentityReport.compare(lhs.value, rhs, quad.error_estimate, trunc)


# -- smoothing transform -----------------------------------------------------

SMOOTHING_ABSCISSA = 4.0


def smoothed_sum(X: float, S_f, S_g, n: int, conjugated: bool = True) -> complex:
    """sum_{m<=N} S_f(m) conj?(S_g(m)) m^{1-k} e^{-m/X}."""
    coeffs = dirichlet.d_coefficients(S_f, S_g, n, conjugated)
    m = np.arange(1, n + 1, dtype=float)
    return csum(coeffs * np.exp(-m / X))


def verify_smoothing_transform(X: float, f: QExpansion, g: QExpansion, n: int,
                               spec: ContourSpec | None = None,
                               conjugated: bool = True) -> IdentityReport:
    """(1/2 pi i) int_{(4)} D(s) X^s Gamma(s) ds against the e^{-n/X}-weighted sum."""
    spec = spec or ContourSpec(abscissa=SMOOTHING_ABSCISSA)
    if spec.abscissa != SMOOTHING_ABSCISSA:
        raise PreconditionError("smoothing transform is evaluated on Re s = 4")
    if not 1 <= X <= n / 30:
        raise PreconditionError(f"X = {X} outside [1, N/30] for N = {n}")
    if n > min(f.n_max, g.n_max):
        raise InsufficientCoefficientsError(f"N = {n} exceeds available coefficients")
    f, g = f.truncate(n).to_float(), g.truncate(n).to_float()
    S_f, S_g = partial_sums(f), partial_sums(g)
    d_coeffs = dirichlet.d_coefficients(S_f, S_g, n, conjugated)
    log_x = math.log(X)

    def integrand(s):
        return dirichlet.dirichlet_eval(d_coeffs, s) * np.exp(log_gamma(s) + s * log_x)

    quad = line_integral(integrand, spec, decay=math.pi / 2)
    rhs = smoothed_sum(X, S_f, S_g, n, conjugated)
    trunc = dirichlet.d_tail(S_f, S_g, n, SMOOTHING_ABSCISSA) * math.gamma(4.0) * X**4
    return IdentityReport.compare(quad.value, rhs, quad.error_estimate, trunc)
