"""Command-line driver.

Every subcommand builds a :class:`RunConfig`, runs, and returns a
:class:`ResultEnvelope`.  Numbers in the envelope's results are always
``{"value": ..., "bound": ...}`` pairs; :func:`lint_envelope` enforces it.

Exit codes: 0 success, 2 invalid input or operational error, 3 an identity
check missed its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, cache, dirichlet, envelope, mellin, moments, qseries, sums
from .errors import CuspsumError, IdentityCheckFailed, PreconditionError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IDENTITY = 3

COMMANDS = ("coeffs", "check-hecke", "average", "rankin", "constants", "dseries",
            "barnes", "verify-decomp", "verify-smoothing", "moment", "fit")

# Built-in defaults; a profile overlays its own table.
BASE_DEFAULTS = {
    "weight": 12, "n": None, "s": "6", "x": None, "beta": "2", "t": "0.5",
    "gamma": None, "height": 80.0, "step": 0.125, "tol": None, "bound": 10_000,
    "grid": None, "exact": False, "conjugated": True, "exhaustive": True,
    "profile": "default",
}
COMMAND_DEFAULTS = {
    "coeffs": {"n": 1000},
    "check-hecke": {"n": 10_000},
    "average": {"x": 1000.0},
    "rankin": {"s": "2", "n": 100_000},
    "constants": {"n": 100_000, "tol": 1e-10},
    "dseries": {"n": 100_000},
    "barnes": {"gamma": -1.0, "tol": 1e-8},
    "verify-decomp": {"n": 100_000, "gamma": 2.0, "tol": 1e-4},
    "verify-smoothing": {"x": 100.0, "n": 10_000, "gamma": 4.0, "tol": 1e-6},
    "moment": {},
    "fit": {},
}
PROFILE_DEFAULTS = {
    "default": {"moment": {"grid": "geometric:100:10000:7", "n": 300_000}},
    "large": {"moment": {"grid": "geometric:100:100000:10", "n": 3_000_000}},
}

PROVENANCE = {
    "coefficients": "Fourier coefficients of the level-one eigenform, Delta times an Eisenstein series",
    "hecke": "multiplicativity and prime-power recursion of Hecke eigenvalues",
    "sharp_average": "sharp-cutoff mean square of partial sums against C X^{k+1/2}",
    "classical": "partial sum normalised by X^{(k-1)/2 + 1/4}",
    "rankin": "Rankin-Selberg convolution zeta(2s) sum a(n) conj(b(n)) n^{-s-k+1}",
    "constant": "main-term constant Gamma(3/2) L(3/2, f x g) / (4 pi^2 zeta(3))",
    "dseries": "Dirichlet series of S_f(n) conj(S_g(n)) n^{-(s+k-1)}",
    "w": "diagonal plus off-diagonal series W(s; f, g)",
    "barnes": "Barnes integral of Gamma(-s) Gamma(beta+s) t^s against Gamma(beta)(1+t)^{-beta}",
    "decomposition": "D(s) = W(s) + Mellin-Barnes integral of W(s-z) zeta(z) Gamma ratio",
    "smoothing": "inverse Mellin transform of D(s) Gamma(s) X^s on Re s = 4",
    "moment": "smoothed second moment (1/X) sum S_f conj(S_g) n^{1-k} e^{-n/X} against C X^{1/2}",
    "fit": "least-squares slope of log|r(X)| against log X",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    weight: int = 12
    n: int | None = None
    s: complex = 6 + 0j
    x: float | None = None
    beta: complex = 2 + 0j
    t: complex = 0.5 + 0j
    gamma: float | None = None
    height: float = 80.0
    step: float = 0.125
    tol: float | None = None
    bound: int = 10_000
    grid: str | None = None
    exact: bool = False
    conjugated: bool = True
    exhaustive: bool = True
    profile: str = "default"
    form: str | None = None
    coeff_cache: str | None = None
    cache_dir: str | None = None
    out: str | None = None
    json: str | None = None
    csv: str | None = None
    synthetic: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise PreconditionError(f"unknown command {self.command!r}")
        if self.profile not in PROFILE_DEFAULTS:
            raise PreconditionError(f"unknown profile {self.profile!r}")
        if self.n is not None and self.n < 1:
            raise PreconditionError("--n must be positive")
        if self.x is not None and not self.x > 0:
            raise PreconditionError("--x must be positive")
        if not (self.height > 0 and self.step > 0):
            raise PreconditionError("--height and --step must be positive")
        if self.tol is not None and not self.tol > 0:
            raise PreconditionError("--tol must be positive")
        if self.form is not None and self.form != "delta" and not self.form.startswith("eigen"):
            raise PreconditionError(f"unknown form {self.form!r}")
        if self.form == "delta" and self.weight != 12:
            raise PreconditionError("--form delta has weight 12")

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("cache_dir", "coeff_cache", "out", "json", "csv"):
                continue  # paths do not affect results
            out[f.name] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


@dataclass
class ResultEnvelope:
    command: str
    config: dict
    results: dict
    provenance: dict
    ok: bool = True
    message: str = ""
    version: str = __version__
    timing: dict = field(default_factory=dict)

    def payload(self) -> dict:
        d = asdict(self)
        d.pop("timing")
        return d

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2, allow_nan=False)

    def to_json(self) -> str:
        d = self.payload()
        d["timing"] = self.timing
        return json.dumps(d, sort_keys=True, indent=2, allow_nan=False)


# -- quantities and the envelope linter --------------------------------------


def _num(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return [v.real, v.imag] if v.imag != 0 else v.real
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def quantity(value, bound, kind: str | None = None) -> dict:
    """A reported number with its error or truncation bound ("exact" allowed)."""
    if isinstance(value, (list, tuple, np.ndarray)):
        value = [_num(v) for v in value]
    else:
        value = _num(value)
    if isinstance(bound, (list, tuple, np.ndarray)):
        bound = [_num(b) for b in bound]
    elif bound != "exact":
        bound = _num(bound)
    q = {"value": value, "bound": bound}
    if kind:
        q["kind"] = kind
    return q


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _numeric_leaves(x):
    if _is_number(x):
        yield x
    elif isinstance(x, (list, tuple)):
        for y in x:
            yield from _numeric_leaves(y)


def lint_envelope(env: ResultEnvelope | dict) -> list[str]:
    """Paths of result numbers that are not paired with a bound."""
    results = env.results if isinstance(env, ResultEnvelope) else env["results"]
    problems: list[str] = []

    def walk(node, path):
        if isinstance(node, dict):
            if "value" in node:
                b = node.get("bound")
                leaves = list(_numeric_leaves(b))
                if b != "exact" and (not leaves or isinstance(b, str)):
                    problems.append(path + ".bound")
                for k, v in node.items():
                    if k not in ("value", "bound", "kind"):
                        walk(v, f"{path}.{k}")
                return
            for k, v in node.items():
                if k == "meta":
                    continue  # counts and labels describing the run
                walk(v, f"{path}.{k}")
        elif isinstance(node, (list, tuple)):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")
        elif _is_number(node):
            problems.append(path)

    walk(results, "results")
    return problems


# -- configuration -----------------------------------------------------------


def parse_complex(text) -> complex:
    """``6``, ``6,5`` (real, imaginary) or Python syntax such as ``6+5j``."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    text = str(text).strip()
    try:
        if "," in text:
            re_, im = text.split(",")
            return complex(float(re_), float(im))
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise PreconditionError(f"cannot parse complex number {text!r}") from exc


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise PreconditionError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PreconditionError(f"{path}:{lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _coerce(name: str, value):
    if value is None:
        return None
    if name in ("s", "beta", "t"):
        return parse_complex(value)
    if name in ("weight", "n", "bound"):
        try:
            return int(float(value)) if not isinstance(value, int) else value
        except ValueError as exc:
            raise PreconditionError(f"{name} must be an integer") from exc
    if name in ("x", "gamma", "height", "step", "tol"):
        try:
            return float(value)
        except ValueError as exc:
            raise PreconditionError(f"{name} must be a number") from exc
    if name in ("exact", "conjugated", "exhaustive"):
        if isinstance(value, bool):
            return value
        if str(value).lower() not in _BOOL:
            raise PreconditionError(f"{name} must be a boolean")
        return _BOOL[str(value).lower()]
    return value


def build_config(command: str, flags: dict, config_file: str | None = None) -> RunConfig:
    """Merge profile defaults, then the config file, then explicit flags."""
    file_vals = read_config_file(config_file) if config_file else {}
    profile = flags.get("profile") or file_vals.get("profile") or "default"
    if profile not in PROFILE_DEFAULTS:
        raise PreconditionError(f"unknown profile {profile!r}")
    merged = dict(BASE_DEFAULTS)
    merged.update(COMMAND_DEFAULTS.get(command, {}))
    merged.update(PROFILE_DEFAULTS[profile].get(command, {}))
    known = {f.name for f in fields(RunConfig)} - {"command"}
    for key, value in file_vals.items():
        if key not in known:
            raise PreconditionError(f"unknown config key {key!r}")
        merged[key] = value
    for key, value in flags.items():
        if value is not None and key in known:
            merged[key] = value
    merged["profile"] = profile
    cfg = RunConfig(command=command, **{k: _coerce(k, v) for k, v in merged.items() if k in known})
    cfg.validate()
    return cfg


# -- form loading ------------------------------------------------------------


def load_form(cfg: RunConfig, n: int, exact: bool = False) -> qseries.QExpansion:
    """Coefficients from an explicit cache file, the cache directory, or fresh."""
    if cfg.coeff_cache:
        f = cache.read(cfg.coeff_cache, n)
        if f.weight != cfg.weight:
            raise PreconditionError(f"cache holds weight {f.weight}, not {cfg.weight}")
        return f if exact else f.to_float()
    directory = cfg.cache_dir or (cache.default_dir() if cache.ENV_VAR in os.environ else None)
    if directory:
        form_id = "delta" if cfg.weight == 12 else f"delta*E{cfg.weight - 12}"
        path = cache.cache_path(form_id.replace("*", "x"), n, exact, directory)
        if path.exists():
            return cache.read(path, n)
        f = qseries.eigenform(cfg.weight, n, exact=exact)
        cache.write(path, f)
        return f
    return qseries.eigenform(cfg.weight, n, exact=exact)


def _contour(cfg: RunConfig, abscissa: float) -> mellin.ContourSpec:
    return mellin.ContourSpec(abscissa=abscissa, height=cfg.height, step=cfg.step)


def _identity(results: dict, report: mellin.IdentityReport, tol: float) -> bool:
    scale = max(abs(report.lhs), abs(report.rhs), 1e-300)
    err = report.quadrature_error_estimate + report.truncation_bounds
    results["lhs"] = quantity(report.lhs, report.quadrature_error_estimate)
    results["rhs"] = quantity(report.rhs, report.truncation_bounds)
    results["abs_diff"] = quantity(report.abs_diff, err)
    results["rel_diff"] = quantity(report.rel_diff, err / scale)
    results["tolerance"] = quantity(tol, "exact")
    return report.rel_diff <= tol


# -- subcommands -------------------------------------------------------------


def cmd_coeffs(cfg):
    f = qseries.eigenform(cfg.weight, cfg.n, exact=cfg.exact)
    res = {"meta": {"form_id": f.form_id, "n_max": f.n_max, "exact": f.exact}}
    head = f.coeffs[: min(10, f.n_max)]
    bound = "exact" if f.exact else [abs(float(a)) * f.rel_roundoff + f.abs_roundoff for a in head]
    res["leading"] = quantity([int(a) if f.exact else float(a) for a in head], bound)
    if cfg.out:
        path = cache.write(cfg.out, f)
        res["meta"]["path"] = str(path)
    return res, True, ""


def cmd_check_hecke(cfg):
    f = load_form(cfg, cfg.n, exact=True)
    bound = min(cfg.bound, f.n_max)
    violations = qseries.hecke_verify(f, cfg.weight, bound, exhaustive=cfg.exhaustive)
    res = {
        "violations": quantity(len(violations), "exact"),
        "meta": {"bound": bound, "exhaustive": cfg.exhaustive,
                 "first": [list(map(str, v)) for v in violations[:10]]},
    }
    return res, not violations, f"{len(violations)} Hecke violations"


def cmd_average(cfg):
    X = int(cfg.x)
    n = cfg.n or max(X, 100_000)
    f = load_form(cfg, n)
    S = sums.partial_sums(f)
    C = sums.average_constant(f, n)
    rep = sums.sharp_average(S, X, C)
    res = {
        "C": quantity(C.value, C.tail_bound, C.envelope),
        "lhs": quantity(rep.lhs, abs(rep.lhs) * 1e-15),
        "main": quantity(rep.main, C.tail_bound * X ** (cfg.weight + 0.5)),
        "ratio": quantity(rep.ratio, rep.ratio * C.tail_bound / C.value),
        "classical_statistic": quantity(sums.classical_statistic(S, X), 1e-15),
        "meta": {"X": X, "n_used": n, "chunk_size": rep.chunk_size, "context": rep.context},
    }
    return res, True, ""


def cmd_rankin(cfg):
    f = load_form(cfg, cfg.n)
    v = dirichlet.rankin_L(cfg.s, f, f, cfg.n, cfg.conjugated)
    return {"L": quantity(v.value, v.truncation_bound, v.bound_kind),
            "meta": {"n_used": v.n_used}}, True, ""


def cmd_constants(cfg):
    f = load_form(cfg, cfg.n)
    pair = dirichlet.constant_C(f, f, cfg.n, cfg.conjugated)
    tol = cfg.tol
    res = {
        "C_direct": quantity(pair.c_direct, pair.truncation_bound, envelope.LABEL),
        "C_lfunction": quantity(pair.c_lfun, pair.truncation_bound, envelope.LABEL),
        "discrepancy": quantity(pair.discrepancy, 1e-15 * abs(pair.c_direct)),
        "residue_half": quantity(pair.residue_half, pair.truncation_bound * (cfg.weight - 0.5) / math.gamma(1.5)),
        "tolerance": quantity(tol, "exact"),
        "meta": {"n_used": pair.n_used},
    }
    ok = pair.discrepancy <= tol * abs(pair.c_direct)
    return res, ok, f"constant routes differ by {pair.discrepancy:.3e}"


def cmd_dseries(cfg):
    f = load_form(cfg, cfg.n)
    S = sums.partial_sums(f)
    d = dirichlet.D_series(cfg.s, S, S, cfg.conjugated)
    w = dirichlet.W_eval(cfg.s, f, f, cfg.n, cfg.conjugated)
    return {"D": quantity(d.value, d.truncation_bound, d.bound_kind),
            "W": quantity(w.value, w.truncation_bound, w.bound_kind),
            "meta": {"n_used": d.n_used}}, True, ""


def cmd_barnes(cfg):
    rep = mellin.barnes_check(cfg.beta, cfg.t, _contour(cfg, cfg.gamma))
    res = {}
    ok = _identity(res, rep, cfg.tol)
    return res, ok, f"Barnes rel_diff {rep.rel_diff:.3e}"


def cmd_verify_decomp(cfg):
    f = load_form(cfg, cfg.n)
    rep = mellin.verify_decomposition(cfg.s, f, f, cfg.n, _contour(cfg, cfg.gamma), cfg.conjugated)
    res = {"meta": {"n_used": cfg.n}}
    ok = _identity(res, rep, cfg.tol)
    return res, ok, f"decomposition rel_diff {rep.rel_diff:.3e}"


def cmd_verify_smoothing(cfg):
    f = load_form(cfg, cfg.n)
    rep = mellin.verify_smoothing_transform(cfg.x, f, f, cfg.n, _contour(cfg, cfg.gamma), cfg.conjugated)
    res = {"meta": {"n_used": cfg.n}}
    ok = _identity(res, rep, cfg.tol)
    return res, ok, f"smoothing rel_diff {rep.rel_diff:.3e}"


def _fit_quantities(fit: moments.FitResult | None) -> dict:
    if fit is None:
        return {}
    return {
        "fitted_slope": quantity(fit.slope, fit.stderr, "residual standard error"),
        "fit_meta": {"meta": {"n_used": fit.n_used, "excluded": list(fit.excluded)}},
    }


def cmd_moment(cfg):
    grid = moments.parse_grid(cfg.grid)
    mc = moments.MomentConfig(weight=cfg.weight, grid=tuple(grid), n_max=cfg.n,
                              conjugated=cfg.conjugated, profile=cfg.profile)
    mc.validate()
    f = load_form(cfg, cfg.n)
    rep = moments.run_experiment(mc, form=f)
    if cfg.csv:
        rep.write_csv(cfg.csv)
    rel_main = [abs(m) * rep.C_bound / rep.C for m in rep.main]
    res = {
        "grid": quantity(rep.grid, "exact"),
        "smoothed": quantity(rep.smoothed, rep.tail_bound, rep.bound_kind),
        "main": quantity(rep.main, rel_main, rep.bound_kind),
        "residual": quantity(rep.residual, [a + b for a, b in zip(rep.tail_bound, rel_main)]),
        "ratio": quantity(rep.ratio, [b / m for b, m in zip(rel_main, rep.main)]),
        "secondary": quantity(rep.secondary, rel_main, "diagonal pole contribution, diagnostic"),
        "C": quantity(rep.C, rep.C_bound, rep.bound_kind),
        "theta": quantity(rep.theta_used, "exact"),
        "meta": {"n_max": rep.n_max, "weight": rep.weight, "theta_note": rep.theta_note,
                 "conjugated": rep.conjugated},
    }
    res.update(_fit_quantities(rep.fit))
    return res, True, ""


def _synthetic(kind: str):
    grid = moments.geometric_grid(100, 10_000, 7)
    x = np.asarray(grid)
    if kind == "pure":
        r = x**-0.5
    elif kind == "oscillatory":
        r = x**-0.5 * (2 + np.sin(5 * np.log(x)))
    else:
        raise PreconditionError(f"unknown synthetic fixture {kind!r}")
    return grid, r, np.zeros_like(x)


def cmd_fit(cfg):
    if cfg.synthetic:
        grid, r, b = _synthetic(cfg.synthetic)
    elif cfg.csv:
        try:
            with open(cfg.csv, newline="") as fh:
                rows = list(csv.DictReader(fh))
            grid = [float(row["X"]) for row in rows]
            r = [float(row["residual"]) for row in rows]
            b = [float(row["tail_bound"]) for row in rows]
        except (OSError, KeyError, ValueError) as exc:
            raise PreconditionError(f"cannot read moment CSV {cfg.csv}: {exc}") from exc
    else:
        raise PreconditionError("fit needs --csv PATH or --synthetic pure|oscillatory")
    fit = moments.exponent_fit(grid, r, b)
    return _fit_quantities(fit), True, ""


HANDLERS = {
    "coeffs": cmd_coeffs, "check-hecke": cmd_check_hecke, "average": cmd_average,
    "rankin": cmd_rankin, "constants": cmd_constants, "dseries": cmd_dseries,
    "barnes": cmd_barnes, "verify-decomp": cmd_verify_decomp,
    "verify-smoothing": cmd_verify_smoothing, "moment": cmd_moment, "fit": cmd_fit,
}

PROVENANCE_KEYS = {
    "coeffs": ("coefficients",), "check-hecke": ("hecke",),
    "average": ("sharp_average", "classical"), "rankin": ("rankin",),
    "constants": ("constant",), "dseries": ("dseries", "w"), "barnes": ("barnes",),
    "verify-decomp": ("decomposition",), "verify-smoothing": ("smoothing",),
    "moment": ("moment", "constant", "fit"), "fit": ("fit",),
}


def dispatch(cfg: RunConfig) -> ResultEnvelope:
    """Run one subcommand.  Raises :class:`IdentityCheckFailed` (carrying the
    envelope) when an identity misses its tolerance."""
    cfg.validate()
    start = time.perf_counter()
    results, ok, message = HANDLERS[cfg.command](cfg)
    env = ResultEnvelope(
        command=cfg.command,
        config=cfg.echo(),
        results=results,
        provenance={k: PROVENANCE[k] for k in PROVENANCE_KEYS[cfg.command]},
        ok=ok,
        message="" if ok else message,
        timing={"seconds": round(time.perf_counter() - start, 6)},
    )
    problems = lint_envelope(env)
    if problems:
        raise AssertionError(f"unbounded numbers in envelope: {problems}")
    if not ok:
        raise IdentityCheckFailed(message, env)
    return env


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cuspsum", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, *extra):
        sp.add_argument("--config", help="key = value config file (flags override it)")
        sp.add_argument("--profile", choices=sorted(PROFILE_DEFAULTS), help="built-in defaults")
        sp.add_argument("--json", metavar="PATH", help="write the result envelope ('-' for stdout)")
        sp.add_argument("--cache-dir", help=f"coefficient cache directory (env {cache.ENV_VAR})")
        if "form" in extra:
            sp.add_argument("--weight", type=int, help="weight k of the level-one eigenform")
            sp.add_argument("--n", type=int, help="number of coefficients N")
            sp.add_argument("--coeff-cache", metavar="PATH", help="read coefficients from this cache file")
            sp.add_argument("--form", help="'delta' or 'eigen' (the eigenform of --weight)")
        if "conj" in extra:
            sp.add_argument("--unconjugated", dest="conjugated", action="store_false", default=None,
                            help="use S_f S_g instead of S_f conj(S_g)")
        if "s" in extra:
            sp.add_argument("--s", help="complex point, '6,5' or '6+5j'")
        if "contour" in extra:
            sp.add_argument("--gamma", type=float, help="abscissa of the integration line")
            sp.add_argument("--height", type=float, help="height cutoff T")
            sp.add_argument("--step", type=float, help="trapezoid step h")
        if "tol" in extra:
            sp.add_argument("--tol", type=float, help="relative tolerance for the identity")
        return sp

    sp = common(sub.add_parser("coeffs", help="generate coefficients, optionally cache them"), "form")
    sp.add_argument("--exact", action="store_true", default=None, help="exact integer coefficients")
    sp.add_argument("--out", help="cache file to write")
    sp = common(sub.add_parser("check-hecke", help="verify Hecke relations exactly"), "form")
    sp.add_argument("--bound", type=int, help="check (m, n) with mn up to this bound")
    sp.add_argument("--canonical", dest="exhaustive", action="store_false", default=None,
                    help="only the canonical coprime split of each n")
    sp = common(sub.add_parser("average", help="sharp-cutoff mean square of partial sums"), "form")
    sp.add_argument("--x", type=float, help="cutoff X")
    common(sub.add_parser("rankin", help="Rankin-Selberg series at s"), "form", "conj", "s")
    common(sub.add_parser("constants", help="main-term constant along two routes"), "form", "conj", "tol")
    common(sub.add_parser("dseries", help="D(s) and W(s) at s"), "form", "conj", "s")
    sp = common(sub.add_parser("barnes", help="Barnes integral check"), "contour", "tol")
    sp.add_argument("--beta", help="complex beta")
    sp.add_argument("--t", help="complex t with |arg t| < pi")
    common(sub.add_parser("verify-decomp", help="check D = W + Mellin-Barnes integral"),
           "form", "conj", "s", "contour", "tol")
    sp = common(sub.add_parser("verify-smoothing", help="check the inverse-Mellin smoothing identity"),
                "form", "conj", "contour", "tol")
    sp.add_argument("--x", type=float, help="smoothing scale X")
    sp = common(sub.add_parser("moment", help="smoothed second moments across a grid"), "form", "conj")
    sp.add_argument("--grid", help="'geometric:START:STOP:POINTS' or comma list")
    sp.add_argument("--csv", help="CSV output (X, smoothed, main, residual, ratio, tail_bound)")
    sp = common(sub.add_parser("fit", help="error-exponent fit of a moment CSV"))
    sp.add_argument("--csv", help="moment CSV to fit")
    sp.add_argument("--synthetic", help="'pure' or 'oscillatory' power-law fixture")
    return p


def _summary(env: ResultEnvelope) -> str:
    lines = [f"{env.command}: {'ok' if env.ok else 'FAILED'}"]
    for key, q in env.results.items():
        if isinstance(q, dict) and "value" in q:
            v = q["value"]
            if isinstance(v, list) and len(v) > 6:
                v = f"[{len(v)} values]"
            lines.append(f"  {key} = {v}  (bound {q['bound']})")
    if env.message:
        lines.append(f"  {env.message}")
    return "\n".join(lines)


def _emit(env: ResultEnvelope, json_path: str | None) -> None:
    if json_path == "-":
        print(env.to_json())
        return
    print(_summary(env))
    if json_path:
        Path(json_path).write_text(env.to_json() + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    json_path = flags.pop("json", None)
    try:
        cfg = build_config(args.command, flags, args.config)
        env = dispatch(cfg)
    except IdentityCheckFailed as exc:
        if exc.envelope is not None:
            _emit(exc.envelope, json_path)
        print(f"error: identity check failed: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except CuspsumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(env, json_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
