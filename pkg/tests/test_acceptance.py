"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are written
to the terminal even when pytest captures output.
"""

import math
import time

import numpy as np
import pytest

from cuspsum import cli, dirichlet, mellin, moments, qseries, sums
from cuspsum.errors import IdentityCheckFailed
from cuspsum.mellin import ContourSpec

from oracles import tau_oracle

DECOMP_POINTS = ("6", "6,5", "7", "8", "6,10")


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def _envelope(cfg):
    try:
        return cli.dispatch(cfg)
    except IdentityCheckFailed as exc:
        return exc.envelope


def _decomp_envelopes():
    out = []
    for s in DECOMP_POINTS:
        cfg = cli.build_config("verify-decomp", {"s": s, "n": 100_000, "gamma": 2.0, "height": 80.0})
        out.append(_envelope(cfg))
    return out


def _moment_envelope():
    return _envelope(cli.build_config("moment", {"weight": 12}))


@pytest.fixture(scope="module")
def decomp_run():
    t0 = time.perf_counter()
    envs = _decomp_envelopes()
    return envs, time.perf_counter() - t0


@pytest.fixture(scope="module")
def moment_run():
    return _moment_envelope()


def test_criterion_01_exact_coefficients(report, tau_ref):
    qseries._delta_exact.cache_clear()
    t0 = time.perf_counter()
    delta = qseries.delta_qexp(10_000, exact=True)
    elapsed = time.perf_counter() - t0
    equal = list(delta.coeffs) == tau_ref
    triple = (delta.a(2), delta.a(3), delta.a(6))
    ok = equal and elapsed < 60 and triple == (-24, 252, -6048)
    report(1, ok, f"tau(1..1e4) equals oracle: {equal}; (tau2, tau3, tau6) = {triple}; {elapsed:.2f} s")
    assert ok


def test_criterion_02_hecke(report):
    d = qseries.delta_qexp(10_000, exact=True)
    f16 = qseries.eigenform(16, 10_000, exact=True)
    counts = {}
    for name, f, k in (("Delta", d, 12), ("weight 16", f16, 16)):
        counts[name] = (len(qseries.hecke_verify(f, k, 10_000)),
                        len(qseries.hecke_verify(f, k, 10_000, exhaustive=True)))
    ok = all(c == (0, 0) for c in counts.values())
    report(2, ok, f"violations (canonical, exhaustive): {counts}")
    assert ok


def test_criterion_03_barnes(report):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst = mellin.barnes_check(2, 0.5, ContourSpec(-1.0)).rel_diff
    for _ in range(10):
        # Valid region, with the line a quarter of Re beta away from both pole rows.
        beta = complex(rng.uniform(1, 6), rng.uniform(-2, 2))
        c = -rng.uniform(0.25, 0.75) * beta.real
        t = rng.uniform(0.1, 3) * np.exp(1j * rng.uniform(-1.5, 1.5))
        worst = max(worst, mellin.barnes_check(beta, t, ContourSpec(c)).rel_diff)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 5
    report(3, ok, f"worst rel_diff {worst:.2e} over 11 points; {elapsed:.2f} s")
    assert ok


def test_criterion_04_constant_routes(report, delta_1e5):
    pair = dirichlet.constant_C(delta_1e5, delta_1e5, 100_000)
    ok = pair.discrepancy <= 1e-10
    report(4, ok, f"C = {pair.c_direct.real:.10f}, discrepancy {pair.discrepancy:.2e}")
    assert ok


def test_criterion_05_decomposition(report, decomp_run):
    envs, elapsed = decomp_run
    rels = {s: env.results["rel_diff"]["value"] for s, env in zip(DECOMP_POINTS, envs)}
    ok = all(r <= 1e-4 for r in rels.values()) and elapsed < 600
    shown = ", ".join(f"s={s}: {r:.1e}" for s, r in rels.items())
    report(5, ok, f"rel_diff {shown}; {elapsed:.1f} s")
    assert ok


def test_criterion_06_smoothing(report, delta_1e4):
    rep = mellin.verify_smoothing_transform(100, delta_1e4, delta_1e4, 10_000)
    ok = rep.rel_diff <= 1e-6
    report(6, ok, f"rel_diff {rep.rel_diff:.2e} (contour {rep.lhs.real:.6f}, sum {rep.rhs.real:.6f})")
    assert ok


def test_criterion_07_main_term(report, moment_run):
    res = moment_run.results
    grid, ratio = res["grid"]["value"], res["ratio"]["value"]
    dev = [abs(q - 1) for q in ratio]
    small, large, trend = dev[0] <= 0.10, dev[-1] <= 0.03, dev[-1] < dev[0]
    ok = small and large and trend
    report(7, ok, f"|ratio-1| at X={grid[0]:g}: {dev[0]:.4f} (<= 0.10: {small}); "
                  f"at X={grid[-1]:g}: {dev[-1]:.4f} (<= 0.03: {large}); decreasing: {trend}")
    assert small, f"X = {grid[0]:g}: |ratio - 1| = {dev[0]:.4f} exceeds 0.10"
    assert large and trend


def test_criterion_08_error_exponent(report, moment_run):
    slope = moment_run.results["fitted_slope"]["value"]
    grid = moments.geometric_grid(100, 10_000, 7)
    pure = moments.exponent_fit(grid, [x**-0.5 for x in grid]).slope
    osc = moments.exponent_fit(grid, [x**-0.5 * (2 + math.sin(5 * math.log(x))) for x in grid]).slope
    ok = -0.8 <= slope <= -0.2 and abs(pure + 0.5) <= 1e-12 and abs(osc + 0.5) <= 0.15
    report(8, ok, f"slope {slope:.4f}; synthetic pure {pure:.15f}, oscillatory {osc:.4f}")
    assert ok


def test_criterion_09_sharp_average(report, delta_1e5, S_delta_1e5):
    C = sums.average_constant(delta_1e5)
    r3 = sums.sharp_average(S_delta_1e5, 1000, C).ratio
    r5 = sums.sharp_average(S_delta_1e5, 100_000, C).ratio
    ok = abs(r5 - 1) < abs(r3 - 1) and abs(r5 - 1) <= 0.25
    report(9, ok, f"ratio at 1e3 {r3:.4f}, at 1e5 {r5:.4f}")
    assert ok


def test_criterion_10_determinism(report, decomp_run, moment_run):
    first = [e.payload_json() for e in decomp_run[0]] + [moment_run.payload_json()]
    second = [e.payload_json() for e in _decomp_envelopes()] + [_moment_envelope().payload_json()]
    same = [a == b for a, b in zip(first, second)]
    ok = all(same)
    report(10, ok, f"{sum(same)}/{len(same)} payloads byte-identical across two runs")
    assert ok
