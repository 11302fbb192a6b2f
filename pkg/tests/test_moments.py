import csv
import math

import numpy as np
import pytest

from cuspsum import dirichlet, moments, qseries, sums
from cuspsum.errors import (DegenerateFitError, InsufficientCoefficientsError, PreconditionError,
                            UnsupportedWeightError, WeightMismatchError)
from cuspsum.moments import MomentConfig


@pytest.fixture(scope="module")
def delta_3e4():
    return qseries.delta_qexp(30_000)


@pytest.fixture(scope="module")
def S_3e4(delta_3e4):
    return sums.partial_sums(delta_3e4)


def test_tiny_X_is_single_term(S_3e4):
    mv = moments.smoothed_moment(0.01, S_3e4, S_3e4)
    expected = 100 * math.exp(-100)
    assert abs(mv.value - expected) <= 1e-12 * expected
    assert mv.tail_bound <= 1e-100


def test_moment_against_main_term(delta_3e4, S_3e4):
    X = 1000
    C = dirichlet.constant_C(delta_3e4, delta_3e4).c_direct.real
    mv = moments.smoothed_moment(X, S_3e4, S_3e4)
    assert abs(mv.value.real / (C * math.sqrt(X)) - 1) <= 0.10


def test_moment_needs_tail_room(S_3e4):
    with pytest.raises(InsufficientCoefficientsError):
        moments.smoothed_moment(2000, S_3e4, S_3e4)
    with pytest.raises(PreconditionError):
        moments.smoothed_moment(0, S_3e4, S_3e4)


def test_moment_tail_is_honest(S_3e4):
    # Truncating at 30X must differ from the full sum by less than the tail bound.
    X = 100
    short = moments.smoothed_moment(X, S_3e4, S_3e4, n=3000)
    full = moments.smoothed_moment(X, S_3e4, S_3e4)
    assert abs(short.value - full.value) <= short.tail_bound


def test_moment_weight_mismatch(S_3e4):
    S16 = sums.partial_sums(qseries.eigenform(16, 30_000))
    with pytest.raises(WeightMismatchError):
        moments.smoothed_moment(100, S_3e4, S16)


def test_moment_linear_in_second_form(delta_3e4, S_3e4):
    neg = qseries.QExpansion(weight=12, coeffs=-3.0 * np.asarray(delta_3e4.coeffs), form_id="-3d")
    S_neg = sums.partial_sums(neg)
    a = moments.smoothed_moment(300, S_3e4, S_3e4).value
    b = moments.smoothed_moment(300, S_3e4, S_neg).value
    assert abs(b + 3 * a) <= 1e-13 * abs(a)


# -- exponent fit -----------------------------------------------------------------

GRID = moments.geometric_grid(100, 10_000, 7)


def test_fit_pure_power_law():
    fit = moments.exponent_fit(GRID, [x**-0.5 for x in GRID])
    assert abs(fit.slope + 0.5) <= 1e-12
    assert fit.stderr <= 1e-12


def test_fit_oscillatory():
    r = [x**-0.5 * (2 + math.sin(5 * math.log(x))) for x in GRID]
    fit = moments.exponent_fit(GRID, r)
    assert abs(fit.slope + 0.5) <= 0.15


def test_fit_degenerate():
    with pytest.raises(DegenerateFitError):
        moments.exponent_fit(GRID, [1e-20] * 7, [1e-19] * 7)
    with pytest.raises(PreconditionError):
        moments.exponent_fit(GRID[:3], [1.0] * 3)
    with pytest.raises(PreconditionError):
        moments.exponent_fit([1, 2, 3, 4, 5, 6], [1.0] * 6)


def test_fit_excludes_noise_points():
    r = [x**-0.5 for x in GRID]
    bounds = [0.0] * 6 + [r[-1]]
    fit = moments.exponent_fit(GRID, r, bounds)
    assert fit.excluded == (GRID[-1],) and fit.n_used == 6


def test_grids():
    g = moments.parse_grid("geometric:100:10000:7")
    assert len(g) == 7 and g[0] == 100 and g[-1] == pytest.approx(10_000, rel=1e-14)
    assert moments.parse_grid("1,2,3") == [1.0, 2.0, 3.0]
    with pytest.raises(PreconditionError):
        moments.parse_grid("geometric:a:b")


# -- experiment -------------------------------------------------------------------------

def test_config_validation():
    MomentConfig().validate()
    with pytest.raises(UnsupportedWeightError):
        MomentConfig(weight=14).validate()
    with pytest.raises(InsufficientCoefficientsError):
        MomentConfig.from_profile("default", n_max=1000).validate()
    with pytest.raises(PreconditionError):
        MomentConfig.from_profile("huge")


@pytest.fixture(scope="module")
def small_report(delta_3e4):
    cfg = MomentConfig.from_profile("default", grid="geometric:10:1000:7", n_max=30_000)
    return moments.run_experiment(cfg, delta_3e4)


def test_report_structure(small_report, tmp_path):
    rep = small_report
    assert len(list(rep.rows())) == 7
    for s, m, r, q in zip(rep.smoothed, rep.main, rep.residual, rep.ratio):
        assert s > 0 and m > 0
        assert r == s - m and q == s / m
    assert rep.theta_used == 0.0 and "theta = 0" in rep.theta_note
    path = tmp_path / "m.csv"
    rep.write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["X", "smoothed", "main", "residual", "ratio", "tail_bound"]
    assert len(rows) == 8


def test_report_trend(small_report):
    dev = [abs(q - 1) for q in small_report.ratio]
    assert dev[-1] < dev[0]


def test_conjugated_matches_unconjugated(delta_3e4, small_report):
    cfg = MomentConfig.from_profile("default", grid="geometric:10:1000:7", n_max=30_000,
                                    conjugated=False)
    other = moments.run_experiment(cfg, delta_3e4)
    assert other.smoothed == small_report.smoothed
    assert other.C == small_report.C


def test_weight16_report():
    cfg = MomentConfig.from_profile("default", grid="geometric:10:1000:7", n_max=30_000)
    cfg = MomentConfig(weight=16, grid=cfg.grid, n_max=cfg.n_max)
    rep = moments.run_experiment(cfg)
    f = qseries.eigenform(16, 30_000)
    assert rep.C == dirichlet.constant_C(f, f).c_direct.real
    assert rep.weight == 16 and all(q > 0 for q in rep.ratio)
    assert abs(rep.ratio[-1] - 1) <= 0.10
