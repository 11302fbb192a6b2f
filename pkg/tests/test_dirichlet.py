import math

import numpy as np
import pytest

from cuspsum import dirichlet, qseries, sums
from cuspsum.complexfn import zeta
from cuspsum.errors import DomainError, InsufficientCoefficientsError, WeightMismatchError
from cuspsum.qseries import QExpansion

from oracles import regrouped_terms


def scaled(f: QExpansion, c) -> QExpansion:
    return QExpansion(weight=f.weight, coeffs=np.asarray(f.coeffs, dtype=complex) * c,
                      form_id=f"{c}*{f.form_id}")


def zero_like(f: QExpansion) -> QExpansion:
    return QExpansion(weight=f.weight, coeffs=np.zeros(f.n_max), form_id="zero")


@pytest.fixture(scope="module")
def delta_2e3():
    return qseries.delta_qexp(2000)


# -- Rankin-Selberg -----------------------------------------------------------

def test_rankin_zero_form(delta_2e3):
    v = dirichlet.rankin_L(2, delta_2e3, zero_like(delta_2e3))
    assert v.value == 0


def test_rankin_at_three_halves_matches_plain_sum(delta_exact, tau_ref):
    n = 1000
    v = dirichlet.rankin_L(1.5, delta_exact, delta_exact, n)
    plain = math.fsum(t * t / m**12.5 for m, t in enumerate(tau_ref[:n], start=1))
    assert abs(v.value / complex(zeta(3)) - plain) <= 1e-12 * plain


def test_rankin_truncation_self_consistency(delta_1e4):
    lo = dirichlet.rankin_L(2, delta_1e4, delta_1e4, 1000)
    hi = dirichlet.rankin_L(2, delta_1e4, delta_1e4, 10_000)
    assert abs(lo.value - hi.value) <= lo.truncation_bound
    assert hi.truncation_bound < lo.truncation_bound


def test_rankin_domain(delta_2e3):
    with pytest.raises(DomainError):
        dirichlet.rankin_L(1.0, delta_2e3, delta_2e3)


# -- main-term constant --------------------------------------------------------

def test_constant_routes_agree(delta_1e5):
    pair = dirichlet.constant_C(delta_1e5, delta_1e5)
    assert pair.discrepancy <= 1e-10
    assert pair.c_direct.real > 0 and pair.n_used == 100_000
    assert pair.truncation_bound < 1e-2 * abs(pair.c_direct)


def test_constant_bilinear(delta_1e4):
    one = dirichlet.constant_C(delta_1e4, delta_1e4)
    two = dirichlet.constant_C(delta_1e4, scaled(delta_1e4, 2.0))
    assert two.c_direct == 2 * one.c_direct
    assert abs(two.c_lfun - 2 * one.c_lfun) <= 1e-15 * abs(one.c_lfun)


def test_constant_weight_mismatch(delta_2e3):
    f16 = qseries.eigenform(16, 2000)
    with pytest.raises(WeightMismatchError):
        dirichlet.constant_C(delta_2e3, f16)


def test_constant_insufficient(delta_2e3):
    with pytest.raises(InsufficientCoefficientsError):
        dirichlet.constant_C(delta_2e3, delta_2e3, 5000)


def test_constant_conjugation(delta_2e3):
    f = scaled(delta_2e3, 1j)
    conj = dirichlet.constant_C(f, f, conjugated=True)
    plain = dirichlet.constant_C(f, f, conjugated=False)
    real = dirichlet.constant_C(delta_2e3, delta_2e3)
    assert conj.c_direct == pytest.approx(real.c_direct, rel=1e-15)
    assert plain.c_direct == pytest.approx(-real.c_direct, rel=1e-15)


# -- shifted convolutions -------------------------------------------------------

def test_shifted_leading_term(delta_2e3):
    # N = 2 keeps only m = 2: [tau(2) + tau(2)] 2^{-11} 2^{-6}
    v = dirichlet.shifted_D(6, 1, delta_2e3, delta_2e3, 2)
    # Exact value; the float path rounds about six power and exp factors.
    assert abs(v.value - (-48 / 131072)) <= 8 * 2.0**-53 * 48 / 131072


def test_shifted_beyond_range(delta_2e3):
    assert dirichlet.shifted_D(3, 2000, delta_2e3, delta_2e3).value == 0
    assert dirichlet.shifted_D(3, 5000, delta_2e3, delta_2e3).value == 0


def test_shifted_domain(delta_2e3):
    with pytest.raises(DomainError):
        dirichlet.shifted_D(2, 1, delta_2e3, delta_2e3)
    with pytest.raises(DomainError):
        dirichlet.shifted_D(3, 0, delta_2e3, delta_2e3)


def test_shifted_symmetric_in_f_g(delta_2e3):
    g = qseries.eigenform(12, 2000)  # same form, separate object
    a = dirichlet.shifted_D(3 + 1j, 7, delta_2e3, g)
    b = dirichlet.shifted_D(3 + 1j, 7, g, delta_2e3)
    assert a.value == b.value


def test_shifted_against_direct_sum(delta_exact):
    n, h, s = 300, 5, 4.0
    a = [float(x) for x in delta_exact.coeffs[:n]]
    ref = math.fsum((a[m - 1] * a[m - h - 1] * 2) / m ** (s + 11) for m in range(h + 1, n + 1))
    v = dirichlet.shifted_D(s, h, delta_exact, delta_exact, n)
    assert abs(v.value - ref) <= 1e-13 * abs(ref)


def test_z_sum_large_w_is_first_shift(delta_2e3):
    z = dirichlet.Z_sum(3, 50, delta_2e3, delta_2e3)
    d1 = dirichlet.shifted_D(3, 1, delta_2e3, delta_2e3)
    crude = 2 * 2000 * float(np.max(np.abs(dirichlet.normalized(delta_2e3, 2000)))) ** 2
    assert abs(z.value - d1.value) <= 2.0**-50 * crude


def test_z_sum_w_zero_against_stripes(delta_2e3):
    n = 500
    fast = dirichlet.Z_sum(3, 0, delta_2e3, delta_2e3, n)
    stripes = sum(dirichlet.shifted_D(3, h, delta_2e3, delta_2e3, n).value for h in range(1, n))
    assert abs(fast.value - stripes) <= 1e-12 * abs(stripes)


def test_z_sum_truncation(delta_1e4):
    lo = dirichlet.Z_sum(4, 0, delta_1e4, delta_1e4, 5000)
    hi = dirichlet.Z_sum(4, 0, delta_1e4, delta_1e4, 10_000)
    assert abs(lo.value - hi.value) <= lo.truncation_bound


def test_z_sum_zero_form(delta_2e3):
    assert dirichlet.Z_sum(3, 1, delta_2e3, zero_like(delta_2e3)).value == 0
    assert dirichlet.Z_sum(3, 0, delta_2e3, zero_like(delta_2e3)).value == 0


# -- W ----------------------------------------------------------------------------

def test_w_zero_form(delta_2e3):
    assert dirichlet.W_eval(6, delta_2e3, zero_like(delta_2e3)).value == 0


def test_w_against_regrouping_oracle(delta_exact):
    n, s = 1000, 6
    a = [int(x) for x in delta_exact.coeffs[:n]]
    terms = regrouped_terms(a, a)
    ref = math.fsum(t / m ** (s + 11) for m, t in enumerate(terms, start=1))
    v = dirichlet.W_eval(s, delta_exact, delta_exact, n)
    assert abs(v.value - ref) <= 1e-8 * abs(ref)


def test_w_is_linear(delta_2e3):
    f16 = qseries.eigenform(12, 2000)
    base = dirichlet.W_eval(6 + 2j, delta_2e3, f16).value
    assert dirichlet.W_eval(6 + 2j, delta_2e3, scaled(f16, 3.0)).value == pytest.approx(3 * base, rel=1e-14)
    conj = dirichlet.W_eval(6, delta_2e3, scaled(delta_2e3, 1j), conjugated=True).value
    plain = dirichlet.W_eval(6, delta_2e3, scaled(delta_2e3, 1j), conjugated=False).value
    real = dirichlet.W_eval(6, delta_2e3, delta_2e3).value
    assert conj == pytest.approx(-1j * real, rel=1e-14)
    assert plain == pytest.approx(1j * real, rel=1e-14)


# -- partial-sum series -------------------------------------------------------------

def test_d_series_single_term(delta_2e3):
    S = sums.partial_sums(delta_2e3)
    assert dirichlet.D_series(3, S, S, n=1).value == 1


def test_d_series_conjugation_irrelevant_for_real_forms(delta_2e3):
    S = sums.partial_sums(delta_2e3)
    assert dirichlet.D_series(4 + 3j, S, S, True).value == dirichlet.D_series(4 + 3j, S, S, False).value


def test_d_series_monotone_on_real_axis(S_delta_1e5):
    v4 = dirichlet.D_series(4, S_delta_1e5, S_delta_1e5)
    v6 = dirichlet.D_series(6, S_delta_1e5, S_delta_1e5)
    assert v4.value.real > 0 and v6.value.real > 0
    assert abs(v6.value) < abs(v4.value)


def test_d_series_against_exact_sums(delta_exact):
    n, s = 500, 5
    S_int = np.cumsum(np.array([int(x) for x in delta_exact.coeffs[:n]], dtype=object))
    ref = math.fsum(float(x * x) / m ** (s + 11) for m, x in enumerate(S_int, start=1))
    S = sums.partial_sums(delta_exact)
    v = dirichlet.D_series(s, S, S, n=n)
    assert abs(v.value - ref) <= 1e-13 * ref


def test_d_series_truncation_honest(S_delta_1e5):
    lo = dirichlet.D_series(4, S_delta_1e5, S_delta_1e5, n=10_000)
    hi = dirichlet.D_series(4, S_delta_1e5, S_delta_1e5)
    assert abs(lo.value - hi.value) <= lo.truncation_bound
    assert lo.bound_kind == "heuristic-envelope"


def test_d_series_weight_mismatch(delta_2e3):
    S12 = sums.partial_sums(delta_2e3)
    S16 = sums.partial_sums(qseries.eigenform(16, 2000))
    with pytest.raises(WeightMismatchError):
        dirichlet.D_series(4, S12, S16)
