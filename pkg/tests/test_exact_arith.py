from fractions import Fraction as F
from math import factorial

import pytest

from polykernel.exact_arith import (
    SeriesStructureError, TruncatedSeries, as_rational, bernoulli, bernoulli_factor_series,
    exp_series, faulhaber, format_rational, inverse_linear_series, power_sum, residue_coeff,
    truncated_mul, univariate,
)


def test_as_rational_accepts_exact_inputs():
    assert as_rational(3) == F(3)
    assert as_rational(" -7/21 ") == F(-1, 3)
    assert as_rational(F(2, 4)) == F(1, 2)
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(ValueError):
        as_rational("")


def test_format_rational_always_has_denominator():
    assert format_rational(6) == "6/1"
    assert format_rational(F(-4, 6)) == "-2/3"


def test_bernoulli_values():
    expected = [F(1), F(-1, 2), F(1, 6), F(0), F(-1, 30), F(0), F(1, 42), F(0), F(-1, 30)]
    assert [bernoulli(k) for k in range(9)] == expected
    assert bernoulli(12) == F(-691, 2730)
    assert all(bernoulli(k) == 0 for k in range(3, 30, 2))


def test_faulhaber_matches_direct_sums():
    for p in range(8):
        for n in range(12):
            assert faulhaber(n, p) == sum(j ** p for j in range(1, n + 1))


def test_power_sum_ranges():
    assert power_sum(-3, 4, 2) == sum(j * j for j in range(-3, 5))
    assert power_sum(-5, -1, 3) == sum(j ** 3 for j in range(-5, 0))
    assert power_sum(0, 3, 0) == 4
    assert power_sum(5, 4, 3) == 0


def test_truncation_drops_high_degrees():
    s = TruncatedSeries(2, 3)
    x = s.linear([1, 0])
    y = s.linear([0, 1])
    prod = (x + y) ** 5
    assert prod.is_zero()
    sq = (x + y + 1) ** 2
    assert sq.coefficient((1, 1)) == 2
    assert sq.coefficient((0, 0)) == 1


def test_weighted_truncation():
    s = TruncatedSeries(2, 2, weights=(1, 0))
    y = s.linear([0, 1])
    # y has weight zero so all its powers survive
    assert (y ** 7).coefficient((0, 7)) == 1


def test_exp_series_coefficients():
    e = exp_series([F(2)], 6)
    assert [e.coefficient((k,)) for k in range(7)] == [F(2) ** k / factorial(k) for k in range(7)]


def test_bernoulli_factor_series_times_denominator_is_identity():
    M = 7
    z = univariate([0, 1], M)
    b = bernoulli_factor_series([1], M)
    one_minus_exp = univariate([1], M) - exp_series([1], M)
    # z/(1-e^z) * (1-e^z)/z = 1; (1-e^z)/z = -sum z^k/(k+1)!
    quotient = univariate([F(-1, factorial(k + 1)) for k in range(M + 1)], M)
    assert truncated_mul(b, quotient, M) == univariate([1], M)
    assert truncated_mul(z, quotient, M) == one_minus_exp


def test_inverse_linear_series():
    M = 5
    inv = inverse_linear_series(3, 2, M)
    assert truncated_mul(inv, univariate([3, 2], M), M) == univariate([1], M)


def test_laurent_residue_extraction():
    s = TruncatedSeries(1, 4, laurent=True)
    eps_inv = s.monomial((0, -1))
    t = s.linear([1], laurent_coeff=0)
    prod = (eps_inv + t) * (s.linear([0], laurent_coeff=1) + 1)
    r = residue_coeff(prod, -1)
    assert r.coefficient((0,)) == 1
    with pytest.raises(SeriesStructureError):
        residue_coeff(TruncatedSeries(1, 2), 0)


def test_incompatible_layouts_rejected():
    with pytest.raises(SeriesStructureError):
        TruncatedSeries(2, 3) + TruncatedSeries(3, 3)
    with pytest.raises(ValueError):
        TruncatedSeries(1, -1)
