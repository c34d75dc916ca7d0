"""Tests for the hand-rolled special functions.

Frozen high-precision oracles below were computed with mpmath at 50 digits
in a separate environment; mpmath is not a dependency of this package or
of the tests.
"""

import math

import numpy as np
import pytest

from evidkit.special import digamma, log_gamma, trigamma

EULER_GAMMA = 0.5772156649015328606065
PI2_OVER_6 = 1.644934066848226436472
PI2_OVER_2 = 4.934802200544679309417

# (z, digamma(z)) pairs, mpmath mp.dps=50
DIGAMMA_ORACLE = [
    (0.1, -10.42375494041107679517),
    (0.5, -1.963510026021423479441),
    (1.0, -EULER_GAMMA),
    (1.5, 0.03648997397857652055902),
    (2.0, 0.4227843350984671393935),
    (3.7, 1.167153539361511385874),
    (7.25, 1.910453526883736028382),
    (12.0, 2.442661679975812016738),
    (25.5, 3.218942472883919766545),
    (1e6, 13.81551005796419077077),
]

TRIGAMMA_ORACLE = [
    (0.1, 101.4332991507927588172),
    (0.5, PI2_OVER_2),
    (1.0, PI2_OVER_6),
    (2.0, 0.6449340668482264364724),
    (2.3, 0.5425374586652584076169),
    (5.75, 0.1899074119392527676988),
    (11.0, 0.0951663356816857461222),
    (1e6, 1.000000500000166666667e-6),
]

LOG_GAMMA_ORACLE = [
    (0.5, 0.5723649429247000870717),
    (3.7, 1.428072326665387921872),
    (12.0, 17.50230784587388583929),
]


def test_digamma_frozen_oracle():
    for z, want in DIGAMMA_ORACLE:
        got = digamma(z)
        assert got == pytest.approx(want, rel=1e-13, abs=1e-13), z


def test_trigamma_frozen_oracle():
    for z, want in TRIGAMMA_ORACLE:
        got = trigamma(z)
        assert got == pytest.approx(want, rel=1e-13), z


def test_log_gamma_frozen_oracle():
    for z, want in LOG_GAMMA_ORACLE:
        assert log_gamma(z) == pytest.approx(want, rel=1e-13), z


def test_trigamma_one_matches_basel_series_oracle():
    # Independent oracle: psi_1(1) = sum 1/n^2. Partial sum plus the
    # integral tail bracket [1/(N+1), 1/N] pins the value to ~1e-9.
    n_terms = 40000
    partial = sum(1.0 / n**2 for n in range(1, n_terms + 1))
    lo = partial + 1.0 / (n_terms + 1)
    hi = partial + 1.0 / n_terms
    assert lo <= trigamma(1.0) <= hi


def test_digamma_integer_harmonic_identity():
    # psi(n) = -gamma + H_{n-1} exactly, for integer n
    h = 0.0
    for n in range(1, 30):
        assert digamma(float(n)) == pytest.approx(-EULER_GAMMA + h, rel=1e-13, abs=1e-13)
        h += 1.0 / n


def test_digamma_recurrence_property():
    rng = np.random.default_rng(101)
    for _ in range(500):
        z = float(rng.uniform(0.05, 50.0))
        assert digamma(z + 1.0) == pytest.approx(digamma(z) + 1.0 / z, rel=1e-12, abs=1e-12)


def test_trigamma_recurrence_property():
    rng = np.random.default_rng(102)
    for _ in range(500):
        z = float(rng.uniform(0.05, 50.0))
        assert trigamma(z + 1.0) == pytest.approx(trigamma(z) - 1.0 / z**2, rel=1e-12, abs=1e-12)


def test_digamma_is_derivative_of_log_gamma():
    # central differences of log_gamma as an independent cross-check
    rng = np.random.default_rng(103)
    h = 1e-6
    for _ in range(50):
        z = float(rng.uniform(0.5, 40.0))
        fd = (log_gamma(z + h) - log_gamma(z - h)) / (2.0 * h)
        assert digamma(z) == pytest.approx(fd, rel=1e-8, abs=1e-8)


def test_trigamma_is_derivative_of_digamma():
    rng = np.random.default_rng(104)
    h = 1e-6
    for _ in range(50):
        z = float(rng.uniform(0.5, 40.0))
        fd = (digamma(z + h) - digamma(z - h)) / (2.0 * h)
        assert trigamma(z) == pytest.approx(fd, rel=1e-8, abs=1e-8)


def test_log_gamma_matches_math_lgamma():
    rng = np.random.default_rng(105)
    for _ in range(200):
        z = float(rng.uniform(0.05, 1000.0))
        assert log_gamma(z) == math.lgamma(z)


def test_trigamma_positive_and_decreasing():
    zs = np.linspace(0.1, 60.0, 300)
    vals = [trigamma(float(z)) for z in zs]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("fn", [digamma, trigamma, log_gamma])
@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_non_positive_or_non_finite_rejected(fn, bad):
    with pytest.raises(ValueError):
        fn(bad)
