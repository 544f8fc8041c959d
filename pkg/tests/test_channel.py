import numpy as np
import pytest
from scipy import stats

from dfnoma import SystemConfig, derive_budget
from dfnoma.channel import SeedSpec, draw

N = 1_000_000
BUDGET = derive_budget(SystemConfig(d_sr=5, d_r1=1, d_r2=3))


@pytest.fixture(scope="module")
def big_draw():
    return draw(BUDGET, SeedSpec(20201, 0), N)


def test_gamma_is_abs_square(big_draw):
    np.testing.assert_allclose(big_draw.gamma_sr, np.abs(big_draw.h_sr) ** 2, rtol=1e-12)
    assert (big_draw.gamma_r2 >= 0).all()
    assert len(big_draw) == N


def test_mean_power_matches_budget(big_draw):
    # exponential with mean 0.4 has std 0.4, so 3 s.e. at 1e6 is 0.0012
    assert abs(big_draw.gamma_sr.mean() - 0.4) < 0.002
    assert big_draw.gamma_r1.mean() == pytest.approx(10.0, rel=0.005)


def test_each_quadrature_carries_half_the_power(big_draw):
    assert big_draw.h_sr.real.var() == pytest.approx(0.2, rel=0.01)
    assert big_draw.h_sr.imag.var() == pytest.approx(0.2, rel=0.01)


def test_gamma_is_exponential_ks(big_draw):
    for gamma, s2 in ((big_draw.gamma_sr, BUDGET.sigma2_sr), (big_draw.gamma_r2, BUDGET.sigma2_r2)):
        d = stats.kstest(gamma, "expon", args=(0, s2)).statistic
        assert d < 0.002


def test_same_seed_same_sequence():
    a = draw(BUDGET, SeedSpec(5, 3), 1000)
    b = draw(BUDGET, SeedSpec(5, 3), 1000)
    assert np.array_equal(a.h_sr, b.h_sr) and np.array_equal(a.h_r2, b.h_r2)


def test_streams_are_uncorrelated():
    a = draw(BUDGET, SeedSpec(5, 0), 100_000)
    b = draw(BUDGET, SeedSpec(5, 1), 100_000)
    assert abs(np.corrcoef(a.gamma_sr, b.gamma_sr)[0, 1]) < 0.01
    assert abs(np.corrcoef(a.gamma_sr, a.gamma_r1)[0, 1]) < 0.01


def test_n_must_be_positive():
    with pytest.raises(ValueError):
        draw(BUDGET, SeedSpec(1), 0)
