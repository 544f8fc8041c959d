import math

import pytest
from hypothesis import given, strategies as st

from dfnoma import ConfigError, Scheme, SystemConfig
from dfnoma.channel import SeedSpec
from dfnoma.fairness import (
    TIE,
    compare_schemes,
    deviation,
    fairness,
    folded,
    grid_points,
    pf_ratio,
    ratio_estimate,
    scheme_pair,
    sweep,
    sweet_spot,
)
from dfnoma.montecarlo import McEstimate

FIG10 = SystemConfig(alpha1=0.8, beta1=0.2, d_sr=5, d_r1=2, d_r2=2, xi_r_db=-15,
                     rate_target_1=0.5, rate_target_2=0.5)


def test_equal_kpis_give_unit_pf():
    assert pf_ratio(0.3, 0.3) == (1.0, False)
    assert deviation(1.0) == 0.0


def test_underflow_is_flagged():
    assert pf_ratio(1e-13, 0.5) == (0.0, True)
    assert pf_ratio(0.5, 1e-13) == (math.inf, True)
    v, flag = pf_ratio(0.0, 0.0)
    assert math.isnan(v) and flag


@given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
def test_deviation_symmetric_under_user_swap(a, b):
    x, _ = pf_ratio(a, b)
    y, _ = pf_ratio(b, a)
    assert deviation(x) == pytest.approx(deviation(y), abs=1e-12)
    assert folded(x) >= 1.0


def test_ratio_estimate_delta_method():
    s = SeedSpec(0)
    r, se = ratio_estimate(McEstimate(2.0, 0.2, 1, s), McEstimate(4.0, 0.4, 1, s))
    assert r == 0.5
    assert se == pytest.approx(0.5 * math.hypot(0.1, 0.1))
    assert math.isnan(ratio_estimate(McEstimate(1.0, 0.1, 1, s), McEstimate(0.0, 0.0, 1, s))[0])


def test_fairness_quoted_capacity_indexes(symmetric_cfg):
    r = fairness(symmetric_cfg.evolve(rho_s_db=15.0))
    c = fairness(symmetric_cfg.evolve(rho_s_db=15.0, scheme=Scheme.C_DFNOMA))
    assert r.pf_c == pytest.approx(1.545, abs=0.05)
    assert c.pf_c == pytest.approx(0.2433, abs=0.01)


def test_high_snr_outage_underflow_flagged():
    rep = fairness(FIG10.evolve(rho_s_db=250.0))
    assert "pf_o_extreme" in rep.flags


def test_reflexive_comparison_ties():
    rep = compare_schemes((FIG10, FIG10))
    assert rep.winner_capacity == rep.winner_outage == rep.winner_error == TIE


def test_comparison_consistent_with_min_max():
    rep = compare_schemes(scheme_pair(FIG10.evolve(rho_s_db=25.0)))
    r, c = fairness(rep.first), fairness(rep.second)
    assert rep.worst_first.capacity == min(r.ec_1, r.ec_2)
    assert rep.worst_second.outage == max(c.op_1, c.op_2)
    assert rep.best_capacity == max(rep.worst_first.capacity, rep.worst_second.capacity)
    assert rep.best_outage == min(rep.worst_first.outage, rep.worst_second.outage)
    assert rep.best_error == min(rep.worst_first.error, rep.worst_second.error)


@pytest.mark.parametrize("rho", range(0, 41, 5))
def test_fig10_r_scheme_wins_outage_and_error(rho):
    rep = compare_schemes(scheme_pair(FIG10.evolve(rho_s_db=float(rho))))
    assert rep.worst_first.outage < rep.worst_second.outage
    assert rep.winner_outage == Scheme.R_DFNOMA.value
    assert rep.winner_error == Scheme.R_DFNOMA.value
    # worst-user capacities coincide up to the plotted resolution
    assert rep.worst_first.capacity == pytest.approx(rep.worst_second.capacity, abs=0.05)


def test_grid_row_count_and_order():
    grid = {"alpha1": [0.6, 0.7, 0.8], "beta1": [0.1, 0.2]}
    pts = grid_points(grid, SystemConfig())
    assert len(pts) == 6
    assert [(p.alpha1, p.beta1) for p in pts[:3]] == [(0.6, 0.1), (0.6, 0.2), (0.7, 0.1)]


def test_zipped_axes():
    pts = grid_points({("alpha1", "beta1"): [(0.8, 0.2), (0.9, 0.1)], "scheme": ["R", "C"]}, SystemConfig())
    assert [(p.alpha1, p.beta1, p.scheme) for p in pts] == [
        (0.8, 0.2, Scheme.R_DFNOMA), (0.8, 0.2, Scheme.C_DFNOMA),
        (0.9, 0.1, Scheme.R_DFNOMA), (0.9, 0.1, Scheme.C_DFNOMA),
    ]


@pytest.mark.parametrize("grid", [{"alpha1": []}, {"d_sr": [1, 2]}, {("alpha1", "beta1"): [(0.8,)]}])
def test_bad_grids_rejected(grid):
    with pytest.raises(ConfigError):
        grid_points(grid, SystemConfig())


def test_invalid_grid_point_rejected():
    with pytest.raises(ConfigError):
        grid_points({"beta1": [0.2, 0.6]}, SystemConfig())


def test_one_point_sweep_equals_fairness():
    cfg = SystemConfig(rho_s_db=12.0)
    assert sweep({"rho_s_db": [12.0]}, cfg) == [fairness(cfg)]


def test_sweep_is_worker_invariant():
    grid = {"alpha1": [0.7, 0.9], "rho_s_db": [10.0, 30.0]}
    assert sweep(grid, FIG10, workers=2) == sweep(grid, FIG10)


def test_sweet_spot_is_grid_argmin():
    reports = sweep({"alpha1": [0.6, 0.75, 0.9]}, FIG10.evolve(rho_s_db=30.0))
    best = sweet_spot(reports)
    assert best.total_deviation() == min(r.total_deviation() for r in reports)
