"""Proportional-fairness indexes, worst-user scheme comparison and grid sweeps."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from dfnoma import bep, capacity, outage
from dfnoma.config import (
    ConfigError,
    LinkBudget,
    Scheme,
    SystemConfig,
    derive_budget,
    validate,
)
from dfnoma.montecarlo import McEstimate

UNDERFLOW = 1e-12
SWEEP_AXES = ("scheme", "rho_s_db", "alpha1", "beta1", "xi_r_db", "rate_target_1", "rate_target_2")
KPIS = ("c", "o", "e")


def pf_ratio(num: float, den: float) -> tuple[float, bool]:
    """Ratio num/den, flagged as extreme when either side underflows."""
    if num is None or den is None:
        return math.nan, True
    if den < UNDERFLOW or num < UNDERFLOW:
        if den < UNDERFLOW and num < UNDERFLOW:
            return math.nan, True
        return (math.inf if den < UNDERFLOW else 0.0), True
    return num / den, False


def deviation(pf: float) -> float:
    """|log PF|: kappa and 1/kappa are equally unfair."""
    if math.isnan(pf):
        return math.nan
    if pf == 0.0 or math.isinf(pf):
        return math.inf
    return abs(math.log(pf))


def folded(pf: float) -> float:
    """max(PF, 1/PF), the "times better" reading of a fairness index."""
    return math.exp(deviation(pf))


def ratio_estimate(a: McEstimate, b: McEstimate) -> tuple[float, float]:
    """Delta-method ratio of two MC estimates treated as independent."""
    if b.value == 0.0:
        return math.nan, math.nan
    if a.value == 0.0:
        return 0.0, a.std_err / abs(b.value)
    r = a.value / b.value
    return r, abs(r) * math.hypot(a.std_err / a.value, b.std_err / b.value)


@dataclass(frozen=True)
class KpiReport:
    scheme: Scheme
    rho_s_db: float
    alpha1: float
    beta1: float
    xi_r_db: float
    rate_target_1: float
    rate_target_2: float
    ec_1: float
    ec_2: float
    op_1: float
    op_2: float
    bep_1: float | None
    bep_2: float | None
    pf_c: float
    pf_o: float
    pf_e: float
    flags: tuple[str, ...] = ()
    mc: Mapping[str, Any] = field(default_factory=dict)

    @property
    def dev_c(self) -> float:
        return deviation(self.pf_c)

    @property
    def dev_o(self) -> float:
        return deviation(self.pf_o)

    @property
    def dev_e(self) -> float:
        return deviation(self.pf_e)

    def pf(self, kpi: str) -> float:
        return getattr(self, f"pf_{kpi}")

    def total_deviation(self, kpis: Iterable[str] = KPIS) -> float:
        return sum(deviation(self.pf(k)) for k in kpis)


def fairness(cfg: SystemConfig, budget: LinkBudget | None = None) -> KpiReport:
    budget = budget or derive_budget(cfg)
    ec = capacity.evaluate(cfg, budget)
    op = outage.outage(cfg, budget)
    flags = list(ec.flags) + list(op.flags)
    try:
        be = bep.bep_e2e(cfg, budget)
        e1, e2 = be.bep_e2e_1, be.bep_e2e_2
    except bep.UnsupportedModulationError:
        e1 = e2 = None
        flags.append("bep_unsupported")
    pfs = {}
    for kpi, (a, b) in zip(KPIS, ((ec.ec_1, ec.ec_2), (op.op_1, op.op_2), (e1, e2))):
        pfs[kpi], extreme = pf_ratio(a, b)
        if extreme:
            flags.append(f"pf_{kpi}_extreme")
    return KpiReport(
        scheme=cfg.scheme,
        rho_s_db=cfg.rho_s_db,
        alpha1=cfg.alpha1,
        beta1=cfg.beta1,
        xi_r_db=cfg.xi_r_db,
        rate_target_1=cfg.rate_target_1,
        rate_target_2=cfg.rate_target_2,
        ec_1=ec.ec_1, ec_2=ec.ec_2,
        op_1=op.op_1, op_2=op.op_2,
        bep_1=e1, bep_2=e2,
        pf_c=pfs["c"], pf_o=pfs["o"], pf_e=pfs["e"],
        flags=tuple(flags),
    )


# -- scheme comparison ---------------------------------------------------------

TIE = "tie"


@dataclass(frozen=True)
class WorstUser:
    capacity: float
    outage: float
    error: float | None


@dataclass(frozen=True)
class ComparisonReport:
    first: SystemConfig
    second: SystemConfig
    worst_first: WorstUser
    worst_second: WorstUser
    best_capacity: float
    best_outage: float
    best_error: float | None
    winner_capacity: str
    winner_outage: str
    winner_error: str


def worst_user(report: KpiReport) -> WorstUser:
    err = None if report.bep_1 is None else max(report.bep_1, report.bep_2)
    return WorstUser(min(report.ec_1, report.ec_2), max(report.op_1, report.op_2), err)


def _winner(a: float, b: float, better, labels: tuple[str, str]) -> str:
    if a is None or b is None:
        return ""
    if math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300):
        return TIE
    return labels[0] if better(a, b) == a else labels[1]


def _labels(first: SystemConfig, second: SystemConfig) -> tuple[str, str]:
    if first.scheme is not second.scheme:
        return first.scheme.value, second.scheme.value
    return "first", "second"


def compare_schemes(pair: tuple[SystemConfig, SystemConfig]) -> ComparisonReport:
    """Worst-user metrics per scheme and the cross-scheme max-of-min / min-of-max."""
    first, second = pair
    w1 = worst_user(fairness(first))
    w2 = worst_user(fairness(second))
    labels = _labels(first, second)
    best_err = None if w1.error is None or w2.error is None else min(w1.error, w2.error)
    return ComparisonReport(
        first=first,
        second=second,
        worst_first=w1,
        worst_second=w2,
        best_capacity=max(w1.capacity, w2.capacity),
        best_outage=min(w1.outage, w2.outage),
        best_error=best_err,
        winner_capacity=_winner(w1.capacity, w2.capacity, max, labels),
        winner_outage=_winner(w1.outage, w2.outage, min, labels),
        winner_error=_winner(w1.error, w2.error, min, labels),
    )


def scheme_pair(cfg: SystemConfig) -> tuple[SystemConfig, SystemConfig]:
    """Parameter-matched (R-DFNOMA, C-DFNOMA) configs; C uses 1 - alpha1 in phase one."""
    return cfg.with_scheme(Scheme.R_DFNOMA), cfg.with_scheme(Scheme.C_DFNOMA)


# -- sweeps --------------------------------------------------------------------

def _axis_names(key: str | tuple[str, ...]) -> tuple[str, ...]:
    return (key,) if isinstance(key, str) else tuple(key)


def grid_points(grid: Mapping[Any, Sequence[Any]], template: SystemConfig) -> list[SystemConfig]:
    """Cartesian product of the grid axes applied to ``template``, in axis order.

    A key may also be a tuple of axis names whose values are tuples; such
    zipped axes vary together (e.g. paired ``alpha1``/``beta1`` settings).
    """
    if not grid:
        raise ValueError("grid has no axes")
    for key, values in grid.items():
        names = _axis_names(key)
        for axis in names:
            if axis not in SWEEP_AXES:
                raise ConfigError(axis, f"cannot sweep over {axis!r}; allowed axes: {', '.join(SWEEP_AXES)}")
        if len(values) == 0:
            raise ConfigError(",".join(names), "grid axis has no values")
        if len(names) > 1 and any(len(v) != len(names) for v in values):
            raise ConfigError(",".join(names), "zipped axis values must match the number of axes")
    keys = list(grid)
    points = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        changes: dict[str, Any] = {}
        for key, value in zip(keys, combo):
            names = _axis_names(key)
            changes.update(zip(names, value if len(names) > 1 else (value,)))
        if "scheme" in changes:
            changes["scheme"] = Scheme.parse(changes["scheme"])
        points.append(validate(template.evolve(**changes)))
    return points


def sweep(grid: Mapping[Any, Sequence[Any]], template: SystemConfig, workers: int = 1) -> list[KpiReport]:
    points = grid_points(grid, template)
    if workers <= 1:
        return [fairness(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fairness, points))


def sweet_spot(reports: Sequence[KpiReport], kpis: Iterable[str] = KPIS) -> KpiReport:
    """Grid point minimising the summed |log PF| over ``kpis``.

    A reading aid over the evaluated grid, not an optimiser.
    """
    kpis = tuple(kpis)

    def key(r: KpiReport) -> float:
        d = r.total_deviation(kpis)
        return math.inf if math.isnan(d) else d

    return min(reports, key=key)
