"""Closed-form bit-error probabilities for QPSK/QPSK superposition over Rayleigh hops.

A conditional BEP is written as ``sum_q w_q * Q(sqrt(2 * nu_q * rho * g))``;
averaging over an exponential ``g`` with mean ``sigma2`` gives
``sum_q w_q/2 * (1 - sqrt(nu_q*rho*sigma2 / (1 + nu_q*rho*sigma2)))``.

Tables are built by role: ``p_des`` is the power fraction of the symbol being
decoded and ``p_int`` the fraction of the other user's symbol on that hop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from dfnoma.config import LinkBudget, Scheme, SystemConfig

SUPPORTED_ORDER = 4


class UnsupportedModulationError(ValueError):
    pass


def q_function(z):
    """Gaussian tail probability Q(z) = 0.5*erfc(z/sqrt(2))."""
    return 0.5 * special.erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))


@dataclass(frozen=True)
class BepCoefficientTable:
    weights: tuple[float, ...]
    scales: tuple[float, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.scales):
            raise ValueError("weights and scales must have equal length")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)!r}")
        if any(v < 0 for v in self.scales):
            raise ValueError("argument scales must be nonnegative")

    @property
    def length(self) -> int:
        return len(self.weights)

    def conditional(self, snr_gain):
        """BEP given the instantaneous product rho*g (array friendly)."""
        x = np.asarray(snr_gain, dtype=float)
        return sum(w * q_function(np.sqrt(2.0 * v * x)) for w, v in zip(self.weights, self.scales))


def far_user_table(p_des: float, p_int: float) -> BepCoefficientTable:
    """Higher-power symbol decoded directly, the other symbol left as noise."""
    sd, si = math.sqrt(p_des), math.sqrt(p_int)
    return BepCoefficientTable(
        weights=(0.5, 0.5),
        scales=((sd - si) ** 2 / 2, (sd + si) ** 2 / 2),
    )


def near_user_table(p_des: float, p_int: float) -> BepCoefficientTable:
    """Lower-power symbol decoded after SIC of the higher-power one.

    Per quadrature branch with desired bit b and interferer bit a: a correct
    SIC leaves ``sqrt(p_des)``, a wrong one leaves ``2*sqrt(p_int) +- sqrt(p_des)``.
    Summing both cases over a != b and a == b yields the five terms below.
    """
    sd, si = math.sqrt(p_des), math.sqrt(p_int)
    return BepCoefficientTable(
        weights=(1.0, 0.5, -0.5, -0.5, 0.5),
        scales=(
            p_des / 2,
            (sd - si) ** 2 / 2,
            (sd + si) ** 2 / 2,
            (2 * si - sd) ** 2 / 2,
            (2 * si + sd) ** 2 / 2,
        ),
    )


@dataclass(frozen=True)
class HopTables:
    user1_hop1: BepCoefficientTable
    user2_hop1: BepCoefficientTable
    user1_hop2: BepCoefficientTable
    user2_hop2: BepCoefficientTable


def build_tables(cfg: SystemConfig) -> HopTables:
    if cfg.m1 != SUPPORTED_ORDER or cfg.m2 != SUPPORTED_ORDER:
        raise UnsupportedModulationError(
            f"BEP tables exist only for M1 = M2 = 4, got M1={cfg.m1}, M2={cfg.m2}")
    p1, p2 = cfg.source_split
    b1, b2 = cfg.beta1, cfg.beta2
    if cfg.scheme is Scheme.C_DFNOMA:
        hop1 = (near_user_table(p1, p2), far_user_table(p2, p1))
    else:
        hop1 = (far_user_table(p1, p2), near_user_table(p2, p1))
    return HopTables(
        user1_hop1=hop1[0],
        user2_hop1=hop1[1],
        user1_hop2=near_user_table(b1, b2),
        user2_hop2=far_user_table(b2, b1),
    )


def abep_hop(table: BepCoefficientTable, rho: float, sigma2: float) -> float:
    """Fading-averaged BEP of one hop."""
    total = 0.0
    for w, v in zip(table.weights, table.scales):
        x = v * rho * sigma2
        total += 0.5 * w * (1.0 - math.sqrt(x / (1.0 + x)))
    assert -1e-12 <= total <= 0.5 + 1e-12, f"hop BEP {total} outside [0, 1/2]"
    return min(max(total, 0.0), 0.5)


def combine(p_first: float, p_second: float) -> float:
    """End-to-end bit error of two independent binary hops (xor of error events)."""
    return p_first * (1.0 - p_second) + (1.0 - p_first) * p_second


@dataclass(frozen=True)
class BepResult:
    bep_1_hop1: float
    bep_2_hop1: float
    bep_1_hop2: float
    bep_2_hop2: float
    bep_e2e_1: float
    bep_e2e_2: float

    @property
    def bep_hop(self) -> tuple[float, float, float, float]:
        return self.bep_1_hop1, self.bep_2_hop1, self.bep_1_hop2, self.bep_2_hop2


def bep_e2e(cfg: SystemConfig, budget: LinkBudget) -> BepResult:
    t = build_tables(cfg)
    p11 = abep_hop(t.user1_hop1, budget.rho_s, budget.sigma2_sr)
    p21 = abep_hop(t.user2_hop1, budget.rho_s, budget.sigma2_sr)
    p12 = abep_hop(t.user1_hop2, budget.rho_r, budget.sigma2_r1)
    p22 = abep_hop(t.user2_hop2, budget.rho_r, budget.sigma2_r2)
    return BepResult(p11, p21, p12, p22, combine(p11, p12), combine(p21, p22))
