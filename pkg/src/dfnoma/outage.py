"""Closed-form outage probabilities of the two DF-NOMA users."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from dfnoma.config import LinkBudget, SystemConfig
from dfnoma.sinr import HopLaw, hop_laws

CERTAIN = "certain_outage"


@dataclass(frozen=True)
class OutageResult:
    op_1: float
    op_2: float
    phi_1: float
    phi_2: float
    flags: tuple[str, ...] = field(default=())


def threshold(rate_target: float) -> float:
    """SINR threshold 2**(2R) - 1; the factor 2 accounts for the two time slots."""
    return 2.0 ** (2.0 * rate_target) - 1.0


def min_sinr_cdf(phi: float, first: HopLaw, second: HopLaw) -> float:
    """P[min(SINR_A, SINR_B) < phi] for independent exponential hop gains.

    Returns exactly 1 once ``phi`` reaches either interference ceiling.
    """
    da = first.a - first.b * phi
    db = second.a - second.b * phi
    if da <= 0.0 or db <= 0.0:
        return 1.0
    ka = first.rho * first.sigma2
    kb = second.rho * second.sigma2
    if ka == 0.0 or kb == 0.0:
        return 1.0 if phi > 0 else 0.0
    return -math.expm1(-phi / (da * ka) - phi / (db * kb))


def outage(cfg: SystemConfig, budget: LinkBudget) -> OutageResult:
    laws = hop_laws(cfg, budget)
    phi_1 = threshold(cfg.rate_target_1)
    phi_2 = threshold(cfg.rate_target_2)
    flags = []
    ops = []
    for user, phi in ((1, phi_1), (2, phi_2)):
        first, second = laws[user]
        if phi >= first.ceiling or phi >= second.ceiling:
            flags.append(f"{CERTAIN}_{user}")
        ops.append(min_sinr_cdf(phi, first, second))
    return OutageResult(ops[0], ops[1], phi_1, phi_2, tuple(flags))
