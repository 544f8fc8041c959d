"""Per-user effective SINRs and instantaneous DF rates for both schemes.

Every hop SINR here has the form ``rho*a*g / (rho*b*g + 1)`` where ``g`` is the
fading power of that hop and ``b`` carries either the un-cancelled interferer
or the SIC residual ``xi`` times the cancelled interferer's power. The
``HopLaw`` description of that form is what the closed-form modules integrate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dfnoma.channel import ChannelRealization
from dfnoma.config import LinkBudget, Scheme, SystemConfig


@dataclass(frozen=True)
class SinrTriple:
    sinr_1_hop1: np.ndarray
    sinr_2_hop1: np.ndarray
    sinr_1_hop2: np.ndarray
    sinr_2_hop2: np.ndarray


@dataclass(frozen=True)
class RatePair:
    r1: np.ndarray
    r2: np.ndarray


@dataclass(frozen=True)
class HopLaw:
    """SINR = rho*a*g/(rho*b*g + 1) with g ~ Exp(mean sigma2)."""

    a: float
    b: float
    rho: float
    sigma2: float

    @property
    def ceiling(self) -> float:
        """Interference-limited supremum a/b of the SINR (inf when b == 0)."""
        return self.a / self.b if self.b > 0 else np.inf

    def sinr(self, g):
        return self.rho * self.a * g / (self.rho * self.b * g + 1.0)


def _ratio(rho: float, a: float, b: float, g):
    return rho * a * g / (rho * b * g + 1.0)


def sinr_r_dfnoma(ch: ChannelRealization, budget: LinkBudget, cfg: SystemConfig) -> SinrTriple:
    a1, a2 = cfg.alpha1, cfg.alpha2
    b1, b2 = cfg.beta1, cfg.beta2
    g_sr, rs, rr = ch.gamma_sr, budget.rho_s, budget.rho_r
    return SinrTriple(
        # relay decodes x1 first, treating x2 as noise
        sinr_1_hop1=_ratio(rs, a1, a2, g_sr),
        sinr_2_hop1=_ratio(rs, a2, budget.xi_r * a1, g_sr),
        sinr_1_hop2=_ratio(rr, b1, budget.xi_1 * b2, ch.gamma_r1),
        sinr_2_hop2=_ratio(rr, b2, b1, ch.gamma_r2),
    )


def sinr_c_dfnoma(ch: ChannelRealization, budget: LinkBudget, cfg: SystemConfig) -> SinrTriple:
    a1, a2 = 1.0 - cfg.alpha1, cfg.alpha1  # alpha1*, alpha2*
    b1, b2 = cfg.beta1, cfg.beta2
    g_sr, rs, rr = ch.gamma_sr, budget.rho_s, budget.rho_r
    return SinrTriple(
        # relay decodes x2 first, then x1 after SIC
        sinr_1_hop1=_ratio(rs, a1, budget.xi_r * a2, g_sr),
        sinr_2_hop1=_ratio(rs, a2, a1, g_sr),
        sinr_1_hop2=_ratio(rr, b1, budget.xi_1 * b2, ch.gamma_r1),
        sinr_2_hop2=_ratio(rr, b2, b1, ch.gamma_r2),
    )


def sinr(ch: ChannelRealization, budget: LinkBudget, cfg: SystemConfig) -> SinrTriple:
    if cfg.scheme is Scheme.C_DFNOMA:
        return sinr_c_dfnoma(ch, budget, cfg)
    return sinr_r_dfnoma(ch, budget, cfg)


def achievable_rates(s: SinrTriple) -> RatePair:
    r1 = 0.5 * np.log2(1.0 + np.minimum(s.sinr_1_hop1, s.sinr_1_hop2))
    r2 = 0.5 * np.log2(1.0 + np.minimum(s.sinr_2_hop1, s.sinr_2_hop2))
    return RatePair(r1=r1, r2=r2)


def hop_laws(cfg: SystemConfig, budget: LinkBudget) -> dict[int, tuple[HopLaw, HopLaw]]:
    """(first hop, second hop) SINR laws for users 1 and 2, keyed by user."""
    p1, p2 = cfg.source_split
    b1, b2 = cfg.beta1, cfg.beta2
    rs, rr = budget.rho_s, budget.rho_r
    if cfg.scheme is Scheme.C_DFNOMA:
        first_1 = HopLaw(p1, budget.xi_r * p2, rs, budget.sigma2_sr)
        first_2 = HopLaw(p2, p1, rs, budget.sigma2_sr)
    else:
        first_1 = HopLaw(p1, p2, rs, budget.sigma2_sr)
        first_2 = HopLaw(p2, budget.xi_r * p1, rs, budget.sigma2_sr)
    return {
        1: (first_1, HopLaw(b1, budget.xi_1 * b2, rr, budget.sigma2_r1)),
        2: (first_2, HopLaw(b2, b1, rr, budget.sigma2_r2)),
    }
