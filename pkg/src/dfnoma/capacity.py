"""Ergodic capacity: exact single integrals by adaptive quadrature, high-SNR bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from dfnoma.config import LinkBudget, SystemConfig, derive_budget
from dfnoma.sinr import HopLaw, hop_laws

INTEGRATION_CAP = 1e3
DEFAULT_TOL = 1e-8
UNBOUNDED = "unbounded"
DEGENERATE = "degenerate"


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class EcResult:
    ec_1: float
    ec_2: float
    bound_1: float
    bound_2: float
    eta_1: float
    eta_2: float
    err_1: float = 0.0
    err_2: float = 0.0
    flags: tuple[str, ...] = field(default=())

    @property
    def sum_rate(self) -> float:
        return self.ec_1 + self.ec_2

    @property
    def limit_1(self) -> float:
        return saturation_rate(self.eta_1)

    @property
    def limit_2(self) -> float:
        return saturation_rate(self.eta_2)


def _upper_limit(first: HopLaw, second: HopLaw) -> float:
    return min(first.ceiling, second.ceiling, INTEGRATION_CAP)


def _integrand(first: HopLaw, second: HopLaw):
    # Survival of min(SINR_A, SINR_B) at z over (1 + z); zero past either ceiling.
    a, b, ka = first.a, first.b, first.rho * first.sigma2
    c, d, kb = second.a, second.b, second.rho * second.sigma2

    def f(z: float) -> float:
        da = a - b * z
        db = c - d * z
        if da <= 0.0 or db <= 0.0:
            return 0.0
        return math.exp(-z / (da * ka) - z / (db * kb)) / (1.0 + z)

    return f


def user_capacity(first: HopLaw, second: HopLaw, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Ergodic DF rate of one user in bits/s/Hz and the quadrature error estimate."""
    upper = _upper_limit(first, second)
    if first.rho * first.sigma2 == 0.0 or second.rho * second.sigma2 == 0.0:
        return 0.0, 0.0
    out = integrate.quad(_integrand(first, second), 0.0, upper, epsabs=tol, epsrel=0.0,
                         limit=1000, full_output=1)
    value, abserr = out[0], out[1]
    if len(out) > 3 and abserr > 10 * tol:
        raise QuadratureError(f"quadrature did not reach tol={tol:g} (estimate {abserr:g}): {out[3]}")
    scale = 1.0 / (2.0 * math.log(2.0))
    return value * scale, abserr * scale


def ec_exact(cfg: SystemConfig, budget: LinkBudget, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    laws = hop_laws(cfg, budget)
    return user_capacity(*laws[1], tol=tol)[0], user_capacity(*laws[2], tol=tol)[0]


def eta(cfg: SystemConfig, budget: LinkBudget) -> tuple[float, float]:
    """High-SNR SINR ceilings: min over the two hops of a/b, per user."""
    laws = hop_laws(cfg, budget)
    return (min(laws[1][0].ceiling, laws[1][1].ceiling),
            min(laws[2][0].ceiling, laws[2][1].ceiling))


def saturation_rate(eta_value: float) -> float:
    """Exact rho -> inf limit of the ergodic rate, 0.5*log2(1 + eta)."""
    return 0.5 * math.log2(1.0 + eta_value) if math.isfinite(eta_value) else math.inf


def ec_bound(cfg: SystemConfig, budget: LinkBudget):
    """Closed-form high-SNR bounds 0.5*log2(eta_i).

    Returns ``(bound_1, bound_2, eta_1, eta_2, flags)``. A bound is ``inf``
    with the ``"unbounded"`` flag when perfect SIC removes every ceiling on
    that user, and is clamped at 0 with the ``"degenerate"`` flag when eta <= 1.
    """
    etas = eta(cfg, budget)
    bounds = []
    flags = []
    for user, e in zip((1, 2), etas):
        if not math.isfinite(e):
            bounds.append(math.inf)
            flags.append(f"{UNBOUNDED}_{user}")
        elif e <= 1.0:
            bounds.append(0.0)
            flags.append(f"{DEGENERATE}_{user}")
        else:
            bounds.append(0.5 * math.log2(e))
    return bounds[0], bounds[1], etas[0], etas[1], tuple(flags)


def evaluate(cfg: SystemConfig, budget: LinkBudget, tol: float = DEFAULT_TOL) -> EcResult:
    laws = hop_laws(cfg, budget)
    c1, e1 = user_capacity(*laws[1], tol=tol)
    c2, e2 = user_capacity(*laws[2], tol=tol)
    b1, b2, eta1, eta2, flags = ec_bound(cfg, budget)
    return EcResult(c1, c2, b1, b2, eta1, eta2, e1, e2, flags)


def ec_curve(cfg: SystemConfig, rho_db: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """(len(rho_db), 2) array of (C1, C2) with rho_s = rho_r swept together."""
    out = np.empty((len(rho_db), 2))
    for i, r in enumerate(rho_db):
        c = cfg.evolve(rho_s_db=float(r), rho_r_db=None)
        out[i] = ec_exact(c, derive_budget(c), tol=tol)
    return out
