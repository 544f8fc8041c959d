"""Monte Carlo oracles for the closed forms.

Two independent paths:

* ``mc_rates_outage`` draws fading and pushes it through the SIC-residual SINR
  model, averaging DF rates and counting outage events.
* ``mc_ber`` transmits actual Gray-coded QPSK superposition frames through both
  hops with ML detection and real SIC, so SIC errors propagate on their own and
  no residual coefficient is injected.

Work is split into fixed-size shards, each with its own ``SeedSpec`` substream,
and reduced in shard order. Estimates therefore depend only on (seed, n).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from dfnoma.channel import SeedSpec, complex_normal, draw_from
from dfnoma.config import LinkBudget, Scheme, SystemConfig
from dfnoma.sinr import achievable_rates, sinr

SHARD_SIZE = 1 << 17
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_err: float
    n: int
    seed: SeedSpec

    def z_score(self, reference: float, std_err: float | None = None) -> float:
        se = self.std_err if std_err is None else std_err
        diff = self.value - reference
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / se


def mean_estimate(total: float, total_sq: float, n: int, seed: SeedSpec) -> McEstimate:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def proportion_estimate(count: int, n: int, seed: SeedSpec) -> McEstimate:
    p = count / n
    return McEstimate(p, math.sqrt(p * (1.0 - p) / n), n, seed)


def binomial_std_err(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def shard_sizes(n: int, shard_size: int = SHARD_SIZE) -> list[int]:
    full, rest = divmod(n, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def run_shards(fn: Callable, args: tuple, n: int, seed: SeedSpec,
               workers: int = 1, shard_size: int = SHARD_SIZE) -> list:
    """Evaluate ``fn(*args, size, shard_seed)`` per shard; results in shard order."""
    sizes = shard_sizes(n, shard_size)
    seeds = [seed.shard(i) for i in range(len(sizes))]
    if workers <= 1 or len(sizes) == 1:
        return [fn(*args, size, s) for size, s in zip(sizes, seeds)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args, size, s) for size, s in zip(sizes, seeds)]
        return [f.result() for f in futures]


# -- SINR-level trials ------------------------------------------------------

@dataclass(frozen=True)
class RatesOutage:
    ec_1: McEstimate
    ec_2: McEstimate
    op_1: McEstimate
    op_2: McEstimate


def _rates_shard(cfg: SystemConfig, budget: LinkBudget, size: int, seed: SeedSpec):
    ch = draw_from(seed.generator(), budget, size)
    rates = achievable_rates(sinr(ch, budget, cfg))
    r1, r2 = rates.r1, rates.r2
    return (
        float(r1.sum()), float(np.dot(r1, r1)),
        float(r2.sum()), float(np.dot(r2, r2)),
        int(np.count_nonzero(r1 < cfg.rate_target_1)),
        int(np.count_nonzero(r2 < cfg.rate_target_2)),
    )


def mc_rates_outage(cfg: SystemConfig, budget: LinkBudget, n: int, seed: SeedSpec,
                    workers: int = 1, shard_size: int = SHARD_SIZE) -> RatesOutage:
    if n < 1:
        raise ValueError("n must be positive")
    parts = run_shards(_rates_shard, (cfg, budget), n, seed, workers, shard_size)
    acc = [0.0, 0.0, 0.0, 0.0, 0, 0]
    for part in parts:
        for i, v in enumerate(part):
            acc[i] += v
    return RatesOutage(
        ec_1=mean_estimate(acc[0], acc[1], n, seed),
        ec_2=mean_estimate(acc[2], acc[3], n, seed),
        op_1=proportion_estimate(acc[4], n, seed),
        op_2=proportion_estimate(acc[5], n, seed),
    )


# -- symbol-level QPSK link ---------------------------------------------------

def qpsk_modulate(bits: np.ndarray) -> np.ndarray:
    """Gray QPSK with unit energy; ``bits`` has shape (2, n) for (I, Q)."""
    return ((1.0 - 2.0 * bits[0]) + 1j * (1.0 - 2.0 * bits[1])) * _INV_SQRT2


def qpsk_ml(r: np.ndarray, gain: np.ndarray) -> np.ndarray:
    """argmin_k |r - gain * x_k|^2 over the QPSK alphabet, returned as bits.

    The scaled alphabet is a rotated square, so after de-rotating by
    conj(gain) the nearest point is picked per quadrature by sign.
    """
    z = r * np.conj(gain)
    return np.stack([(z.real < 0).astype(np.int8), (z.imag < 0).astype(np.int8)])


def _sic_pair(y, gain_hi, gain_lo, true_hi=None):
    """Detect the high-power symbol, cancel it, then detect the low-power one.

    With ``true_hi`` given, the cancellation uses it instead of the decision
    (genie SIC diagnostic).
    """
    hi_bits = qpsk_ml(y, gain_hi)
    cancel = qpsk_modulate(hi_bits) if true_hi is None else true_hi
    lo_bits = qpsk_ml(y - gain_hi * cancel, gain_lo)
    return hi_bits, lo_bits


def _ber_shard(cfg: SystemConfig, budget: LinkBudget, genie: bool, size: int, seed: SeedSpec):
    rng = seed.generator()
    ch = draw_from(rng, budget, size)
    bits = rng.integers(0, 2, size=(4, size), dtype=np.int8)
    b1, b2 = bits[:2], bits[2:]
    x1, x2 = qpsk_modulate(b1), qpsk_modulate(b2)

    p1, p2 = cfg.source_split
    amp_s = math.sqrt(budget.rho_s)
    y_r = ch.h_sr * amp_s * (math.sqrt(p1) * x1 + math.sqrt(p2) * x2) + complex_normal(rng, 1.0, size)
    g1 = ch.h_sr * (amp_s * math.sqrt(p1))
    g2 = ch.h_sr * (amp_s * math.sqrt(p2))
    if cfg.scheme is Scheme.C_DFNOMA:
        hat2, hat1 = _sic_pair(y_r, g2, g1, x2 if genie else None)
    else:
        hat1, hat2 = _sic_pair(y_r, g1, g2, x1 if genie else None)

    xr1, xr2 = qpsk_modulate(hat1), qpsk_modulate(hat2)
    amp_r = math.sqrt(budget.rho_r)
    s_r = amp_r * (math.sqrt(cfg.beta1) * xr1 + math.sqrt(cfg.beta2) * xr2)
    y_1 = ch.h_r1 * s_r + complex_normal(rng, 1.0, size)
    y_2 = ch.h_r2 * s_r + complex_normal(rng, 1.0, size)

    tilde2 = qpsk_ml(y_2, ch.h_r2 * (amp_r * math.sqrt(cfg.beta2)))
    _, tilde1 = _sic_pair(
        y_1,
        ch.h_r1 * (amp_r * math.sqrt(cfg.beta2)),
        ch.h_r1 * (amp_r * math.sqrt(cfg.beta1)),
        xr2 if genie else None,
    )
    return int(np.count_nonzero(tilde1 != b1)), int(np.count_nonzero(tilde2 != b2))


def mc_ber(cfg: SystemConfig, budget: LinkBudget, n_symbols: int, seed: SeedSpec,
           workers: int = 1, genie: bool = False,
           shard_size: int = SHARD_SIZE) -> tuple[McEstimate, McEstimate]:
    """End-to-end bit error rates of D1 and D2 over ``n_symbols`` QPSK frames.

    Each user's estimate counts ``2 * n_symbols`` bits.
    """
    if cfg.m1 != 4 or cfg.m2 != 4:
        raise ValueError("symbol-level simulation implements QPSK (M1 = M2 = 4) only")
    if n_symbols < 1:
        raise ValueError("n_symbols must be positive")
    parts = run_shards(_ber_shard, (cfg, budget, genie), n_symbols, seed, workers, shard_size)
    e1 = sum(p[0] for p in parts)
    e2 = sum(p[1] for p in parts)
    n_bits = 2 * n_symbols
    return proportion_estimate(e1, n_bits, seed), proportion_estimate(e2, n_bits, seed)
