"""Scenario parameters, validation and per-link budgets."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

PERFECT_SIC = "perfect"


class Scheme(str, enum.Enum):
    R_DFNOMA = "R_DFNOMA"
    C_DFNOMA = "C_DFNOMA"

    @classmethod
    def parse(cls, value: str | Scheme) -> Scheme:
        if isinstance(value, Scheme):
            return value
        key = str(value).strip().upper().replace("-", "_")
        aliases = {"R": "R_DFNOMA", "C": "C_DFNOMA"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigError("scheme", f"unknown scheme {value!r}") from None


class ConfigError(ValueError):
    """A scenario parameter violates one of the config invariants."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


def db_to_linear(x_db: float) -> float:
    if x_db == -math.inf:
        return 0.0
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """One operating point of the two-hop DF-NOMA link.

    ``alpha1`` and ``beta1`` are the fractions of source and relay power given
    to D1's symbol. ``alpha1`` is always stated in reversed (R-DFNOMA) form,
    i.e. above one half; the conventional scheme uses its complement
    ``1 - alpha1`` in phase one so that both schemes stay parameter matched.

    ``rho_r_db`` and ``xi_1_db`` default to ``None``, meaning "tied to"
    ``rho_s_db`` and ``xi_r_db`` respectively. SIC coefficients are in dB with
    ``-inf`` for perfect cancellation and 0 dB for none at all.
    """

    scheme: Scheme = Scheme.R_DFNOMA
    alpha1: float = 0.9
    beta1: float = 0.2
    rho_s_db: float = 20.0
    rho_r_db: float | None = None
    d_sr: float = 5.0
    d_r1: float = 1.0
    d_r2: float = 3.0
    mu: float = 10.0
    tau: float = 2.0
    xi_r_db: float = -10.0
    xi_1_db: float | None = None
    rate_target_1: float = 0.2
    rate_target_2: float = 0.1
    m1: int = 4
    m2: int = 4

    @property
    def alpha2(self) -> float:
        return 1.0 - self.alpha1

    @property
    def beta2(self) -> float:
        return 1.0 - self.beta1

    @property
    def source_split(self) -> tuple[float, float]:
        """Phase-one power fractions actually applied to (x1, x2)."""
        if self.scheme is Scheme.C_DFNOMA:
            return 1.0 - self.alpha1, self.alpha1
        return self.alpha1, 1.0 - self.alpha1

    @property
    def relay_rho_db(self) -> float:
        return self.rho_s_db if self.rho_r_db is None else self.rho_r_db

    @property
    def d1_xi_db(self) -> float:
        return self.xi_r_db if self.xi_1_db is None else self.xi_1_db

    def with_scheme(self, scheme: Scheme | str) -> SystemConfig:
        return replace(self, scheme=Scheme.parse(scheme))

    def evolve(self, **changes: Any) -> SystemConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["scheme"] = self.scheme.value
        return d


@dataclass(frozen=True)
class LinkBudget:
    """Mean channel power gains, linear transmit SNRs and linear SIC residuals."""

    sigma2_sr: float
    sigma2_r1: float
    sigma2_r2: float
    rho_s: float
    rho_r: float
    xi_r: float
    xi_1: float


def _check_finite(cfg: SystemConfig, name: str) -> None:
    value = getattr(cfg, name)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if math.isnan(value):
        raise ConfigError(name, "must not be NaN")


def validate(raw: SystemConfig) -> SystemConfig:
    """Return ``raw`` unchanged if every invariant holds, else raise ConfigError."""
    scheme = Scheme.parse(raw.scheme)
    cfg = raw if scheme is raw.scheme else replace(raw, scheme=scheme)

    for name in ("alpha1", "beta1", "rho_s_db", "d_sr", "d_r1", "d_r2", "mu", "tau",
                 "xi_r_db", "rate_target_1", "rate_target_2"):
        _check_finite(cfg, name)
    for name in ("rho_r_db", "xi_1_db"):
        if getattr(cfg, name) is not None:
            _check_finite(cfg, name)

    for name in ("alpha1", "beta1"):
        v = getattr(cfg, name)
        if not 0.0 < v < 1.0:
            raise ConfigError(name, f"power fraction must lie strictly in (0, 1), got {v}")
    # alpha1 is stored in reversed form for both schemes; C-DFNOMA applies 1 - alpha1
    if not cfg.alpha1 > 0.5:
        if scheme is Scheme.R_DFNOMA:
            raise ConfigError("alpha1", "power ordering: R-DFNOMA needs alpha1 > alpha2")
        raise ConfigError("alpha1", "power ordering: C-DFNOMA needs alpha1* = 1 - alpha1 < 0.5")
    if not cfg.beta1 < 0.5:
        raise ConfigError("beta1", "power ordering: the relay needs beta2 > beta1")

    for name in ("d_sr", "d_r1", "d_r2"):
        v = getattr(cfg, name)
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(name, f"distance must be positive and finite, got {v}")
    if not (cfg.mu > 0 and math.isfinite(cfg.mu)):
        raise ConfigError("mu", f"propagation constant must be positive, got {cfg.mu}")
    if not (cfg.tau >= 0 and math.isfinite(cfg.tau)):
        raise ConfigError("tau", f"path-loss exponent must be nonnegative, got {cfg.tau}")

    for name, v in (("rho_s_db", cfg.rho_s_db), ("rho_r_db", cfg.relay_rho_db)):
        if not math.isfinite(v):
            raise ConfigError(name, f"transmit SNR must be finite in dB, got {v}")
    for name, v in (("xi_r_db", cfg.xi_r_db), ("xi_1_db", cfg.d1_xi_db)):
        if v > 0 or v == math.inf:
            raise ConfigError(name, f"SIC residual must satisfy 0 <= xi <= 1 (<= 0 dB), got {v} dB")

    for name in ("rate_target_1", "rate_target_2"):
        v = getattr(cfg, name)
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(name, f"target rate must be positive, got {v}")

    for name in ("m1", "m2"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int) or v < 2 or v & (v - 1):
            raise ConfigError(name, f"modulation order must be a power of two >= 2, got {v!r}")
    return cfg


def derive_budget(cfg: SystemConfig) -> LinkBudget:
    return LinkBudget(
        sigma2_sr=cfg.mu * cfg.d_sr ** (-cfg.tau),
        sigma2_r1=cfg.mu * cfg.d_r1 ** (-cfg.tau),
        sigma2_r2=cfg.mu * cfg.d_r2 ** (-cfg.tau),
        rho_s=db_to_linear(cfg.rho_s_db),
        rho_r=db_to_linear(cfg.relay_rho_db),
        xi_r=db_to_linear(cfg.xi_r_db),
        xi_1=db_to_linear(cfg.d1_xi_db),
    )


# -- text serialization ----------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(SystemConfig)}
_OPTIONAL = {"rho_r_db", "xi_1_db"}
_INT_FIELDS = {"m1", "m2"}
_SIC_FIELDS = {"xi_r_db", "xi_1_db"}


def parse_field(name: str, text: Any) -> Any:
    """Convert one textual config value to the type stored in SystemConfig."""
    if name not in _FIELD_TYPES:
        raise ConfigError(name, "unknown config key")
    if not isinstance(text, str):
        return Scheme.parse(text) if name == "scheme" else text
    s = text.strip()
    if name == "scheme":
        return Scheme.parse(s)
    if name in _OPTIONAL and s.lower() in ("", "none", "tied"):
        return None
    if name in _SIC_FIELDS and s.lower() in (PERFECT_SIC, "-inf"):
        return -math.inf
    try:
        return int(s) if name in _INT_FIELDS else float(s)
    except ValueError:
        raise ConfigError(name, f"cannot parse {text!r}") from None


def config_from_mapping(values: Mapping[str, Any], base: SystemConfig | None = None) -> SystemConfig:
    base = base or SystemConfig()
    changes = {k: parse_field(k, v) for k, v in values.items()}
    return replace(base, **changes)


def format_field(name: str, value: Any) -> str:
    if value is None:
        return "tied"
    if name in _SIC_FIELDS and value == -math.inf:
        return PERFECT_SIC
    if isinstance(value, Scheme):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)
