"""Link-level evaluation of two-hop decode-forward relaying NOMA with imperfect SIC.

Closed-form ergodic capacity, outage and bit-error expressions for the reversed
(R-DFNOMA) and conventional (C-DFNOMA) power-allocation orderings, a seeded
Monte Carlo engine to cross-check them, and proportional-fairness sweeps.
"""

from dfnoma.config import (
    ConfigError,
    LinkBudget,
    Scheme,
    SystemConfig,
    derive_budget,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "LinkBudget",
    "Scheme",
    "SystemConfig",
    "derive_budget",
    "validate",
    "__version__",
]
