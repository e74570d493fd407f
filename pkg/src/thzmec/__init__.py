"""NOMA-assisted cooperative THz-SIMO mobile-edge-computing uplink simulator."""

from thzmec.errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    NonConvergenceError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "InfeasibleError",
    "NonConvergenceError",
    "__version__",
]
