"""chemoduo: invasion rates and long-time behavior for two-environment
chemostat competition, in two couplings of the same pair of vessels —
random switching (a piecewise deterministic Markov process) and spatial
exchange (a two-vessel gradostat)."""

__version__ = "0.1.0"

from .config import (
    ConfigError,
    DuoConfig,
    MonodParams,
    VesselParams,
    load_config,
    parse_config_text,
    save_config,
)
from .core import (
    AveragedVessel,
    IntegrationError,
    Trajectory,
    averaged_chemostat,
    break_even,
    simulate_simple_chemostat,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DuoConfig",
    "MonodParams",
    "VesselParams",
    "load_config",
    "parse_config_text",
    "save_config",
    "AveragedVessel",
    "IntegrationError",
    "Trajectory",
    "averaged_chemostat",
    "break_even",
    "simulate_simple_chemostat",
]
