"""Steady-state spectroscopy, state discrimination and sideband cooling of
three-level atoms driven by two lasers."""

from .params import ConfigError, SystemConfig, load_config, make_config
from .obe import build_liouvillian, evolve, steady_state

__all__ = ["ConfigError", "SystemConfig", "build_liouvillian", "evolve", "load_config",
           "make_config", "steady_state"]
