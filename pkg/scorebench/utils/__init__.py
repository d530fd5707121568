"""Shared utilities."""

from .logging import log_duration, setup_logging
from .seeding import derive_rng, derive_seed_sequence

__all__ = ["derive_rng", "derive_seed_sequence", "log_duration", "setup_logging"]
