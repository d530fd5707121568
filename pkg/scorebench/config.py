"""Configuration settings for the application.

This module contains process-level settings using Pydantic for type-safe
configuration management. Run-specific knobs live in the JSON run config
(see ``scorebench.cli.config``); only ambient concerns are kept here.
"""

import logging
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Set up logging
logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings.

    All settings are loaded from ``SCOREBENCH_``-prefixed environment variables
    or from a ``.env`` file in the working directory.
    """

    # Execution settings
    THREADS: int = Field(default=1, ge=1)  # Fallback for --threads

    # Logging settings
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None
    DEBUG: bool = False

    model_config = SettingsConfigDict(
        env_prefix="SCOREBENCH_",
        case_sensitive=False,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def __init__(self, **kwargs):
        """Initialize settings with debug logging."""
        logger.debug("Initializing Settings...")
        try:
            super().__init__(**kwargs)
            logger.debug("Settings initialized successfully")
        except Exception as e:
            logger.error(f"Error initializing Settings: {e!s}")
            raise


# Create global settings instance
try:
    settings = Settings()
except Exception as e:
    logger.error(f"Error creating global settings instance: {e!s}")
    raise
