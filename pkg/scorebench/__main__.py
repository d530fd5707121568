"""Main entry point for ``python -m scorebench``."""

import logging
import sys

from .cli.app import app

logger = logging.getLogger(__name__)

if __name__ == "__main__":
    try:
        app(prog_name="scorebench")
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)
