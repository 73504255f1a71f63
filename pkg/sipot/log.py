from __future__ import annotations

import logging

from sipot.config import get_settings

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def configure_logging(level: str | None = None, filename: str | None = None) -> None:
    """Install one handler on the ``sipot`` logger.

    With a file configured, stdout and stderr stay free for command output.
    """
    settings = get_settings()
    level = (level or settings.log_level).upper()
    filename = filename or settings.log_file

    logger = logging.getLogger("sipot")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    if filename:
        handler: logging.Handler = logging.FileHandler(filename, mode="a", encoding="utf-8")
    else:
        handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
