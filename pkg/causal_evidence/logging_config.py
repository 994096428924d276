"""Structured logging configuration."""

import logging
import sys
from datetime import datetime, timedelta
from pathlib import Path

import structlog

LOG_PREFIX = "causal_evidence_"
CONSOLE_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def setup_logging(verbosity: int = 0, log_dir: str | Path | None = None):
    """Set up structured logging.

    Console output goes to stderr (stdout carries reports): WARNING by default,
    INFO with one -v, DEBUG with two. With ``log_dir`` every event is also
    written as JSON lines to a timestamped file there.
    """
    console_level = CONSOLE_LEVELS.get(verbosity, logging.DEBUG)
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(console_level)
    console_handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(console_handler)
    root.setLevel(console_level)

    removed: list[Path] = []
    log_file = None
    if log_dir is not None:
        logs_dir = Path(log_dir)
        logs_dir.mkdir(parents=True, exist_ok=True)
        removed = cleanup_old_logs(logs_dir)

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = logs_dir / f"{LOG_PREFIX}{timestamp}.log"
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(file_handler)
        root.setLevel(logging.DEBUG)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer(),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logger = structlog.get_logger()
    for path in removed:
        logger.debug("cleaned up old log", path=str(path))
    if log_file is not None:
        logger.debug("logging to file", path=str(log_file))
    return logger


def cleanup_old_logs(logs_dir: Path, max_age_days: int = 16) -> list[Path]:
    """Remove log files older than max_age_days; return the removed paths."""
    cutoff_date = datetime.now() - timedelta(days=max_age_days)
    removed = []

    for log_file in logs_dir.glob(f"{LOG_PREFIX}*.log"):
        try:
            timestamp_str = log_file.stem.replace(LOG_PREFIX, "")
            file_date = datetime.strptime(timestamp_str, "%Y%m%d_%H%M%S")

            if file_date < cutoff_date:
                log_file.unlink()
                removed.append(log_file)
        except (ValueError, OSError):
            # not one of ours
            continue
    return removed
