"""Logging utilities for the junction lab."""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

DEFAULT_LABEL = 'junction-lab'

STDERR_FORMAT = (
    '<green>{time:HH:mm:ss.SSS}</green> | '
    '<level>{level: <8}</level> | '
    '<cyan>{extra[label]}</cyan> | '
    '<level>{message}</level>'
)
FILE_FORMAT = (
    '{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[label]} | '
    '{name}:{function}:{line} | {message}'
)


def _label(record) -> None:
    # Scenario strategies bind `scenario`, solvers and engines bind `component`.
    extra = record['extra']
    extra['label'] = extra.get('scenario') or extra.get('component') or DEFAULT_LABEL


def setup_logging(
    level: str = 'INFO',
    log_file: Optional[str] = None,
    log_format: Optional[str] = None,
) -> None:
    """Route loguru output to stderr and, optionally, a rotating file.

    Every record carries an ``extra[label]`` naming the scenario or component
    that emitted it, so custom formats may use it too.

    Args:
        level: Minimum level for both sinks
        log_file: Log file path; parent directories are created
        log_format: Replaces the stderr format only
    """
    logger.remove()
    logger.configure(patcher=_label)

    logger.add(
        sys.stderr,
        format=log_format or STDERR_FORMAT,
        level=level,
        colorize=True,
        backtrace=True,
        diagnose=False,
    )

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_file,
            format=FILE_FORMAT,
            level=level,
            rotation='10 MB',
            retention='30 days',
            compression='gz',
            backtrace=True,
            diagnose=False,
        )

    logger.debug(
        f'Logging at {level}' + (f', also to {log_file}' if log_file else '')
    )


def get_logger(name: str):
    """Logger bound to a component name."""
    return logger.bind(component=name)
