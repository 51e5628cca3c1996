"""Utility modules for the junction lab."""

from .logging import setup_logging, get_logger
from .formatting import fmt, write_csv, write_json, to_jsonable

__all__ = [
    'setup_logging',
    'get_logger',
    'fmt',
    'write_csv',
    'write_json',
    'to_jsonable',
]
