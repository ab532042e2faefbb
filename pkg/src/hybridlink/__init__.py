"""Spreadsheet-to-numerics link: a cell grid, a small matrix command
language, a long-only mean-variance frontier and a hash-chained audit log
of every call between them."""

from .bridge import LinkConfig, Session, StatusResult, matlabinit
from .workbook import Workbook, load_csv, parse_ref

__version__ = "0.1.0"

__all__ = [
    "LinkConfig",
    "Session",
    "StatusResult",
    "Workbook",
    "load_csv",
    "matlabinit",
    "parse_ref",
]
