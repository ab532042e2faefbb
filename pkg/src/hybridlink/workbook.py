"""Single-sheet cell grid with A1 addressing, named ranges and CSV ingestion.

The grid stores values only (numbers, text, or nothing). All computation
happens in the kernel; the workbook is the data store that both sides of
the link read from and write to.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, Optional, Tuple, Union

import numpy as np

from .values import StringList, Value, as_matrix

CellValue = Union[float, str]

_A1_RE = re.compile(r"^\$?([A-Za-z]+)\$?([1-9][0-9]*)$")
_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_NUMBER_RE = re.compile(r"^[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$")


class WorkbookError(Exception):
    """Base class for grid-side failures."""


class RefError(WorkbookError):
    """A reference or name could not be parsed or resolved."""


class RangeTypeError(WorkbookError):
    """A range mixes text and numbers."""


class MissingDataError(WorkbookError):
    """A numeric range contains an empty cell."""


def col_to_letters(col: int) -> str:
    if col < 1:
        raise ValueError(f"column index must be >= 1, got {col}")
    letters = []
    while col > 0:
        col, rem = divmod(col - 1, 26)
        letters.append(chr(ord("A") + rem))
    return "".join(reversed(letters))


def letters_to_col(letters: str) -> int:
    if not letters or not letters.isalpha() or not letters.isascii():
        raise RefError(f"invalid column letters {letters!r}")
    col = 0
    for ch in letters.upper():
        col = col * 26 + (ord(ch) - ord("A") + 1)
    return col


@dataclass(frozen=True, order=True)
class CellRef:
    row: int
    col: int

    def __post_init__(self):
        if self.row < 1 or self.col < 1:
            raise ValueError(f"cell indices are 1-based, got row={self.row} col={self.col}")

    def __str__(self) -> str:
        return f"{col_to_letters(self.col)}{self.row}"

    def offset(self, drow: int, dcol: int) -> "CellRef":
        return CellRef(self.row + drow, self.col + dcol)


@dataclass(frozen=True)
class RangeRef:
    start: CellRef
    end: CellRef

    def __post_init__(self):
        # normalize so start is the top-left corner
        r0, r1 = sorted((self.start.row, self.end.row))
        c0, c1 = sorted((self.start.col, self.end.col))
        object.__setattr__(self, "start", CellRef(r0, c0))
        object.__setattr__(self, "end", CellRef(r1, c1))

    @classmethod
    def single(cls, cell: CellRef) -> "RangeRef":
        return cls(cell, cell)

    @classmethod
    def from_shape(cls, anchor: CellRef, rows: int, cols: int) -> "RangeRef":
        return cls(anchor, anchor.offset(rows - 1, cols - 1))

    @property
    def height(self) -> int:
        return self.end.row - self.start.row + 1

    @property
    def width(self) -> int:
        return self.end.col - self.start.col + 1

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def cells(self) -> Iterator[CellRef]:
        """Cells in row-major order."""
        for r in range(self.start.row, self.end.row + 1):
            for c in range(self.start.col, self.end.col + 1):
                yield CellRef(r, c)

    def __contains__(self, cell: CellRef) -> bool:
        return (self.start.row <= cell.row <= self.end.row
                and self.start.col <= cell.col <= self.end.col)

    def __str__(self) -> str:
        if self.start == self.end:
            return str(self.start)
        return f"{self.start}:{self.end}"


def parse_cell(text: str) -> CellRef:
    token = text.strip()
    m = _A1_RE.match(token)
    if not m:
        raise RefError(f"malformed cell reference {token!r}")
    return CellRef(int(m.group(2)), letters_to_col(m.group(1)))


def parse_ref(text: str, names: Optional[Dict[str, RangeRef]] = None) -> RangeRef:
    """Parse an A1 cell, an A1 range ("B4:D9") or a defined name.

    Names are looked up before A1 interpretation. Sheet-qualified
    references are rejected since the workbook has one sheet.
    """
    if text is None or not text.strip():
        raise RefError("empty reference")
    token = text.strip()
    if names and token in names:
        return names[token]
    if "!" in token:
        raise RefError(f"sheet-qualified reference {token!r} is not supported (single sheet)")
    parts = token.split(":")
    if len(parts) == 1:
        return RangeRef.single(parse_cell(parts[0]))
    if len(parts) == 2:
        if not parts[0].strip() or not parts[1].strip():
            raise RefError(f"incomplete range {token!r}")
        return RangeRef(parse_cell(parts[0]), parse_cell(parts[1]))
    raise RefError(f"malformed range {token!r}")


def is_a1(text: str) -> bool:
    try:
        parse_ref(text)
    except RefError:
        return False
    return True


def _parse_number(field: str) -> Optional[float]:
    s = field.strip()
    if not _NUMBER_RE.match(s):
        return None
    value = float(s)
    if not np.isfinite(value):
        return None
    return value


class Workbook:
    """Sparse cell grid. Missing keys are empty cells."""

    def __init__(self) -> None:
        self.cells: Dict[CellRef, CellValue] = {}
        self.names: Dict[str, RangeRef] = {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Workbook):
            return NotImplemented
        return self.cells == other.cells and self.names == other.names

    def copy(self) -> "Workbook":
        wb = Workbook()
        wb.cells = dict(self.cells)
        wb.names = dict(self.names)
        return wb

    def __getitem__(self, ref: Union[str, CellRef]) -> Optional[CellValue]:
        if isinstance(ref, str):
            ref = parse_cell(ref)
        return self.cells.get(ref)

    def __setitem__(self, ref: Union[str, CellRef], value: Optional[CellValue]) -> None:
        if isinstance(ref, str):
            ref = parse_cell(ref)
        if value is None:
            self.cells.pop(ref, None)
        elif isinstance(value, str):
            self.cells[ref] = value
        else:
            value = float(value)
            if not np.isfinite(value):
                raise ValueError(f"non-finite value for {ref}")
            self.cells[ref] = value

    @property
    def extent(self) -> Tuple[int, int]:
        """(rows, cols) of the used area anchored at A1."""
        if not self.cells:
            return 0, 0
        return max(c.row for c in self.cells), max(c.col for c in self.cells)

    def resolve(self, text: str) -> RangeRef:
        return parse_ref(text, self.names)

    def define_name(self, name: str, ref: Union[str, RangeRef]) -> None:
        if not _NAME_RE.match(name or ""):
            raise RefError(f"invalid name {name!r}")
        if is_a1(name):
            raise RefError(f"name {name!r} is ambiguous with an A1 reference")
        if isinstance(ref, str):
            ref = parse_ref(ref)
        self.names[name] = ref

    def read_range(self, ref: Union[str, RangeRef]) -> Value:
        if isinstance(ref, str):
            ref = self.resolve(ref)
        values = []
        kinds = set()
        for cell in ref.cells():
            v = self.cells.get(cell)
            if v is None:
                raise MissingDataError(f"empty cell {cell} in range {ref}")
            kinds.add(str if isinstance(v, str) else float)
            if len(kinds) > 1:
                raise RangeTypeError(f"range {ref} mixes text and numbers (at {cell})")
            values.append(v)
        if kinds == {str}:
            return StringList(values)
        return as_matrix(np.array(values, dtype=float).reshape(ref.shape))

    def write_matrix(self, anchor: Union[str, CellRef], value) -> RangeRef:
        if isinstance(anchor, str):
            anchor = parse_cell(anchor)
        m = as_matrix(value)
        rows, cols = m.shape
        for i in range(rows):
            for j in range(cols):
                self.cells[CellRef(anchor.row + i, anchor.col + j)] = float(m[i, j])
        return RangeRef.from_shape(anchor, rows, cols)

    def digest(self) -> str:
        items = sorted(self.cells.items())
        payload = json.dumps(
            {
                "cells": [[c.row, c.col, v] for c, v in items],
                "names": sorted([k, str(r)] for k, r in self.names.items()),
            },
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_csv(self) -> str:
        rows, cols = self.extent
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for r in range(1, rows + 1):
            line = []
            for c in range(1, cols + 1):
                v = self.cells.get(CellRef(r, c))
                if v is None:
                    line.append("")
                elif isinstance(v, str):
                    line.append(v)
                else:
                    line.append(repr(v))
            writer.writerow(line)
        return buf.getvalue()

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8", newline="")


def parse_csv(text: str) -> Workbook:
    wb = Workbook()
    for r, row in enumerate(csv.reader(io.StringIO(text, newline="")), start=1):
        for c, field in enumerate(row, start=1):
            if field == "":
                continue
            num = _parse_number(field)
            wb.cells[CellRef(r, c)] = field if num is None else num
    return wb


def load_csv(path) -> Workbook:
    with open(path, newline="", encoding="utf-8-sig") as fh:
        return parse_csv(fh.read())


# module-level spellings of the grid operations
def read_range(wb: Workbook, ref) -> Value:
    return wb.read_range(ref)


def write_matrix(wb: Workbook, anchor, value) -> RangeRef:
    return wb.write_matrix(anchor, value)


def define_name(wb: Workbook, name: str, ref) -> None:
    wb.define_name(name, ref)
