"""Text and JSON formats for (partial) stochastic matrices.

Text format::

    # comment lines start with '#'
    3
    0.5 ? ?
    ? 0 ?
    ? ? 0.25

Line one holds ``n``; each following line holds ``n`` tokens, either a
decimal literal with at most 17 significant digits or ``?`` for a free
cell.  The JSON mirror is ``{"n": 3, "rows": [[0.5, "?", "?"], ...]}``.
Floats are written with ``repr``, the shortest string that round-trips.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ParseError
from .markov import StochasticMatrix
from .partial import FREE, PartialStochasticMatrix, _is_free, validate_partial

_DECIMAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
MAX_SIG_DIGITS = 17

Grid = list


def _significant_digits(token: str) -> int:
    mantissa = re.split(r"[eE]", token)[0].lstrip("+-")
    if "." in mantissa:
        whole, frac = mantissa.split(".")
        digits = (whole + frac.rstrip("0")).lstrip("0")
    else:
        digits = mantissa.lstrip("0")
    return len(digits)


def parse_token(token: str):
    if token == FREE:
        return None
    if not _DECIMAL.fullmatch(token):
        raise ParseError(f"bad token {token!r}")
    if _significant_digits(token) > MAX_SIG_DIGITS:
        raise ParseError(f"{token!r} has more than {MAX_SIG_DIGITS} significant digits")
    return float(token)


def parse_text(text: str) -> tuple[Grid, int]:
    """Parse the text format into a grid (rows may be ragged; shape is
    checked by the validators)."""
    lines = [
        ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty input")
    try:
        n = int(lines[0])
    except ValueError:
        raise ParseError(f"first line must be an integer, got {lines[0]!r}") from None
    if n < 1:
        raise ParseError(f"dimension must be positive, got {n}")
    return [[parse_token(tok) for tok in ln.split()] for ln in lines[1:]], n


def parse_json(text: str) -> tuple[Grid, int]:
    try:
        obj = json.loads(text)
        n = int(obj["n"])
        rows = obj["rows"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad JSON matrix: {exc}") from None
    grid = []
    for row in rows:
        if not isinstance(row, list):
            raise ParseError("rows must be lists")
        out = []
        for cell in row:
            if cell == FREE:
                out.append(None)
            elif isinstance(cell, (int, float)) and not isinstance(cell, bool):
                out.append(float(cell))
            else:
                raise ParseError(f"bad JSON cell {cell!r}")
        grid.append(out)
    return grid, n


def loads(text: str) -> tuple[Grid, int]:
    """Parse either format; returns ``(grid, declared_n)``."""
    if text.lstrip().startswith("{"):
        return parse_json(text)
    return parse_text(text)


def load_grid(path: Union[str, Path]) -> Grid:
    """Read a file; a header/row-count mismatch is reported as a ragged grid
    so that validation raises ``NotSquare``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc)) from None
    grid, n = loads(text)
    if len(grid) != n:
        # pad so the shape error names the declared size
        grid = grid + [[]] * max(0, n - len(grid))
    return grid


def read_partial(path: Union[str, Path]) -> PartialStochasticMatrix:
    return validate_partial(load_grid(path))


def _cell_text(cell) -> str:
    return FREE if _is_free(cell) else repr(float(cell))


def _grid_of(M) -> Grid:
    if isinstance(M, PartialStochasticMatrix):
        return M.to_grid()
    if isinstance(M, StochasticMatrix):
        M = M.entries
    if isinstance(M, np.ndarray):
        return [[float(v) for v in row] for row in M]
    return [list(r) for r in M]


def dumps_text(M) -> str:
    grid = _grid_of(M)
    lines = [str(len(grid))]
    lines += [" ".join(_cell_text(c) for c in row) for row in grid]
    return "\n".join(lines) + "\n"


def to_json_obj(M) -> dict:
    grid = _grid_of(M)
    return {
        "n": len(grid),
        "rows": [[FREE if _is_free(c) else float(c) for c in row] for row in grid],
    }


def dumps_json(M) -> str:
    return json.dumps(to_json_obj(M))
