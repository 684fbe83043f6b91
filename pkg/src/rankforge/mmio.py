"""Reading and writing dense matrices as Matrix Market or CSV text.

Tokens may be integers, decimals (``1.5``, ``2e-3``) or rationals (``p/q``).
Unless a regime is forced, decimals select the float regime and everything
else stays exact. Rational tokens are also accepted inside Matrix Market
files, which is how exact factors are written out.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from pathlib import Path

from .core import Matrix

_INT = re.compile(r"[+-]?\d+\Z")
_RATIONAL = re.compile(r"[+-]?\d+/\d+\Z")
_DECIMAL = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\Z")

FORMATS = ("mm", "csv")


class MatrixParseError(ValueError):
    """Malformed input; ``kind`` is one of header, ragged, dimension, token."""

    def __init__(self, kind: str, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(f"{where}{message}")
        self.kind = kind
        self.line = line
        self.column = column


class _Token:
    __slots__ = ("text", "line", "column", "value", "is_decimal")

    def __init__(self, text: str, line: int, column: int, integer_only: bool = False):
        self.text, self.line, self.column = text, line, column
        if _INT.match(text):
            self.value, self.is_decimal = Fraction(int(text)), False
        elif not integer_only and _RATIONAL.match(text):
            num, den = text.split("/")
            if int(den) == 0:
                raise MatrixParseError("token", f"zero denominator in {text!r}", line, column)
            self.value, self.is_decimal = Fraction(int(num), int(den)), False
        elif not integer_only and _DECIMAL.match(text):
            self.value, self.is_decimal = Fraction(text), True
        else:
            expected = "integer" if integer_only else "number"
            raise MatrixParseError("token", f"expected {expected}, got {text!r}", line, column)


def _split_tokens(line: str, lineno: int):
    for m in re.finditer(r"\S+", line):
        yield m.group(), lineno, m.start() + 1


def _resolve_exact(tokens, mode: str | None) -> bool:
    if mode is None:
        return not any(t.is_decimal for t in tokens)
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    return mode == "exact"


def _build(rows, ncols: int, tokens, mode: str | None) -> Matrix:
    exact = _resolve_exact(tokens, mode)
    if exact:
        return Matrix(rows, ncols=ncols, exact=True)
    return Matrix([[float(x) for x in r] for r in rows], ncols=ncols, exact=False)


def parse_csv_text(text: str, mode: str | None = None) -> Matrix:
    rows, tokens = [], []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        col = 1
        for field in line.split(","):
            stripped = field.strip()
            start = col + (len(field) - len(field.lstrip()))
            if not stripped:
                raise MatrixParseError("token", "empty field", lineno, start)
            tok = _Token(stripped, lineno, start)
            tokens.append(tok)
            row.append(tok.value)
            col += len(field) + 1
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixParseError("ragged", f"row has {len(row)} fields, expected {width}", lineno)
        rows.append(row)
    if width is None:
        raise MatrixParseError("dimension", "no rows found")
    return _build(rows, width, tokens, mode)


def parse_matrix_market_text(text: str, mode: str | None = None) -> Matrix:
    lines = text.splitlines()
    if not lines:
        raise MatrixParseError("header", "empty file", 1)
    head = lines[0].split()
    if (
        len(head) != 5
        or head[0] != "%%MatrixMarket"
        or head[1].lower() != "matrix"
        or head[2].lower() not in ("array", "coordinate")
        or head[3].lower() not in ("real", "integer")
        or head[4].lower() != "general"
    ):
        raise MatrixParseError(
            "header", "expected '%%MatrixMarket matrix array|coordinate real|integer general'", 1, 1
        )
    layout = head[2].lower()
    integer_only = head[3].lower() == "integer"

    body = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("%") or not line.strip():
            continue
        body.extend(_split_tokens(line, lineno))
    if not body:
        raise MatrixParseError("header", "missing size line", len(lines))

    size_line = body[0][1]
    size = [t for t in body if t[1] == size_line]
    want = 2 if layout == "array" else 3
    if len(size) != want or not all(_INT.match(t[0]) and not t[0].startswith(("-", "+")) for t in size):
        raise MatrixParseError("header", f"size line must hold {want} nonnegative integers", size_line, 1)
    dims = [int(t[0]) for t in size]
    m, n = dims[0], dims[1]
    entries = [_Token(text, ln, col, integer_only) for text, ln, col in body[want:]]

    if layout == "array":
        if len(entries) != m * n:
            last = entries[-1].line if entries else size_line
            raise MatrixParseError("dimension", f"declared {m}x{n} needs {m * n} entries, found {len(entries)}", last)
        rows = [[entries[j * m + i].value for j in range(n)] for i in range(m)]
        return _build(rows, n, entries, mode)

    nnz = dims[2]
    if len(entries) % 3:
        raise MatrixParseError("dimension", "coordinate entries must be 'row col value' triples", entries[-1].line)
    triples = [entries[k : k + 3] for k in range(0, len(entries), 3)]
    if len(triples) != nnz:
        last = triples[-1][0].line if triples else size_line
        raise MatrixParseError("dimension", f"declared {nnz} nonzeros, found {len(triples)}", last)
    rows = [[Fraction(0)] * n for _ in range(m)]
    seen = set()
    values = []
    for ti, tj, tv in triples:
        if ti.is_decimal or tj.is_decimal or ti.value.denominator != 1 or tj.value.denominator != 1:
            raise MatrixParseError("token", "indices must be integers", ti.line, ti.column)
        i, j = int(ti.value), int(tj.value)
        if not (1 <= i <= m and 1 <= j <= n):
            raise MatrixParseError("dimension", f"index ({i}, {j}) outside declared {m}x{n}", ti.line, ti.column)
        if (i, j) in seen:
            raise MatrixParseError("token", f"duplicate entry ({i}, {j})", ti.line, ti.column)
        seen.add((i, j))
        rows[i - 1][j - 1] = tv.value
        values.append(tv)
    return _build(rows, n, values, mode)


def detect_format(path: str | os.PathLike) -> str:
    return "mm" if Path(path).suffix.lower() in (".mtx", ".mm") else "csv"


def parse_matrix(path: str | os.PathLike, format: str | None = None, mode: str | None = None) -> Matrix:
    """Read a matrix file; ``format`` is ``"mm"`` or ``"csv"`` (guessed from the suffix if omitted)."""
    format = format or detect_format(path)
    if format not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {format!r}")
    text = Path(path).read_text()
    if format == "mm":
        return parse_matrix_market_text(text, mode)
    return parse_csv_text(text, mode)


def format_scalar(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def format_matrix_market(a: Matrix, comment: str | None = None) -> str:
    """Dense array layout, column-major, one entry per line."""
    lines = ["%%MatrixMarket matrix array real general"]
    if comment:
        lines.extend(f"% {c}" for c in comment.splitlines())
    lines.append(f"{a.nrows} {a.ncols}")
    for j in range(a.ncols):
        lines.extend(format_scalar(x) for x in a.col(j))
    return "\n".join(lines) + "\n"


def format_csv(a: Matrix) -> str:
    return "".join(",".join(format_scalar(x) for x in r) + "\n" for r in a.rows())


def write_matrix(a: Matrix, path: str | os.PathLike, format: str | None = None, comment: str | None = None) -> None:
    format = format or detect_format(path)
    text = format_matrix_market(a, comment) if format == "mm" else format_csv(a)
    Path(path).write_text(text)
