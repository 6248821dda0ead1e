"""Plain-text matrix files.

Format: three header lines (``n``, ``ordering``, ``kind``) followed by 2n
rows of 2n space-separated decimals printed with 17 significant digits, so
parse-then-serialize is value identical.  ``ordering`` is always the
interleaved ``xpxp`` convention; ``kind`` distinguishes covariance matrices
from symplectic transforms.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ModeMatchError

ORDERING = "xpxp"
KINDS = ("covariance", "symplectic")


class MatrixParseError(ModeMatchError):
    """Malformed matrix file; carries the offending location when known."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        place = ""
        if row is not None:
            place = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + place)
        self.row = row
        self.column = column


@dataclass
class MatrixFile:
    n: int
    kind: str
    values: np.ndarray
    ordering: str = ORDERING


def format_matrix(values: np.ndarray, kind: str) -> str:
    values = np.asarray(values, dtype=float)
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] % 2:
        raise ValueError(f"matrix must be even square, got shape {values.shape}")
    n = values.shape[0] // 2
    lines = [f"n {n}", f"ordering {ORDERING}", f"kind {kind}"]
    for row in values:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(path, values: np.ndarray, kind: str) -> None:
    Path(path).write_text(format_matrix(values, kind))


def parse_matrix(text: str) -> MatrixFile:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines())
             if ln and not ln.startswith("#")]
    if len(lines) < 3:
        raise MatrixParseError("file is missing the three header lines")
    header = {}
    for ln in lines[:3]:
        parts = ln.split(None, 1)
        if len(parts) != 2:
            raise MatrixParseError(f"malformed header line {ln!r}")
        header[parts[0]] = parts[1]
    for key in ("n", "ordering", "kind"):
        if key not in header:
            raise MatrixParseError(f"header is missing {key!r}")
    try:
        n = int(header["n"])
    except ValueError:
        raise MatrixParseError(f"header n is not an integer: {header['n']!r}") from None
    if n < 1:
        raise MatrixParseError(f"mode count must be positive, got {n}")
    if header["ordering"] != ORDERING:
        raise MatrixParseError(f"unsupported ordering {header['ordering']!r}")
    if header["kind"] not in KINDS:
        raise MatrixParseError(f"unsupported kind {header['kind']!r}")
    body = lines[3:]
    if len(body) != 2 * n:
        raise MatrixParseError(f"expected {2 * n} body rows, found {len(body)}")
    values = np.empty((2 * n, 2 * n))
    for i, ln in enumerate(body, start=1):
        parts = ln.split()
        if len(parts) != 2 * n:
            raise MatrixParseError(
                f"expected {2 * n} values, found {len(parts)}", row=i
            )
        for j, token in enumerate(parts, start=1):
            try:
                values[i - 1, j - 1] = float(token)
            except ValueError:
                raise MatrixParseError(
                    f"could not parse value {token!r}", row=i, column=j
                ) from None
    return MatrixFile(n=n, kind=header["kind"], values=values)


def read_matrix(path) -> MatrixFile:
    return parse_matrix(Path(path).read_text())
