"""Text format for generating matrices, plus CSV and manifest writers.

Matrix files::

    # optional comment lines anywhere
    n m S
    <m lines: columns of C_1 as lowercase hex, row 1 = most significant bit>

    <m lines: columns of C_2>
    ...

Blocks are separated by one blank line.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .f2 import MAX_DIGITS, GeneratingMatrixSet

_HEX = re.compile(r"[0-9a-fA-F]+")


class MatrixFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, source: str = "<string>"):
        self.lineno = lineno
        self.source = source
        where = f"{source}:{lineno}: " if lineno is not None else f"{source}: "
        super().__init__(where + message)


def parse_matrices(text: str, source: str = "<string>") -> GeneratingMatrixSet:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if not ln.startswith("#")]
    # header: first non-blank line
    while lines and not lines[0][1]:
        lines.pop(0)
    if not lines:
        raise MatrixFormatError("empty file, expected header 'n m S'", None, source)
    hline, header = lines.pop(0)
    parts = header.split()
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise MatrixFormatError(f"bad header {header!r}, expected 'n m S'", hline, source)
    n, m, S = map(int, parts)
    if not 1 <= n <= MAX_DIGITS:
        raise MatrixFormatError(f"n={n} outside [1, {MAX_DIGITS}]", hline, source)
    if m < 1 or S < 1:
        raise MatrixFormatError("m and S must be positive", hline, source)

    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for i, ln in lines:
        if ln:
            current.append((i, ln))
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)

    cols = np.zeros((S, m), dtype=np.uint64)
    for b, block in enumerate(blocks[:S]):
        if len(block) != m:
            raise MatrixFormatError(
                f"matrix {b + 1} has {len(block)} columns, expected {m}", block[0][0], source
            )
        for k, (i, ln) in enumerate(block):
            if not _HEX.fullmatch(ln):
                raise MatrixFormatError(f"invalid hex column {ln!r}", i, source)
            v = int(ln, 16)
            if v >> n:
                raise MatrixFormatError(f"column {ln} has more than n={n} bits", i, source)
            cols[b, k] = v
    if len(blocks) != S:
        at = blocks[S][0][0] if len(blocks) > S else (lines[-1][0] if lines else hline)
        raise MatrixFormatError(f"expected {S} matrix blocks, found {len(blocks)}", at, source)
    return GeneratingMatrixSet(n, cols)


def read_matrices(path) -> GeneratingMatrixSet:
    path = Path(path)
    return parse_matrices(path.read_text(), str(path))


def format_matrices(G: GeneratingMatrixSet, comments=()) -> str:
    width = (G.n + 3) // 4
    out = [f"# {c}" for c in comments]
    out.append(f"{G.n} {G.m} {G.S}")
    for i in range(G.S):
        if i:
            out.append("")
        out.extend(format(int(c), f"0{width}x") for c in G.columns[i])
    return "\n".join(out) + "\n"


def write_matrices(G: GeneratingMatrixSet, path, comments=()) -> None:
    Path(path).write_text(format_matrices(G, comments))


def fmt_float(x) -> str:
    """Lossless decimal text for a double."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_csv(path, header, rows) -> None:
    """Write rows to ``path`` (``'-'`` or ``None`` means stdout)."""
    import sys

    fh = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
