"""Searched matrices shipped with the package.

The files were regenerated locally with ``wafomnet search`` (see the comment
lines inside each file for the exact flags) on a small trial budget.
"""

from importlib.resources import files

from ..io import parse_matrices

SHIPPED = {5: "wafom_n30_m25_s5.txt", 10: "wafom_n30_m25_s10.txt"}


def shipped_path(S: int):
    if S not in SHIPPED:
        raise ValueError(f"no shipped matrices for S={S}; available: {sorted(SHIPPED)}")
    return files(__name__) / SHIPPED[S]


def load_shipped(S: int):
    """The shipped ``(n, m) = (30, 25)`` matrices for ``S`` in (5, 10)."""
    p = shipped_path(S)
    return parse_matrices(p.read_text(), SHIPPED[S])
