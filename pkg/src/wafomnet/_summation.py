"""Deterministic accurate summation of per-point terms.

Terms are reduced in fixed blocks of ``2**SUM_BLOCK_BITS`` consecutive
values (pairwise, in extended precision), and block sums are combined with
``math.fsum`` after an exact split into two doubles.  The combination is
exactly rounded, hence independent of the order and grouping of blocks:
any caller that produces the same blocks gets a bit-identical total.
"""

from __future__ import annotations

import math

import numpy as np

SUM_BLOCK_BITS = 12
SUM_BLOCK = 1 << SUM_BLOCK_BITS

EXT = np.longdouble


def block_sums(terms: np.ndarray) -> np.ndarray:
    """Sums of consecutive fixed-size blocks (one partial block if short)."""
    terms = np.ascontiguousarray(terms, dtype=EXT)
    if len(terms) < SUM_BLOCK or len(terms) % SUM_BLOCK:
        return np.array([terms.sum()], dtype=EXT)
    return terms.reshape(-1, SUM_BLOCK).sum(axis=1)


def exact_total(parts) -> float:
    """Correctly rounded double of the exact sum of extended-precision values."""
    parts = np.asarray(parts, dtype=EXT).ravel()
    hi = parts.astype(np.float64)
    lo = (parts - hi.astype(EXT)).astype(np.float64)
    return math.fsum(np.concatenate([hi, lo]).tolist())
