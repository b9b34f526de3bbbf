"""Walsh figure of merit of digital nets over F2.

Two evaluators of the same quantity::

    WAFOM(P) = 1/|P| sum_{x in P} ( prod_T prod_j (1 + (-1)^{x_{j,T}} 2^{-j}) - 1 )

``wafom_naive`` multiplies the ``n`` per-bit factors of every coordinate;
``wafom_tabled`` splits each coordinate into ``q`` segments of ``l = n/q``
bits and multiplies ``q`` precomputed table entries instead.

Per-point products are formed in extended precision (``np.longdouble``) and
summed with :mod:`wafomnet._summation`, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._summation import EXT, block_sums, exact_total
from .f2 import (
    GeneratingMatrixSet,
    _check_depth,
    _check_n,
    enumerate_points_gray,
    gray,
    net_point,
)

DENSE_TABLE_MAX_BITS = 20
"""Segments longer than this are evaluated on demand instead of stored."""

GEN_BLOCK_BITS = 16


@dataclass(frozen=True)
class WafomValue:
    value: float
    d: int
    n: int
    S: int

    @property
    def log10(self) -> float:
        return math.log10(self.value) if self.value > 0 else -math.inf

    def __float__(self):
        return float(self.value)


def _bit_factors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``1 + 2**-j`` and ``1 - 2**-j`` for ``j = 1..n`` (exact dyadics)."""
    p = np.array([2.0 ** -j for j in range(1, n + 1)], dtype=EXT)
    return 1 + p, 1 - p


class _ComputedSegmentTable:
    """Table entries for a long segment, computed for the requested indices only."""

    def __init__(self, l: int, offset: int):
        self.l = l
        self.offset = offset

    def __len__(self):
        return 1 << self.l

    def __getitem__(self, e):
        e = np.asarray(e, dtype=np.uint64)
        out = None
        for j in range(1, self.l + 1):
            bit = (e >> np.uint64(self.l - j)) & np.uint64(1)
            p = EXT(2.0 ** -(self.offset + j))
            f = np.where(bit.astype(bool), 1 - p, 1 + p).astype(EXT)
            out = f if out is None else out * f
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class WafomTableSet:
    """Lookup tables ``tables[i][e]`` for segments ``i = 0..q-1``.

    Entry ``e`` is read most-significant bit first: its top bit corresponds
    to row ``i*l + 1`` of the column.
    """

    n: int
    q: int
    tables: tuple

    @property
    def l(self) -> int:
        return self.n // self.q

    def segment(self, cols, i: int):
        """Segment integer ``i`` (0-based) of columns ``cols``."""
        # n <= 52, so the signed view is exact and indexes without conversion
        cols = np.asarray(cols, dtype=np.uint64).view(np.int64)
        shift = self.n - (i + 1) * self.l
        if i == 0:
            return cols >> shift if shift else cols
        seg = cols >> shift if shift else cols
        return seg & ((1 << self.l) - 1)

    def _lookup(self, i, seg):
        table = self.tables[i]
        if isinstance(table, np.ndarray):
            return np.take(table, seg)
        return table[seg]

    def coordinate_products(self, cols) -> np.ndarray:
        """``prod_i tables[i][segment_i]`` elementwise over ``cols``."""
        cols = np.asarray(cols, dtype=np.uint64)
        prod = np.asarray(self._lookup(0, self.segment(cols, 0)), dtype=EXT)
        for i in range(1, self.q):
            prod *= self._lookup(i, self.segment(cols, i))
        return prod


def build_tables(n: int, q: int = 3) -> WafomTableSet:
    """Precompute the ``q`` segment tables for ``n``-digit columns."""
    n = _check_n(n)
    q = int(q)
    if q < 1 or n % q:
        raise ValueError(f"segment count q={q} must be a positive divisor of n={n}")
    l = n // q
    tables = []
    for i in range(q):
        offset = i * l
        if l > DENSE_TABLE_MAX_BITS:
            tables.append(_ComputedSegmentTable(l, offset))
            continue
        e = np.arange(1 << l, dtype=np.uint64)
        entry = np.ones(1 << l, dtype=EXT)
        for j in range(1, l + 1):
            bit = ((e >> np.uint64(l - j)) & np.uint64(1)).astype(bool)
            p = EXT(2.0 ** -(offset + j))
            entry *= np.where(bit, 1 - p, 1 + p)
        entry.setflags(write=False)
        tables.append(entry)
    return WafomTableSet(n, q, tuple(tables))


def naive_coordinate_products(cols, n: int) -> np.ndarray:
    """``prod_j (1 + (-1)^{x_j} 2^{-j})`` elementwise, one factor per bit."""
    cols = np.asarray(cols, dtype=np.uint64)
    plus, minus = _bit_factors(n)
    prod = np.ones(cols.shape, dtype=EXT)
    for j in range(1, n + 1):
        bit = ((cols >> np.uint64(n - j)) & np.uint64(1)).astype(bool)
        prod *= np.where(bit, minus[j - 1], plus[j - 1])
    return prod


def terms_from_coordinate_products(cp: np.ndarray) -> np.ndarray:
    """Per-point ``prod_T cp[T] - 1`` for coordinate-major ``cp`` of shape (S, N).

    Coordinates are multiplied left to right; every evaluator shares this
    order so equal points give bit-identical terms.
    """
    t = cp[0].copy()
    for T in range(1, cp.shape[0]):
        t *= cp[T]
    t -= 1
    return t


def point_terms_tabled(points: np.ndarray, tables: WafomTableSet) -> np.ndarray:
    """WAFOM summands of ``points`` (shape (N, S)) via lookup tables."""
    cols = np.ascontiguousarray(np.asarray(points, dtype=np.uint64).T)
    return _terms_tabled_cm(cols, tables)


def point_terms_naive(points: np.ndarray, n: int) -> np.ndarray:
    """WAFOM summands of ``points`` (shape (N, S)) via per-bit factors."""
    cols = np.ascontiguousarray(np.asarray(points, dtype=np.uint64).T)
    return _terms_naive_cm(cols, n)


def _terms_tabled_cm(cols, tables):
    return terms_from_coordinate_products(tables.coordinate_products(cols))


def _terms_naive_cm(cols, n):
    return terms_from_coordinate_products(naive_coordinate_products(cols, n))


def wafom_point_term(x, n: int, S: int | None = None) -> float:
    """The bracketed summand of WAFOM for a single point ``x`` (``S`` columns)."""
    x = np.asarray(x, dtype=np.uint64).reshape(1, -1)
    if S is not None and x.shape[1] != S:
        raise ValueError(f"point has {x.shape[1]} coordinates, expected {S}")
    return float(point_terms_naive(x, _check_n(n))[0])


def _wafom_blocks(G, d, term_fn, n_jobs=1, start=0, stop=None):
    """Block sums of ``term_fn(cols)`` over Gray positions ``[start, stop)``.

    ``term_fn`` receives coordinate-major point columns of shape (S, B).
    """
    N = 1 << d
    stop = N if stop is None else stop
    if d <= GEN_BLOCK_BITS:
        pts = enumerate_points_gray(G, d)[start:stop]
        return block_sums(term_fn(np.ascontiguousarray(pts.T)))
    low = np.ascontiguousarray(enumerate_points_gray(G, GEN_BLOCK_BITS).T)

    def work(h):
        base = net_point(G, gray(h << GEN_BLOCK_BITS), d)
        return block_sums(term_fn(low ^ base[:, None]))

    hs = range(start >> GEN_BLOCK_BITS, stop >> GEN_BLOCK_BITS)
    if n_jobs is None or n_jobs <= 1:
        parts = [work(h) for h in hs]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, hs))
    return np.concatenate(parts)


def wafom_naive(G: GeneratingMatrixSet, d: int, n_jobs: int = 1) -> WafomValue:
    """WAFOM of ``P_d`` by the per-bit product formula (``O(nSN)``)."""
    d = _check_depth(G, d)
    sums = _wafom_blocks(G, d, lambda cols: _terms_naive_cm(cols, G.n), n_jobs)
    return WafomValue(exact_total(sums) / (1 << d), d, G.n, G.S)


def wafom_tabled(
    G: GeneratingMatrixSet, d: int, tables: WafomTableSet | None = None, n_jobs: int = 1
) -> WafomValue:
    """WAFOM of ``P_d`` using segment lookup tables (``O(qSN)``)."""
    d = _check_depth(G, d)
    if tables is None:
        tables = build_tables(G.n, 3 if G.n % 3 == 0 else 1)
    if tables.n != G.n:
        raise ValueError(f"tables built for n={tables.n}, matrices have n={G.n}")
    sums = _wafom_blocks(G, d, lambda cols: _terms_tabled_cm(cols, tables), n_jobs)
    return WafomValue(exact_total(sums) / (1 << d), d, G.n, G.S)
