"""Bit-exact F2 linear algebra for digital nets.

Bit convention
--------------
A column of ``n`` bits is stored as a Python/numpy unsigned integer in which
row ``j`` (``j = 1..n``) lives at bit ``n - j``.  Row 1 is therefore the most
significant of the ``n`` used bits and the integer divided by ``2**n`` is the
real coordinate ``sum_j x_j 2**-j``.  The same convention is used by the
matrix text format and by the WAFOM lookup-table indexer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

MAX_DIGITS = 52
"""Largest supported precision; keeps every coordinate exact in a double."""


class DimensionError(ValueError):
    pass


class RangeError(ValueError):
    pass


def _check_n(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_DIGITS:
        raise DimensionError(f"digit count n must be in [1, {MAX_DIGITS}], got {n}")
    return n


@dataclass(frozen=True, eq=False)
class GeneratingMatrixSet:
    """S generating matrices ``C_1..C_S`` of shape ``n x m`` over F2.

    ``columns[i, k]`` is column ``k + 1`` of ``C_{i+1}`` in the bit
    convention of this module.
    """

    n: int
    columns: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_n(self.n)
        cols = np.array(self.columns, dtype=np.uint64, copy=True)
        if cols.ndim != 2:
            raise DimensionError("columns must be a 2-d array of shape (S, m)")
        if cols.shape[0] < 1:
            raise DimensionError("need at least one dimension")
        if cols.size and int(cols.max()) >> self.n:
            raise DimensionError(f"column value exceeds {self.n} bits")
        cols.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "columns", cols)

    @property
    def S(self) -> int:
        return self.columns.shape[0]

    @property
    def m(self) -> int:
        return self.columns.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GeneratingMatrixSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.columns, other.columns)

    def __hash__(self):
        return hash((self.n, self.columns.tobytes(), self.columns.shape))

    def truncate(self, d: int) -> "GeneratingMatrixSet":
        """The first ``d`` columns of every matrix (generates ``P_d``)."""
        _check_depth(self, d)
        return GeneratingMatrixSet(self.n, self.columns[:, :d])

    def extend(self, new_columns: Sequence[int]) -> "GeneratingMatrixSet":
        """Append one column per coordinate."""
        extra = np.asarray(new_columns, dtype=np.uint64).reshape(self.S, 1)
        return GeneratingMatrixSet(self.n, np.hstack([self.columns, extra]))

    def is_projection_regular(self) -> bool:
        """True iff every upper ``d x d`` block of every ``C_i`` is invertible."""
        if self.m > self.n:
            return False
        for i in range(self.S):
            cols = [int(c) for c in self.columns[i]]
            for d in range(1, self.m + 1):
                if not is_upper_square_regular(cols[:d], d, self.n):
                    return False
        return True

    def to_bit_matrices(self) -> np.ndarray:
        """Dense ``(S, n, m)`` uint8 array; entry ``[i, j-1, k]`` is row ``j``."""
        shifts = np.arange(self.n - 1, -1, -1, dtype=np.uint64)
        bits = (self.columns[:, None, :] >> shifts[None, :, None]) & np.uint64(1)
        return bits.astype(np.uint8)

    @classmethod
    def from_bit_matrices(cls, mats) -> "GeneratingMatrixSet":
        mats = np.asarray(mats, dtype=np.uint64) & np.uint64(1)
        if mats.ndim != 3:
            raise DimensionError("expected an (S, n, m) array")
        n = mats.shape[1]
        weights = np.uint64(1) << np.arange(n - 1, -1, -1, dtype=np.uint64)
        cols = (mats * weights[None, :, None]).sum(axis=1, dtype=np.uint64)
        return cls(n, cols)


def _check_depth(G: GeneratingMatrixSet, d: int) -> int:
    d = int(d)
    if not 0 <= d <= G.m:
        raise RangeError(f"depth d={d} outside [0, m={G.m}]")
    return d


def column_from_bits(bits: Sequence[int]) -> int:
    """Pack ``(x_1, ..., x_n)`` into an integer column."""
    value = 0
    for b in bits:
        value = (value << 1) | (int(b) & 1)
    return value


def column_to_bits(col: int, n: int) -> list[int]:
    return [(int(col) >> (n - j)) & 1 for j in range(1, n + 1)]


def is_upper_square_regular(cols: Sequence[int], d: int, n: int) -> bool:
    """Whether rows ``1..d`` of the ``d`` given columns form an invertible matrix.

    Gaussian elimination over F2 on the top ``d`` bits of each column.
    """
    d = int(d)
    if d < 1 or d > n:
        raise DimensionError(f"need 1 <= d <= n, got d={d}, n={n}")
    if len(cols) != d:
        raise DimensionError(f"expected {d} columns, got {len(cols)}")
    basis = TopSpan(d)
    for c in cols:
        if not basis.add(int(c) >> (n - d)):
            return False
    return True


class TopSpan:
    """Incremental F2 basis of ``width``-bit vectors (reduced by leading bit).

    ``add`` returns False when the vector is already in the span; used to test
    whether one more column keeps an upper square block regular.
    """

    __slots__ = ("width", "pivots")

    def __init__(self, width: int):
        self.width = width
        self.pivots: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            p = self.pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        r = self.reduce(v)
        if r == 0:
            return False
        self.pivots[r.bit_length() - 1] = r
        return True


def top_span(cols: Sequence[int], width: int, n: int) -> TopSpan:
    """Span of the top ``width`` bits of ``cols``."""
    span = TopSpan(width)
    for c in cols:
        span.add(int(c) >> (n - width))
    return span


def net_point(G: GeneratingMatrixSet, k: int, d: int) -> np.ndarray:
    """The point ``x_k`` of ``P_d``: coordinate ``T`` is ``C_T k`` over F2.

    ``k`` is read least-significant digit first, so digit ``k_j`` selects
    column ``j + 1``.  Returns an ``(S,)`` uint64 array of columns.
    """
    d = _check_depth(G, d)
    k = int(k)
    if not 0 <= k < (1 << d):
        raise RangeError(f"index k={k} outside [0, 2**{d})")
    x = np.zeros(G.S, dtype=np.uint64)
    j = 0
    while k:
        if k & 1:
            x ^= G.columns[:, j]
        k >>= 1
        j += 1
    return x


def gray(k):
    return k ^ (k >> 1)


def enumerate_points_gray(G: GeneratingMatrixSet, d: int) -> np.ndarray:
    """All ``2**d`` points of ``P_d`` in binary-reflected Gray-code order.

    Row ``r`` of the result equals ``net_point(G, gray(r), d)``; consecutive
    rows differ by exactly one generating column per coordinate.
    """
    d = _check_depth(G, d)
    pts = np.zeros((1, G.S), dtype=np.uint64)
    for k in range(d):
        pts = np.concatenate([pts, pts[::-1] ^ G.columns[:, k]])
    return pts


def iter_gray_blocks(
    G: GeneratingMatrixSet,
    d: int,
    block_bits: int = 16,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[tuple[int, np.ndarray]]:
    """Stream Gray-ordered points of ``P_d`` in aligned blocks.

    Yields ``(offset, points)`` where ``points`` holds Gray positions
    ``offset .. offset + len(points) - 1``.  ``start``/``stop`` must be
    multiples of the block size when ``d > block_bits``.  Uses
    ``gray(h * 2**c + r) = gray(h * 2**c) ^ gray(r)``.
    """
    d = _check_depth(G, d)
    N = 1 << d
    stop = N if stop is None else stop
    if d <= block_bits:
        if start != 0 or stop != N:
            pts = enumerate_points_gray(G, d)[start:stop]
            yield start, pts
        else:
            yield 0, enumerate_points_gray(G, d)
        return
    B = 1 << block_bits
    if start % B or stop % B:
        raise RangeError("block range must be aligned to the block size")
    low = enumerate_points_gray(G, block_bits)
    for h in range(start >> block_bits, stop >> block_bits):
        yield h << block_bits, gray_block(G, d, h, block_bits, low)


def gray_block(
    G: GeneratingMatrixSet, d: int, h: int, block_bits: int, low: np.ndarray | None = None
) -> np.ndarray:
    """Gray positions ``h * 2**block_bits`` onward, one block of ``P_d``."""
    if low is None:
        low = enumerate_points_gray(G, block_bits)
    return low ^ net_point(G, gray(h << block_bits), d)


def point_to_reals(x, n: int, shift: float = 0.0) -> np.ndarray:
    """Map point columns to coordinates in ``[0, 1)``.

    Accepts one point ``(S,)`` or a stack ``(N, S)``.  ``shift`` must satisfy
    ``0 <= shift < 2**-n``.
    """
    n = _check_n(n)
    if not 0.0 <= shift < 2.0 ** -n:
        raise RangeError(f"shift must lie in [0, 2**-{n})")
    return np.asarray(x, dtype=np.uint64).astype(np.float64) * 2.0 ** -n + shift
