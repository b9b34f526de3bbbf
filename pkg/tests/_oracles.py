"""Independent reference implementations used as test oracles."""

from fractions import Fraction
from itertools import permutations

import numpy as np

from wafomnet import GeneratingMatrixSet
from wafomnet.f2 import is_upper_square_regular


def random_net(rng, n, S, m, regular=False):
    """Random generating matrices; optionally projection-regular.

    Regular nets are grown one column at a time, redrawing each column until
    the upper square block stays invertible.
    """
    if not regular:
        cols = rng.integers(0, 1 << n, size=(S, m), dtype=np.uint64)
        return GeneratingMatrixSet(n, cols)
    cols = np.zeros((S, m), dtype=np.uint64)
    for T in range(S):
        for d in range(1, m + 1):
            while True:
                c = int(rng.integers(0, 1 << n, dtype=np.uint64))
                if is_upper_square_regular([int(v) for v in cols[T, : d - 1]] + [c], d, n):
                    cols[T, d - 1] = c
                    break
    return GeneratingMatrixSet(n, cols)


def bits_of(col, n):
    return [(int(col) >> (n - j)) & 1 for j in range(1, n + 1)]


def natural_points(G, d):
    """P_d in natural index order, by explicit matrix-vector products."""
    mats = G.to_bit_matrices()
    out = []
    for k in range(1 << d):
        kv = np.array([(k >> j) & 1 for j in range(d)], dtype=np.int64)
        pt = []
        for T in range(G.S):
            row_bits = mats[T][:, :d].astype(np.int64) @ kv % 2
            pt.append(int("".join(map(str, row_bits)), 2) if G.n else 0)
        out.append(tuple(pt))
    return out


def exact_term(point, n):
    prod = Fraction(1)
    for col in point:
        for j, b in enumerate(bits_of(col, n), start=1):
            prod *= 1 - Fraction(1, 2**j) if b else 1 + Fraction(1, 2**j)
    return prod - 1


def exact_wafom(G, d):
    pts = natural_points(G, d)
    return sum(exact_term(p, G.n) for p in pts) / len(pts)


def det_f2(rows):
    """Leibniz expansion mod 2 (the permanent equals the determinant over F2)."""
    k = len(rows)
    total = 0
    for perm in permutations(range(k)):
        prod = 1
        for r, c in enumerate(perm):
            prod &= rows[r][c]
        total ^= prod
    return total
