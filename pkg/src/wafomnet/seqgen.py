"""Sequential generators: M-sequence point sets and their digital-net form.

For a primitive polynomial ``p(t) = a_0 + a_1 t + ... + a_d t^d`` the
M-sequence ``z_{j+d} = a_1 z_{j+d-1} + ... + a_d z_j`` visits every nonzero
state ``z_j = (z_j, ..., z_{j+d-1})`` once per period ``2**d - 1``.  With an
``n x d`` matrix ``U`` the point set is

    {(U z_j, U z_{j+1}, ..., U z_{j+S-1}) : 0 <= j < 2**d - 1}  u  {0}

which equals the digital net with ``C_i = U A^{i-1}`` where ``A`` advances
the state by one step.

States are packed as integers with bit ``t`` holding ``z_{j+t}``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._summation import EXT, block_sums, exact_total
from .f2 import GeneratingMatrixSet, TopSpan, _check_n
from .wafom import WafomTableSet, WafomValue, build_tables, terms_from_coordinate_products

# Lowest-weight primitive polynomials (smallest mask among them), bit i = coefficient of t^i.
PRIMITIVE_POLYS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x402B,
    15: 0x8003,
    16: 0x1002D,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001B,
    25: 0x2000009,
    26: 0x4000047,
    27: 0x8000027,
    28: 0x10000009,
    29: 0x20000005,
    30: 0x40000053,
    31: 0x80000009,
    32: 0x1000000C5,
}

ANCHOR_EVERY = 1 << 12


def _prime_factors(v: int) -> list[int]:
    out = []
    p = 2
    while p * p <= v:
        if v % p == 0:
            out.append(p)
            while v % p == 0:
                v //= p
        p += 1 if p == 2 else 2
    if v > 1:
        out.append(v)
    return out


def _polymulmod(a: int, b: int, p: int, deg: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= p
    return r


def _polypowmod(e: int, p: int, deg: int) -> int:
    """``t**e mod p`` over F2."""
    result, base = 1, 2
    while e:
        if e & 1:
            result = _polymulmod(result, base, p, deg)
        base = _polymulmod(base, base, p, deg)
        e >>= 1
    return result


def is_primitive(mask: int) -> bool:
    """Whether the F2 polynomial with coefficient bits ``mask`` is primitive."""
    deg = mask.bit_length() - 1
    if deg < 2 or not mask & 1:
        return False
    order = (1 << deg) - 1
    if _polypowmod(order, mask, deg) != 1:
        return False
    return all(_polypowmod(order // r, mask, deg) != 1 for r in _prime_factors(order))


@dataclass(frozen=True)
class PrimitivePoly:
    mask: int

    def __post_init__(self):
        if not is_primitive(self.mask):
            raise ValueError(f"polynomial {self.mask:#x} is not primitive over F2")

    @property
    def degree(self) -> int:
        return self.mask.bit_length() - 1

    def coeff(self, i: int) -> int:
        return (self.mask >> i) & 1

    @property
    def taps(self) -> int:
        """State mask whose parity gives the next bit: bit ``t`` is ``a_{d-t}``."""
        d = self.degree
        return sum(self.coeff(d - t) << t for t in range(d))


@lru_cache(maxsize=None)
def primitive_poly(d: int) -> PrimitivePoly:
    """The shipped primitive polynomial of degree ``d`` (verified on first use)."""
    if d not in PRIMITIVE_POLYS:
        raise ValueError(f"no shipped primitive polynomial of degree {d}")
    return PrimitivePoly(PRIMITIVE_POLYS[d])


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def msequence(poly: PrimitivePoly, init, length: int) -> np.ndarray:
    """``z_0, z_1, ...`` of the linear recurrence, starting from ``init`` bits."""
    d = poly.degree
    init = [int(b) & 1 for b in init]
    if len(init) != d:
        raise ValueError(f"initial state needs {d} bits")
    if not any(init):
        raise ValueError("initial state must be nonzero")
    out = np.zeros(max(length, 0), dtype=np.uint8)
    state = sum(b << t for t, b in enumerate(init))
    taps = poly.taps
    for j in range(length):
        out[j] = state & 1
        state = (state >> 1) | (_parity(state & taps) << (d - 1))
    return out


def state_sequence(poly: PrimitivePoly, init_state: int, length: int) -> np.ndarray:
    """Packed states ``z_j`` for ``j = 0..length-1`` (bit ``t`` = ``z_{j+t}``)."""
    d = poly.degree
    bits = msequence(poly, [(init_state >> t) & 1 for t in range(d)], length + d - 1)
    states = np.zeros(length, dtype=np.int64)
    for t in range(d):
        states |= bits[t : t + length].astype(np.int64) << t
    return states


def companion_matrix(poly: PrimitivePoly) -> np.ndarray:
    """The ``d x d`` matrix ``A`` over F2 with ``A z_j = z_{j+1}``."""
    d = poly.degree
    A = np.zeros((d, d), dtype=np.uint8)
    for r in range(d - 1):
        A[r, r + 1] = 1
    for t in range(d):
        A[d - 1, t] = poly.coeff(d - t)
    return A


def f2_matmul(A, B) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64) % 2).astype(np.uint8)


def f2_matpow(A, e: int) -> np.ndarray:
    result = np.eye(len(A), dtype=np.uint8)
    base = np.asarray(A, dtype=np.uint8)
    while e:
        if e & 1:
            result = f2_matmul(result, base)
        base = f2_matmul(base, base)
        e >>= 1
    return result


@dataclass(frozen=True, eq=False)
class SeqGenConfig:
    """A primitive polynomial, an ``n x d`` matrix ``U`` (as ``d`` columns) and a start state."""

    poly: PrimitivePoly
    n: int
    U: np.ndarray
    init_state: int = 1

    def __post_init__(self):
        _check_n(self.n)
        U = np.array(self.U, dtype=np.uint64).reshape(-1)
        if len(U) != self.poly.degree:
            raise ValueError(f"U needs {self.poly.degree} columns, got {len(U)}")
        if self.poly.degree > self.n:
            raise ValueError("degree exceeds the digit count")
        if not 0 < self.init_state < (1 << self.poly.degree):
            raise ValueError("initial state must be a nonzero d-bit integer")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)

    @property
    def d(self) -> int:
        return self.poly.degree

    def is_regular(self) -> bool:
        span = TopSpan(self.d)
        return all(span.add(int(c) >> (self.n - self.d)) for c in self.U)


def apply_U(U: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``U z`` for packed states, as ``n``-bit columns."""
    out = np.zeros(states.shape, dtype=np.uint64)
    for k, col in enumerate(U):
        bit = ((states >> k) & 1).astype(bool)
        out[bit] ^= col
    return out


@lru_cache(maxsize=8)
def _period_states(mask: int, init_state: int) -> np.ndarray:
    poly = PrimitivePoly(mask)
    states = state_sequence(poly, init_state, (1 << poly.degree) - 1)
    states.setflags(write=False)
    return states


def _window_columns(cfg: SeqGenConfig) -> np.ndarray:
    """``U z_j`` for one period ``j = 0..2**d - 2``."""
    return apply_U(cfg.U, _period_states(cfg.poly.mask, cfg.init_state))


def seqgen_points(cfg: SeqGenConfig, S: int) -> np.ndarray:
    """The ``2**d`` points: zero first, then the sliding windows ``j = 0, 1, ...``."""
    cols = _window_columns(cfg)
    period = len(cols)
    idx = (np.arange(period)[:, None] + np.arange(S)[None, :]) % period
    pts = cols[idx]
    return np.vstack([np.zeros((1, S), dtype=np.uint64), pts])


def seqgen_as_digital_net(cfg: SeqGenConfig, S: int) -> GeneratingMatrixSet:
    """Generating matrices ``C_i = U A^{i-1}``, ``i = 1..S``."""
    A = companion_matrix(cfg.poly)
    power = np.eye(cfg.d, dtype=np.uint8)
    mats = []
    for _ in range(S):
        # column k of U P is the XOR of U's columns selected by column k of P
        mats.append([int(np.bitwise_xor.reduce(cfg.U[power[:, k].astype(bool)], initial=0))
                     for k in range(cfg.d)])
        power = f2_matmul(A, power)
    return GeneratingMatrixSet(cfg.n, np.array(mats, dtype=np.uint64))


def wafom_sequential(
    cfg: SeqGenConfig,
    S: int,
    tables: WafomTableSet | None = None,
    anchor_every: int | None = ANCHOR_EVERY,
) -> WafomValue:
    """WAFOM of the sequential-generator point set with a sliding product.

    Moving the window from ``j`` to ``j + 1`` multiplies the point product by
    the entering coordinate's table product and divides by the leaving one,
    so each point costs ``O(1)`` table work.  The running product is
    recomputed from scratch every ``anchor_every`` steps.
    """
    if tables is None:
        tables = build_tables(cfg.n, 3 if cfg.n % 3 == 0 else 1)
    if tables.n != cfg.n:
        raise ValueError("tables built for a different n")
    c = tables.coordinate_products(_window_columns(cfg))
    period = len(c)
    cext = np.concatenate([c, c[: S]])
    prods = np.empty(period, dtype=EXT)
    step = period if anchor_every is None else int(anchor_every)
    if S == 1:
        # window of width one: the product is the coordinate product itself
        prods[:] = c
    for j0 in range(0, period if S > 1 else 0, step):
        j1 = min(j0 + step, period)
        anchor = terms_from_coordinate_products(cext[j0 : j0 + S, None]) + 1
        ratios = cext[j0 + S : j1 - 1 + S] / cext[j0 : j1 - 1]
        run = np.empty(j1 - j0, dtype=EXT)
        run[0] = anchor[0]
        run[1:] = ratios
        prods[j0:j1] = np.multiply.accumulate(run)
    zero = terms_from_coordinate_products(
        tables.coordinate_products(np.zeros((S, 1), dtype=np.uint64))
    )
    terms = np.concatenate([zero, prods - 1])
    return WafomValue(exact_total(block_sums(terms)) / (1 << cfg.d), cfg.d, cfg.n, S)


def sliding_drift(cfg: SeqGenConfig, S: int, tables: WafomTableSet, anchor_every=None) -> float:
    """Largest relative deviation of sliding products from fresh recomputation."""
    c = tables.coordinate_products(_window_columns(cfg))
    period = len(c)
    cext = np.concatenate([c, c[:S]])
    idx = (np.arange(period)[None, :] + np.arange(S)[:, None])
    fresh = terms_from_coordinate_products(cext[idx]) + 1
    step = period if anchor_every is None else int(anchor_every)
    worst = 0.0
    for j0 in range(0, period, step):
        j1 = min(j0 + step, period)
        run = np.empty(j1 - j0, dtype=EXT)
        run[0] = fresh[j0]
        run[1:] = cext[j0 + S : j1 - 1 + S] / cext[j0 : j1 - 1]
        slid = np.multiply.accumulate(run)
        worst = max(worst, float(np.max(np.abs(slid / fresh[j0:j1] - 1))))
    return worst


def random_regular_top(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """``d`` columns with a random regular upper ``d x d`` block and zero lower rows."""
    span = TopSpan(d)
    cols = []
    while len(cols) < d:
        v = int(rng.integers(1, 1 << d))
        if span.add(v):
            cols.append(v << (n - d))
    return np.array(cols, dtype=np.uint64)


def _seq_rng(seed, d, stage, t):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, d, stage, t])))


@dataclass(frozen=True)
class SeqSearchResult:
    config: SeqGenConfig
    wafom: float
    trials: int
    stage1_best: float
    seconds: float


def search_sequential(
    n: int,
    d: int,
    S: int,
    trials: int,
    q: int = 3,
    seed: int = 0,
    poly: PrimitivePoly | None = None,
    tables: WafomTableSet | None = None,
) -> SeqSearchResult:
    """Random search over ``U`` for a fixed primitive polynomial.

    The first half of the trials draws the regular upper ``d x d`` block
    (lower rows zero); the second half keeps the best block and randomizes
    rows ``d+1..n``.  The incumbent is kept unless a trial is strictly better.
    """
    t0 = time.perf_counter()
    poly = primitive_poly(d) if poly is None else poly
    if poly.degree != d:
        raise ValueError("polynomial degree must equal d")
    if trials < 1:
        raise ValueError("trials must be positive")
    tables = build_tables(n, q) if tables is None else tables
    first = max(1, math.ceil(trials / 2)) if n > d else trials
    best_cfg, best = None, math.inf
    for t in range(first):
        U = random_regular_top(n, d, _seq_rng(seed, d, 1, t))
        cfg = SeqGenConfig(poly, n, U)
        w = wafom_sequential(cfg, S, tables).value
        if w < best:
            best_cfg, best = cfg, w
    stage1 = best
    top = best_cfg.U
    low_bits = n - d
    for t in range(trials - first):
        rng = _seq_rng(seed, d, 2, t)
        low = rng.integers(0, 1 << low_bits, size=d, dtype=np.uint64)
        cfg = SeqGenConfig(poly, n, top | low)
        w = wafom_sequential(cfg, S, tables).value
        if w < best:
            best_cfg, best = cfg, w
    return SeqSearchResult(best_cfg, best, trials, stage1, time.perf_counter() - t0)
