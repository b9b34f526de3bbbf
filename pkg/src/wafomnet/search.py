"""Greedy column-by-column random search for extensible low-WAFOM nets.

Stage ``d`` keeps the first ``d - 1`` columns of every generating matrix
fixed, draws ``M`` candidate tuples of ``d``-th columns (one column per
coordinate, each redrawn until the upper ``d x d`` block stays regular) and
keeps the tuple whose net ``P_d`` has the smallest WAFOM.  Every stage only
appends columns, so the result is extensible: its first ``d`` columns are
exactly the stage-``d`` winner.

Trial ``t`` of stage ``d`` draws from its own counter-based stream keyed by
``(master_seed, d, t)``; results do not depend on scheduling.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._summation import SUM_BLOCK, SUM_BLOCK_BITS, block_sums, exact_total
from .f2 import MAX_DIGITS, GeneratingMatrixSet, TopSpan, enumerate_points_gray, top_span
from .wafom import (
    WafomTableSet,
    _terms_tabled_cm,
    _wafom_blocks,
    build_tables,
)

log = logging.getLogger(__name__)

TRIAL_BATCH = 64


@dataclass(frozen=True)
class SearchConfig:
    n: int = 30
    m: int = 25
    S: int = 5
    M: int = 7000
    q: int = 3
    master_seed: int = 0
    max_resident_d: int = 20
    n_jobs: int = 1

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIGITS:
            raise ValueError(f"n must be in [1, {MAX_DIGITS}]")
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n for projection regularity")
        if self.S < 1:
            raise ValueError("S must be positive")
        if self.M < 1:
            raise ValueError("M must be positive")
        if self.q < 1 or self.n % self.q:
            raise ValueError(f"q={self.q} must divide n={self.n}")
        if self.max_resident_d < SUM_BLOCK_BITS:
            raise ValueError(f"max_resident_d must be at least {SUM_BLOCK_BITS}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class StageRecord:
    d: int
    best_wafom: float
    trials: int
    rejections: int
    seconds: float
    best_trial: int


@dataclass
class SearchTrace:
    records: list[StageRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def wafom(self) -> np.ndarray:
        """Best WAFOM per stage, index ``d - 1``."""
        return np.array([r.best_wafom for r in self.records])


def trial_rng(master_seed: int, d: int, t: int) -> np.random.Generator:
    """Independent Philox stream for trial ``t`` of stage ``d``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, d, t])))


def random_candidate_columns(
    prefix: GeneratingMatrixSet,
    rng: np.random.Generator,
    spans: list[TopSpan] | None = None,
) -> tuple[np.ndarray, int]:
    """Draw the next column for every coordinate by rejection sampling.

    Each coordinate draws ``n`` random bits until the upper ``d x d`` block
    (``d = prefix.m + 1``) is regular.  Returns ``(columns, rejections)``.
    """
    n, d = prefix.n, prefix.m + 1
    if d > n:
        raise ValueError(f"cannot add column {d} to matrices with n={n} rows")
    if spans is None:
        spans = [top_span(prefix.columns[i], d, n) for i in range(prefix.S)]
    out = np.empty(prefix.S, dtype=np.uint64)
    rejections = 0
    for i in range(prefix.S):
        while True:
            col = int(rng.integers(0, 1 << n, dtype=np.uint64))
            if spans[i].reduce(col >> (n - d)):
                out[i] = col
                break
            rejections += 1
    return out, rejections


class StagePrefix:
    """Cached state of ``P_{d-1}`` for incremental evaluation of stage ``d``.

    Holds the Gray-ordered points (coordinate-major) while ``d - 1`` does not
    exceed ``max_resident_d``, and either the per-point terms (small nets) or
    the block sums of the terms.
    """

    def __init__(self, G, tables, max_resident_d=20, n_jobs=1):
        self.G = G
        self.tables = tables
        self.max_resident_d = max_resident_d
        self.n_jobs = n_jobs
        d = G.m
        self.points = None
        self.terms = None
        self.sums = None
        if d <= max_resident_d:
            self.points = np.ascontiguousarray(enumerate_points_gray(G, d).T)
        if (1 << d) < SUM_BLOCK:
            pts = self.points
            self.terms = _terms_tabled_cm(pts, tables)
        else:
            self.sums = _wafom_blocks(
                G, d, lambda cols: _terms_tabled_cm(cols, tables), n_jobs
            )

    @property
    def d(self) -> int:
        return self.G.m

    def new_parts(self, candidate):
        """Terms (small) or block sums of the Gray second half ``P_{d-1} ^ x_new``."""
        candidate = np.asarray(candidate, dtype=np.uint64)
        if self.points is not None:
            new_pts = self.points[:, ::-1] ^ candidate[:, None]
            terms = _terms_tabled_cm(new_pts, self.tables)
            return terms if self.terms is not None else block_sums(terms)
        G_ext = self.G.extend(candidate)
        d = self.d + 1
        return _wafom_blocks(
            G_ext,
            d,
            lambda cols: _terms_tabled_cm(cols, self.tables),
            self.n_jobs,
            start=1 << (d - 1),
        )

    def value_from_parts(self, parts) -> float:
        d = self.d + 1
        if self.terms is not None:
            return exact_total(block_sums(np.concatenate([self.terms, parts]))) / (1 << d)
        return exact_total(np.concatenate([self.sums, parts])) / (1 << d)

    def advance(self, candidate, parts) -> "StagePrefix":
        """Prefix for the next stage after accepting ``candidate``."""
        candidate = np.asarray(candidate, dtype=np.uint64)
        nxt = StagePrefix.__new__(StagePrefix)
        nxt.G = self.G.extend(candidate)
        nxt.tables = self.tables
        nxt.max_resident_d = self.max_resident_d
        nxt.n_jobs = self.n_jobs
        d = nxt.G.m
        nxt.points = None
        if self.points is not None and d <= self.max_resident_d:
            nxt.points = np.concatenate(
                [self.points, self.points[:, ::-1] ^ candidate[:, None]], axis=1
            )
        nxt.terms = None
        nxt.sums = None
        if self.terms is not None:
            terms = np.concatenate([self.terms, parts])
            if (1 << d) < SUM_BLOCK:
                nxt.terms = terms
            else:
                nxt.sums = block_sums(terms)
        else:
            nxt.sums = np.concatenate([self.sums, parts])
        return nxt


def evaluate_stage(prefix: StagePrefix, candidate, tables: WafomTableSet | None = None) -> float:
    """WAFOM of ``P_d = P_{d-1} u (P_{d-1} ^ x_new)`` from cached prefix state.

    ``candidate`` holds the ``d``-th column of every coordinate.  The result is
    bit-identical to ``wafom_tabled`` on the extended matrices.
    """
    if tables is not None and tables is not prefix.tables:
        prefix = StagePrefix(prefix.G, tables, prefix.max_resident_d, prefix.n_jobs)
    return prefix.value_from_parts(prefix.new_parts(candidate))


def _run_trial(prefix, spans, seed, d, t):
    rng = trial_rng(seed, d, t)
    cand, rej = random_candidate_columns(prefix.G, rng, spans)
    parts = prefix.new_parts(cand)
    return prefix.value_from_parts(parts), cand, parts, rej


def search_extensible(cfg: SearchConfig, callback=None) -> tuple[GeneratingMatrixSet, SearchTrace]:
    """Run the greedy extensible search; returns the matrices and per-stage trace.

    ``callback(record)`` is invoked after each stage when given.
    """
    tables = build_tables(cfg.n, cfg.q)
    G0 = GeneratingMatrixSet(cfg.n, np.zeros((cfg.S, 0), dtype=np.uint64))
    # stages run one trial at a time inside the prefix; threads go to trials
    prefix = StagePrefix(G0, tables, cfg.max_resident_d, 1)
    trace = SearchTrace()
    pool = ThreadPoolExecutor(max_workers=cfg.n_jobs) if cfg.n_jobs > 1 else None
    try:
        for d in range(1, cfg.m + 1):
            t0 = time.perf_counter()
            spans = [top_span(prefix.G.columns[i], d, cfg.n) for i in range(cfg.S)]
            best = None
            rejections = 0
            for lo in range(0, cfg.M, TRIAL_BATCH):
                ts = range(lo, min(lo + TRIAL_BATCH, cfg.M))
                if pool is None:
                    results = [_run_trial(prefix, spans, cfg.master_seed, d, t) for t in ts]
                else:
                    results = list(
                        pool.map(lambda t: _run_trial(prefix, spans, cfg.master_seed, d, t), ts)
                    )
                for t, (value, cand, parts, rej) in zip(ts, results):
                    rejections += rej
                    # strict comparison: earliest trial wins ties
                    if best is None or value < best[0]:
                        best = (value, cand, parts, t)
            value, cand, parts, t_best = best
            prefix = prefix.advance(cand, parts)
            rec = StageRecord(d, value, cfg.M, rejections, time.perf_counter() - t0, t_best)
            trace.records.append(rec)
            log.info("stage d=%d wafom=%.6e rejections=%d (%.2fs)", d, value, rejections, rec.seconds)
            if callback is not None:
                callback(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return prefix.G, trace
