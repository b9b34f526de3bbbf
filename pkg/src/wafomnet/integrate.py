"""QMC integration over digital nets, and a seeded Monte Carlo baseline.

Integrands are vectorized: they take an ``(N, S)`` array of points in
``[0, 1)^S`` and return ``N`` values.  All means are formed with
``math.fsum`` (exactly rounded), so estimates are deterministic and do not
depend on how the point range is chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .f2 import GeneratingMatrixSet, _check_depth, iter_gray_blocks, point_to_reals

Integrand = Callable[[np.ndarray], np.ndarray]

EVAL_BLOCK_BITS = 16


class NonFiniteIntegrandError(ArithmeticError):
    pass


def digital_shift(n: int) -> float:
    """The cell-centering translation ``2**-(n+1)``."""
    return 2.0 ** -(n + 1)


@dataclass(frozen=True)
class IntegrationRequest:
    G: GeneratingMatrixSet
    d: int
    integrand: Integrand
    shift: bool = True

    def __post_init__(self):
        _check_depth(self.G, self.d)


def _checked_values(f: Integrand, X: np.ndarray, offset: int) -> np.ndarray:
    vals = np.asarray(f(X), dtype=np.float64)
    if vals.shape != (len(X),):
        raise ValueError(f"integrand returned shape {vals.shape}, expected ({len(X)},)")
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteIntegrandError(
            f"integrand value {vals[i]} at point {offset + i}: {X[i].tolist()}"
        )
    return vals


def net_values(G: GeneratingMatrixSet, d: int, f: Integrand, shift: bool = True) -> np.ndarray:
    """Integrand values over ``P_d`` in Gray-code order."""
    d = _check_depth(G, d)
    s = digital_shift(G.n) if shift else 0.0
    out = []
    for offset, pts in iter_gray_blocks(G, d, EVAL_BLOCK_BITS):
        out.append(_checked_values(f, point_to_reals(pts, G.n, s), offset))
    return np.concatenate(out)


def qmc_integrate(req: IntegrationRequest) -> float:
    """``1/2**d * sum_{x in P_d} f(x)``, optionally on shifted points."""
    vals = net_values(req.G, req.d, req.integrand, req.shift)
    return math.fsum(vals.tolist()) / (1 << req.d)


def qmc_integrate_nested(
    G: GeneratingMatrixSet, ds, f: Integrand, shift: bool = True
) -> dict[int, float]:
    """Estimates for several ``d`` from a single pass over the largest net.

    ``P_d`` is the first ``2**d`` Gray-ordered points of ``P_{d_max}``, so one
    set of evaluations serves every smaller ``d``.
    """
    ds = sorted({int(d) for d in ds})
    vals = net_values(G, ds[-1], f, shift)
    return {d: math.fsum(vals[: 1 << d].tolist()) / (1 << d) for d in ds}


def mc_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def mc_integrate(f: Integrand, S: int, N: int, seed) -> float:
    """Plain Monte Carlo mean of ``N`` uniform points from a seeded stream."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = mc_rng(seed)
    chunk = 1 << EVAL_BLOCK_BITS
    total = []
    for lo in range(0, N, chunk):
        X = rng.random((min(chunk, N - lo), S))
        total.append(_checked_values(f, X, lo))
    return math.fsum(np.concatenate(total).tolist()) / N
