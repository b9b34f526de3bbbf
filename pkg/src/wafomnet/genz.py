"""The Genz test-function package and the median relative-error benchmark.

Each family is parameterized by a difficulty vector ``a`` (renormalized so
that ``sum(a) == h``) and a shift vector ``u``; all six have closed-form
integrals over the unit cube.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from .f2 import GeneratingMatrixSet
from .integrate import mc_integrate, mc_rng, qmc_integrate_nested

FAMILIES = (
    "oscillatory",
    "product_peak",
    "corner_peak",
    "gaussian",
    "continuous",
    "discontinuous",
)
CONTROL_FAMILY = "constant"

H_PRESETS = {
    5: (4.5, 3.625, 0.925, 3.515, 1.02, 2.15),
    10: (9.0, 7.25, 1.85, 7.03, 2.04, 4.3),
}

LOG10_FLOOR = -20.0
"""Reported in place of ``log10(0)`` when an estimate is exact."""

ZERO_INTEGRAL_GUARD = 1e-12


def default_h(S: int) -> tuple[float, ...]:
    """Difficulty per family: the preset vectors for ``S`` in (5, 10).

    Other dimensions use the straight line through both preset vectors,
    which is ``h5 * S / 5``.
    """
    if S in H_PRESETS:
        return H_PRESETS[S]
    return tuple(h * S / 5 for h in H_PRESETS[5])


def family_index(family: str) -> int:
    if family == CONTROL_FAMILY:
        return len(FAMILIES)
    try:
        return FAMILIES.index(family)
    except ValueError:
        raise ValueError(
            f"unknown Genz family {family!r}; choose from {', '.join(FAMILIES)}"
        ) from None


@dataclass(frozen=True, eq=False)
class GenzInstance:
    family: str
    a: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        family_index(self.family)
        a = np.array(self.a, dtype=np.float64).reshape(-1)
        u = np.array(self.u, dtype=np.float64).reshape(-1)
        if a.shape != u.shape or a.size == 0:
            raise ValueError("a and u must be nonempty vectors of equal length")
        if np.any(a <= 0):
            raise ValueError("all a_i must be positive")
        if np.any((u < 0) | (u > 1)):
            raise ValueError("all u_i must lie in [0, 1]")
        a.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "u", u)

    @property
    def S(self) -> int:
        return len(self.a)

    @property
    def h(self) -> float:
        return math.fsum(self.a)

    def __call__(self, x):
        return genz_eval(self, x)

    def exact(self) -> float:
        return exact_integral(self)


def renormalize(a_raw, h: float) -> np.ndarray:
    """Scale ``a_raw`` so its entries sum to ``h``."""
    a_raw = np.asarray(a_raw, dtype=np.float64)
    return a_raw * (h / math.fsum(a_raw))


def make_instance(family: str, S: int, h: float, rng: np.random.Generator) -> GenzInstance:
    """Draw ``a, u`` uniformly on the unit cube and renormalize ``a`` to sum ``h``."""
    if h <= 0:
        raise ValueError("h must be positive")
    a = rng.random(S)
    while np.any(a == 0):
        a = rng.random(S)
    u = rng.random(S)
    return GenzInstance(family, renormalize(a, h), u)


def _linear(a, X):
    # fixed accumulation order; avoids BLAS-dependent rounding
    s = np.zeros(len(X))
    for i in range(X.shape[1]):
        s += a[i] * X[:, i]
    return s


def genz_eval(inst: GenzInstance, x) -> np.ndarray | float:
    """Evaluate the family at one point ``(S,)`` or many ``(N, S)``."""
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    a, u, S = inst.a, inst.u, inst.S
    fam = inst.family
    if fam == "oscillatory":
        y = np.cos(2 * math.pi * u[0] + _linear(a, X))
    elif fam == "product_peak":
        y = np.ones(len(X))
        for i in range(S):
            y /= a[i] ** -2 + (X[:, i] - u[i]) ** 2
    elif fam == "corner_peak":
        y = (1 + _linear(a, X)) ** -(S + 1)
    elif fam == "gaussian":
        e = np.zeros(len(X))
        for i in range(S):
            e += a[i] ** 2 * (X[:, i] - u[i]) ** 2
        y = np.exp(-e)
    elif fam == "continuous":
        e = np.zeros(len(X))
        for i in range(S):
            e += a[i] * np.abs(X[:, i] - u[i])
        y = np.exp(-e)
    elif fam == "discontinuous":
        cut = X[:, 0] > u[0]
        if S > 1:
            cut |= X[:, 1] > u[1]
        y = np.where(cut, 0.0, np.exp(_linear(a, X)))
    else:
        y = np.full(len(X), inst.h)
    return float(y[0]) if single else y


def exact_integral(inst: GenzInstance) -> float:
    """Closed-form integral over ``[0, 1]^S``."""
    a, u, S = inst.a, inst.u, inst.S
    fam = inst.family
    if fam == "oscillatory":
        return 2.0**S * math.cos(2 * math.pi * u[0] + math.fsum(a) / 2) * math.prod(
            math.sin(ai / 2) / ai for ai in a
        )
    if fam == "product_peak":
        return math.prod(
            ai * (math.atan(ai * (1 - ui)) + math.atan(ai * ui)) for ai, ui in zip(a, u)
        )
    if fam == "corner_peak":
        # inclusion-exclusion over the cube's vertices
        terms = []
        for v in range(1 << S):
            sel = [a[i] for i in range(S) if v >> i & 1]
            sign = -1.0 if len(sel) % 2 else 1.0
            terms.append(sign / (1 + math.fsum(sel)))
        return math.fsum(terms) / (math.factorial(S) * math.prod(a))
    if fam == "gaussian":
        return math.prod(
            math.sqrt(math.pi) / (2 * ai) * (math.erf(ai * (1 - ui)) + math.erf(ai * ui))
            for ai, ui in zip(a, u)
        )
    if fam == "continuous":
        return math.prod(
            (2 - math.exp(-ai * ui) - math.exp(-ai * (1 - ui))) / ai for ai, ui in zip(a, u)
        )
    if fam == "discontinuous":
        out = 1.0
        for i in range(S):
            top = min(u[i], 1.0) if i < 2 else 1.0
            out *= math.expm1(a[i] * top) / a[i]
        return out
    return inst.h


def log10_relerr(exact: float, estimate: float) -> float:
    err = abs(exact - estimate) / abs(exact)
    return math.log10(err) if err > 10.0**LOG10_FLOOR else LOG10_FLOOR


@dataclass(frozen=True)
class BenchmarkRow:
    family: str
    d: int
    median_log10_relerr: float
    samples: int
    h: float
    baseline_median_log10_relerr: float | None = None


@dataclass
class BenchmarkResult:
    rows: list[BenchmarkRow] = field(default_factory=list)
    redraws: dict[str, int] = field(default_factory=dict)

    def get(self, family: str, d: int) -> BenchmarkRow:
        for r in self.rows:
            if r.family == family and r.d == d:
                return r
        raise KeyError((family, d))


def instance_for(family: str, S: int, h: float, seed: int, sample: int) -> tuple[GenzInstance, int]:
    """Instance ``sample`` of ``family``; redraws while ``|I| < 1e-12``.

    Returns the instance and the number of redraws.
    """
    j = family_index(family)
    attempt = 0
    while True:
        inst = make_instance(family, S, h, mc_rng([seed, j, sample, attempt]))
        if abs(exact_integral(inst)) >= ZERO_INTEGRAL_GUARD:
            return inst, attempt
        attempt += 1


def run_benchmark(
    G: GeneratingMatrixSet,
    families=FAMILIES,
    h_vector=None,
    d_range=None,
    samples: int = 20,
    shift: bool = True,
    seed: int = 0,
    baseline: str | None = "mc",
) -> BenchmarkResult:
    """Median log10 relative error per (family, d) over ``samples`` instances.

    ``h_vector`` maps family name to difficulty (defaults to ``default_h``);
    the optional ``"mc"`` baseline uses a fresh seeded MC stream of the same
    size for every instance and ``d``.
    """
    S = G.S
    if samples < 1:
        raise ValueError("samples must be positive")
    d_range = list(range(1, G.m + 1)) if d_range is None else [int(d) for d in d_range]
    if max(d_range) > G.m or min(d_range) < 0:
        raise ValueError(f"d range must lie in [0, {G.m}]")
    if h_vector is None:
        h_vector = dict(zip(FAMILIES, default_h(S)))
    result = BenchmarkResult()
    for family in families:
        j = family_index(family)
        h = h_vector.get(family, 1.0) if family != CONTROL_FAMILY else 1.0
        qmc = {d: [] for d in d_range}
        mc = {d: [] for d in d_range}
        redraws = 0
        for k in range(samples):
            inst, extra = instance_for(family, S, h, seed, k)
            redraws += extra
            exact = exact_integral(inst)
            for d, est in qmc_integrate_nested(G, d_range, inst, shift).items():
                qmc[d].append(log10_relerr(exact, est))
            if baseline == "mc":
                for d in d_range:
                    est = mc_integrate(inst, S, 1 << d, [seed, j, k, d, 1])
                    mc[d].append(log10_relerr(exact, est))
        result.redraws[family] = redraws
        for d in d_range:
            base = statistics.median(mc[d]) if baseline == "mc" else None
            result.rows.append(
                BenchmarkRow(family, d, statistics.median(qmc[d]), samples, h, base)
            )
    return result
