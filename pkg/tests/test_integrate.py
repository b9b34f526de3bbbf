import math

import numpy as np
import pytest

from _oracles import random_net
from wafomnet.f2 import GeneratingMatrixSet, enumerate_points_gray, point_to_reals
from wafomnet.genz import instance_for
from wafomnet.integrate import (
    IntegrationRequest,
    NonFiniteIntegrandError,
    digital_shift,
    mc_integrate,
    net_values,
    qmc_integrate,
    qmc_integrate_nested,
)


def ones(X):
    return np.ones(len(X))


def first(X):
    return X[:, 0]


def test_constant_is_exact():
    G = random_net(np.random.default_rng(50), 30, 3, 10)
    assert qmc_integrate(IntegrationRequest(G, 10, ones)) == 1.0
    assert mc_integrate(lambda X: np.full(len(X), 2.5), 3, 1000, 1) == 2.5


def test_four_point_mean():
    n = 30
    G = GeneratingMatrixSet(n, [[1 << (n - 1), 1 << (n - 2)]])
    est = qmc_integrate(IntegrationRequest(G, 2, first, shift=True))
    assert est == 0.375 + 2.0**-31
    assert qmc_integrate(IntegrationRequest(G, 2, first, shift=False)) == 0.375


def test_linearity():
    G = random_net(np.random.default_rng(51), 30, 2, 12)
    f = lambda X: np.sin(3 * X[:, 0]) * X[:, 1]
    g = lambda X: np.exp(X[:, 0] - X[:, 1])
    a, b = 1.7, -0.3
    lhs = qmc_integrate(IntegrationRequest(G, 12, lambda X: a * f(X) + b * g(X)))
    rhs = a * qmc_integrate(IntegrationRequest(G, 12, f)) + b * qmc_integrate(
        IntegrationRequest(G, 12, g)
    )
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_step_function_equals_cell_average():
    # f constant on each dyadic cell of width 2**-n: shifted and unshifted agree
    n = 8
    G = random_net(np.random.default_rng(52), n, 2, 6, regular=True)
    rng = np.random.default_rng(53)
    table = rng.standard_normal((1 << n, 1 << n))

    def step(X):
        i = np.floor(X * (1 << n)).astype(int)
        return table[i[:, 0], i[:, 1]]

    pts = enumerate_points_gray(G, 6)
    want = math.fsum(table[int(p[0]), int(p[1])] for p in pts) / 64
    for shift in (True, False):
        assert qmc_integrate(IntegrationRequest(G, 6, step, shift)) == pytest.approx(want, rel=1e-15)


def test_shifted_points_stay_inside():
    G = random_net(np.random.default_rng(54), 30, 3, 9)
    seen = []
    net_values(G, 9, lambda X: seen.append(X.copy()) or np.ones(len(X)), True)
    X = np.vstack(seen)
    assert X.min() >= digital_shift(30) and X.max() < 1


def test_non_finite_names_point():
    G = random_net(np.random.default_rng(55), 30, 2, 4)
    with pytest.raises(NonFiniteIntegrandError, match="point 0"), np.errstate(divide="ignore"):
        qmc_integrate(IntegrationRequest(G, 4, lambda X: 1 / X[:, 0], shift=False))
    with pytest.raises(NonFiniteIntegrandError):
        mc_integrate(lambda X: np.full(len(X), np.nan), 2, 10, 0)
    with pytest.raises(ValueError):
        qmc_integrate(IntegrationRequest(G, 4, lambda X: np.ones(3)))


def test_depth_checked():
    G = random_net(np.random.default_rng(56), 30, 2, 4)
    with pytest.raises(ValueError):
        IntegrationRequest(G, 5, ones)


def test_nested_matches_individual():
    G = random_net(np.random.default_rng(57), 30, 3, 17)
    f = lambda X: np.cos(X.sum(axis=1))
    nested = qmc_integrate_nested(G, [5, 12, 17], f)
    for d, v in nested.items():
        assert v == qmc_integrate(IntegrationRequest(G, d, f))


def test_mc_reproducible_and_unbiased():
    a = mc_integrate(first, 3, 1 << 20, [9, 9])
    assert a == mc_integrate(first, 3, 1 << 20, [9, 9])
    assert abs(a - 0.5) <= 3 * math.sqrt(1 / 12) / math.sqrt(1 << 20)
    with pytest.raises(ValueError):
        mc_integrate(first, 1, 0, 0)


def test_gaussian_error_shrinks_with_depth():
    from wafomnet.search import SearchConfig, search_extensible

    G, _ = search_extensible(SearchConfig(n=30, m=17, S=5, M=8, master_seed=2))
    better = 0
    for k in range(20):
        inst, _ = instance_for("gaussian", 5, 3.515, 3, k)
        exact = inst.exact()
        est = qmc_integrate_nested(G, [16, 17], inst)
        better += abs(est[17] - exact) <= abs(est[16] - exact)
    assert better >= 12
