import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import bits_of, exact_term, exact_wafom, random_net
from wafomnet._summation import SUM_BLOCK, block_sums, exact_total
from wafomnet.f2 import GeneratingMatrixSet, RangeError
from wafomnet.wafom import (
    build_tables,
    naive_coordinate_products,
    wafom_naive,
    wafom_point_term,
    wafom_tabled,
)


def test_point_term_examples():
    assert wafom_point_term([0], 2) == 0.875
    assert wafom_point_term([0b10], 2) == -0.375
    assert wafom_point_term([0, 0], 2, S=2) == 2.515625
    with pytest.raises(ValueError):
        wafom_point_term([0, 0], 2, S=3)


def test_naive_examples():
    G = GeneratingMatrixSet(2, [[0b10]])
    assert wafom_naive(G, 0).value == 0.875
    assert wafom_naive(GeneratingMatrixSet(1, [[1]]), 1).value == 0.0
    with pytest.raises(RangeError):
        wafom_naive(G, 2)


def test_naive_matches_exact_rationals():
    rng = np.random.default_rng(20)
    for _ in range(10):
        G = random_net(rng, 4, 2, 3, regular=True)
        got = wafom_naive(G, 3).value
        want = float(exact_wafom(G, 3))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_table_entries():
    t = build_tables(2, 1).tables[0]
    assert t[0] == 1.875 and t[3] == 0.375
    assert build_tables(4, 2).tables[1][0] == 1.1953125


def test_table_product_matches_per_bit_product():
    tables = build_tables(30, 3)
    cols = np.random.default_rng(21).integers(0, 1 << 30, size=100, dtype=np.uint64)
    np.testing.assert_allclose(
        tables.coordinate_products(cols).astype(float),
        naive_coordinate_products(cols, 30).astype(float),
        rtol=1e-15,
    )


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(30, 3), (30, 5), (12, 4), (8, 8), (30, 2)]), st.integers(0, 2**52 - 1))
def test_segment_index_matches_bit_extraction(nq, raw):
    n, q = nq
    tables = build_tables(n, q)
    col = raw & ((1 << n) - 1)
    bits = bits_of(col, n)
    l = n // q
    for i in range(q):
        want = sum(bits[i * l + j - 1] << (l - j) for j in range(1, l + 1))
        assert int(tables.segment(np.array([col], dtype=np.uint64), i)[0]) == want


def test_build_tables_rejects_nondivisor():
    with pytest.raises(ValueError):
        build_tables(30, 4)


def test_table_n_mismatch():
    G = random_net(np.random.default_rng(22), 12, 2, 4)
    with pytest.raises(ValueError):
        wafom_tabled(G, 2, build_tables(30, 3))


def test_tabled_at_depth_zero():
    tables = build_tables(30, 3)
    G = random_net(np.random.default_rng(23), 30, 5, 3)
    zero_product = math.prod(float(t[0]) for t in tables.tables)
    assert wafom_tabled(G, 0, tables).value == pytest.approx(zero_product**5 - 1, rel=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 5, 6, 10])
def test_tabled_matches_naive(q):
    rng = np.random.default_rng(24 + q)
    tables = build_tables(30, q)
    for d in (1, 5, 11):
        G = random_net(rng, 30, 5, d, regular=True)
        a, b = wafom_tabled(G, d, tables).value, wafom_naive(G, d).value
        assert abs(a - b) <= 1e-12 * abs(b)


def test_full_space_is_zero():
    # block-identity matrices span all of F2^{n x S}
    for n, S in [(1, 1), (2, 3), (3, 4), (4, 3), (6, 2), (12, 1)]:
        cols = np.zeros((S, n * S), dtype=np.uint64)
        for T in range(S):
            for j in range(n):
                cols[T, T * n + j] = 1 << (n - 1 - j)
        G = GeneratingMatrixSet(n, cols)
        assert abs(wafom_naive(G, n * S).value) <= 1e-12


def test_thread_count_invariance():
    G = random_net(np.random.default_rng(25), 30, 5, 18)
    tables = build_tables(30, 3)
    one = wafom_tabled(G, 18, tables, n_jobs=1).value
    assert wafom_tabled(G, 18, tables, n_jobs=4).value == one
    assert wafom_naive(G, 18, n_jobs=3).value == wafom_naive(G, 18).value


def test_wafom_value_helpers():
    G = random_net(np.random.default_rng(26), 30, 2, 6, regular=True)
    w = wafom_tabled(G, 6)
    assert float(w) == w.value and w.log10 == math.log10(w.value)
    assert (w.d, w.n, w.S) == (6, 30, 2)


def test_nonnegative_on_regular_nets():
    # observed, not guaranteed for arbitrary nets
    rng = np.random.default_rng(27)
    for _ in range(5):
        G = random_net(rng, 30, 3, 10, regular=True)
        assert wafom_tabled(G, 10).value > 0


def test_block_sums_are_grouping_invariant():
    rng = np.random.default_rng(28)
    x = rng.standard_normal(8 * SUM_BLOCK).astype(np.longdouble)
    whole = exact_total(block_sums(x))
    halves = exact_total(
        np.concatenate([block_sums(x[: 4 * SUM_BLOCK]), block_sums(x[4 * SUM_BLOCK :])])
    )
    assert whole == halves
    assert exact_total(block_sums(x)[::-1]) == whole


def test_exact_term_oracle_sanity():
    assert exact_term((0,), 2) == pytest.approx(0.875)
