import numpy as np
import pytest

from _oracles import random_net
from wafomnet.f2 import GeneratingMatrixSet, is_upper_square_regular
from wafomnet.search import (
    SearchConfig,
    StagePrefix,
    evaluate_stage,
    random_candidate_columns,
    search_extensible,
    trial_rng,
)
from wafomnet.wafom import build_tables, point_terms_tabled, wafom_tabled

N30 = build_tables(30, 3)


def empty(n, S):
    return GeneratingMatrixSet(n, np.zeros((S, 0), dtype=np.uint64))


def test_first_column_has_top_bit():
    rng = np.random.default_rng(30)
    for _ in range(50):
        cols, _ = random_candidate_columns(empty(8, 4), rng)
        assert all(int(c) >> 7 == 1 for c in cols)


def test_second_column_against_exhaustive_check():
    n = 6
    prefix = GeneratingMatrixSet(n, [[1 << (n - 1)]])
    # with first column e1, the candidate needs row-2 bit set
    for top2 in range(4):
        col = top2 << (n - 2)
        ok = is_upper_square_regular([1 << (n - 1), col], 2, n)
        assert ok == bool(top2 & 1)
    rng = np.random.default_rng(31)
    for _ in range(50):
        (c,), _ = random_candidate_columns(prefix, rng)
        assert (int(c) >> (n - 2)) & 1


def test_candidates_keep_regularity():
    rng = np.random.default_rng(32)
    G = random_net(rng, 30, 3, 7, regular=True)
    for _ in range(30):
        cand, rej = random_candidate_columns(G, rng)
        assert rej >= 0
        for T in range(3):
            cols = [int(c) for c in G.columns[T]] + [int(cand[T])]
            assert is_upper_square_regular(cols, 8, 30)


def test_evaluate_stage_first_column():
    prefix = StagePrefix(empty(30, 5), N30)
    cand = np.random.default_rng(33).integers(1 << 29, 1 << 30, size=5, dtype=np.uint64)
    pts = np.vstack([np.zeros(5, np.uint64), cand])
    want = float(point_terms_tabled(pts, N30).astype(float).mean())
    assert evaluate_stage(prefix, cand) == pytest.approx(want, rel=1e-15)


def test_evaluate_stage_degenerate_candidate():
    G = random_net(np.random.default_rng(34), 30, 5, 6, regular=True)
    prefix = StagePrefix(G, N30)
    assert evaluate_stage(prefix, np.zeros(5, np.uint64)) == pytest.approx(
        wafom_tabled(G, 6, N30).value, rel=1e-14
    )


@pytest.mark.parametrize("d", [3, 10, 13, 15])
def test_evaluate_stage_matches_full_evaluator(d):
    rng = np.random.default_rng(35 + d)
    G = random_net(rng, 30, 5, d - 1, regular=True)
    cand, _ = random_candidate_columns(G, rng)
    got = evaluate_stage(StagePrefix(G, N30), cand)
    assert got == wafom_tabled(G.extend(cand), d, N30).value


def test_evaluate_stage_with_other_tables():
    rng = np.random.default_rng(36)
    G = random_net(rng, 30, 2, 5, regular=True)
    cand, _ = random_candidate_columns(G, rng)
    t5 = build_tables(30, 5)
    got = evaluate_stage(StagePrefix(G, N30), cand, t5)
    assert got == pytest.approx(wafom_tabled(G.extend(cand), 6, t5).value, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(n=30, m=31)
    with pytest.raises(ValueError):
        SearchConfig(q=4)
    with pytest.raises(ValueError):
        SearchConfig(M=0)
    with pytest.raises(ValueError):
        SearchConfig(max_resident_d=5)
    with pytest.raises(ValueError):
        SearchConfig(master_seed=-1)


def test_single_trial_takes_first_draw():
    cfg = SearchConfig(n=30, m=8, S=3, M=1, master_seed=5)
    G, trace = search_extensible(cfg)
    for d in range(1, 9):
        prefix = G.truncate(d - 1)
        cand, _ = random_candidate_columns(prefix, trial_rng(5, d, 0))
        np.testing.assert_array_equal(cand, G.columns[:, d - 1])
        assert trace[d - 1].best_wafom == wafom_tabled(G, d, N30).value


def test_search_is_deterministic_and_extensible():
    cfg = SearchConfig(n=30, m=10, S=4, M=20, master_seed=11)
    G1, t1 = search_extensible(cfg)
    G2, t2 = search_extensible(cfg)
    assert G1 == G2
    np.testing.assert_array_equal(t1.wafom, t2.wafom)
    assert [r.rejections for r in t1] == [r.rejections for r in t2]
    assert G1.is_projection_regular()
    assert len(t1) == 10 and [r.d for r in t1] == list(range(1, 11))
    for d in range(1, 11):
        assert t1[d - 1].best_wafom == wafom_tabled(G1, d, N30).value


def test_threads_do_not_change_result():
    base = dict(n=30, m=9, S=3, M=70, master_seed=3)
    G1, t1 = search_extensible(SearchConfig(**base, n_jobs=1))
    G4, t4 = search_extensible(SearchConfig(**base, n_jobs=4))
    assert G1 == G4
    np.testing.assert_array_equal(t1.wafom, t4.wafom)


def test_winner_beats_every_candidate():
    cfg = SearchConfig(n=30, m=7, S=3, M=15, master_seed=8)
    G, trace = search_extensible(cfg)
    for d in (2, 5, 7):
        prefix = G.truncate(d - 1)
        best = trace[d - 1]
        for t in range(cfg.M):
            cand, _ = random_candidate_columns(prefix, trial_rng(8, d, t))
            w = wafom_tabled(prefix.extend(cand), d, N30).value
            assert best.best_wafom <= w
            if t < best.best_trial:
                assert w > best.best_wafom  # earliest minimum wins


def test_streaming_prefix_matches_resident():
    base = dict(n=30, m=15, S=2, M=6, master_seed=21)
    G_res, t_res = search_extensible(SearchConfig(**base, max_resident_d=20))
    G_str, t_str = search_extensible(SearchConfig(**base, max_resident_d=12))
    assert G_res == G_str
    np.testing.assert_array_equal(t_res.wafom, t_str.wafom)


def test_callback_sees_every_stage():
    seen = []
    search_extensible(SearchConfig(n=12, m=5, S=2, M=3, q=3), callback=seen.append)
    assert [r.d for r in seen] == [1, 2, 3, 4, 5]
