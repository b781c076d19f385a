from collections import Counter
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xstpir.linalg import rank
from xstpir.protocol import (Answer, Database, DimensionMismatch, InconsistentAnswers,
                             IndexOutOfRange, Query, ServerMismatch, StorageShare, decode,
                             decoder_for, encode_storage, gen_queries, run_pipeline, server_answer)

import grid
from oracles import rank_mod_p


def test_zero_database_zero_randomness():
    s = grid.rational(11, 2, 1, 1)
    shares = encode_storage(s, Database.zeros(3, 2), zero_randomness=True)
    assert len(shares) == 6 and all(not sh.Y.any() for sh in shares)


def test_empty_database():
    s = grid.rational(11, 2, 1, 1)
    assert encode_storage(s, Database.zeros(0, 2), rng=0) == []


def test_dimension_checks():
    s = grid.rational(11, 2, 1, 1)
    with pytest.raises(DimensionMismatch):
        encode_storage(s, Database.zeros(2, 4), rng=0)
    with pytest.raises(DimensionMismatch):
        Database(np.zeros(3))


def test_single_server_storage_view_is_uniform():
    # K=1: each server sees s_l + z_l * g_l(n) with g_l(n) != 0
    s = grid.rational(11, 2, 1, 1)
    F = s.field
    assert np.all(s.Gsec != 0)
    secret = np.array([4, 9])
    for n in range(s.N):
        views = Counter()
        for z in product(range(11), repeat=2):
            y = tuple(F.add(int(secret[l]), F.mul(z[l], int(s.Gsec[l, 0, n]))) for l in range(2))
            views[y] += 1
        assert len(views) == 121 and set(views.values()) == {1}


def test_query_index_checks():
    s = grid.rational(11, 2, 1, 1)
    assert len(gen_queries(s, 1, 1, rng=0)) == s.N
    with pytest.raises(IndexOutOfRange):
        gen_queries(s, 0, 3, rng=0)
    with pytest.raises(IndexOutOfRange):
        gen_queries(s, 4, 3, rng=0)


def test_single_file_queries_still_random():
    s = grid.rational(11, 2, 1, 1)
    qs = gen_queries(s, 1, 1, rng=7)
    assert any(not np.array_equal(q.D[0], s.H[:, q.server_index]) for q in qs)


def test_zero_randomness_query_is_h_column():
    s = grid.rational(13, 4, 2, 1)
    for q in gen_queries(s, 1, 3, zero_randomness=True):
        assert np.array_equal(q.D[0], s.H[:, q.server_index])
        assert not q.D[1:].any()


def test_single_server_query_marginal_uniform():
    s = grid.rational(7, 2, 1, 1)
    F = s.field
    for theta in (1, 2):
        for n in range(s.N):
            views = Counter()
            for t in product(range(7), repeat=4):
                D = [F.mul(t[i], int(s.Gpriv[0, n])) for i in range(4)]
                k0 = (theta - 1) * 2
                D[k0] = F.add(D[k0], int(s.H[0, n]))
                D[k0 + 1] = F.add(D[k0 + 1], int(s.H[1, n]))
                views[tuple(D)] += 1
            assert len(views) == 7**4


def test_server_answer_basics():
    from xstpir.gf import gf
    F = gf(11)
    zero = StorageShare(0, np.zeros((2, 3), dtype=np.int64), F)
    q = Query(0, np.full((2, 3), 5))
    assert server_answer(zero, q).value == 0
    assert server_answer(StorageShare(2, np.array([[3]]), F), Query(2, np.array([[7]]))).value == 10
    with pytest.raises(ServerMismatch):
        server_answer(zero, Query(1, q.D))
    with pytest.raises(DimensionMismatch):
        server_answer(zero, Query(0, np.zeros((3, 2), dtype=np.int64)))


@pytest.mark.parametrize("args", grid.RATIONAL_GRID[::7])
def test_answers_lie_in_row_space(args):
    s = grid.rational(*args)
    db = Database.random(s.field, 3, s.L, 1)
    res = run_pipeline(s, db, 2, seed=2)
    A = np.array([a.value for a in res.answers])
    M = s.stacked()
    assert rank_mod_p(np.vstack([M, A]).tolist(), s.field.p) == rank_mod_p(M.tolist(), s.field.p)


def test_decode_zero_database_with_noise():
    s = grid.hermitian(5, 4, 1, 1)
    res = run_pipeline(s, Database.zeros(2, s.L), 2, seed=11)
    assert not res.decoded.any()
    assert any(sh.Y.any() for sh in res.shares)


@pytest.mark.parametrize("args", [(11, 2, 1, 1), (13, 4, 2, 3), (29, 12, 3, 3)])
def test_honest_runs_recover_file(args):
    s = grid.rational(*args)
    for seed in range(10):
        db = Database.random(s.field, 3, s.L, seed)
        theta = seed % 3 + 1
        assert np.array_equal(run_pipeline(s, db, theta, seed).decoded, db.file(theta))


def test_decode_input_checks():
    s = grid.rational(11, 2, 1, 1)
    res = run_pipeline(s, Database.zeros(1, 2), 1, seed=0)
    with pytest.raises(DimensionMismatch):
        decode(s, res.answers[:-1])
    with pytest.raises(ServerMismatch):
        decode(s, res.answers[::-1])


def _corruption_detection_rate(s, trials, seed):
    rng = np.random.default_rng(seed)
    F = s.field
    db = Database.random(F, 3, s.L, rng)
    res = run_pipeline(s, db, 1, rng)
    detected = 0
    for _ in range(trials):
        n = int(rng.integers(s.N))
        e = int(rng.integers(1, F.order))
        bad = list(res.answers)
        bad[n] = Answer(n, F.add(bad[n].value, e))
        try:
            decode(s, bad)
        except InconsistentAnswers:
            detected += 1
    return detected / trials


def test_corruption_detection_q11():
    s = grid.rational(11, 2, 1, 1)
    assert _corruption_detection_rate(s, 1000, 0) >= 0.99


@pytest.mark.parametrize("args", [(11, 2, 1, 1), (13, 2, 1, 1), (17, 2, 1, 1)])
def test_corruption_detected_exactly_on_check_support(args):
    # a single error at n is caught iff some parity check is nonzero at n
    s = grid.rational(*args)
    checks = decoder_for(s).checks
    F = s.field
    res = run_pipeline(s, Database.random(F, 2, s.L, 3), 1, seed=4)
    for n in range(s.N):
        bad = list(res.answers)
        bad[n] = Answer(n, F.add(bad[n].value, 1))
        caught = True
        try:
            decode(s, bad)
            caught = False
        except InconsistentAnswers:
            pass
        assert caught == bool(checks[n].any())
        punctured = np.delete(s.stacked(), n, axis=1)
        assert caught == (rank(F, punctured) == s.stacked().shape[0])


def test_q13_detects_every_single_corruption():
    assert _corruption_detection_rate(grid.rational(13, 2, 1, 1), 300, 1) == 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3))
def test_decoding_is_linear_in_database(seed, theta):
    s = grid.rational(13, 4, 2, 2)
    F = s.field
    d1 = Database.random(F, 3, s.L, seed)
    d2 = Database.random(F, 3, s.L, seed + 1)
    d12 = Database(F.vadd(d1.symbols, d2.symbols))
    r1, r2, r12 = (run_pipeline(s, d, theta, seed=99).decoded for d in (d1, d2, d12))
    assert np.array_equal(r12, F.vadd(r1, r2))


def test_download_equals_n():
    s = grid.hermitian(5, 4, 1, 1)
    res = run_pipeline(s, Database.random(s.field, 2, s.L, 0), 1, seed=0)
    assert len(res.answers) == s.N
    assert s.rate == s.params.rate == Fraction(s.L, len(res.answers))


def test_pipeline_is_replayable():
    s = grid.rational(17, 4, 2, 2)
    db = Database.random(s.field, 3, s.L, 5)
    a, b = run_pipeline(s, db, 3, seed=8), run_pipeline(s, db, 3, seed=8)
    assert [x.value for x in a.answers] == [x.value for x in b.answers]
