import random

import numpy as np
import pytest

from twosq.arith import factorize, is_sum_two_squares
from twosq.errors import SegmentTooLarge
from twosq.sieve import MAX_SEGMENT_LEN, TwoSqSegment, count_N, iter_segments, sieve_segment, stream_E

from .conftest import brute_two_square_set


def test_segment_examples():
    assert sieve_segment(0, 11).members().tolist() == [0, 1, 2, 4, 5, 8, 9, 10]
    assert 3 not in sieve_segment(3, 4)
    assert sieve_segment(48, 51).members().tolist() == [49, 50]


def test_segment_against_bruteforce():
    limit = 10**5
    members = brute_two_square_set(limit)
    seg = sieve_segment(0, limit + 1)
    assert set(seg.members().tolist()) == members


def test_segment_against_factorization_criterion():
    rng = random.Random(7)
    points = [rng.randrange(0, 10**6) for _ in range(10_000)]
    seg = sieve_segment(0, 10**6)
    for n in points:
        assert (n in seg) == is_sum_two_squares(factorize(n)), n


def test_high_segment_against_factorization_criterion():
    lo = 10**12
    seg = sieve_segment(lo, lo + 2000)
    for n in range(lo, lo + 2000, 37):
        assert (n in seg) == is_sum_two_squares(factorize(n)), n


def test_stitching_determinism():
    rng = random.Random(99)
    for _ in range(10):
        a = rng.randrange(0, 50_000)
        b = a + 1 + rng.randrange(0, 5_000)
        c = b + 1 + rng.randrange(0, 5_000)
        whole = sieve_segment(a, c)
        left, right = sieve_segment(a, b), sieve_segment(b, c)
        assert np.array_equal(whole.bits, np.concatenate([left.bits, right.bits]))


def test_stream_examples():
    assert list(stream_E(10)) == [(1, 0), (2, 1), (3, 2), (4, 4), (5, 5), (6, 8), (7, 9), (8, 10)]
    assert list(stream_E(0)) == [(1, 0)]
    assert len(list(stream_E(500))) == count_N(500)


def test_count_examples():
    assert count_N(10) == 8
    assert count_N(0) == 1
    assert count_N(2) == 3


def test_count_monotone_steps():
    prev = count_N(0)
    for x in range(1, 300):
        cur = count_N(x, segment_len=128)
        assert cur - prev in (0, 1)
        prev = cur


def test_segment_cap():
    with pytest.raises(SegmentTooLarge):
        sieve_segment(0, MAX_SEGMENT_LEN + 1)
    with pytest.raises(ValueError):
        sieve_segment(5, 5)


def test_dump_roundtrip(tmp_path):
    seg = sieve_segment(1000, 3000)
    path = tmp_path / "seg.bits"
    seg.save(str(path))
    again = TwoSqSegment.load(str(path))
    assert again.lo == 1000 and again.hi == 3000
    assert np.array_equal(again.bits, seg.bits)
    blob = seg.to_bytes()
    assert blob[:8] == (1000).to_bytes(8, "little")
    assert blob[8:16] == (3000).to_bytes(8, "little")
    assert len(blob) % 8 == 0


def test_cache_dir_reuse(tmp_path):
    first = sieve_segment(0, 4096, cache_dir=str(tmp_path))
    assert (tmp_path / "twosq_0_4096.seg").exists()
    second = sieve_segment(0, 4096, cache_dir=str(tmp_path))
    assert np.array_equal(first.bits, second.bits)


def test_parallel_segments_identical():
    seq = []
    for i, seg in enumerate(iter_segments(0, 2048, workers=1)):
        seq.append(seg)
        if i == 3:
            break
    par = []
    for i, seg in enumerate(iter_segments(0, 2048, workers=3)):
        par.append(seg)
        if i == 3:
            break
    for s, p in zip(seq, par):
        assert s.lo == p.lo and s.hi == p.hi and np.array_equal(s.bits, p.bits)
