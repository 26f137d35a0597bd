"""Segmented enumeration of the set E = {x^2 + y^2 : x, y >= 0}.

Membership bitmaps are produced by direct lattice marking: for each x with
x^2 below the segment end, every y putting x^2 + y^2 inside the segment is
marked. This matches the defining set; the factorization criterion in
`arith` serves as an independent cross-check in the tests.

Conventions: 0 and 1 are members (0 = 0^2 + 0^2), and all counting is
inclusive (members <= x).
"""

from __future__ import annotations

import math
import os
import struct
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import SegmentTooLarge

DEFAULT_SEGMENT_LEN = 1 << 24
MAX_SEGMENT_LEN = 1 << 27

_HEADER = struct.Struct("<QQ")


@dataclass
class TwoSqSegment:
    """Membership bitmap for E over the half-open range [lo, hi)."""

    lo: int
    hi: int
    bits: np.ndarray

    def __contains__(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi})")
        return bool(self.bits[n - self.lo])

    def members(self) -> np.ndarray:
        """Member values in ascending order (int64; requires hi < 2^63)."""
        return np.flatnonzero(self.bits).astype(np.int64) + self.lo

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def to_bytes(self) -> bytes:
        """Raw dump: lo/hi as 8-byte little-endian, then the bitmap packed
        little-endian-bit-first and padded to whole 64-bit words."""
        packed = np.packbits(self.bits, bitorder="little").tobytes()
        pad = (-len(packed)) % 8
        return _HEADER.pack(self.lo, self.hi) + packed + b"\x00" * pad

    @classmethod
    def from_bytes(cls, blob: bytes) -> "TwoSqSegment":
        lo, hi = _HEADER.unpack_from(blob)
        raw = np.frombuffer(blob, dtype=np.uint8, offset=_HEADER.size)
        bits = np.unpackbits(raw, bitorder="little")[: hi - lo].astype(bool)
        return cls(lo, hi, bits)

    def save(self, path: str) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path: str) -> "TwoSqSegment":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def _ceil_sqrt(n: int) -> int:
    if n <= 0:
        return 0
    r = math.isqrt(n)
    return r if r * r == n else r + 1


def sieve_segment(lo: int, hi: int, cache_dir: str | None = None) -> TwoSqSegment:
    """Exact membership bitmap for [lo, hi) by lattice marking.

    With cache_dir set, a previously dumped segment for the same range is
    reused and fresh segments are dumped there.
    """
    if not 0 <= lo < hi:
        raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > MAX_SEGMENT_LEN:
        raise SegmentTooLarge(f"segment length {hi - lo} exceeds cap {MAX_SEGMENT_LEN}")
    if cache_dir is not None:
        path = os.path.join(cache_dir, f"twosq_{lo}_{hi}.seg")
        if os.path.exists(path):
            seg = TwoSqSegment.load(path)
            if seg.lo == lo and seg.hi == hi:
                return seg
    bits = np.zeros(hi - lo, dtype=bool)
    x = 0
    while x * x < hi:
        x2 = x * x
        y_min = _ceil_sqrt(lo - x2)
        y_max = math.isqrt(hi - 1 - x2)
        if y_min <= y_max:
            if y_max - y_min > 8:
                ys = np.arange(y_min, y_max + 1, dtype=np.int64)
                bits[x2 + ys * ys - lo] = True
            else:
                for y in range(y_min, y_max + 1):
                    bits[x2 + y * y - lo] = True
        x += 1
    seg = TwoSqSegment(lo, hi, bits)
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        seg.save(os.path.join(cache_dir, f"twosq_{lo}_{hi}.seg"))
    return seg


def iter_segments(
    start: int = 0,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> Iterator[TwoSqSegment]:
    """Unbounded stream of consecutive segments starting at `start`.

    With workers > 1 upcoming segments are computed ahead by a thread pool;
    consumption order (hence every result) is unchanged.
    """
    lo = start
    if workers <= 1:
        while True:
            yield sieve_segment(lo, lo + segment_len, cache_dir=cache_dir)
            lo += segment_len
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for _ in range(workers + 1):
            pending.append(pool.submit(sieve_segment, lo, lo + segment_len, cache_dir))
            lo += segment_len
        while True:
            seg = pending.popleft().result()
            pending.append(pool.submit(sieve_segment, lo, lo + segment_len, cache_dir))
            lo += segment_len
            yield seg


def iter_member_arrays(
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> Iterator[np.ndarray]:
    """Member values of E in ascending order, one array per segment."""
    for seg in iter_segments(0, segment_len, cache_dir, workers):
        yield seg.members()


def stream_E(
    x_max: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
) -> Iterator[tuple[int, int]]:
    """Ordered (n, E_n) pairs with 1-based n, for all members E_n <= x_max."""
    if x_max < 0:
        return
    segment_len = min(segment_len, max(x_max + 4096, 4096))
    n = 0
    for values in iter_member_arrays(segment_len, cache_dir):
        for v in values:
            v = int(v)
            if v > x_max:
                return
            n += 1
            yield n, v
        if values.size and int(values[-1]) > x_max:
            return


def count_N(
    x: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> int:
    """Number of members of E that are <= x."""
    if x < 0:
        return 0
    segment_len = min(segment_len, max(x + 1, 1024))
    total = 0
    for seg in iter_segments(0, segment_len, cache_dir, workers):
        if seg.lo > x:
            break
        if seg.hi <= x + 1:
            total += seg.count()
        else:
            total += int(np.count_nonzero(seg.bits[: x + 1 - seg.lo]))
            break
    return total
