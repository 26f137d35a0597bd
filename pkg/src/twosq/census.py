"""Residue-pattern census over the increasing sequence of sums of two squares.

Counts windows of r consecutive members E_n, E_{n+1}, ..., E_{n+r-1} whose
classes mod q match a prescribed tuple, for all starts with E_n <= x. The
bound is one-sided: a window whose later members exceed x still counts,
so the stream is extended past x far enough to complete every window.

Counting is vectorized: member values arrive as numpy arrays per sieve
segment, residues are taken in bulk, and windows are encoded as base-q
integers so one pass serves every pattern simultaneously.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .admissibility import admissible_classes, is_admissible_value
from .arith import FactoredInteger
from .errors import TooManyPatterns
from .sieve import DEFAULT_SEGMENT_LEN, iter_member_arrays

DEFAULT_MAX_OCCURRENCES = 10
DEFAULT_PATTERN_CAP = 1 << 20


@dataclass(frozen=True)
class PatternSpec:
    """A modulus q and an ordered tuple of residue classes mod q."""

    q: FactoredInteger
    classes: tuple[int, ...]

    def __post_init__(self):
        if len(self.classes) < 1:
            raise ValueError("pattern needs at least one class")
        if any(not 0 <= c < self.q.value for c in self.classes):
            raise ValueError(f"classes must lie in [0, {self.q.value})")

    @property
    def r(self) -> int:
        return len(self.classes)

    def all_admissible(self) -> bool:
        return all(is_admissible_value(c, self.q) for c in self.classes)


@dataclass(frozen=True)
class Occurrence:
    """A matched window: the 1-based start index n and the r member values."""

    n: int
    values: tuple[int, ...]


@dataclass(frozen=True)
class MatchResult:
    count: int
    occurrences: tuple[Occurrence, ...]


@dataclass
class CensusReport:
    """All-pattern counts for fixed (q, r, x), plus capped first occurrences."""

    q: int
    r: int
    x: int
    counts: dict[tuple[int, ...], int]
    occurrences: dict[tuple[int, ...], list[Occurrence]]
    total_windows: int
    admissible: tuple[int, ...] = field(default_factory=tuple)

    def count_for(self, classes: tuple[int, ...]) -> int:
        return self.counts.get(tuple(classes), 0)

    def pattern_universe(self) -> Iterator[tuple[int, ...]]:
        """All r-tuples of admissible classes in lexicographic order."""
        def rec(prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
            if len(prefix) == self.r:
                yield prefix
                return
            for c in self.admissible:
                yield from rec(prefix + (c,))

        yield from rec(())


def _iter_window_blocks(
    x: int,
    r: int,
    segment_len: int,
    cache_dir: str | None = None,
    workers: int = 1,
) -> Iterator[tuple[np.ndarray, int, int]]:
    """Yield (block, n_start, starts) with block carrying r-1 values of overlap.

    `starts` is the number of window starts in this block whose value is <= x;
    the generator stops once a start value exceeds x. Segments shrink to the
    query scale so small bounds do not pay for a full default segment.
    """
    segment_len = min(segment_len, max(x + 4096, 4096))
    carry = np.empty(0, dtype=np.int64)
    n_start = 1
    for values in iter_member_arrays(segment_len, cache_dir, workers):
        block = np.concatenate([carry, values]) if carry.size else values
        if block.size < r:
            carry = block
            continue
        starts = block.size - r + 1
        over = block[:starts] > x
        if over.any():
            eff = int(np.argmax(over))
            if eff:
                yield block, n_start, eff
            return
        yield block, n_start, starts
        carry = block[starts:]
        n_start += starts


def match_pattern(
    spec: PatternSpec,
    x: int,
    max_occurrences: int = DEFAULT_MAX_OCCURRENCES,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> MatchResult:
    """Count windows matching `spec` with start value <= x.

    Also reports the first `max_occurrences` matches. A count of 0 is the
    legitimate output for patterns containing a non-admissible class.
    """
    q, r = spec.q.value, spec.r
    count = 0
    occurrences: list[Occurrence] = []
    for block, n_start, starts in _iter_window_blocks(x, r, segment_len, cache_dir, workers):
        res = block % q
        mask = res[:starts] == spec.classes[0]
        for i in range(1, r):
            mask &= res[i : starts + i] == spec.classes[i]
        block_count = int(np.count_nonzero(mask))
        if block_count and len(occurrences) < max_occurrences:
            for pos in np.flatnonzero(mask)[: max_occurrences - len(occurrences)]:
                pos = int(pos)
                occurrences.append(
                    Occurrence(n_start + pos, tuple(int(v) for v in block[pos : pos + r]))
                )
        count += block_count
    return MatchResult(count, tuple(occurrences))


def find_first_occurrence(
    spec: PatternSpec,
    bound: int,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> Occurrence | None:
    """Smallest n whose window matches with E_n <= bound, or None."""
    q, r = spec.q.value, spec.r
    for block, n_start, starts in _iter_window_blocks(bound, r, segment_len, cache_dir, workers):
        res = block % q
        mask = res[:starts] == spec.classes[0]
        for i in range(1, r):
            mask &= res[i : starts + i] == spec.classes[i]
        hits = np.flatnonzero(mask)
        if hits.size:
            pos = int(hits[0])
            return Occurrence(n_start + pos, tuple(int(v) for v in block[pos : pos + r]))
    return None


def census_report(
    q: FactoredInteger,
    r: int,
    x: int,
    max_occurrences: int = DEFAULT_MAX_OCCURRENCES,
    pattern_cap: int = DEFAULT_PATTERN_CAP,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
    workers: int = 1,
) -> CensusReport:
    """One pass computing counts for every r-tuple of classes simultaneously.

    Windows are encoded as base-q integers (first class most significant),
    so tuples sort lexicographically by code.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    adm = tuple(c.value for c in admissible_classes(q))
    if len(adm) ** r > pattern_cap:
        raise TooManyPatterns(f"{len(adm)}^{r} admissible tuples exceed cap {pattern_cap}")
    qv = q.value
    weights = [qv ** (r - 1 - i) for i in range(r)]
    counts: dict[int, int] = {}
    occ: dict[int, list[Occurrence]] = {}
    total = 0
    for block, n_start, starts in _iter_window_blocks(x, r, segment_len, cache_dir, workers):
        res = block % qv
        codes = res[:starts] * weights[0]
        for i in range(1, r):
            codes = codes + res[i : starts + i] * weights[i]
        uniq, cnts = np.unique(codes, return_counts=True)
        for code, c in zip(uniq.tolist(), cnts.tolist()):
            counts[code] = counts.get(code, 0) + c
        total += starts
        # Stable argsort groups equal codes while keeping their original
        # (ascending-n) order, so the head of each group is its first hits.
        order = np.argsort(codes, kind="stable")
        boundaries = np.flatnonzero(np.diff(codes[order])) + 1
        for grp in np.split(order, boundaries):
            lst = occ.setdefault(int(codes[grp[0]]), [])
            need = max_occurrences - len(lst)
            for pos in grp[:need].tolist():
                lst.append(
                    Occurrence(n_start + pos, tuple(int(v) for v in block[pos : pos + r]))
                )

    def decode(code: int) -> tuple[int, ...]:
        out = []
        for _ in range(r):
            code, c = divmod(code, qv)
            out.append(c)
        return tuple(reversed(out))

    return CensusReport(
        q=qv,
        r=r,
        x=x,
        counts={decode(c): n for c, n in sorted(counts.items())},
        occurrences={decode(c): lst for c, lst in sorted(occ.items())},
        total_windows=total,
        admissible=adm,
    )
