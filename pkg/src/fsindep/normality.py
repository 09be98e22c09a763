"""Block counting, discrepancy, and finite occurrence-count tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Union

import numpy as np

from .words import Alphabet, FiniteWord, MAX_TEXT_ALPHABET

#: largest block table we are willing to allocate
_TABLE_CAP = 2**24


def _table_guard(b: int, ell: int):
    if b**ell > _TABLE_CAP:
        raise ValueError(f"block table {b}**{ell} exceeds cap {_TABLE_CAP}")


@dataclass
class BlockCountTable:
    """Counts of every length-ell block of one word.

    aligned=True counts blocks on the ell-grid (positions 1, ell+1, ...,
    dropping an incomplete tail); aligned=False counts all sliding
    windows.  counts is indexed by the base-b value of the block.
    """

    alphabet: Alphabet
    block_length: int
    aligned: bool
    counts: np.ndarray
    total: int

    def _block_id(self, u: Union[str, FiniteWord]) -> int:
        if isinstance(u, str):
            data = self.alphabet.parse(u)
        else:
            if u.alphabet != self.alphabet:
                raise ValueError("block alphabet does not match the table")
            data = u.data
        if data.size != self.block_length:
            raise ValueError(
                f"block has length {data.size}, table holds length {self.block_length}"
            )
        b = self.alphabet.size
        val = 0
        for a in data:
            val = val * b + int(a)
        return val

    def count(self, u) -> int:
        return int(self.counts[self._block_id(u)])

    def frequency(self, u) -> float:
        return self.count(u) / self.total

    def as_dict(self) -> Dict[str, int]:
        if self.alphabet.size > MAX_TEXT_ALPHABET:
            raise ValueError("alphabet too large to render block keys")
        b, ell = self.alphabet.size, self.block_length
        out = {}
        for val in range(b**ell):
            digits = []
            rest = val
            for _ in range(ell):
                digits.append(rest % b)
                rest //= b
            out["".join(self.alphabet.char(d) for d in reversed(digits))] = int(
                self.counts[val]
            )
        return out

    def max_deviation(self) -> float:
        """max_u |frequency(u) - b**-ell|"""
        target = self.alphabet.size**-self.block_length
        if self.total == 0:
            return target
        freqs = self.counts / self.total
        return float(np.max(np.abs(freqs - target)))


def _sliding_ids(data: np.ndarray, ell: int, b: int) -> np.ndarray:
    n = data.size
    ids = np.zeros(n - ell + 1, dtype=np.int64)
    for j in range(ell):
        ids *= b
        ids += data[j : n - ell + 1 + j]
    return ids


def block_counts(w: FiniteWord, ell: int, aligned: bool = True) -> BlockCountTable:
    ell = int(ell)
    if ell < 1:
        raise ValueError("block length must be at least 1")
    if ell > len(w):
        raise ValueError(f"block length {ell} exceeds word length {len(w)}")
    b = w.alphabet.size
    _table_guard(b, ell)
    if aligned:
        m = len(w) // ell
        trimmed = w.data[: m * ell]
        if ell == 1:
            ids = trimmed.astype(np.int64)
        else:
            powers = b ** np.arange(ell - 1, -1, -1, dtype=np.int64)
            ids = trimmed.reshape(m, ell).astype(np.int64) @ powers
        total = m
    else:
        ids = _sliding_ids(w.data.astype(np.int64), ell, b)
        total = ids.size
    counts = np.bincount(ids, minlength=b**ell)
    return BlockCountTable(w.alphabet, ell, aligned, counts, total)


def discrepancy(w: FiniteWord, ell: int) -> float:
    """Worst aligned-frequency deviation from uniform at block length ell."""
    return block_counts(w, ell, aligned=True).max_deviation()


@dataclass
class NormalityReport:
    """Discrepancy summary over block lengths 1..max_block.

    A block length is flagged when its discrepancy exceeds
    threshold * sqrt(ln(2 * b**ell) / (2 * m)) with m the number of
    aligned blocks; that scale is a union-bound tail for i.i.d. uniform
    symbols, so flags indicate deviation well beyond sampling noise.
    """

    n: int
    max_block: int
    threshold: float
    discrepancies: Dict[int, float]
    limits: Dict[int, float]
    flagged: tuple

    @property
    def plausibly_normal(self) -> bool:
        return not self.flagged


def normality_report(
    w: FiniteWord, max_block: int, threshold: float = 3.0
) -> NormalityReport:
    if max_block < 1:
        raise ValueError("max_block must be at least 1")
    b = w.alphabet.size
    disc = {}
    limits = {}
    flagged = []
    for ell in range(1, max_block + 1):
        if ell > len(w):
            break
        disc[ell] = discrepancy(w, ell)
        m = len(w) // ell
        limits[ell] = threshold * math.sqrt(math.log(2 * b**ell) / (2 * m))
        if disc[ell] > limits[ell]:
            flagged.append(ell)
    return NormalityReport(
        len(w), max_block, threshold, disc, limits, tuple(flagged)
    )


# ---------------------------------------------------------------------------
# exhaustive occurrence profiles over all words of a fixed length


def occurrence_profile(k: int, r: int, b: int) -> Dict[int, int]:
    """Histogram of sliding occurrence counts over all (block, word) pairs.

    For every block u of length r and every word w of length k over a
    b-symbol alphabet, count the sliding occurrences of u in w; return
    {j: number of pairs with exactly j occurrences}.  Enumerates all
    b**k words (capped), chunked so memory stays modest.
    """
    k, r, b = int(k), int(r), int(b)
    if not 1 <= r <= k:
        raise ValueError("need 1 <= r <= k")
    if b < 2:
        raise ValueError("alphabet size must be at least 2")
    if b**k > _TABLE_CAP:
        raise ValueError(f"enumeration {b}**{k} exceeds cap {_TABLE_CAP}")
    total = b**k
    npos = k - r + 1
    block_mod = b**r
    hist = np.zeros(npos + 1, dtype=np.int64)
    chunk = 1 << 18
    for start in range(0, total, chunk):
        ids = np.arange(start, min(start + chunk, total), dtype=np.int64)
        # windows[p] = value of the length-r window at offset p (from the left)
        windows = np.empty((npos, ids.size), dtype=np.int64)
        for p in range(npos):
            shift = b ** (k - r - p)
            windows[p] = (ids // shift) % block_mod
        for u in range(block_mod):
            occ_counts = (windows == u).sum(axis=0)
            hist += np.bincount(occ_counts, minlength=npos + 1)
    return {j: int(c) for j, c in enumerate(hist)}


@dataclass(frozen=True)
class TailBoundReport:
    k: int
    r: int
    epsilon: float
    alphabet_size: int
    tail_count: int
    bound: float
    holds: bool


def hardy_bound_eval(k: int, r: int, epsilon: float, b: int) -> TailBoundReport:
    """Exact tail count of deviant occurrence pairs versus the analytic bound.

    Counts pairs (u, w) with |occ(w, u) - k * b**-r| > epsilon * k by
    exhaustive enumeration and compares against
    2 * r * b**(k + 2r - 2) * exp(-(b**r * epsilon**2 * k) / (6 * r)),
    valid for 6 / floor(k / r) <= epsilon <= b**-r.
    """
    lo = 6.0 / (k // r)
    hi = b**-r
    if not lo <= epsilon <= hi:
        raise ValueError(
            f"epsilon {epsilon} outside the valid range [{lo}, {hi}]"
        )
    profile = occurrence_profile(k, r, b)
    mean = k * b**-r
    tail = sum(c for j, c in profile.items() if abs(j - mean) > epsilon * k)
    bound = 2.0 * r * b ** (k + 2 * r - 2) * math.exp(
        -(b**r * epsilon**2 * k) / (6.0 * r)
    )
    return TailBoundReport(k, r, epsilon, b, tail, bound, tail <= bound)
