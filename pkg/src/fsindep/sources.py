"""Infinite (and finite) symbol streams.

A :class:`WordSource` is a single-consumer deterministic stream: ``take``
and ``pop`` advance it, ``clone`` yields a fresh copy restarted at
position 1, and ``prefix(n)`` reads a length-n finite word off a clone
without disturbing the original.  Derived sources (even / odd / join)
are lazy and pull from their inputs on demand.
"""

from __future__ import annotations

import numpy as np

from .words import Alphabet, FiniteWord, _dtype_for

_CHUNK = 1024


class SourceExhausted(Exception):
    """A finite source was asked for more symbols than it holds."""


class WordSource:
    """Base class managing the read buffer; subclasses implement _produce."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._buf = np.zeros(0, dtype=_dtype_for(alphabet.size))
        self._bufpos = 0

    # Subclass contract: return 1..n fresh symbols as a numpy array, or an
    # empty array once the stream is exhausted.  Infinite sources must
    # return exactly n.
    def _produce(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def clone(self) -> "WordSource":
        """A fresh copy of this source, restarted at position 1."""
        raise NotImplementedError

    def take_available(self, n: int) -> np.ndarray:
        """Up to n symbols; shorter only when the source runs out."""
        n = int(n)
        if n < 0:
            raise ValueError("cannot take a negative number of symbols")
        parts = []
        got = 0
        buffered = self._buf.size - self._bufpos
        if buffered:
            step = min(buffered, n)
            parts.append(self._buf[self._bufpos : self._bufpos + step])
            self._bufpos += step
            got += step
        while got < n:
            fresh = self._produce(n - got)
            if fresh.size == 0:
                break
            parts.append(fresh)
            got += fresh.size
        if not parts:
            return np.zeros(0, dtype=_dtype_for(self.alphabet.size))
        if len(parts) == 1:
            return parts[0].copy()
        return np.concatenate(parts)

    def take(self, n: int) -> np.ndarray:
        """Exactly n symbols as a numpy array; raises SourceExhausted if short."""
        out = self.take_available(n)
        if out.size < n:
            raise SourceExhausted(f"needed {n} symbols, source ended after {out.size}")
        return out

    def peek(self):
        """Next symbol without consuming it, or None when exhausted."""
        if self._bufpos >= self._buf.size:
            self._buf = self._produce(_CHUNK)
            self._bufpos = 0
            if self._buf.size == 0:
                return None
        return int(self._buf[self._bufpos])

    def pop(self) -> int:
        """Consume and return the next symbol."""
        a = self.peek()
        if a is None:
            raise SourceExhausted("source exhausted")
        self._bufpos += 1
        return a

    def prefix(self, n: int) -> FiniteWord:
        """The length-n prefix as a finite word; does not advance this source."""
        return FiniteWord(self.alphabet, self.clone().take(n))


class PeriodicSource(WordSource):
    """Endless repetition of a fixed nonempty pattern."""

    def __init__(self, pattern: FiniteWord):
        if len(pattern) == 0:
            raise ValueError("periodic pattern must be nonempty")
        super().__init__(pattern.alphabet)
        self.pattern = pattern
        self._count = 0  # symbols produced so far

    def _produce(self, n):
        idx = (self._count + np.arange(n, dtype=np.int64)) % len(self.pattern)
        self._count += n
        return self.pattern.data[idx]

    def clone(self):
        return PeriodicSource(self.pattern)


def constant_source(symbol: int, alphabet: Alphabet) -> PeriodicSource:
    return PeriodicSource(FiniteWord(alphabet, [alphabet.check_symbol(symbol)]))


# SplitMix64 finalizer: a counter-based generator gives exact random
# access, so clones replay the identical stream with no state to copy.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *branch: int) -> int:
    """Stable derived seed for parallel / per-trial streams."""
    z = seed & _MASK64
    for b in branch:
        z = (z ^ (b & _MASK64)) + 0x9E3779B97F4A7C15 & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
    return z


class RandomSource(WordSource):
    """Seeded uniform i.i.d. symbols (SplitMix64 counter stream).

    The symbol at position i depends only on (seed, i), so a clone is
    just a restart of the same counter.
    """

    def __init__(self, alphabet: Alphabet, seed: int):
        super().__init__(alphabet)
        self.seed = int(seed)
        self._count = 0

    def _produce(self, n):
        idx = np.arange(self._count, self._count + n, dtype=np.uint64)
        self._count += n
        z = np.uint64(self.seed & 0xFFFFFFFFFFFFFFFF) + _GAMMA * (idx + np.uint64(1))
        vals = _mix64(z) % np.uint64(self.alphabet.size)
        return vals.astype(_dtype_for(self.alphabet.size))

    def clone(self):
        return RandomSource(self.alphabet, self.seed)


class LiteralSource(WordSource):
    """Finite source backed by a finite word (also used for file-backed input)."""

    def __init__(self, w: FiniteWord):
        super().__init__(w.alphabet)
        self.word = w
        self._count = 0

    def _produce(self, n):
        step = min(n, len(self.word) - self._count)
        if step <= 0:
            return np.zeros(0, dtype=_dtype_for(self.alphabet.size))
        out = self.word.data[self._count : self._count + step]
        self._count += step
        return out

    def clone(self):
        return LiteralSource(self.word)


def file_source(path, base: int) -> LiteralSource:
    from .words import read_word_file

    return LiteralSource(read_word_file(path, base))


class EvenSource(WordSource):
    """Symbols at even positions of the inner source."""

    def __init__(self, inner: WordSource):
        super().__init__(inner.alphabet)
        self.inner = inner

    def _produce(self, n):
        pulled = self.inner.take_available(2 * n)
        return pulled[1::2].copy()

    def clone(self):
        return EvenSource(self.inner.clone())


class OddSource(WordSource):
    """Symbols at odd positions of the inner source."""

    def __init__(self, inner: WordSource):
        super().__init__(inner.alphabet)
        self.inner = inner

    def _produce(self, n):
        # pulling 2n inner symbols yields exactly n odd positions; the
        # trailing even-position symbol is dropped, never re-used
        pulled = self.inner.take_available(2 * n)
        return pulled[0::2].copy()

    def clone(self):
        return OddSource(self.inner.clone())


class JoinSource(WordSource):
    """Interleaving x1 y1 x2 y2 ... of two sources."""

    def __init__(self, x: WordSource, y: WordSource):
        if x.alphabet != y.alphabet:
            raise ValueError("join needs matching alphabets")
        super().__init__(x.alphabet)
        self.x = x
        self.y = y
        self._parity = 0  # 0: next emitted symbol comes from x

    def _produce(self, n):
        # a run of n emitted symbols starting at the current parity uses
        # ceil/floor(n/2) symbols from the leading / trailing side
        lead_n, trail_n = (n + 1) // 2, n // 2
        if self._parity == 0:
            ax = self.x.take_available(lead_n)
            ay = self.y.take_available(trail_n)
            lead, trail = ax, ay
        else:
            ay = self.y.take_available(lead_n)
            ax = self.x.take_available(trail_n)
            lead, trail = ay, ax
        if lead.size < lead_n or trail.size < trail_n:
            # one side ran dry: emit only the complete interleaved prefix
            n = max(min(2 * lead.size, 2 * trail.size + 1), 0)
            lead, trail = lead[: (n + 1) // 2], trail[: n // 2]
        out = np.empty(n, dtype=_dtype_for(self.alphabet.size))
        out[0::2] = lead
        out[1::2] = trail
        self._parity = (self._parity + n) % 2
        return out

    def clone(self):
        return JoinSource(self.x.clone(), self.y.clone())
