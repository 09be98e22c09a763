"""Shared fixtures and naive reference implementations.

The naive_* helpers are deliberately slow, string-based reimplementations
used as independent oracles against the vectorized library code.  They
must not import anything from fsindep internals beyond the public API.
"""

import random
from pathlib import Path

import pytest

from fsindep import KAutomaton, load_automaton

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def join_aut() -> KAutomaton:
    return load_automaton(FIXTURES / "join.aut")


@pytest.fixture(scope="session")
def shuffle_aut() -> KAutomaton:
    return load_automaton(FIXTURES / "shuffle.aut")


@pytest.fixture(scope="session")
def copy_aut() -> KAutomaton:
    return load_automaton(FIXTURES / "copy.aut")


# ---------------------------------------------------------------------------
# counting oracles


def naive_occ(w: str, u: str) -> int:
    """Sliding-window occurrence count by literal slicing."""
    if not u or len(u) > len(w):
        return 0
    return sum(1 for i in range(len(w) - len(u) + 1) if w[i : i + len(u)] == u)


def naive_alocc(w: str, u: str) -> int:
    """Occurrences starting at 1-indexed positions 1, 1+|u|, 1+2|u|, ..."""
    if not u or len(u) > len(w):
        return 0
    return sum(
        1 for i in range(0, len(w) - len(u) + 1, len(u)) if w[i : i + len(u)] == u
    )


def naive_block_counts(w: str, ell: int, aligned: bool) -> dict:
    out: dict = {}
    if aligned:
        starts = range(0, len(w) - ell + 1, ell)
    else:
        starts = range(0, len(w) - ell + 1)
    for i in starts:
        blk = w[i : i + ell]
        out[blk] = out.get(blk, 0) + 1
    return out


def rand_text(rng: random.Random, n: int, b: int) -> str:
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"[:b]
    return "".join(rng.choice(digits) for _ in range(n))


# ---------------------------------------------------------------------------
# automaton oracles


def naive_check_deterministic(M: KAutomaton, ell: int) -> bool:
    """Literal restatement of the determinism conditions, O(T^2)."""
    if len(M.initial) != 1:
        return False
    for t in M.transitions:
        for comp in t.label[:ell]:
            if len(comp) > 1:
                return False
    for p in M.states:
        outs = [t for t in M.transitions if t.source == p]
        for i, s in enumerate(outs):
            pat_s = tuple(len(c) > 0 for c in s.label[:ell])
            for t in outs[i + 1 :]:
                pat_t = tuple(len(c) > 0 for c in t.label[:ell])
                if pat_s != pat_t:
                    return False
                if s.label[:ell] == t.label[:ell]:
                    return False
    return True


def naive_forward_pairs(M: KAutomaton, v_text: str):
    """Run enumeration: DFS over transition paths, pruning revisits.

    A path qualifies a pair (p, a) when its total tape-2 consumption is
    exactly v and its first tape-1 symbol is a.  Cycle pruning happens in
    (state, consumed-v-length, first-symbol) space, which never discards a
    witnessing run.
    """
    v = tuple(int(c, 36) for c in v_text)
    found = set()

    def walk(start, state, vpos, first, seen):
        if vpos == len(v) and first is not None:
            found.add((start, first))
        for t in M.transitions:
            if t.source != state:
                continue
            w1, w2 = t.label[0], t.label[1]
            end = vpos + len(w2)
            if end > len(v) or tuple(w2) != v[vpos:end]:
                continue
            nxt_first = first if first is not None else (w1[0] if w1 else None)
            node = (t.target, end, nxt_first)
            if node in seen:
                continue
            walk(start, t.target, end, nxt_first, seen | {node})

    for p in M.states:
        walk(p, p, 0, None, frozenset())
    return sorted(found)


def naive_run(M: KAutomaton, ell: int, input_texts, n: int):
    """Reference stepper for deterministic machines without silent cycles.

    input_texts[0] is truncated to the tape-1 budget n; remaining tapes
    supply whatever they have.  Returns a dict with the visited states,
    final consumed counts per input tape, concatenated outputs, the halt
    reason (None for a clean budget stop) and per-step read counts.
    """
    texts = [input_texts[0][:n]] + [t for t in input_texts[1:]]
    pos = [0] * ell
    outs = [[] for _ in range(M.k - ell)]
    state = M.initial[0]
    states = [state]
    events = []
    halt = None
    guard = 0
    while True:
        guard += 1
        assert guard < 64 * n + 10_000, "oracle runaway"
        candidates = [t for t in M.transitions if t.source == state]
        if not candidates:
            if pos[0] < n:
                halt = "no-transition"
            break
        pattern = tuple(len(c) > 0 for c in candidates[0].label[:ell])
        if pattern[0] and pos[0] >= n:
            break  # tape-1 budget reached
        reads = []
        exhausted = False
        for i in range(ell):
            if pattern[i]:
                if pos[i] >= len(texts[i]):
                    exhausted = True
                    break
                reads.append((int(texts[i][pos[i]], 36),))
            else:
                reads.append(())
        if exhausted:
            halt = "input-exhausted"
            break
        taken = None
        for t in candidates:
            if tuple(t.label[:ell]) == tuple(reads):
                taken = t
                break
        if taken is None:
            halt = "no-transition"
            break
        for i in range(ell):
            pos[i] += len(reads[i])
        for j in range(M.k - ell):
            outs[j].extend(taken.label[ell + j])
        state = taken.target
        states.append(state)
        events.append(tuple(len(r) for r in reads))
    return {
        "states": states,
        "consumed": tuple(pos),
        "outputs": [
            "".join("0123456789abcdefghijklmnopqrstuvwxyz"[s] for s in o)
            for o in outs
        ],
        "halt": halt,
        "events": events,
    }
