"""Multi-tape automata: parsing, determinism reports, runs, forward analysis.

Loads the bundled machines, runs the two-input merge machine on short words,
shows why the shuffle machine fails the determinism conditions, and lists
which (state, symbol) pairs admit a finite run consuming a given reference
word on the second tape.
"""

from pathlib import Path

from fsindep import (
    LiteralSource,
    check_l_deterministic,
    find_forward_word,
    forward_pairs,
    load_automaton,
    run,
    word,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def determinism_report(name: str, ell: int = 2) -> None:
    M = load_automaton(FIXTURES / name)
    rep = check_l_deterministic(M, ell)
    print(f"{name}: {ell}-deterministic = {rep.deterministic}")
    for v in rep.violations:
        labels = [t.label_text(M.alphabet) for t in v.pair] if v.pair else []
        print(f"  violation {v.kind} at {v.state}: {labels}")


def merge_run() -> None:
    M = load_automaton(FIXTURES / "join.aut")
    tapes = [LiteralSource(word("01")), LiteralSource(word("10"))]
    trace = run(M, 2, tapes, 4)
    print("\nmerge machine on tapes 01 / 10:")
    print(f"  output   : {''.join(str(s) for s in trace.outputs)}")
    print(f"  path     : {' -> '.join(trace.path)}")
    print(f"  halted   : {trace.halted} ({trace.halt_reason})")


def forward_analysis() -> None:
    M = load_automaton(FIXTURES / "join.aut")
    v = word("0")
    print(f"\nforward pairs of the merge machine for reference word {v.to_text()}:")
    for state, a in forward_pairs(M, v):
        print(f"  ({state}, {a})")
    res = find_forward_word(M, 2)
    print(
        f"complete forward word search: word={res.word.to_text()} "
        f"pairs={res.count} complete={res.complete}"
    )


def main() -> None:
    determinism_report("join.aut")
    determinism_report("shuffle.aut")
    determinism_report("copy.aut")
    merge_run()
    forward_analysis()


if __name__ == "__main__":
    main()
