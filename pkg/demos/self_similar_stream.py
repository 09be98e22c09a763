"""Tour of the self-similar binary stream and the perfect-word tower.

The stream x is built so that reading every second symbol gives the stream
back: x[2n] = x[n].  It is produced as the limit of a tower of stages, each
one a block-perfect word twice as long as the last.  This script prints the
first stages, checks the halving identity on a long prefix, and tabulates
aligned block frequencies.
"""

import numpy as np

from fsindep import block_counts, build_sequence, even, is_perfect, self_similar_source


def show_tower(n_max: int = 10) -> None:
    print("stage tower (word, block length, growth rule):")
    for s in build_sequence(n_max):
        text = s.word.to_text()
        shown = text if len(text) <= 32 else text[:29] + "..."
        print(f"  n={s.n:2d}  ell={s.ell:2d}  rule={s.rule:11s}  {shown}")
        assert is_perfect(s.word, s.ell)


def check_halving(n: int = 2**18) -> None:
    a = self_similar_source().take(n)
    ok = np.array_equal(a[1::2], a[: n // 2])
    print(f"\nhalving identity x[2n] == x[n] on prefix of {n}: {ok}")


def show_block_stats(n: int = 2**18) -> None:
    w = self_similar_source().prefix(n)
    print(f"\naligned block frequencies on prefix of {n}:")
    for ell in (1, 2, 4):
        tbl = block_counts(w, ell, aligned=True)
        top = max(tbl.as_dict().values()) / tbl.total
        bound = 3 * 2**-ell + 0.02
        print(f"  ell={ell}: max frequency {top:.4f}  (stays under {bound:.4f})")


def main() -> None:
    show_tower()
    check_halving()
    show_block_stats()
    # the even projection reproduces the stream, stage by stage
    stages = build_sequence(12)
    chained = all(even(b.word) == a.word for a, b in zip(stages, stages[1:]))
    print(f"\neven-projection chain across 12 stages: {chained}")


if __name__ == "__main__":
    main()
