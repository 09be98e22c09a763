"""Block-entropy coding of one stream given another.

A conditional model learns, symbol by symbol, how well a reference stream
predicts a primary stream; a prefix code built from it then encodes the
primary in blocks.  The achieved output/input ratio is the measurement:
near 1 when the reference is useless, far below 1 when it predicts.
"""

import numpy as np

from fsindep import (
    Alphabet,
    FiniteWord,
    LiteralSource,
    RandomSource,
    build_prefix_code,
    cond_decode,
    cond_encode,
    conditional_ratio_estimate,
    derive_seed,
    train_model,
)

A2 = Alphabet(2)


def round_trip(seed: int = 7, k: int = 4, n: int = 4096) -> None:
    xs = RandomSource(A2, derive_seed(seed, 0, 0))
    ys = RandomSource(A2, derive_seed(seed, 0, 1))
    model = train_model(xs.clone().prefix(n), ys.clone().prefix(n), k)
    code = build_prefix_code(model)
    enc, est = cond_encode(xs.clone(), ys.clone(), code, n)
    dec = cond_decode(enc, ys.clone(), code, n)
    print(f"prefix-code round trip (k={k}, n={n}):")
    print(f"  encoded ratio : {est.final_ratio:.4f}")
    print(f"  decode exact  : {dec == xs.clone().prefix(n)}")


def codebook_peek(k: int = 2) -> None:
    xs = RandomSource(A2, 11)
    ys = xs.clone()  # identical reference: one-symbol codewords
    code = build_prefix_code(train_model(xs.prefix(2048), ys.prefix(2048), k))
    lengths, codewords = code.codebook(0)
    print(f"\ncodebook for reference block 00 (k={k}):")
    for u_id, (L, cw) in enumerate(zip(lengths, codewords)):
        print(f"  block {u_id:0{k}b}: length {int(L)}  codeword {cw}")


def three_regimes(n: int = 10**6, k: int = 8) -> None:
    print(f"\nconditional ratio, three regimes (n={n}, k={k}):")
    x = RandomSource(A2, derive_seed(3, 0, 0))
    y = RandomSource(A2, derive_seed(3, 0, 1))
    r = conditional_ratio_estimate(x, y, n, k).final_ratio
    print(f"  independent reference : {r:.4f}")
    x = RandomSource(A2, derive_seed(3, 1, 0))
    r = conditional_ratio_estimate(x, x.clone(), n, k).final_ratio
    print(f"  identical reference   : {r:.4f}  (= 1/{k})")
    base = RandomSource(A2, derive_seed(3, 2, 0)).take(n)
    mask = (np.random.default_rng(3).random(n) < 0.1).astype(base.dtype)
    r = conditional_ratio_estimate(
        LiteralSource(FiniteWord(A2, base)),
        LiteralSource(FiniteWord(A2, base ^ mask)),
        n,
        k,
    ).final_ratio
    print(f"  10% corrupted copy    : {r:.4f}")


def main() -> None:
    round_trip()
    codebook_peek()
    three_regimes()


if __name__ == "__main__":
    main()
