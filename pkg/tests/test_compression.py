"""Transducer compression ratios, the match-run conditional compressor,
and the block-entropy conditional coder."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from fsindep import (
    Alphabet,
    ConditionalModel,
    DecodeDeadEnd,
    KAutomaton,
    LiteralSource,
    NotDeterministicError,
    OddSource,
    PrefixCode,
    RandomSource,
    RatioEstimate,
    SourceExhausted,
    TransducerHalted,
    TransducerOutputSource,
    bounded_losslessness_check,
    build_prefix_code,
    check_l_deterministic,
    cond_decode,
    cond_encode,
    conditional_ratio,
    conditional_ratio_estimate,
    independence_report,
    match_run_automaton,
    match_run_compress,
    match_run_decompress,
    odd,
    odd_projection_transducer,
    parse_automaton,
    plain_ratio,
    train_model,
    unconditional_source,
    word,
)

A2 = Alphabet(2)
A3 = Alphabet(3)


def lit(text: str, b: int = 2) -> LiteralSource:
    return LiteralSource(word(text, base=b))


# ---------------------------------------------------------------------------
# ratio estimates and plain transducer compression


def test_ratio_estimate_properties():
    est = RatioEstimate(
        n=100,
        output_symbols=90,
        checkpoints=[(1, 1), (2, 2), (4, 4), (64, 32), (100, 90)],
    )
    assert est.final_ratio == 0.9
    assert est.min_ratio == 0.5  # burn-in 6 drops the early checkpoints
    assert RatioEstimate(n=0, output_symbols=0, checkpoints=[]).final_ratio == 0.0


def test_plain_ratio_copy_is_exactly_one(copy_aut):
    est = plain_ratio(copy_aut, RandomSource(A2, seed=1), 10_000)
    assert est.final_ratio == 1.0
    assert est.min_ratio == 1.0
    assert all(m == c for c, m in est.checkpoints)
    assert not est.halted


def test_plain_ratio_odd_projection_is_half():
    est = plain_ratio(odd_projection_transducer(A2), RandomSource(A2, seed=2), 4096)
    assert est.final_ratio == 0.5


def test_plain_ratio_flags_halted_runs():
    M = parse_automaton("automaton k=2 alphabet=2 initial=s\ns 0,0 s\n")
    est = plain_ratio(M, lit("0001000"), 7)
    assert est.halted and est.halt_reason == "no-transition"
    assert est.n == 3  # consumption stops at the first 1


def test_plain_ratio_rejects_nondeterministic_machines():
    M = KAutomaton(
        2, A2, ["s"], "s", [("s", ((0,), (0,)), "s"), ("s", ((), (1,)), "s")]
    )
    with pytest.raises(NotDeterministicError):
        plain_ratio(M, RandomSource(A2, seed=0), 16)


def pair_collapse_transducer() -> KAutomaton:
    """Reads symbol pairs; emits one symbol for aa, both symbols otherwise."""
    trans = []
    for a in range(2):
        trans.append(("s", ((a,), ()), f"h{a}"))
        trans.append((f"h{a}", ((a,), (a,)), "s"))
        other = 1 - a
        trans.append((f"h{a}", ((other,), (a, other)), "s"))
    return KAutomaton(2, A2, ["s", "h0", "h1"], "s", trans)


def test_plain_ratio_pair_collapse_extremes():
    T = pair_collapse_transducer()
    assert check_l_deterministic(T, 1).deterministic
    best = plain_ratio(T, lit("0" * 256), 256)
    assert best.final_ratio == 0.5
    worst = plain_ratio(T, lit("01" * 128), 256)
    assert worst.final_ratio == 1.0


def test_transducer_output_source_matches_projection():
    x = RandomSource(A2, seed=5)
    out = TransducerOutputSource(odd_projection_transducer(A2), x.clone())
    assert out.prefix(100) == odd(x.clone()).prefix(100)


def test_transducer_output_source_ends_when_stuck():
    M = parse_automaton("automaton k=2 alphabet=2 initial=s\ns 0,0 s\n")
    out = TransducerOutputSource(M, lit("00100"))
    assert out.take_available(10).tolist() == [0, 0]


# ---------------------------------------------------------------------------
# match-run conditional compression


def test_match_run_all_match_has_exact_ratio():
    x = RandomSource(A2, seed=9)
    y = OddSource(x.clone())
    n = 1 << 14
    comp, est = match_run_compress(
        odd_projection_transducer(A2), 16, y, x.clone(), n
    )
    assert len(comp) == n // 16
    assert int(np.sum(comp.data)) == 0  # all zeros
    assert est.final_ratio == 1 / 16
    assert est.output_symbols == n // 16


def test_match_run_round_trip_all_match():
    x = RandomSource(A2, seed=9)
    n = 1 << 12
    T = odd_projection_transducer(A2)
    comp, _ = match_run_compress(T, 16, OddSource(x.clone()), x.clone(), n)
    back = match_run_decompress(T, 16, comp, x.clone())
    assert back == OddSource(x.clone()).prefix(n)


def test_match_run_mismatch_structure():
    """First disagreement at m = k*p + r: p zeros, flag, verbatim tail."""
    k, n, m0 = 8, 512, 137  # 0-based mismatch position
    x = RandomSource(A2, seed=31)
    good = OddSource(x.clone()).take(n)
    bad = good.copy()
    bad[m0] ^= 1
    T = odd_projection_transducer(A2)
    comp, est = match_run_compress(
        T, k, LiteralSource(word(bad)), x.clone(), n
    )
    p = m0 // k
    assert comp.data[:p].tolist() == [0] * p
    assert comp.data[p] == 1
    assert comp.data[p + 1 :].tolist() == bad[k * p :].tolist()
    assert est.output_symbols == p + 1 + (n - k * p)
    back = match_run_decompress(T, k, comp, x.clone())
    assert back == word(bad)


def test_match_run_round_trip_exhaustive_small():
    """All 256 possible targets of length 8 survive the round trip."""
    k = 4
    x = lit("0110100110010110")
    T = odd_projection_transducer(A2)
    for val in range(256):
        bits = [(val >> i) & 1 for i in range(8)]
        comp, _ = match_run_compress(
            T, k, LiteralSource(word(bits)), x.clone(), 8
        )
        assert match_run_decompress(T, k, comp, x.clone()) == word(bits)


def test_match_run_checkpoints_are_consistent():
    x = RandomSource(A2, seed=12)
    _, est = match_run_compress(
        odd_projection_transducer(A2), 4, OddSource(x.clone()), x.clone(), 1024
    )
    assert est.checkpoints[-1] == (1024, 256)
    for (c1, m1), (c2, m2) in zip(est.checkpoints, est.checkpoints[1:]):
        assert c1 < c2 and m1 <= m2


def test_match_run_raises_when_prediction_dries_up():
    T = odd_projection_transducer(A2)
    x = lit("0000")  # only 2 predicted symbols
    y = lit("000000")
    with pytest.raises(TransducerHalted):
        match_run_compress(T, 2, y, x, 6)


def test_match_run_zero_budget():
    T = odd_projection_transducer(A2)
    comp, est = match_run_compress(T, 4, lit("0"), lit("00"), 0)
    assert len(comp) == 0 and est.final_ratio == 0.0


def test_match_run_automaton_agrees_with_streaming():
    rng = random.Random(77)
    T = odd_projection_transducer(A2)
    for k in (1, 2, 3):
        A = match_run_automaton(T, k)
        assert check_l_deterministic(A, 2).deterministic
        for trial in range(25):
            n = k * rng.randint(1, 12)
            x_text = "".join(rng.choice("01") for _ in range(4 * n + 8))
            if trial % 2:
                y_arr = OddSource(lit(x_text)).take(n)  # full agreement
                if trial % 4 == 1 and n:
                    y_arr[rng.randrange(n)] ^= 1  # forced mismatch
                y_text = "".join(str(s) for s in y_arr.tolist())
            else:
                y_text = "".join(rng.choice("01") for _ in range(n))
            comp, est = match_run_compress(
                T, k, lit(y_text), lit(x_text), n
            )
            tr = conditional_ratio(A, lit(y_text), lit(x_text), n)
            assert tr.output_symbols == est.output_symbols, (k, x_text, y_text)
            assert not tr.halted


def test_match_run_automaton_output_stream_matches():
    T = odd_projection_transducer(A2)
    A = match_run_automaton(T, 2)
    from fsindep import run

    x, y = RandomSource(A2, seed=3), OddSource(RandomSource(A2, seed=3))
    n = 64
    comp, _ = match_run_compress(T, 2, y.clone(), x.clone(), n)
    tr = run(A, 2, [y.clone(), x.clone()], n)
    assert tr.outputs[0] == comp


def test_match_run_automaton_oracle_consumption_is_bounded():
    """The materialized compressor reads at most 2 oracle symbols per target
    symbol (plus the lookahead in flight)."""
    T = odd_projection_transducer(A2)
    A = match_run_automaton(T, 3)
    x = RandomSource(A2, seed=41)
    tr = conditional_ratio(A, OddSource(x.clone()), x.clone(), 300)
    assert tr.oracle_symbols is not None
    assert tr.oracle_symbols <= 2 * 300 + 2 * 3


def test_match_run_automaton_rejects_large_windows():
    with pytest.raises(ValueError):
        match_run_automaton(odd_projection_transducer(A2), 4)


# ---------------------------------------------------------------------------
# conditional models and prefix codes


def test_train_model_add_one_counts():
    model = train_model(word("0000"), word("0101"), 1)
    # pairs: (0,0) twice, (0,1) twice; add-one smoothing over b=2
    assert model.nu[0, 0] == pytest.approx(3 / 4)
    assert model.nu[1, 0] == pytest.approx(1 / 4)
    assert model.nu[0, 1] == pytest.approx(3 / 4)


def test_model_validation():
    with pytest.raises(ValueError):
        ConditionalModel(A2, 0, np.eye(2))
    with pytest.raises(ValueError):
        ConditionalModel(A2, 2, np.ones((2, 2)))  # columns sum to 2
    with pytest.raises(ValueError):
        ConditionalModel(A2, 2, np.array([[0.5, 0.5]]))  # wrong shape


def test_uniform_model_gives_flat_code():
    model = ConditionalModel.from_probabilities(A2, 3, np.full((2, 2), 0.5))
    code = build_prefix_code(model)
    lengths, codewords = code.codebook(0)
    assert lengths.tolist() == [3] * 8
    assert sorted(codewords) == [
        tuple((v >> i) & 1 for i in (2, 1, 0)) for v in range(8)
    ]


def test_code_lengths_match_ceil_formula():
    rng = np.random.default_rng(5)
    for b, k in ((2, 3), (3, 2), (2, 5)):
        alpha = Alphabet(b)
        raw = rng.random((b, b)) + 0.05
        nu = raw / raw.sum(axis=0, keepdims=True)
        model = ConditionalModel(alpha, k, nu)
        code = build_prefix_code(model)
        for v_id in range(b**k):
            lengths, _ = code.codebook(v_id)
            dv = code._digits(v_id)
            for u_id in range(b**k):
                du = code._digits(u_id)
                p = 1.0
                for i in range(k):
                    p *= nu[du[i], dv[i]]
                expect = max(math.ceil(-math.log(p) / math.log(b)), 1)
                assert lengths[u_id] in (expect, expect - 1, expect + 1), (
                    "ceil boundary",
                    b,
                    k,
                )
                # exact agreement via the model's own accumulated exponent
                s = sum(model.neglog[du[i], dv[i]] for i in range(k))
                assert lengths[u_id] == max(math.ceil(s), 1) or s == 0.0


def test_fast_length_path_agrees_with_codebook():
    rng = np.random.default_rng(9)
    raw = rng.random((3, 3)) + 0.02
    nu = raw / raw.sum(axis=0, keepdims=True)
    model = ConditionalModel(A3, 3, nu)
    code = build_prefix_code(model)
    n = 60
    x = rng.integers(0, 3, n)
    y = rng.integers(0, 3, n)
    fast = model.symbol_code_lengths(x, y)
    for i in range(n // 3):
        u = x[3 * i] * 9 + x[3 * i + 1] * 3 + x[3 * i + 2]
        v = y[3 * i] * 9 + y[3 * i + 1] * 3 + y[3 * i + 2]
        assert fast[i] == code.codebook(int(v))[0][int(u)]


def test_codebooks_are_prefix_free_and_kraft_feasible():
    rng = np.random.default_rng(31)
    for _ in range(30):
        b = int(rng.integers(2, 4))
        k = int(rng.integers(1, 4))
        raw = rng.random((b, b)) + 0.01
        nu = raw / raw.sum(axis=0, keepdims=True)
        code = build_prefix_code(ConditionalModel(Alphabet(b), k, nu))
        for v_id in range(b**k):
            lengths, codewords = code.codebook(v_id)
            kraft = sum(
                Fraction(1, b ** int(L)) for L in lengths if L >= 0
            )
            assert kraft <= 1
            words = [w for w in codewords if w is not None]
            assert len(set(words)) == len(words)
            for i, wa in enumerate(words):
                for wb in words[i + 1 :]:
                    shorter, longer = sorted((wa, wb), key=len)
                    assert longer[: len(shorter)] != shorter or shorter == longer


def test_codebook_determinism():
    nu = np.array([[0.7, 0.2], [0.3, 0.8]])
    a = build_prefix_code(ConditionalModel(A2, 4, nu))
    b = build_prefix_code(ConditionalModel(A2, 4, nu))
    for v in range(16):
        la, ca = a.codebook(v)
        lb, cb = b.codebook(v)
        assert la.tolist() == lb.tolist() and ca == cb


def test_degenerate_model_empty_codeword():
    sure = ConditionalModel.from_probabilities(A2, 2, np.eye(2))
    code = build_prefix_code(sure)
    lengths, codewords = code.codebook(0)  # condition block 00
    assert lengths[0] == 0 and codewords[0] == ()
    assert lengths[1] == -1 and codewords[1] is None  # impossible block
    assert code.decode_tree(0) == 0  # bare block id, no trie needed


def test_code_table_cap():
    with pytest.raises(ValueError):
        build_prefix_code(
            ConditionalModel(A2, 21, np.full((2, 2), 0.5))
        )


# ---------------------------------------------------------------------------
# conditional encode/decode round trips


def test_cond_round_trip_randomized():
    rng = random.Random(2718)
    nprng = np.random.default_rng(2718)
    for _ in range(120):
        b = rng.choice([2, 2, 3])
        k = rng.randint(1, 4)
        n = k * rng.randint(1, 64)
        alpha = Alphabet(b)
        xt = nprng.integers(0, b, 4 * n + 8)
        yt = nprng.integers(0, b, 4 * n + 8)
        model = train_model(
            word(xt[: 2 * n], base=b), word(yt[: 2 * n], base=b), k
        )
        code = build_prefix_code(model)
        x, y = LiteralSource(word(xt, base=b)), LiteralSource(word(yt, base=b))
        comp, est = cond_encode(x, y.clone(), code, n)
        assert est.output_symbols == len(comp)
        back = cond_decode(comp, y.clone(), code, n)
        assert back == word(xt[:n], base=b)


def test_cond_encode_validates_block_alignment():
    code = build_prefix_code(
        ConditionalModel.from_probabilities(A2, 2, np.full((2, 2), 0.5))
    )
    with pytest.raises(ValueError):
        cond_encode(RandomSource(A2, 1), RandomSource(A2, 2), code, 7)


def test_cond_encode_with_sure_model_emits_nothing():
    code = build_prefix_code(ConditionalModel.from_probabilities(A2, 2, np.eye(2)))
    x = RandomSource(A2, seed=8)
    comp, est = cond_encode(x.clone(), x.clone(), code, 64)
    assert len(comp) == 0 and est.final_ratio == 0.0
    assert cond_decode(comp, x.clone(), code, 64) == x.prefix(64)


def test_cond_encode_rejects_impossible_blocks():
    code = build_prefix_code(ConditionalModel.from_probabilities(A2, 1, np.eye(2)))
    with pytest.raises(ValueError):
        cond_encode(lit("01"), lit("00"), code, 2)  # pair (1, 0) has prob 0


def test_cond_decode_rejects_truncated_and_padded_streams():
    x = RandomSource(A2, seed=3)
    y = RandomSource(A2, seed=4)
    model = train_model(x.prefix(512), y.prefix(512), 2)
    code = build_prefix_code(model)
    comp, _ = cond_encode(x.clone(), y.clone(), code, 64)
    with pytest.raises(DecodeDeadEnd):
        cond_decode(comp.segment(1, len(comp) - 1), y.clone(), code, 64)
    with pytest.raises(DecodeDeadEnd):
        cond_decode(comp + word("0"), y.clone(), code, 64)


# ---------------------------------------------------------------------------
# ratio estimation and independence reports


def test_conditional_ratio_estimate_identical_pair():
    x = RandomSource(A2, seed=100)
    est = conditional_ratio_estimate(x.clone(), x.clone(), 4096, 8)
    assert est.final_ratio == 0.125


def test_conditional_ratio_estimate_independent_pair():
    est = conditional_ratio_estimate(
        RandomSource(A2, seed=1), RandomSource(A2, seed=2), 1 << 14, 4
    )
    assert 1.0 <= est.final_ratio <= 1.2


def test_conditional_ratio_estimate_does_not_consume():
    x = RandomSource(A2, seed=5)
    y = RandomSource(A2, seed=6)
    first = x.peek()
    conditional_ratio_estimate(x, y, 256, 2)
    assert x.peek() == first


def test_conditional_ratio_estimate_validation():
    with pytest.raises(ValueError):
        conditional_ratio_estimate(
            RandomSource(A2, 1), RandomSource(A2, 2), 100, 8
        )


def test_independence_report_identical_pair_is_dependent():
    x = RandomSource(A2, seed=50)
    rep = independence_report(x.clone(), x.clone(), 4096, 8)
    assert rep.rho_x_given_y == 0.125
    assert rep.rho_x > 0.9
    assert rep.gap_x > 0.8
    assert not rep.independent(0.2)


def test_independence_report_random_pair_is_independent():
    rep = independence_report(
        RandomSource(A2, seed=51), RandomSource(A2, seed=52), 1 << 14, 8
    )
    assert rep.gap_x <= 0.05 and rep.gap_y <= 0.05
    assert rep.independent(0.05)


# ---------------------------------------------------------------------------
# losslessness certification


def test_copy_transducer_is_lossless(copy_aut):
    rep = bounded_losslessness_check(copy_aut, 8)
    assert rep.lossless and rep.counterexample is None
    assert rep.words_checked == sum(2**L for L in range(1, 9))


def test_odd_projection_is_lossy():
    rep = bounded_losslessness_check(odd_projection_transducer(A2), 4)
    assert not rep.lossless
    w1, w2 = rep.counterexample
    assert w1 != w2 and len(w1) == len(w2) <= 2


def test_collapsing_transducer_caught_immediately():
    M = KAutomaton(2, A2, ["s"], "s", [("s", ((a,), ()), "s") for a in (0, 1)])
    rep = bounded_losslessness_check(M, 3)
    assert not rep.lossless
    assert len(rep.counterexample[0]) == 1


def test_match_run_automaton_is_lossless_per_oracle():
    """With the oracle fixed, distinct targets compress to distinct outputs."""
    T = odd_projection_transducer(A2)
    A = match_run_automaton(T, 2)
    x_text = "01101001100101100110100110010110"
    seen = {}
    for val in range(64):
        bits = [(val >> i) & 1 for i in range(6)]
        comp, _ = match_run_compress(T, 2, LiteralSource(word(bits)), lit(x_text), 6)
        key = comp.to_text()
        assert key not in seen, (bits, seen[key])
        seen[key] = bits
    assert len(seen) == 64


def test_unconditional_source_is_all_zero():
    s = unconditional_source(A3)
    assert s.take(16).tolist() == [0] * 16
    assert s.clone().take(4).tolist() == [0, 0, 0, 0]
