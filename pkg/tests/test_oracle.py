import numpy as np
import pytest

from triality import core, oracle


def test_parse_format_roundtrip():
    w = oracle.parse_word("a1 b2^-1 a3^2 b1")
    assert w.letters == (("a", 1, 1), ("b", 2, -1), ("a", 3, 2), ("b", 1, 1))
    assert oracle.format_word(w) == "a1 b2^-1 a3^2 b1"
    assert oracle.parse_word("").letters == ()
    assert oracle.format_word(oracle.Word(())) == ""


def test_parse_errors():
    for bad in ("c1", "a0 b1", "a", "a1^", "a1b2"):
        with pytest.raises(ValueError):
            oracle.parse_word(bad)


def test_word_algebra():
    w1 = oracle.parse_word("a1 b2")
    w2 = oracle.parse_word("a3^-1")
    assert (w1 * w2).letters == w1.letters + w2.letters
    inv = w1.inverse()
    assert inv.letters == (("b", 2, -1), ("a", 1, -1))
    assert len(w1) == 2


def test_normalize_known_values():
    ctx = core.get_ctx(3)
    e = oracle.normalize(oracle.Word(()), ctx)
    assert e.is_identity()
    x = oracle.normalize(oracle.parse_word("a1"), ctx)
    assert x == core.generator(ctx, "a", 1)
    # collecting b2 past a1 deposits the pair's p coordinate
    y = oracle.normalize(oracle.parse_word("b2 a1"), ctx)
    assert y.zpart == (1, 0, 0, 0, 1, 0)
    assert y.fpart == 1 << ctx.p_bit(1, 2)


def test_normalize_matches_direct_multiplication():
    rng = np.random.Generator(np.random.Philox(29))
    for n in (3, 4):
        ctx = core.get_ctx(n)
        for _ in range(300):
            w = oracle.random_word(ctx, int(rng.integers(0, 12)), rng)
            direct = oracle.word_element(w, ctx)
            for strategy in oracle.STRATEGIES:
                assert oracle.normalize(w, ctx, strategy) == direct


def test_normalize_infinite_mode():
    ctx = core.get_ctx(3, core.INFINITE)
    rng = np.random.Generator(np.random.Philox(31))
    for _ in range(100):
        w = oracle.random_word(ctx, 8, rng)
        assert oracle.normalize(w, ctx) == oracle.word_element(w, ctx)


def test_normalize_is_multiplicative():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(37))
    for _ in range(200):
        w1 = oracle.random_word(ctx, 5, rng)
        w2 = oracle.random_word(ctx, 5, rng)
        lhs = oracle.normalize(w1 * w2, ctx)
        rhs = core.multiply(oracle.normalize(w1, ctx), oracle.normalize(w2, ctx))
        assert lhs == rhs


def test_inverse_word_normalizes_to_inverse():
    ctx = core.get_ctx(4)
    rng = np.random.Generator(np.random.Philox(41))
    for _ in range(100):
        w = oracle.random_word(ctx, 6, rng)
        assert oracle.normalize(w.inverse(), ctx) == core.inverse(
            oracle.normalize(w, ctx)
        )


def test_strategy_validation():
    ctx = core.get_ctx(3)
    with pytest.raises(ValueError):
        oracle.normalize(oracle.parse_word("a1"), ctx, "middle-out")


def test_random_word_deterministic():
    ctx = core.get_ctx(3)
    w1 = oracle.random_word(ctx, 10, 99)
    w2 = oracle.random_word(ctx, 10, 99)
    assert w1 == w2
    assert all(1 <= idx <= 3 and exp in (-2, -1, 1, 2) for _, idx, exp in w1.letters)
