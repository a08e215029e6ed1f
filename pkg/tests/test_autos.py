import numpy as np
import pytest

from triality import autos, core, kernels
from triality.autos import AutoWord, RHO, SIGMA, TAU


def rand_elems(ctx, rng, count):
    return kernels.to_elements(ctx, *kernels.random_batch(ctx, rng, count))


def test_autoword_algebra():
    w = autos.sigma_word() * autos.rho_word()
    assert w.letters == (SIGMA, RHO)
    assert AutoWord(()).permutation() == (0, 1, 2)
    assert autos.sigma_word().order() == 2
    assert autos.tau_word().order() == 2
    assert autos.rho_word().order() == 3
    assert (autos.sigma_word() * autos.rho_word()).order() == 2
    with pytest.raises(ValueError):
        AutoWord(("phi",))


def test_autoword_reduction():
    w = autos.rho_word() * autos.rho_word() * autos.rho_word()
    assert w.reduced().letters == ()
    tau_like = autos.rho_word() * autos.sigma_word()
    assert tau_like.permutation() == autos.tau_word().permutation()
    assert tau_like.reduced(allow_tau=True).letters == (TAU,)
    assert tau_like.reduced().letters == (RHO, SIGMA)


def test_inverse_word():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(43))
    words = [
        autos.sigma_word(),
        autos.rho_word(),
        autos.rho_word() * autos.sigma_word(),
        AutoWord((TAU, RHO, SIGMA)),
    ]
    for w in words:
        inv = w.inverse_word()
        for x in rand_elems(ctx, rng, 10):
            assert autos.apply(inv, autos.apply(w, x)) == x


def test_sigma_swaps_generator_families():
    ctx = core.get_ctx(3)
    for i in (1, 2, 3):
        a = core.generator(ctx, "a", i)
        b = core.generator(ctx, "b", i)
        assert autos.apply_sigma(a) == b
        assert autos.apply_sigma(b) == a


def test_tau_and_rho_on_generators():
    ctx = core.get_ctx(3)
    for i in (1, 2, 3):
        a = core.generator(ctx, "a", i)
        b = core.generator(ctx, "b", i)
        assert autos.apply_tau(a) == a
        assert autos.apply_tau(b) == core.inverse(a * b)
        assert autos.apply_rho(a) == b
        assert autos.apply_rho(b) == core.inverse(a * b)


def test_rho_is_tau_then_sigma():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(47))
    for x in rand_elems(ctx, rng, 100):
        assert autos.apply_rho(x) == autos.apply_sigma(autos.apply_tau(x))


def test_maps_are_automorphisms():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(53))
    xs = rand_elems(ctx, rng, 100)
    ys = rand_elems(ctx, rng, 100)
    for fn in (autos.apply_sigma, autos.apply_tau, autos.apply_rho):
        for x, y in zip(xs, ys):
            assert fn(x * y) == fn(x) * fn(y)


def test_s3_relations_random():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(59))
    for x in rand_elems(ctx, rng, 100):
        assert autos.apply_sigma(autos.apply_sigma(x)) == x
        assert autos.apply_tau(autos.apply_tau(x)) == x
        assert autos.apply_rho(autos.apply_rho(autos.apply_rho(x))) == x
        sr = autos.apply(autos.sigma_word() * autos.rho_word(), x)
        assert autos.apply(autos.sigma_word() * autos.rho_word(), sr) == x


def test_check_triality_matches_direct_computation():
    # recompute [x,sigma][x,sigma]^rho [x,sigma]^rho^2 from first principles
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(61))
    for x in rand_elems(ctx, rng, 200):
        c = core.inverse(x) * autos.apply_sigma(x)
        prod = c * autos.apply_rho(c) * autos.apply_rho(autos.apply_rho(c))
        assert prod.is_identity()
        assert autos.check_triality(x)


def test_triality_batch_ranks():
    rng = np.random.Generator(np.random.Philox(67))
    for n in (3, 4):
        ctx = core.get_ctx(n)
        z, f = kernels.random_batch(ctx, rng, 2000)
        assert autos.triality_holds_batch(ctx, z, f).all()
