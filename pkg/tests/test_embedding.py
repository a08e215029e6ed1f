import numpy as np
import pytest

from triality import autos, core, embedding, kernels


def rand_elems(ctx, rng, count):
    return kernels.to_elements(ctx, *kernels.random_batch(ctx, rng, count))


def test_triple_set():
    ts4 = embedding.TripleSet.for_rank(4)
    assert len(ts4) == 4
    assert list(ts4)[0] == (1, 2, 3)
    assert ts4.position((2, 3, 4)) == 3
    assert ts4.smallest_containing((4,)) == (1, 2, 4)
    assert ts4.smallest_containing((2, 4)) == (1, 2, 4)
    ts5 = embedding.TripleSet.for_rank(5)
    assert len(ts5) == 10


def test_product_element_validation():
    ctx = core.get_ctx(4)
    pe = embedding.embed(core.identity(ctx))
    assert pe.component(1, 2, 3).is_identity()
    small = core.get_ctx(3)
    with pytest.raises(ValueError):
        embedding.ProductElement(4, "z4", (core.identity(small),) * 3)
    with pytest.raises(ValueError):
        embedding.ProductElement(
            4, "z", (core.identity(small),) * 4  # mode mismatch with components
        )


def test_project_generators():
    ctx = core.get_ctx(4)
    a4 = core.generator(ctx, "a", 4)
    # relabeling: 4 is the third letter of (1, 2, 4)
    assert embedding.project(a4, (1, 2, 4)) == core.generator(core.get_ctx(3), "a", 3)
    assert embedding.project(a4, (1, 2, 3)).is_identity()
    u24 = core.generator(ctx, "u", 2, 4)
    assert embedding.project(u24, (2, 3, 4)) == core.generator(
        core.get_ctx(3), "u", 1, 3
    )


def test_embed_reconstruct_roundtrip():
    rng = np.random.Generator(np.random.Philox(107))
    for n in (4, 5):
        ctx = core.get_ctx(n)
        for x in rand_elems(ctx, rng, 40):
            assert embedding.reconstruct(ctx, embedding.embed(x)) == x


def test_embed_is_homomorphism():
    ctx = core.get_ctx(4)
    rng = np.random.Generator(np.random.Philox(109))
    xs = rand_elems(ctx, rng, 60)
    ys = rand_elems(ctx, rng, 60)
    ts = embedding.triple_set(4)
    for x, y in zip(xs, ys):
        ex, ey, exy = embedding.embed(x), embedding.embed(y), embedding.embed(x * y)
        for alpha in ts:
            assert ex.component(*alpha) * ey.component(*alpha) == exy.component(*alpha)


def test_reconstruct_rejects_incoherent_components():
    ctx = core.get_ctx(4)
    rng = np.random.Generator(np.random.Philox(113))
    x = rand_elems(ctx, rng, 1)[0]
    pe = embedding.embed(x)
    comps = list(pe.components)
    # flip a zpart entry shared with other components
    c0 = comps[0]
    z = list(c0.zpart)
    z[0] = (z[0] + 1) & 3
    comps[0] = core.Element(c0.ctx, z, c0.fpart)
    broken = embedding.ProductElement(4, "z4", tuple(comps))
    with pytest.raises(ValueError):
        embedding.reconstruct(ctx, broken)


def test_apply_auto_via_embedding_matches_rank3():
    ctx = core.get_ctx(3)
    rng = np.random.Generator(np.random.Philox(127))
    for x in rand_elems(ctx, rng, 50):
        assert embedding.apply_auto_via_embedding(autos.sigma_word(), x) == \
            autos.apply_sigma(x)
        assert embedding.apply_auto_via_embedding(autos.rho_word(), x) == \
            autos.apply_rho(x)


def test_apply_auto_via_embedding_is_automorphism():
    ctx = core.get_ctx(4)
    rng = np.random.Generator(np.random.Philox(131))
    xs = rand_elems(ctx, rng, 40)
    ys = rand_elems(ctx, rng, 40)
    for w in (autos.sigma_word(), autos.rho_word()):
        for x, y in zip(xs, ys):
            assert embedding.apply_auto_via_embedding(w, x * y) == \
                embedding.apply_auto_via_embedding(w, x) * \
                embedding.apply_auto_via_embedding(w, y)


def test_tau_rejected_past_rank3():
    ctx = core.get_ctx(4)
    with pytest.raises(ValueError):
        embedding.apply_auto_via_embedding(autos.tau_word(), core.identity(ctx))
    z, f = kernels.identity_batch(ctx, 1)
    with pytest.raises(ValueError):
        embedding.apply_auto_batch(ctx, autos.tau_word(), z, f)


def test_batch_routes_match_scalar():
    rng = np.random.Generator(np.random.Philox(137))
    for n in (4, 5):
        ctx = core.get_ctx(n)
        z, f = kernels.random_batch(ctx, rng, 50)
        xs = kernels.to_elements(ctx, z, f)
        comps = embedding.embed_batch(ctx, z, f)
        ts = embedding.triple_set(n)
        small = core.get_ctx(3)
        for c, alpha in enumerate(ts):
            got = kernels.to_elements(small, *comps[c])
            for x, g in zip(xs, got):
                assert embedding.project(x, alpha) == g
        rz, rf, ok = embedding.reconstruct_batch(ctx, comps)
        assert ok.all() and (rz == z).all() and (rf == f).all()
        for w in (autos.sigma_word(), autos.rho_word()):
            az, af = embedding.apply_auto_batch(ctx, w, z, f)
            for x, g in zip(xs, kernels.to_elements(ctx, az, af)):
                assert embedding.apply_auto_via_embedding(w, x) == g
