"""Acceptance checks, one test per criterion.

Each test prints its own pass/fail line under ``pytest -v`` through its
name.  The scales (exhaustive scans, sample counts) are part of the
contract, so they are asserted here rather than configurable.
"""

import numpy as np

from triality import (autos, campaigns, codeloops, core, embedding, kernels,
                      loops, oracle)
from triality.campaigns import EXHAUSTIVE, Campaign

FULL = 1 << 23


def test_criterion_01_rank3_enumeration_has_order_2_pow_23(ctx3):
    seen = np.zeros(FULL, dtype=bool)
    step = 1 << 20
    for start in range(0, FULL, step):
        z, f = kernels.lex_chunk(ctx3, start, start + step)
        codes = kernels.pack_batch(ctx3, z, f)
        assert not seen[codes].any(), "duplicate element in enumeration"
        seen[codes] = True
    assert int(seen.sum()) == FULL
    first = kernels.to_elements(ctx3, *kernels.lex_chunk(ctx3, 0, 1))[0]
    assert first.is_identity()
    rng = np.random.Generator(np.random.Philox(2026))
    for rank in rng.integers(0, FULL, size=32):
        x = core.element_from_rank(ctx3, int(rank))
        z, f = kernels.lex_chunk(ctx3, int(rank), int(rank) + 1)
        assert kernels.to_elements(ctx3, z, f)[0] == x


def test_criterion_02_triality_identity_holds_on_all_elements():
    result = campaigns.run_campaign(Campaign("triality", EXHAUSTIVE))
    assert result.passed
    assert result.checked == FULL
    assert result.counterexample is None


def test_criterion_03_s3_relations_hold_on_all_elements():
    result = campaigns.run_campaign(Campaign("s3-orders", EXHAUSTIVE))
    assert result.passed
    names = [row["name"] for row in result.detail]
    assert names == ["sigma^2", "tau^2", "rho^3", "(sigma rho)^2"]
    for row in result.detail:
        assert row["checked"] == FULL
        assert row["failures"] == 0


def test_criterion_04_sigma_fixed_subgroup_has_order_8192(hfix):
    assert hfix.count == 8192
    assert all(hfix.generators_fixed)
    assert hfix.closure_size == 8192
    assert hfix.closure_matches_scan


def test_criterion_05_loop_order_is_1024(table):
    assert table.order == 1024
    assert len(np.unique(table.codes)) == 1024
    assert table.element(0).is_identity()


def test_criterion_06_moufang_left_exhaustive_right_middle_sampled(table):
    left = loops.check_moufang(table, "left", mode="exhaustive")
    assert left.passed
    assert left.checked == 1024**3
    for law in ("right", "middle"):
        rep = loops.check_moufang(table, law, mode="sampled",
                                  samples=10_000_000, seed=2026)
        assert rep.passed
        assert rep.checked == 10_000_000


def test_criterion_07_variety_laws_hold(table):
    reports = loops.check_variety_E(table, samples=10_000_000, seed=2026)
    assert all(r.passed for r in reports)
    by_law = {r.law: r for r in reports}
    assert by_law["x^4 = 1"].mode == "exhaustive"
    assert by_law["x^4 = 1"].checked == 1024
    for law in ("[x,y]^2 = 1", "[x^2,y] = 1"):
        assert by_law[law].mode == "exhaustive"
        assert by_law[law].checked == 1024**2
    for law in ("(x,y,z)^2 = 1", "[[x,y],t] = 1", "(x^2,y,z) = 1"):
        assert by_law[law].checked >= 10_000_000
    expansions = loops.prop_expansion_reports(table, seed=2026,
                                              samples=10_000_000)
    assert all(r.passed for r in expansions)
    assert expansions[0].law == "(xy)^2 = x^2y^2[x,y]"
    assert expansions[0].mode == "exhaustive"
    assert expansions[0].checked == 1024**2


def test_criterion_08_doro_star_reproduces_loop_product(table, doro):
    star = doro.star_table()
    assert star.shape == (1024, 1024)
    assert (star == table.mul).all()


def test_criterion_09_collection_oracle_is_multiplicative():
    for n in (3, 4):
        ctx = core.get_ctx(n)
        rng = np.random.Generator(np.random.Philox(2026 + n))
        for _ in range(100_000):
            w1 = oracle.random_word(ctx, 6, rng)
            w2 = oracle.random_word(ctx, 6, rng)
            lhs = oracle.normalize(w1 * w2, ctx)
            rhs = core.multiply(oracle.normalize(w1, ctx),
                                oracle.normalize(w2, ctx))
            assert lhs == rhs


def test_criterion_10_higher_ranks_embed_and_satisfy_triality():
    small = core.get_ctx(3)
    for n in (4, 5):
        ctx = core.get_ctx(n)
        assert ctx.m == {4: 26, 5: 50}[n]
        assert ctx.code_bits == {4: 42, 5: 70}[n]
        rng = np.random.Generator(np.random.Philox(20_260_000 + n))
        z, f = kernels.random_batch(ctx, rng, 100_000)
        comps = embedding.embed_batch(ctx, z, f)
        rz, rf, ok = embedding.reconstruct_batch(ctx, comps)
        assert ok.all() and (rz == z).all() and (rf == f).all()
        yz, yf = kernels.random_batch(ctx, rng, 100_000)
        pz, pf = kernels.mul(ctx, z, f, yz, yf)
        cy = embedding.embed_batch(ctx, yz, yf)
        cp = embedding.embed_batch(ctx, pz, pf)
        for (az, af), (bz, bf), (wz, wf) in zip(comps, cy, cp):
            qz, qf = kernels.mul(small, az, af, bz, bf)
            assert (qz == wz).all() and (qf == wf).all()
        tz, tf = kernels.random_batch(ctx, rng, 1_000_000)
        assert autos.triality_holds_batch(ctx, tz, tf).all()
        # the batch route is the embedding route; pin them together
        spot = kernels.to_elements(ctx, tz[:20], tf[:20])
        for x in spot:
            img = embedding.apply_auto_via_embedding(autos.sigma_word(), x)
            c = core.inverse(x) * img
            r1 = embedding.apply_auto_via_embedding(autos.rho_word(), c)
            r2 = embedding.apply_auto_via_embedding(autos.rho_word(), r1)
            assert (c * r1 * r2).is_identity()


def test_criterion_11_free_rank4_loop_has_order_2_pow_18(fl4, fl4_checks):
    assert fl4.order == 1 << 18
    assert fl4.center_dim == 14
    assert fl4_checks.pair_products_inside
    assert fl4_checks.inverses_inside
    assert fl4_checks.sampled_products_inside == fl4_checks.sampled_products_total
    assert fl4_checks.surjective_components


def test_criterion_12_hyperplane_sweep_partitions_into_63_groups(table):
    rows = codeloops.sweep_hyperplanes(table)
    assert len(rows) == 127
    assoc_vec = 1 << next(iter(codeloops.associator_block(3)))
    group_count = 0
    for row in rows:
        assert row.order == 16
        assert row.moufang
        assert row.squares <= 2
        assert row.code_loop
        assert row.roundtrip
        contains_assoc = codeloops.CenterSubspace(3, row.basis).contains(assoc_vec)
        assert row.group == contains_assoc
        assert row.group == row.group_expected
        group_count += int(row.group)
    assert group_count == 63
