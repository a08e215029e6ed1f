import numpy as np
import pytest

from triality import campaigns, core
from triality.campaigns import EXHAUSTIVE, Campaign


def test_campaign_validation():
    with pytest.raises(ValueError):
        Campaign("latin-square")
    with pytest.raises(ValueError):
        Campaign("triality", 0)
    with pytest.raises(ValueError):
        Campaign("triality", True)
    with pytest.raises(ValueError):
        Campaign("triality", "most")
    with pytest.raises(ValueError):
        Campaign("triality", 100, jobs=0)
    with pytest.raises(ValueError):
        Campaign("triality", 100, seed=-1)
    c = Campaign("triality", EXHAUSTIVE)
    assert c.exhaustive and c.samples == 0
    assert Campaign("triality", 500).samples == 500


def test_scope_validation():
    with pytest.raises(ValueError):
        campaigns.validate(Campaign("codeloop-sweep", 100))
    with pytest.raises(ValueError):
        campaigns.validate(Campaign("variety-E", EXHAUSTIVE))
    with pytest.raises(ValueError):
        campaigns.validate(Campaign("moufang", 100, n=4))
    with pytest.raises(ValueError):
        campaigns.validate(Campaign("triality", EXHAUSTIVE, n=4))
    with pytest.raises(ValueError):
        campaigns.validate(Campaign("triality", 100, mode=core.INFINITE))
    ctx = campaigns.validate(Campaign("triality", 100, n=4))
    assert ctx.n == 4


def test_worker_rng_streams():
    a = campaigns.worker_rng(5, 0).integers(0, 1 << 30, size=8)
    b = campaigns.worker_rng(5, 0).integers(0, 1 << 30, size=8)
    c = campaigns.worker_rng(5, 1).integers(0, 1 << 30, size=8)
    assert (a == b).all()
    assert (a != c).any()


def test_share_and_ranges():
    for total, workers in ((10, 3), (1 << 20, 4), (7, 7), (5, 8)):
        assert sum(campaigns._share(total, w, workers) for w in range(workers)) == total
    ctx = core.get_ctx(3)
    spans = []
    for w in range(3):
        spans.extend(campaigns._lex_ranges(ctx, w, 3))
    spans.sort()
    assert spans[0][0] == 0 and spans[-1][1] == 1 << 23
    for (a0, a1), (b0, b1) in zip(spans, spans[1:]):
        assert a1 == b0


def test_sampled_targets_pass():
    for target in ("group-axioms", "triality", "s3-orders", "automorphism"):
        for n in (3, 4):
            result = campaigns.run_campaign(Campaign(target, 5000, n=n, seed=3))
            assert result.passed, (target, n)
            assert result.failures == 0
            assert result.counterexample is None
            assert result.checked >= 5000
            assert result.elapsed > 0
            for row in result.detail:
                assert {"name", "mode", "checked", "failures"} <= set(row)
                assert "_merge" not in row


def test_sampled_loop_targets_pass(table):
    for target in ("moufang", "variety-E"):
        result = campaigns.run_campaign(Campaign(target, 5000, seed=4))
        assert result.passed, target
        assert all(row["failures"] == 0 for row in result.detail)
    names = [r["name"] for r in campaigns.run_campaign(
        Campaign("moufang", 2000)).detail]
    assert names == ["moufang-left", "moufang-right", "moufang-middle"]


def test_deterministic_detail():
    c = Campaign("triality", 20_000, seed=11)
    r1 = campaigns.run_campaign(c)
    r2 = campaigns.run_campaign(c)
    assert r1.detail == r2.detail
    assert r1.checked == r2.checked


def test_jobs_split_matches_serial():
    serial = campaigns.run_campaign(Campaign("triality", 20_000, seed=12, jobs=1))
    pooled = campaigns.run_campaign(Campaign("triality", 20_000, seed=12, jobs=2))
    assert serial.detail == pooled.detail
    assert pooled.checked == 20_000


def test_exhaustive_small_slice_counts():
    # one worker's share of the exhaustive lex partition, run directly
    c = Campaign("triality", EXHAUSTIVE, seed=0)
    rows = campaigns.run_unit(c, 0, 8)
    total = sum(1 for _ in campaigns._lex_ranges(core.get_ctx(3), 0, 8))
    assert rows[0]["checked"] == total << campaigns.CHUNK_BITS
    assert rows[0]["failures"] == 0


def test_merge_details_rules():
    c = Campaign("variety-E", 1000)
    w0 = [
        campaigns._row("ternary", "sampled", 500, 0),
        campaigns._row("binary", "exhaustive", 100, 0, merge="same"),
    ]
    w1 = [
        campaigns._row("ternary", "sampled", 500, 1, counterexample={"x": 1}),
        campaigns._row("binary", "exhaustive", 100, 0, merge="same"),
    ]
    merged = campaigns._merge_details(c, [w0, w1])
    by_name = {r["name"]: r for r in merged}
    assert by_name["ternary"]["checked"] == 1000
    assert by_name["ternary"]["failures"] == 1
    assert by_name["ternary"]["counterexample"] == {"x": 1}
    assert by_name["binary"]["checked"] == 100
    assert all("_merge" not in r for r in merged)


def test_merge_sorts_sweep_rows():
    c = Campaign("codeloop-sweep", EXHAUSTIVE)
    w0 = [campaigns._row("lam=5", "exhaustive", 1, 0, lam_index=5)]
    w1 = [campaigns._row("lam=2", "exhaustive", 1, 0, lam_index=2)]
    merged = campaigns._merge_details(c, [w0, w1])
    assert [r["lam_index"] for r in merged] == [2, 5]


def test_run_unit_takes_worker_share():
    c = Campaign("triality", 1000)
    rows = campaigns.run_unit(c, 1, 2)
    assert sum(r["checked"] for r in rows) == campaigns._share(1000, 1, 2)
