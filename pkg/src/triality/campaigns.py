"""Verification campaigns: pure work units plus a process-pooled runner.

A campaign names a target property, a scope (exhaustive, or a sample
count), and a seed.  run_campaign splits the work into one unit per
worker; a unit is a pure function of (campaign, worker, workers), so the
outcome never depends on scheduling.  Exhaustive units stride over
lexicographic chunks or table rows.  Sampled units draw from a Philox
stream keyed by the campaign seed and jumped once per worker index, which
places worker streams 2^128 draws apart; a fixed (campaign, jobs) pair
therefore reproduces bit for bit.

Each unit returns detail rows keyed by "name" (one per law, relation, or
subspace).  Rows from partitioned work merge by summing counts; rows that
every worker replicates (the exhaustive sub-laws inside variety-E) merge
by keeping one copy.  Counterexamples are JSON-ready dicts, elements
rendered through serialize.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import autos, kernels, loops, serialize
from .autos import AutoWord, RHO, SIGMA, TAU, rho_word, sigma_word, tau_word
from .core import DEFAULT_BUDGET_BITS, FINITE_Z4, GroupCtx, all_generators, get_ctx
from .embedding import apply_auto_batch

TARGETS = (
    "group-axioms",
    "triality",
    "s3-orders",
    "automorphism",
    "moufang",
    "variety-E",
    "codeloop-sweep",
)

EXHAUSTIVE = "exhaustive"
CHUNK_BITS = 20
SAMPLE_BATCH = 1 << 18


@dataclass(frozen=True)
class Campaign:
    target: str
    scope: object = 1_000_000  # EXHAUSTIVE or a positive sample count
    n: int = 3
    mode: str = FINITE_Z4
    seed: int = 0
    jobs: int = 1
    budget_bits: int = DEFAULT_BUDGET_BITS

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.scope != EXHAUSTIVE:
            if not isinstance(self.scope, int) or isinstance(self.scope, bool):
                raise ValueError("scope must be 'exhaustive' or a sample count")
            if self.scope <= 0:
                raise ValueError("sample count must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def exhaustive(self) -> bool:
        return self.scope == EXHAUSTIVE

    @property
    def samples(self) -> int:
        return 0 if self.exhaustive else int(self.scope)


@dataclass
class CampaignResult:
    campaign: Campaign
    checked: int
    failures: int
    counterexample: dict | None
    detail: list[dict]
    elapsed: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def validate(campaign: Campaign) -> GroupCtx:
    """Reject campaigns whose scope cannot run; returns the context."""
    ctx = get_ctx(campaign.n, campaign.mode)
    if not ctx.finite:
        raise ValueError("campaigns run in finite mode only")
    loop_targets = ("moufang", "variety-E", "codeloop-sweep")
    if campaign.target in loop_targets and campaign.n != 3:
        raise ValueError(f"{campaign.target} runs on the rank-3 loop")
    if campaign.target == "codeloop-sweep" and not campaign.exhaustive:
        raise ValueError("codeloop-sweep is exhaustive over the 127 subspaces")
    if campaign.exhaustive:
        if campaign.target == "variety-E":
            raise ValueError(
                "variety-E has arity-5 laws; run sampled, or call "
                "loops.check_variety_E(exhaustive=True) on a small quotient"
            )
        element_targets = ("group-axioms", "triality", "s3-orders", "automorphism")
        if campaign.target in element_targets and ctx.code_bits > campaign.budget_bits:
            raise ValueError(
                f"exhaustive {campaign.target} needs {ctx.code_bits} bits, "
                f"over the {campaign.budget_bits}-bit budget"
            )
    return ctx


def worker_rng(seed: int, worker: int = 0) -> np.random.Generator:
    """The campaign generator: Philox keyed by seed, jumped per worker."""
    bg = np.random.Philox(seed)
    if worker:
        bg = bg.jumped(worker)
    return np.random.Generator(bg)


def _share(total: int, worker: int, workers: int) -> int:
    return total // workers + (1 if worker < total % workers else 0)


def _lex_ranges(ctx: GroupCtx, worker: int, workers: int):
    total = 1 << ctx.code_bits
    step = 1 << CHUNK_BITS
    for idx, start in enumerate(range(0, total, step)):
        if idx % workers == worker:
            yield start, min(start + step, total)


def _element_json(ctx: GroupCtx, z: np.ndarray, f: np.ndarray, row: int) -> dict:
    [elem] = kernels.to_elements(ctx, z[row : row + 1], f[row : row + 1])
    return serialize.element_to_json(elem)


def _row(name: str, mode: str, checked: int, failures: int,
         counterexample: dict | None = None, merge: str = "sum", **extra) -> dict:
    out = {"name": name, "mode": mode, "checked": checked, "failures": failures,
           "counterexample": counterexample, "_merge": merge}
    out.update(extra)
    return out


_HANDLERS = {}


def _handler(name):
    def register(fn):
        _HANDLERS[name] = fn
        return fn

    return register


@_handler("group-axioms")
def _unit_group_axioms(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    """Exhaustive: x * x^-1 = e for every element.  Sampled: associativity."""
    ctx = get_ctx(campaign.n, campaign.mode)
    if campaign.exhaustive:
        checked = failures = 0
        counter = None
        for start, stop in _lex_ranges(ctx, worker, workers):
            z, f = kernels.lex_chunk(ctx, start, stop)
            iz, ifp = kernels.inv(ctx, z, f)
            pz, pf = kernels.mul(ctx, z, f, iz, ifp)
            bad = pz.any(axis=1) | pf.any(axis=1)
            checked += stop - start
            if bad.any():
                failures += int(bad.sum())
                if counter is None:
                    counter = _element_json(ctx, z, f, int(np.argmax(bad)))
        return [_row("inverse-law", "exhaustive", checked, failures, counter)]
    rng = worker_rng(campaign.seed, worker)
    todo = _share(campaign.samples, worker, workers)
    checked = failures = 0
    counter = None
    while checked < todo:
        k = min(todo - checked, SAMPLE_BATCH)
        xz, xf = kernels.random_batch(ctx, rng, k)
        yz, yf = kernels.random_batch(ctx, rng, k)
        zz, zf = kernels.random_batch(ctx, rng, k)
        lz, lf = kernels.mul(ctx, *kernels.mul(ctx, xz, xf, yz, yf), zz, zf)
        rz, rf = kernels.mul(ctx, xz, xf, *kernels.mul(ctx, yz, yf, zz, zf))
        bad = (lz != rz).any(axis=1) | (lf != rf).any(axis=1)
        checked += k
        if bad.any():
            failures += int(bad.sum())
            if counter is None:
                i = int(np.argmax(bad))
                counter = {"x": _element_json(ctx, xz, xf, i),
                           "y": _element_json(ctx, yz, yf, i),
                           "z": _element_json(ctx, zz, zf, i)}
    return [_row("associativity", "sampled", checked, failures, counter)]


@_handler("triality")
def _unit_triality(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    ctx = get_ctx(campaign.n, campaign.mode)
    checked = failures = 0
    counter = None

    def scan(z, f):
        nonlocal checked, failures, counter
        ok = autos.triality_holds_batch(ctx, z, f)
        checked += len(ok)
        if not ok.all():
            failures += int((~ok).sum())
            if counter is None:
                counter = _element_json(ctx, z, f, int(np.argmax(~ok)))

    if campaign.exhaustive:
        for start, stop in _lex_ranges(ctx, worker, workers):
            scan(*kernels.lex_chunk(ctx, start, stop))
    else:
        rng = worker_rng(campaign.seed, worker)
        todo = _share(campaign.samples, worker, workers)
        while checked < todo:
            k = min(todo - checked, SAMPLE_BATCH)
            scan(*kernels.random_batch(ctx, rng, k))
    mode = "exhaustive" if campaign.exhaustive else "sampled"
    return [_row("triality-identity", mode, checked, failures, counter)]


def _s3_relations(n: int) -> list[tuple[str, AutoWord]]:
    rels = [("sigma^2", AutoWord((SIGMA, SIGMA)))]
    if n == 3:
        rels.append(("tau^2", AutoWord((TAU, TAU))))
    rels += [("rho^3", AutoWord((RHO, RHO, RHO))),
             ("(sigma rho)^2", AutoWord((SIGMA, RHO, SIGMA, RHO)))]
    return rels


@_handler("s3-orders")
def _unit_s3_orders(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    ctx = get_ctx(campaign.n, campaign.mode)
    rels = _s3_relations(ctx.n)
    rows = {name: _row(name, "exhaustive" if campaign.exhaustive else "sampled", 0, 0)
            for name, _ in rels}

    def scan(z, f):
        for name, word in rels:
            wz, wf = apply_auto_batch(ctx, word, z, f)
            bad = (wz != z).any(axis=1) | (wf != f).any(axis=1)
            row = rows[name]
            row["checked"] += len(z)
            if bad.any():
                row["failures"] += int(bad.sum())
                if row["counterexample"] is None:
                    row["counterexample"] = _element_json(ctx, z, f, int(np.argmax(bad)))

    if campaign.exhaustive:
        for start, stop in _lex_ranges(ctx, worker, workers):
            scan(*kernels.lex_chunk(ctx, start, stop))
    else:
        rng = worker_rng(campaign.seed, worker)
        todo = _share(campaign.samples, worker, workers)
        done = 0
        while done < todo:
            k = min(todo - done, SAMPLE_BATCH)
            scan(*kernels.random_batch(ctx, rng, k))
            done += k
    return [rows[name] for name, _ in rels]


def _auto_words(n: int) -> list[tuple[str, AutoWord]]:
    words = [("sigma", sigma_word())]
    if n == 3:
        words.append(("tau", tau_word()))
    words.append(("rho", rho_word()))
    return words


@_handler("automorphism")
def _unit_automorphism(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    """Homomorphism audit for sigma, tau (rank 3), and rho.

    Exhaustive scope checks phi(x g) = phi(x) phi(g) for every element x and
    every defining generator g.  That suffices: if the identity holds for
    all x at each generator, induction on the length of y in phi(x y)
    extends it to all pairs.  Sampled scope draws (x, y) pairs directly.
    """
    ctx = get_ctx(campaign.n, campaign.mode)
    words = _auto_words(ctx.n)
    mode = "exhaustive" if campaign.exhaustive else "sampled"
    rows = {name: _row(f"{name}-homomorphism", mode, 0, 0) for name, _ in words}
    if campaign.exhaustive:
        gens = all_generators(ctx)
        gen_names = [f"{kind}{i}" for kind in ("a", "b") for i in range(1, ctx.n + 1)]
        gbatches = [kernels.from_elements(ctx, [g]) for g in gens]
        wg = {name: [apply_auto_batch(ctx, w, gz, gf) for gz, gf in gbatches]
              for name, w in words}
        for start, stop in _lex_ranges(ctx, worker, workers):
            z, f = kernels.lex_chunk(ctx, start, stop)
            for name, w in words:
                wz, wf = apply_auto_batch(ctx, w, z, f)
                row = rows[name]
                for gi, (gz, gf) in enumerate(gbatches):
                    xg = kernels.mul(ctx, z, f, gz, gf)
                    lz, lf = apply_auto_batch(ctx, w, *xg)
                    rz, rf = kernels.mul(ctx, wz, wf, *wg[name][gi])
                    bad = (lz != rz).any(axis=1) | (lf != rf).any(axis=1)
                    row["checked"] += len(z)
                    if bad.any():
                        row["failures"] += int(bad.sum())
                        if row["counterexample"] is None:
                            i = int(np.argmax(bad))
                            row["counterexample"] = {
                                "auto": name,
                                "generator": gen_names[gi],
                                "x": _element_json(ctx, z, f, i),
                            }
        return [rows[name] for name, _ in words]
    rng = worker_rng(campaign.seed, worker)
    todo = _share(campaign.samples, worker, workers)
    done = 0
    while done < todo:
        k = min(todo - done, SAMPLE_BATCH)
        xz, xf = kernels.random_batch(ctx, rng, k)
        yz, yf = kernels.random_batch(ctx, rng, k)
        pz, pf = kernels.mul(ctx, xz, xf, yz, yf)
        for name, w in words:
            lz, lf = apply_auto_batch(ctx, w, pz, pf)
            rz, rf = kernels.mul(ctx, *apply_auto_batch(ctx, w, xz, xf),
                                 *apply_auto_batch(ctx, w, yz, yf))
            bad = (lz != rz).any(axis=1) | (lf != rf).any(axis=1)
            row = rows[name]
            row["checked"] += k
            if bad.any():
                row["failures"] += int(bad.sum())
                if row["counterexample"] is None:
                    i = int(np.argmax(bad))
                    row["counterexample"] = {"auto": name,
                                             "x": _element_json(ctx, xz, xf, i),
                                             "y": _element_json(ctx, yz, yf, i)}
        done += k
    return [rows[name] for name, _ in words]


def _loop_counter(table, triple) -> dict | None:
    if triple is None:
        return None
    return {"indices": list(triple),
            "codes": [int(table.codes[i]) for i in triple]}


@_handler("moufang")
def _unit_moufang(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    ctx = get_ctx(3, FINITE_Z4)
    table = loops.extract_m_set(ctx, campaign.budget_bits)
    out = []
    if campaign.exhaustive:
        rows = range(worker, table.order, workers)
        for law in loops.MOUFANG_LAWS:
            rep = loops.check_moufang(table, law, "exhaustive", rows=rows)
            out.append(_row(f"moufang-{law}", rep.mode, rep.checked,
                            0 if rep.passed else 1,
                            _loop_counter(table, rep.counterexample)))
    else:
        rng = worker_rng(campaign.seed, worker)
        todo = _share(campaign.samples, worker, workers)
        for law in loops.MOUFANG_LAWS:
            rep = loops.check_moufang(table, law, "sampled", samples=todo, rng=rng)
            out.append(_row(f"moufang-{law}", rep.mode, rep.checked,
                            0 if rep.passed else 1,
                            _loop_counter(table, rep.counterexample)))
    return out


@_handler("variety-E")
def _unit_variety(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    ctx = get_ctx(3, FINITE_Z4)
    table = loops.extract_m_set(ctx, campaign.budget_bits)
    rng = worker_rng(campaign.seed, worker)
    todo = _share(campaign.samples, worker, workers)
    reports = loops.check_variety_E(table, samples=todo, rng=rng)
    reports += loops.prop_expansion_reports(table, samples=todo, rng=rng)
    # exhaustive sub-laws repeat identically in every worker; merge keeps one
    return [_row(rep.law, rep.mode, rep.checked, 0 if rep.passed else 1,
                 _loop_counter(table, rep.counterexample),
                 merge="same" if rep.mode == "exhaustive" else "sum")
            for rep in reports]


def _bits_str(bits: int, d: int) -> str:
    return "".join(str((bits >> i) & 1) for i in range(d))


@_handler("codeloop-sweep")
def _unit_codeloop_sweep(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    from . import codeloops

    ctx = get_ctx(3, FINITE_Z4)
    table = loops.extract_m_set(ctx, campaign.budget_bits)
    lams = codeloops.all_hyperplane_vectors(3)[worker::workers]
    d = codeloops.center_dim(3)
    out = []
    for row in codeloops.sweep_hyperplanes(table, lams):
        ok = (row.consistent and row.moufang and row.code_loop
              and row.order == 16 and row.squares <= 2)
        lam_str = _bits_str(row.lam.as_int(), d)
        out.append(_row(
            lam_str, "exhaustive", 1, 0 if ok else 1,
            None if ok else {"lambda": lam_str},
            lam_index=row.lam.as_int(),
            basis=[_bits_str(r, d) for r in row.basis],
            order=row.order, moufang=row.moufang, squares=row.squares,
            code_loop=row.code_loop, is_group=row.group,
            group_expected=row.group_expected, roundtrip=row.roundtrip,
        ))
    return out


assert set(_HANDLERS) == set(TARGETS)


def run_unit(campaign: Campaign, worker: int, workers: int) -> list[dict]:
    validate(campaign)
    return _HANDLERS[campaign.target](campaign, worker, workers)


def _unit_entry(args) -> list[dict]:
    return run_unit(*args)


def _merge_details(campaign: Campaign, per_worker: list[list[dict]]) -> list[dict]:
    merged: dict[str, dict] = {}
    order: list[str] = []
    for rows in per_worker:
        for row in rows:
            name = row["name"]
            if name not in merged:
                merged[name] = dict(row)
                order.append(name)
                continue
            tgt = merged[name]
            if row.get("_merge") == "same":
                continue
            tgt["checked"] += row["checked"]
            tgt["failures"] += row["failures"]
            if tgt["counterexample"] is None:
                tgt["counterexample"] = row["counterexample"]
    rows = [merged[name] for name in order]
    if campaign.target == "codeloop-sweep":
        rows.sort(key=lambda r: r["lam_index"])
    for row in rows:
        row.pop("_merge", None)
    return rows


def run_campaign(campaign: Campaign) -> CampaignResult:
    validate(campaign)
    t0 = time.perf_counter()
    units = [(campaign, w, campaign.jobs) for w in range(campaign.jobs)]
    if campaign.jobs == 1:
        per_worker = [run_unit(*units[0])]
    else:
        with ProcessPoolExecutor(max_workers=campaign.jobs) as pool:
            per_worker = list(pool.map(_unit_entry, units))
    detail = _merge_details(campaign, per_worker)
    checked = sum(r["checked"] for r in detail)
    failures = sum(r["failures"] for r in detail)
    counter = next((r["counterexample"] for r in detail
                    if r["counterexample"] is not None), None)
    return CampaignResult(campaign, checked, failures, counter, detail,
                          time.perf_counter() - t0)
