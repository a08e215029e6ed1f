"""Moufang loops extracted from the rank-3 group.

The set M = {x^-1 x^sigma : x in G} carries a loop product

    m * n = m^(-rho) n m^(-rho2)

computed in the group, and the sigma-fixed subgroup H = {h : h^sigma = h}
tiles G as the disjoint union of cosets H m^(rho2).  Both facts are checked
exhaustively by the test suite: this module builds the 1024-element loop table,
the 8192-element fixed subgroup, and the Doro star product read off the
coset decomposition, and exposes identity checkers over the finished table.

Loop elements are table indices; the table is dense (1024 x 1024 uint16,
one MiB), which turns the billion-triple identity sweeps into pure integer
gathers.  Index order is ascending canonical code, so index 0 is the
identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as itertools_product
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .core import Element, GroupCtx, generator, get_ctx, multiply, inverse

CHUNK_BITS = 20


def _scan_chunks(ctx: GroupCtx, budget_bits: int):
    total = 1 << ctx.code_bits
    if ctx.code_bits > budget_bits:
        raise ValueError(
            f"scan needs {ctx.code_bits} bits, over the {budget_bits}-bit budget"
        )
    step = 1 << min(CHUNK_BITS, ctx.code_bits)
    for start in range(0, total, step):
        yield kernels.lex_chunk(ctx, start, min(start + step, total))


class LoopTable:
    """A finite loop as a dense index table.

    codes, when present, give the canonical group-element code of each index
    (ascending, so index 0 is the identity).  Synthetic tables for tests may
    omit them.
    """

    def __init__(self, mul: np.ndarray, codes=None, ctx: GroupCtx | None = None,
                 n_gens: Sequence[int] = (), validate: bool = True):
        mul = np.asarray(mul)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1]:
            raise ValueError("mul must be square")
        self.mul = mul
        self.codes = None if codes is None else np.asarray(codes, dtype=np.uint64)
        self.ctx = ctx
        self.n_gens = tuple(n_gens)
        if validate:
            self._validate()
        order = len(mul)
        # row a of lsol solves a*x = b at position b; rsol solves x*a = b
        self.lsol = np.argsort(mul, axis=1).astype(mul.dtype)
        self.rsol = np.argsort(mul, axis=0).astype(mul.dtype)
        self.order = order

    def _validate(self):
        n = len(self.mul)
        want = np.arange(n, dtype=self.mul.dtype)
        if not (np.sort(self.mul, axis=1) == want).all():
            raise ValueError("row of mul is not a permutation")
        if not (np.sort(self.mul, axis=0) == want[:, None]).all():
            raise ValueError("column of mul is not a permutation")
        if not (self.mul[0] == want).all() or not (self.mul[:, 0] == want).all():
            raise ValueError("index 0 is not a two-sided identity")
        if self.codes is not None:
            if len(self.codes) != n:
                raise ValueError("codes length mismatch")
            if (np.diff(self.codes.astype(np.int64)) <= 0).any():
                raise ValueError("codes must be strictly ascending")

    def element(self, index: int) -> Element:
        if self.codes is None or self.ctx is None:
            raise ValueError("table has no underlying group elements")
        z, f = kernels.unpack_batch(self.ctx, self.codes[index : index + 1])
        return kernels.to_elements(self.ctx, z, f)[0]

    def index_of(self, x: Element) -> int:
        code = np.uint64(_pack_one(x))
        pos = int(np.searchsorted(self.codes, code))
        if pos == len(self.codes) or self.codes[pos] != code:
            raise KeyError("element is not in the loop")
        return pos

    def __len__(self) -> int:
        return self.order


@dataclass(frozen=True)
class LoopElem:
    table: LoopTable
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.table.order:
            raise ValueError("index out of range")

    def __mul__(self, other: "LoopElem") -> "LoopElem":
        return loop_mul(self, other)

    def group_element(self) -> Element:
        return self.table.element(self.index)


def _pack_one(x: Element) -> int:
    from .core import pack

    return pack(x)


def _same_table(*elems: LoopElem) -> LoopTable:
    table = elems[0].table
    for e in elems[1:]:
        if e.table is not table:
            raise ValueError("loop elements belong to different tables")
    return table


def loop_mul(m: LoopElem, n: LoopElem) -> LoopElem:
    table = _same_table(m, n)
    return LoopElem(table, int(table.mul[m.index, n.index]))


def loop_inv(m: LoopElem) -> LoopElem:
    # the unique solution of m * x = identity
    return LoopElem(m.table, int(m.table.lsol[m.index, 0]))


def loop_commutator(a: LoopElem, b: LoopElem) -> LoopElem:
    """The unique c with ab = (ba)c."""
    table = _same_table(a, b)
    ab = table.mul[a.index, b.index]
    ba = table.mul[b.index, a.index]
    return LoopElem(table, int(table.lsol[ba, ab]))


def loop_associator(a: LoopElem, b: LoopElem, c: LoopElem) -> LoopElem:
    """The unique d with (ab)c = (a(bc))d."""
    table = _same_table(a, b, c)
    lhs = table.mul[table.mul[a.index, b.index], c.index]
    rhs = table.mul[a.index, table.mul[b.index, c.index]]
    return LoopElem(table, int(table.lsol[rhs, lhs]))


# --- construction ------------------------------------------------------------


def extract_m_set(ctx: GroupCtx, budget_bits: int = 26) -> LoopTable:
    """Scan all of G for values of x^-1 x^sigma and build the loop table."""
    if not ctx.finite or ctx.n != 3:
        raise ValueError("loop extraction runs on the finite rank-3 group")
    seen = np.zeros(1 << ctx.code_bits, dtype=bool)
    for z, f in _scan_chunks(ctx, budget_bits):
        iz, ifp = kernels.inv(ctx, z, f)
        sz, sf = kernels.sigma3(ctx, z, f)
        cz, cf = kernels.mul(ctx, iz, ifp, sz, sf)
        seen[kernels.pack_batch(ctx, cz, cf)] = True
    codes = np.nonzero(seen)[0].astype(np.uint64)
    return _table_from_codes(ctx, codes)


def _table_from_codes(ctx: GroupCtx, codes: np.ndarray) -> LoopTable:
    mz, mf = kernels.unpack_batch(ctx, codes)
    # left factor m^(-rho), right factor m^(-rho2), built once for all rows
    niz, nif = kernels.inv(ctx, mz, mf)
    az, af = kernels.rho3(ctx, niz, nif)
    bz, bf = kernels.rho3(ctx, az, af)
    count = len(codes)
    mul = np.empty((count, count), dtype=np.uint16)
    for i in range(count):
        pz, pf = kernels.mul(ctx, az[i : i + 1], af[i : i + 1], mz, mf)
        pz, pf = kernels.mul(ctx, pz, pf, bz[i : i + 1], bf[i : i + 1])
        prod = kernels.pack_batch(ctx, pz, pf)
        idx = np.searchsorted(codes, prod)
        if (idx >= count).any() or (codes[np.minimum(idx, count - 1)] != prod).any():
            raise ValueError(f"loop product escaped the extracted set at row {i}")
        mul[i] = idx
    gens = []
    for i in (1, 2, 3):
        xi = multiply(inverse(generator(ctx, "a", i)), generator(ctx, "b", i))
        gens.append(int(np.searchsorted(codes, np.uint64(_pack_one(xi)))))
    return LoopTable(mul, codes=codes, ctx=ctx, n_gens=gens)


@dataclass
class FixedSubgroupReport:
    count: int
    codes: np.ndarray
    generator_names: tuple[str, ...]
    generators_fixed: tuple[bool, ...]
    closure_size: int
    closure_matches_scan: bool


def sigma_fixed_subgroup(ctx: GroupCtx, budget_bits: int = 26) -> FixedSubgroupReport:
    """Count sigma fixed points and audit the printed generating set.

    The generating set is {a_i b_i, (a_i b_i)^2, p_ij, u_ij v_ij, tz} with
    tz the product of the two triple symbols; the closure they generate is
    recomputed and compared with the exhaustive scan.
    """
    if not ctx.finite or ctx.n != 3:
        raise ValueError("fixed-subgroup scan runs on the finite rank-3 group")
    hits = []
    for z, f in _scan_chunks(ctx, budget_bits):
        sz, sf = kernels.sigma3(ctx, z, f)
        fixed = (sz == z).all(axis=1) & (sf == f).all(axis=1)
        hits.append(kernels.pack_batch(ctx, z[fixed], f[fixed]))
    codes = np.sort(np.concatenate(hits))
    gens: list[tuple[str, Element]] = []
    for i in (1, 2, 3):
        ab = multiply(generator(ctx, "a", i), generator(ctx, "b", i))
        gens.append((f"a{i}b{i}", ab))
        gens.append((f"(a{i}b{i})^2", multiply(ab, ab)))
    for (i, j) in ctx.pairs:
        gens.append((f"p{i}{j}", generator(ctx, "p", i, j)))
        gens.append(
            (f"u{i}{j}v{i}{j}",
             multiply(generator(ctx, "u", i, j), generator(ctx, "v", i, j)))
        )
    gens.append(
        ("tz", multiply(generator(ctx, "t", 1, 2, 3), generator(ctx, "z", 1, 2, 3)))
    )
    from .autos import apply_sigma

    fixed_flags = tuple(apply_sigma(g) == g for _, g in gens)
    closure = _group_closure(ctx, [g for _, g in gens])
    return FixedSubgroupReport(
        count=len(codes),
        codes=codes,
        generator_names=tuple(name for name, _ in gens),
        generators_fixed=fixed_flags,
        closure_size=len(closure),
        closure_matches_scan=(len(closure) == len(codes))
        and bool((closure == codes).all()),
    )


def _group_closure(ctx: GroupCtx, gens: list[Element]) -> np.ndarray:
    """Subgroup closure by repeated right multiplication, as sorted codes."""
    gz, gf = kernels.from_elements(ctx, gens)
    codes = np.unique(
        np.concatenate([np.zeros(1, np.uint64), kernels.pack_batch(ctx, gz, gf)])
    )
    while True:
        z, f = kernels.unpack_batch(ctx, codes)
        new = [codes]
        for i in range(len(gens)):
            pz, pf = kernels.mul(ctx, z, f, gz[i : i + 1], gf[i : i + 1])
            new.append(kernels.pack_batch(ctx, pz, pf))
        merged = np.unique(np.concatenate(new))
        if len(merged) == len(codes):
            return merged
        codes = merged


# --- the Doro coset decomposition -------------------------------------------

IDENTIFICATIONS = ("rho2", "rho", "id")


def translate_codes(table: LoopTable, identification: str = "rho2") -> np.ndarray:
    """Codes of the identified copy of M, in loop-index order (not sorted)."""
    ctx = table.ctx
    z, f = kernels.unpack_batch(ctx, table.codes)
    if identification == "rho2":
        z, f = kernels.rho3(ctx, *kernels.rho3(ctx, z, f))
    elif identification == "rho":
        z, f = kernels.rho3(ctx, z, f)
    elif identification != "id":
        raise ValueError(f"identification must be one of {IDENTIFICATIONS}")
    return kernels.pack_batch(ctx, z, f)


class DoroDecomposition:
    """The tiling G = union of cosets H (m translated), plus its star product.

    zindex maps every group code to the loop index whose coset contains it;
    construction fails unless the 2^23 codes are covered exactly once.
    """

    def __init__(self, table: LoopTable, h_codes: np.ndarray,
                 identification: str = "rho2"):
        ctx = table.ctx
        self.table = table
        self.identification = identification
        self.m_codes = translate_codes(table, identification)
        hz, hf = kernels.unpack_batch(ctx, h_codes)
        total = 1 << ctx.code_bits
        if len(h_codes) * len(table.codes) != total:
            raise ValueError("|H| * |M| does not match |G|; cannot tile")
        zindex = np.full(total, 0xFFFF, dtype=np.uint16)
        mz, mf = kernels.unpack_batch(ctx, self.m_codes)
        for i in range(table.order):
            pz, pf = kernels.mul(ctx, hz, hf, mz[i : i + 1], mf[i : i + 1])
            zindex[kernels.pack_batch(ctx, pz, pf)] = i
        missed = int((zindex == 0xFFFF).sum())
        if missed:
            raise ValueError(
                f"cosets H*m ({identification}) miss {missed} group elements; "
                "the decomposition does not tile G"
            )
        self.zindex = zindex

    def star(self, x: int, y: int) -> int:
        """x * y on the translated set, read off the coset factorization."""
        ctx = self.table.ctx
        xz, xf = kernels.unpack_batch(ctx, self.m_codes[x : x + 1])
        yz, yf = kernels.unpack_batch(ctx, self.m_codes[y : y + 1])
        pz, pf = kernels.mul(ctx, xz, xf, yz, yf)
        return int(self.zindex[kernels.pack_batch(ctx, pz, pf)[0]])

    def star_table(self) -> np.ndarray:
        """All |M|^2 star products as an index table."""
        ctx = self.table.ctx
        mz, mf = kernels.unpack_batch(ctx, self.m_codes)
        out = np.empty_like(self.table.mul)
        for i in range(self.table.order):
            pz, pf = kernels.mul(ctx, mz[i : i + 1], mf[i : i + 1], mz, mf)
            out[i] = self.zindex[kernels.pack_batch(ctx, pz, pf)]
        return out


def doro_star(x: LoopElem, y: LoopElem, decomposition: DoroDecomposition) -> LoopElem:
    table = _same_table(x, y)
    if decomposition.table is not table:
        raise ValueError("decomposition belongs to a different table")
    return LoopElem(table, decomposition.star(x.index, y.index))


# --- identity checking -------------------------------------------------------

MOUFANG_LAWS = ("left", "right", "middle")


@dataclass
class IdentityReport:
    law: str
    mode: str
    checked: int
    counterexample: tuple[int, ...] | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def describe(self) -> str:
        status = "pass" if self.passed else f"FAIL at {self.counterexample}"
        return f"{self.law} [{self.mode}, {self.checked} checked]: {status}"


def _moufang_residual(mul, law: str, x, y, z):
    """Both sides of a Moufang law for index vectors x, y, z."""
    if law == "left":
        lhs = mul[mul[mul[x, y], x], z]
        rhs = mul[x, mul[y, mul[x, z]]]
    elif law == "right":
        lhs = mul[mul[mul[x, y], z], y]
        rhs = mul[x, mul[y, mul[z, y]]]
    elif law == "middle":
        lhs = mul[mul[x, y], mul[z, x]]
        rhs = mul[mul[x, mul[y, z]], x]
    else:
        raise ValueError(f"law must be one of {MOUFANG_LAWS}")
    return lhs, rhs


def _moufang_exhaustive(mul, law: str, xs=None):
    """First failing (x, y, z) or None, with one x-slice per iteration.

    Each slice is phrased as whole-table gathers over the (y, z) plane, so
    the order^3 sweep costs a few order^2 gathers per x.  Passing xs limits
    the sweep to those x rows (workers split the outer loop this way).
    """
    order = len(mul)
    ys = np.arange(order)
    for x in (range(order) if xs is None else xs):
        if law == "left":
            lhs = mul[mul[mul[x], x]]
            rhs = mul[x][mul[:, mul[x]]]
        elif law == "right":
            lhs = mul[mul[mul[x]], ys[:, None]]
            rhs = mul[x][mul[ys[:, None], mul.T]]
        elif law == "middle":
            lhs = mul[np.ix_(mul[x], mul[:, x])]
            rhs = mul[:, x][mul[x][mul]]
        else:
            raise ValueError(f"law must be one of {MOUFANG_LAWS}")
        neq = lhs != rhs
        if neq.any():
            y, z = np.argwhere(neq)[0]
            return (x, int(y), int(z))
    return None


def check_moufang(table: LoopTable, which: str, mode: str = "sampled",
                  samples: int = 10_000_000, seed: int = 0,
                  rows=None, rng=None) -> IdentityReport:
    """Check one Moufang identity, exhaustively or on seeded random triples."""
    mul = table.mul
    order = table.order
    if mode == "exhaustive":
        counter = _moufang_exhaustive(mul, which, rows)
        count = order**3 if rows is None else len(rows) * order**2
        return IdentityReport(which, mode, count, counter)
    if mode != "sampled":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    if samples <= 0:
        raise ValueError("sample count must be positive")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(seed))
    done = 0
    while done < samples:
        batch = min(samples - done, 1 << 22)
        x, y, z = rng.integers(0, order, size=(3, batch), dtype=np.uint16)
        lhs, rhs = _moufang_residual(mul, which, x, y, z)
        if (lhs != rhs).any():
            i = int(np.nonzero(lhs != rhs)[0][0])
            return IdentityReport(which, mode, done + batch,
                                  (int(x[i]), int(y[i]), int(z[i])))
        done += batch
    return IdentityReport(which, "sampled", done)


def commutator_table(table: LoopTable) -> np.ndarray:
    """comm[x, y] solves (yx) c = xy."""
    mul = table.mul
    return table.lsol[mul.T, mul]


def _assoc(table: LoopTable, a, b, c):
    mul = table.mul
    return table.lsol[mul[a, mul[b, c]], mul[mul[a, b], c]]


VARIETY_LAWS = (
    "x^4 = 1",
    "[x,y]^2 = 1",
    "(x,y,z)^2 = 1",
    "[x^2,y] = 1",
    "[[x,y],t] = 1",
    "[(x,y,z),t] = 1",
    "(x^2,y,z) = 1",
    "([x,y],z,t) = 1",
    "((x,y,z),t,s) = 1",
)


def check_variety_E(table: LoopTable, samples: int = 10_000_000,
                    seed: int = 0, exhaustive: bool = False,
                    rng=None) -> list[IdentityReport]:
    """All nine defining laws of the ambient variety.

    Unary and binary laws are exhaustive; laws in three or more variables
    run on seeded samples unless exhaustive is set (order^5 work at the
    top arity, so exhaustive is meant for small quotient tables).
    """
    mul = table.mul
    order = table.order
    idx = np.arange(order)
    sq = mul[idx, idx]
    comm = commutator_table(table)

    def assoc_sq(x, y, z):
        a = _assoc(table, x, y, z)
        return mul[a, a]

    def comm_sq(x, y):
        c = comm[x, y]
        return mul[c, c]

    laws = [
        ("x^4 = 1", 1, lambda x: mul[sq[x], sq[x]]),
        ("[x,y]^2 = 1", 2, comm_sq),
        ("(x,y,z)^2 = 1", 3, assoc_sq),
        ("[x^2,y] = 1", 2, lambda x, y: comm[sq[x], y]),
        ("[[x,y],t] = 1", 3, lambda x, y, t: comm[comm[x, y], t]),
        ("[(x,y,z),t] = 1", 4,
         lambda x, y, z, t: comm[_assoc(table, x, y, z), t]),
        ("(x^2,y,z) = 1", 3, lambda x, y, z: _assoc(table, sq[x], y, z)),
        ("([x,y],z,t) = 1", 4,
         lambda x, y, z, t: _assoc(table, comm[x, y], z, t)),
        ("((x,y,z),t,s) = 1", 5,
         lambda x, y, z, t, s: _assoc(table, _assoc(table, x, y, z), t, s)),
    ]
    assert tuple(name for name, _, _ in laws) == VARIETY_LAWS
    if rng is None:
        rng = np.random.Generator(np.random.Philox(seed))
    reports = []
    for name, k, fn in laws:
        if k == 1:
            res = fn(idx)
            bad = np.nonzero(res != 0)[0]
            counter = (int(bad[0]),) if len(bad) else None
            reports.append(IdentityReport(name, "exhaustive", order, counter))
        elif k == 2 or (exhaustive and k > 2):
            gx, gy = np.meshgrid(idx, idx, indexing="ij")
            counter = None
            checked = 0
            if k == 2:
                outer = [()]
            else:
                outer = itertools_product(idx, repeat=k - 2)
            for rest in outer:
                res = fn(gx, gy, *(int(v) for v in rest))
                checked += order * order
                if (res != 0).any():
                    x, y = np.argwhere(res != 0)[0]
                    counter = (int(x), int(y)) + tuple(int(v) for v in rest)
                    break
            reports.append(IdentityReport(name, "exhaustive", checked, counter))
        else:
            done, counter = 0, None
            while done < samples and counter is None:
                batch = min(samples - done, 1 << 22)
                args = rng.integers(0, order, size=(k, batch), dtype=np.uint16)
                res = fn(*args)
                if (res != 0).any():
                    i = int(np.nonzero(res != 0)[0][0])
                    counter = tuple(int(a[i]) for a in args)
                done += batch
            reports.append(IdentityReport(name, "sampled", done, counter))
    return reports


def prop_expansion_reports(table: LoopTable, seed: int = 0,
                           samples: int = 10_000_000,
                           exhaustive_pairs: bool = True,
                           rng=None) -> list[IdentityReport]:
    """The three expansion identities:

        (xy)^2 = x^2 y^2 [x,y]           (exhaustive over pairs)
        [xy,z] = [x,z][y,z](x,y,z)       (sampled triples)
        (wx,y,z) = (w,y,z)(x,y,z)        (sampled quadruples)
    """
    mul = table.mul
    order = table.order
    idx = np.arange(order)
    sq = mul[idx, idx]
    comm = commutator_table(table)
    reports = []
    # (xy)^2 = x^2 y^2 [x,y]; all factors on the right are central in the
    # variety, so one fixed bracketing suffices
    gx, gy = np.meshgrid(idx, idx, indexing="ij")
    lhs = mul[mul[gx, gy], mul[gx, gy]]
    rhs = mul[mul[sq[gx], sq[gy]], comm[gx, gy]]
    bad = np.argwhere(lhs != rhs)
    reports.append(
        IdentityReport("(xy)^2 = x^2y^2[x,y]", "exhaustive", order * order,
                       tuple(int(v) for v in bad[0]) if len(bad) else None)
    )
    if rng is None:
        rng = np.random.Generator(np.random.Philox(seed))

    def sampled(law, k, fn):
        done, counter = 0, None
        while done < samples and counter is None:
            batch = min(samples - done, 1 << 22)
            args = rng.integers(0, order, size=(k, batch), dtype=np.uint16)
            lhs, rhs = fn(*args)
            if (lhs != rhs).any():
                i = int(np.nonzero(lhs != rhs)[0][0])
                counter = tuple(int(a[i]) for a in args)
            done += batch
        reports.append(IdentityReport(law, "sampled", done, counter))

    sampled("[xy,z] = [x,z][y,z](x,y,z)", 3,
            lambda x, y, z: (comm[mul[x, y], z],
                             mul[mul[comm[x, z], comm[y, z]],
                                 _assoc(table, x, y, z)]))
    sampled("(wx,y,z) = (w,y,z)(x,y,z)", 4,
            lambda w, x, y, z: (_assoc(table, mul[w, x], y, z),
                                mul[_assoc(table, w, y, z),
                                    _assoc(table, x, y, z)]))
    return reports


# --- substructures -----------------------------------------------------------


def nucleus(table: LoopTable) -> np.ndarray:
    """Indices associating with everything in all three slots."""
    mul = table.mul
    out = []
    for a in range(table.order):
        row = mul[a]
        col = mul[:, a]
        # a(xy) = (ax)y, (xa)y = x(ay), (xy)a = x(ya), each over all (x, y)
        if (row[mul] == mul[row]).all() \
                and (mul[col] == mul[:, row]).all() \
                and (col[mul] == mul[:, col]).all():
            out.append(a)
    return np.array(out, dtype=np.int64)


def center(table: LoopTable) -> np.ndarray:
    """Indices in the nucleus that also commute with everything."""
    keep = [a for a in nucleus(table) if (table.mul[a] == table.mul[:, a]).all()]
    return np.array(keep, dtype=np.int64)


def squares_set(table: LoopTable) -> np.ndarray:
    idx = np.arange(table.order)
    return np.unique(table.mul[idx, idx])


def generated_subloop(table: LoopTable, gens: Iterable[int]) -> np.ndarray:
    """Closure of the given indices under product and inverse."""
    current = np.unique(np.array([0, *gens], dtype=np.int64))
    while True:
        prods = table.mul[np.ix_(current, current)].ravel()
        invs = table.lsol[current, 0]
        merged = np.unique(np.concatenate([current, prods, invs]))
        if len(merged) == len(current):
            return merged
        current = merged
