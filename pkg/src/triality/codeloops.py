"""Code loops as codimension-1 central quotients of the free loop.

The center of the free rank-n loop has the designated basis

    x_1^2 .. x_n^2,  [x_1,x_2] .. [x_(n-1),x_n],  (x_1,x_2,x_3) ..

of dimension d = n + C(n,2) + C(n,3) (7 at n = 3, where the realization is
the M3 table itself).  Quotienting by a codimension-1 subspace T of the
center leaves a loop of order 2^(2n + C(n,2) + C(n,3)) / 2^(d-1); at n = 3
that is 16.  Such quotients are exactly the code loops this module studies:
Moufang, with at most one nonidentity square value.

Hyperplanes are named by characteristic vectors: a nonzero functional
lambda on the center (coordinates over the basis above) has kernel T(lambda),
and the quotient's generator squares, commutators, and associators hit the
surviving central involution s exactly where lambda has a 1 bit.  The basis
is declared self-dual for this pairing; the convention is fixed here and
round-trip tested.

The quotient is associative exactly when T contains the associator block,
i.e. when lambda's associator bits vanish; the 127-hyperplane sweep at
n = 3 checks that partition exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .freeloop import FreeLoopRealization
from .loops import (LoopTable, LoopElem, check_moufang, commutator_table,
                    generated_subloop, loop_associator, loop_commutator,
                    loop_mul, squares_set, _assoc)


def center_dim(n: int) -> int:
    return n + comb(n, 2) + comb(n, 3)


def basis_labels(n: int) -> tuple[str, ...]:
    labels = [f"x{i}^2" for i in range(1, n + 1)]
    labels += [f"[x{i},x{j}]" for i, j in itertools.combinations(range(1, n + 1), 2)]
    labels += [f"(x{i},x{j},x{k})"
               for i, j, k in itertools.combinations(range(1, n + 1), 3)]
    return tuple(labels)


def associator_block(n: int) -> range:
    """Positions of the associator coordinates within the basis order."""
    start = n + comb(n, 2)
    return range(start, start + comb(n, 3))


@dataclass(frozen=True)
class CenterVector:
    """F2 coordinates over the designated center basis."""

    n: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != center_dim(self.n):
            raise ValueError(
                f"rank {self.n} center has dimension {center_dim(self.n)}, "
                f"got {len(self.coords)} coordinates"
            )
        if any(c not in (0, 1) for c in self.coords):
            raise ValueError("coordinates must be 0/1")

    def as_int(self) -> int:
        bits = 0
        for i, c in enumerate(self.coords):
            bits |= c << i
        return bits

    @classmethod
    def from_int(cls, n: int, bits: int) -> "CenterVector":
        d = center_dim(n)
        return cls(n, tuple((bits >> i) & 1 for i in range(d)))


@dataclass(frozen=True)
class CharacteristicVector:
    """The same coordinates, split into generator/pair/triple blocks."""

    n: int
    gen_bits: tuple[int, ...]
    pair_bits: tuple[int, ...]
    triple_bits: tuple[int, ...]

    def __post_init__(self):
        if (len(self.gen_bits), len(self.pair_bits), len(self.triple_bits)) != (
            self.n, comb(self.n, 2), comb(self.n, 3)
        ):
            raise ValueError("block lengths do not match the rank")

    def bits(self) -> tuple[int, ...]:
        return self.gen_bits + self.pair_bits + self.triple_bits

    def as_int(self) -> int:
        out = 0
        for i, b in enumerate(self.bits()):
            out |= b << i
        return out

    @classmethod
    def from_bits(cls, n: int, bits) -> "CharacteristicVector":
        bits = tuple(int(b) for b in bits)
        if len(bits) != center_dim(n):
            raise ValueError(f"need {center_dim(n)} bits for rank {n}")
        c2 = comb(n, 2)
        return cls(n, bits[:n], bits[n : n + c2], bits[n + c2 :])

    def is_zero(self) -> bool:
        return not any(self.bits())


class CenterSubspace:
    """A subspace of the center in row-reduced form."""

    def __init__(self, n: int, rows):
        self.n = n
        self.dim_ambient = center_dim(n)
        reduced = _row_reduce([r.as_int() if isinstance(r, CenterVector) else int(r)
                               for r in rows])
        self.rows = tuple(reduced)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.dim_ambient - self.rank

    def contains(self, vec: CenterVector | int) -> bool:
        bits = vec.as_int() if isinstance(vec, CenterVector) else int(vec)
        for row in self.rows:
            bits = min(bits, bits ^ row)
        return bits == 0

    def basis_vectors(self) -> list[CenterVector]:
        return [CenterVector.from_int(self.n, r) for r in self.rows]


def _row_reduce(rows: list[int]) -> list[int]:
    # xor basis with distinct leading bits, kept descending; min(r, r^b)
    # clears b's leading bit from r exactly when it is set
    basis: list[int] = []
    for row in rows:
        cur = int(row)
        for b in basis:
            cur = min(cur, cur ^ b)
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
    for i, b in enumerate(basis):
        pivot = 1 << (b.bit_length() - 1)
        for j in range(len(basis)):
            if j != i and basis[j] & pivot:
                basis[j] ^= b
    return sorted(basis, reverse=True)


def hyperplane(lam: CharacteristicVector) -> CenterSubspace:
    """The kernel of the functional lambda under the self-dual pairing."""
    if lam.is_zero():
        raise ValueError("the zero vector defines no hyperplane")
    bits = lam.as_int()
    pivot = (bits & -bits).bit_length() - 1
    d = center_dim(lam.n)
    rows = []
    for k in range(d):
        if k == pivot:
            continue
        row = 1 << k
        if (bits >> k) & 1:
            row |= 1 << pivot
        rows.append(row)
    sub = CenterSubspace(lam.n, rows)
    assert sub.codim == 1
    return sub


def normal_vector(sub: CenterSubspace) -> CharacteristicVector:
    """The unique nonzero functional vanishing on a codimension-1 subspace."""
    if sub.codim != 1:
        raise ValueError("subspace is not codimension 1")
    d = sub.dim_ambient
    for bits in range(1, 1 << d):
        if all(bin(bits & row).count("1") % 2 == 0 for row in sub.rows):
            return CharacteristicVector.from_bits(
                sub.n, [(bits >> i) & 1 for i in range(d)]
            )
    raise AssertionError("unreachable: codim-1 subspace has a normal vector")


# --- center basis of a realized free loop ------------------------------------


@dataclass
class CenterBasisReport:
    n: int
    dim: int
    labels: tuple[str, ...]
    indices: tuple[int, ...]  # table indices (n = 3) of the basis elements
    independent: bool
    span_size: int
    span_equals_center: bool


def center_basis(table: LoopTable) -> CenterBasisReport:
    """Designated center basis of the rank-3 loop, checked two ways.

    The span of the seven designated elements is grown by doubling
    (witnessing independence) and compared against the exhaustive center
    scan; disagreement is reported, not repaired.
    """
    from .loops import center as center_scan

    g = [LoopElem(table, i) for i in table.n_gens]
    elems = [loop_mul(x, x) for x in g]
    elems += [loop_commutator(a, b) for a, b in itertools.combinations(g, 2)]
    elems += [loop_associator(*tr) for tr in itertools.combinations(g, 3)]
    indices = tuple(e.index for e in elems)
    span = {0}
    independent = True
    for e in elems:
        new = span | {int(table.mul[s, e.index]) for s in span}
        if len(new) != 2 * len(span):
            independent = False
        span = new
    scan = set(int(v) for v in center_scan(table))
    return CenterBasisReport(
        n=3,
        dim=len(indices),
        labels=basis_labels(3),
        indices=indices,
        independent=independent,
        span_size=len(span),
        span_equals_center=(span == scan),
    )


def center_basis_free(fl: FreeLoopRealization) -> CenterBasisReport:
    """Center basis report for a tuple-realized free loop (n = 4 path)."""
    from .freeloop import center_candidates

    cand = center_candidates(fl)
    span_ok = bool(np.isin(cand, fl.span_codes).all()) and len(cand) == len(fl.span_codes)
    return CenterBasisReport(
        n=fl.n,
        dim=fl.center_dim,
        labels=fl.central_names,
        indices=tuple(int(fl.row_of_code(int(c))) for c in fl.encode(fl.central_rows)),
        independent=True,  # span growth already doubled at every step in build()
        span_size=len(fl.span_codes),
        span_equals_center=span_ok,
    )


# --- quotients ---------------------------------------------------------------


@dataclass
class CodeLoop:
    base: LoopTable
    subspace: CenterSubspace
    coset_of: np.ndarray  # base index -> quotient index
    reps: np.ndarray      # quotient index -> base index, ascending codes
    table: LoopTable      # dense quotient table

    @property
    def order(self) -> int:
        return self.table.order

    def gen_images(self) -> tuple[int, ...]:
        return tuple(int(self.coset_of[i]) for i in self.base.n_gens)


def quotient(table: LoopTable, sub: CenterSubspace, full_check: bool = True,
             basis: CenterBasisReport | None = None) -> CodeLoop:
    """The coset loop of a codimension-1 central subspace (rank-3 path).

    basis, when given, must be the center_basis report for this table;
    passing it avoids rescanning the center on every quotient in a sweep.
    """
    if sub.codim != 1:
        raise ValueError("quotient requires a codimension-1 subspace")
    report = basis if basis is not None else center_basis(table)
    if not (report.independent and report.span_equals_center):
        raise ValueError("center basis failed verification; cannot quotient")
    # materialize T: product over each basis row's set bits
    t_indices = {0}
    for row in sub.rows:
        elem = 0
        for k in range(report.dim):
            if (row >> k) & 1:
                elem = int(table.mul[elem, report.indices[k]])
        new = t_indices | {int(table.mul[s, elem]) for s in t_indices}
        if len(new) != 2 * len(t_indices):
            raise ValueError("subspace rows are not independent over the basis")
        t_indices = new
    t_arr = np.array(sorted(t_indices), dtype=np.int64)
    # coset label: least member index (== least canonical code)
    rep_of = table.mul[:, t_arr].min(axis=1)
    reps = np.unique(rep_of)
    coset_of = np.searchsorted(reps, rep_of).astype(np.uint16)
    qmul = coset_of[table.mul[np.ix_(reps, reps)]]
    if full_check:
        lhs = coset_of[table.mul]
        rhs = qmul[coset_of][:, coset_of]
        if (lhs != rhs).any():
            raise ValueError("quotient multiplication is not well defined")
    codes = None if table.codes is None else table.codes[reps]
    qtable = LoopTable(qmul, codes=codes, ctx=table.ctx,
                       n_gens=tuple(int(coset_of[i]) for i in table.n_gens))
    return CodeLoop(base=table, subspace=sub, coset_of=coset_of,
                    reps=reps, table=qtable)


def is_code_loop(table: LoopTable, samples: int = 1_000_000, seed: int = 0) -> bool:
    """Moufang with at most two square values."""
    if len(squares_set(table)) > 2:
        return False
    mode = "exhaustive" if table.order <= 64 else "sampled"
    return all(
        check_moufang(table, law, mode=mode, samples=samples, seed=seed).passed
        for law in ("left", "right", "middle")
    )


def is_associative(table: LoopTable) -> bool:
    mul = table.mul
    for a in range(table.order):
        if (mul[mul[a]] != mul[a][mul]).any():
            return False
    return True


def characteristic_vector(loop: CodeLoop) -> CharacteristicVector:
    """Read lambda back off a quotient through its generator images."""
    return characteristic_vector_table(loop.table, loop.gen_images(),
                                       loop.subspace.n)


def characteristic_vector_table(q: LoopTable, gens, n: int) -> CharacteristicVector:
    """Characteristic vector of a loop table with marked generators.

    Requires at most one nonidentity value among all squares, commutators,
    and associators (the code-loop uniqueness property); raises if that
    fails or if the marked generators do not generate.
    """
    gens = tuple(gens)
    if len(gens) != n:
        raise ValueError(f"need {n} generator indices, got {len(gens)}")
    if len(generated_subloop(q, gens)) != q.order:
        raise ValueError("generator images do not generate the quotient")
    idx = np.arange(q.order)
    comm = commutator_table(q)
    sq = q.mul[idx, idx]
    assoc_vals = set()
    for a in range(q.order):
        assoc_vals |= set(np.unique(_assoc(q, a, idx[:, None], idx[None, :])).tolist())
    nonidentity = (set(np.unique(sq).tolist()) | set(np.unique(comm).tolist())
                   | assoc_vals) - {0}
    if len(nonidentity) > 1:
        raise ValueError("multiple nonidentity square/commutator/associator values")
    s = nonidentity.pop() if nonidentity else None
    ge = [LoopElem(q, i) for i in gens]
    gen_bits = tuple(int(s is not None and q.mul[g.index, g.index] == s) for g in ge)
    pair_bits = tuple(
        int(s is not None and loop_commutator(a, b).index == s)
        for a, b in itertools.combinations(ge, 2)
    )
    triple_bits = tuple(
        int(s is not None and loop_associator(a, b, c).index == s)
        for a, b, c in itertools.combinations(ge, 3)
    )
    return CharacteristicVector(n, gen_bits, pair_bits, triple_bits)


def quotient_from_charvec(table: LoopTable, lam: CharacteristicVector,
                          full_check: bool = True,
                          basis: CenterBasisReport | None = None,
                          ) -> tuple[CodeLoop, np.ndarray]:
    """The canonical quotient named by a characteristic vector.

    Returns the code loop and the surjection as an index map from the base
    loop onto the quotient.
    """
    loop = quotient(table, hyperplane(lam), full_check=full_check, basis=basis)
    return loop, loop.coset_of


@dataclass
class SweepRow:
    lam: CharacteristicVector
    basis: tuple[int, ...]  # row-reduced subspace basis, ints over the center basis
    order: int
    moufang: bool
    squares: int
    code_loop: bool
    group: bool
    group_expected: bool
    roundtrip: bool

    @property
    def consistent(self) -> bool:
        return (self.group == self.group_expected) and self.roundtrip


def all_hyperplane_vectors(n: int = 3) -> list[CharacteristicVector]:
    d = center_dim(n)
    return [CharacteristicVector.from_bits(n, [(bits >> i) & 1 for i in range(d)])
            for bits in range(1, 1 << d)]


def sweep_hyperplanes(table: LoopTable, lams=None) -> list[SweepRow]:
    """Codimension-1 quotients at rank 3, with the group partition.

    lams defaults to all 127 nonzero characteristic vectors; workers can
    pass a slice to split the sweep.
    """
    rows = []
    basis = center_basis(table)
    for lam in (all_hyperplane_vectors(3) if lams is None else lams):
        sub = hyperplane(lam)
        loop = quotient(table, sub, basis=basis)
        q = loop.table
        moufang = all(
            check_moufang(q, law, mode="exhaustive").passed
            for law in ("left", "right", "middle")
        )
        squares = len(squares_set(q))
        group = is_associative(q)
        group_expected = not any(lam.triple_bits)
        try:
            roundtrip = characteristic_vector(loop) == lam
        except ValueError:
            roundtrip = False
        rows.append(SweepRow(lam=lam, basis=sub.rows, order=q.order,
                             moufang=moufang, squares=squares,
                             code_loop=is_code_loop(q),
                             group=group, group_expected=group_expected,
                             roundtrip=roundtrip))
    return rows


# --- the rank-4 quotient route ----------------------------------------------


def quotient_free(fl: FreeLoopRealization, lam: CharacteristicVector,
                  spot_samples: int = 100_000, seed: int = 0) -> LoopTable:
    """Codimension-1 quotient of a tuple-realized free loop.

    Uses the unique factorization g_eps * z established by the closure
    build: the coset of g_eps z under T(lambda) is (eps, <lambda, z>), and
    products reduce to the eps-cocycle.  Well-definedness is spot-checked
    against the realization on seeded random pairs.
    """
    if lam.n != fl.n:
        raise ValueError("characteristic vector rank mismatch")
    if lam.is_zero():
        raise ValueError("the zero vector defines no hyperplane")
    lam_bits = lam.as_int()

    def pair(coords):
        return _popcount_parity(np.uint64(lam_bits) & np.asarray(coords, dtype=np.uint64))

    eps_count = 1 << fl.n
    order = eps_count * 2
    qmul = np.empty((order, order), dtype=np.uint16)
    # label = eps * 2 + parity; relabel below so index 0 is the identity coset
    for e in range(eps_count):
        for b in (0, 1):
            for dd in range(eps_count):
                for w in (0, 1):
                    par = b ^ w ^ int(pair(fl.cocycle_coords[e, dd]))
                    qmul[e * 2 + b, dd * 2 + w] = (e ^ dd) * 2 + par
    # coset representatives: least closure code per label
    labels = fl.eps_of.astype(np.int64) * 2 + pair(fl.span_coords[fl.spanpos_of])
    rep_codes = np.full(order, np.iinfo(np.uint64).max, dtype=np.uint64)
    np.minimum.at(rep_codes, labels, fl.codes)
    new_of_old = np.argsort(np.argsort(rep_codes)).astype(np.uint16)
    remapped = new_of_old[qmul[np.ix_(np.argsort(rep_codes), np.argsort(rep_codes))]]
    # after remapping, row/col 0 belong to the coset containing the identity
    qtable = LoopTable(remapped, n_gens=tuple(
        int(new_of_old[(1 << i) * 2 + 0]) for i in range(fl.n)
    ))
    rng = np.random.Generator(np.random.Philox(seed))
    i = rng.integers(0, fl.order, size=spot_samples)
    j = rng.integers(0, fl.order, size=spot_samples)
    prod = fl.encode(fl.tmul(fl.rows[i], fl.rows[j]))
    pos = np.searchsorted(fl.codes, prod)
    got = new_of_old[labels[pos]]
    want = remapped[new_of_old[labels[i]], new_of_old[labels[j]]]
    if (got != want).any():
        raise ValueError("free-loop quotient disagrees with the realization")
    return qtable


def _popcount_parity(arr: np.ndarray) -> np.ndarray:
    v = np.asarray(arr, dtype=np.uint64).copy()
    parity = np.zeros(v.shape, dtype=np.uint64)
    while True:
        if not v.any():
            break
        parity ^= v & np.uint64(1)
        v >>= np.uint64(1)
    return parity.astype(np.uint16)
