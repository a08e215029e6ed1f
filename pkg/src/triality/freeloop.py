"""The free rank-n loop of the variety, realized inside a power of M3.

Send the i-th free generator to the tuple over all triples alpha of {1..n}
whose alpha-component is the relabeled generator of M3 when i lies in alpha
and the identity otherwise.  The subloop these tuples generate in the
direct product is a faithful copy of the free loop: its order must come out
to 2^(2n + C(n,2) + C(n,3)), which is 2^18 at n = 4.

The closure is computed structurally rather than by blind orbit expansion:

  1. the designated central elements (generator squares, commutators,
     associators) are verified componentwise-central and their span Z is
     grown by doubling, proving independence along the way;
  2. the 2^n ordered subset products g_eps of the generators are formed;
  3. the candidate closure is {g_eps z : z in Z}, whose distinctness count
     gives the order;
  4. closedness under product and inverse reduces to finitely many checks
     because central factors pull out: (g_e z)(g_d w) = (g_e g_d)(z w),
     so it is enough that each g_e g_d and each g_e^-1 land back in the
     candidate set.  Random product spot checks are run on top.

Since the loop has two-sided inverses (Moufang), closure under product and
inverse implies closure under both divisions, so the candidate set is the
generated subloop.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .loops import LoopTable, center

ENCODE_BITS = 10  # per-component index width; M3 has 2^10 elements


@dataclass
class ClosureChecks:
    pair_products_inside: bool
    inverses_inside: bool
    sampled_products_inside: int
    sampled_products_total: int
    surjective_components: bool


class FreeLoopRealization:
    """The free loop on n generators as tuples over M3, with its center."""

    def __init__(self, table: LoopTable, n: int):
        if table.order != 1 << ENCODE_BITS:
            raise ValueError("expected the 1024-element rank-3 loop table")
        closure_bits = 2 * n + _comb2(n) + _comb3(n)
        if closure_bits > 18:
            raise ValueError(
                f"rank {n} closure has 2^{closure_bits} elements, over the 2^18 guard"
            )
        self.table = table
        self.n = n
        self.triples = tuple(itertools.combinations(range(1, n + 1), 3))
        c = len(self.triples)
        if ENCODE_BITS * c > 64:
            raise ValueError("tuple encoding exceeds 64 bits")
        self.ncomp = c
        gens = np.zeros((n, c), dtype=np.uint16)
        for i in range(1, n + 1):
            for ci, alpha in enumerate(self.triples):
                if i in alpha:
                    gens[i - 1, ci] = table.n_gens[alpha.index(i)]
        self.gens = gens
        self.center_mask = np.zeros(table.order, dtype=bool)
        self.center_mask[center(table)] = True

    # -- componentwise loop algebra on (N, ncomp) index arrays ---------------

    def tmul(self, a, b):
        return self.table.mul[a, b]

    def tinv(self, a):
        return self.table.lsol[a, 0]

    def tldiv(self, a, b):
        """Componentwise solution of a * x = b."""
        return self.table.lsol[a, b]

    def tcomm(self, a, b):
        return self.table.lsol[self.tmul(b, a), self.tmul(a, b)]

    def tassoc(self, a, b, c):
        return self.table.lsol[self.tmul(a, self.tmul(b, c)),
                               self.tmul(self.tmul(a, b), c)]

    def encode(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(rows)
        code = np.zeros(len(rows), dtype=np.uint64)
        for ci in range(self.ncomp):
            code |= rows[:, ci].astype(np.uint64) << np.uint64(ENCODE_BITS * ci)
        return code

    # -- the structured closure ----------------------------------------------

    def central_generators(self) -> tuple[tuple[str, ...], np.ndarray]:
        """The designated center basis: squares, commutators, associators."""
        names, rows = [], []
        g = self.gens
        for i in range(self.n):
            names.append(f"x{i + 1}^2")
            rows.append(self.tmul(g[i], g[i]))
        for i, j in itertools.combinations(range(self.n), 2):
            names.append(f"[x{i + 1},x{j + 1}]")
            rows.append(self.tcomm(g[i], g[j]))
        for i, j, k in itertools.combinations(range(self.n), 3):
            names.append(f"(x{i + 1},x{j + 1},x{k + 1})")
            rows.append(self.tassoc(g[i], g[j], g[k]))
        return tuple(names), np.array(rows, dtype=np.uint16)

    def build(self, spot_samples: int = 1_000_000, seed: int = 0):
        """Materialize the closure; returns (self, ClosureChecks)."""
        names, central = self.central_generators()
        if not self.center_mask[central].all():
            raise ValueError("a designated central element is not componentwise central")
        self.central_names = names
        self.central_rows = central
        d = len(central)
        span = np.zeros((1, self.ncomp), dtype=np.uint16)
        coords = np.zeros(1, dtype=np.uint32)
        for k in range(d):
            span = np.concatenate([span, self.tmul(span, central[k][None, :])])
            coords = np.concatenate([coords, coords | np.uint32(1 << k)])
        span_codes = self.encode(span)
        if len(np.unique(span_codes)) != 1 << d:
            raise ValueError("designated central elements are not independent")
        self.center_dim = d
        order = np.argsort(span_codes)
        self.span = span[order]
        self.span_codes = span_codes[order]
        self.span_coords = coords[order]

        eps_count = 1 << self.n
        eps = np.zeros((eps_count, self.ncomp), dtype=np.uint16)
        for e in range(1, eps_count):
            row = np.zeros(self.ncomp, dtype=np.uint16)
            for i in range(self.n):
                if (e >> i) & 1:
                    row = self.tmul(row, self.gens[i])
            eps[e] = row
        self.eps = eps

        # candidate closure {g_eps z}, laid out as the (eps, span) grid
        grid = self.tmul(eps[:, None, :], self.span[None, :, :]).reshape(-1, self.ncomp)
        codes = self.encode(grid)
        order = np.argsort(codes)
        sorted_codes = codes[order]
        if (np.diff(sorted_codes.astype(np.int64)) == 0).any():
            raise ValueError("closure candidate collapsed; factorization not unique")
        self.codes = sorted_codes
        self.rows = grid[order]
        flat = np.arange(len(codes), dtype=np.uint32)[order]
        self.eps_of = (flat >> np.uint32(self.center_dim)).astype(np.uint8)
        self.spanpos_of = (flat & np.uint32((1 << self.center_dim) - 1)).astype(np.uint32)

        checks = self._closure_checks(spot_samples, seed)
        return self, checks

    def _closure_checks(self, spot_samples: int, seed: int) -> ClosureChecks:
        # cocycle: g_e g_d = g_(e xor d) c(e, d), c central
        eps_count = len(self.eps)
        pairs_ok = True
        self.cocycle_coords = np.zeros((eps_count, eps_count), dtype=np.uint32)
        for e in range(eps_count):
            prod = self.tmul(self.eps[e][None, :], self.eps)
            for dd in range(eps_count):
                c = self.tldiv(self.eps[e ^ dd], prod[dd])
                pos = self._span_lookup(self.encode(c[None, :]))
                if pos < 0:
                    pairs_ok = False
                else:
                    self.cocycle_coords[e, dd] = self.span_coords[pos]
        inv_ok = bool(
            np.isin(self.encode(self.tinv(self.eps)), self.codes).all()
        )
        rng = np.random.Generator(np.random.Philox(seed))
        done = 0
        inside = 0
        while done < spot_samples:
            batch = min(spot_samples - done, 1 << 20)
            i = rng.integers(0, len(self.codes), size=batch)
            j = rng.integers(0, len(self.codes), size=batch)
            prod_codes = self.encode(self.tmul(self.rows[i], self.rows[j]))
            pos = np.searchsorted(self.codes, prod_codes)
            pos = np.minimum(pos, len(self.codes) - 1)
            inside += int((self.codes[pos] == prod_codes).sum())
            done += batch
        surjective = all(
            len(np.unique(self.rows[:, ci])) == self.table.order
            for ci in range(self.ncomp)
        )
        return ClosureChecks(
            pair_products_inside=pairs_ok,
            inverses_inside=inv_ok,
            sampled_products_inside=inside,
            sampled_products_total=done,
            surjective_components=surjective,
        )

    def _span_lookup(self, code) -> int:
        pos = int(np.searchsorted(self.span_codes, code[0]))
        if pos < len(self.span_codes) and self.span_codes[pos] == code[0]:
            return pos
        return -1

    @property
    def order(self) -> int:
        return len(self.codes)

    def row_of_code(self, code: int) -> int:
        pos = int(np.searchsorted(self.codes, np.uint64(code)))
        if pos == len(self.codes) or self.codes[pos] != np.uint64(code):
            raise KeyError("code not in the closure")
        return pos


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def _comb3(n: int) -> int:
    return n * (n - 1) * (n - 2) // 6


def build_free_loop(table: LoopTable, n: int, spot_samples: int = 1_000_000,
                    seed: int = 0):
    return FreeLoopRealization(table, n).build(spot_samples, seed)


def center_candidates(fl: FreeLoopRealization) -> np.ndarray:
    """Codes of closure rows commuting and associating with every generator.

    This is a necessary condition for centrality, so the computed set C
    contains the center.  The designated span lies inside the center, so
    when C turns out to be contained in the span, all three sets coincide
    and the span is exactly the center.
    """
    rows = fl.rows
    ok = np.ones(len(rows), dtype=bool)
    for i in range(fl.n):
        g = fl.gens[i][None, :]
        ok &= (fl.tmul(rows, g) == fl.tmul(g, rows)).all(axis=1)
    gen_list = [fl.gens[i][None, :] for i in range(fl.n)]
    for g in gen_list:
        for h in gen_list:
            ok &= (fl.tassoc(rows, g, h) == 0).all(axis=1)
            ok &= (fl.tassoc(g, rows, h) == 0).all(axis=1)
            ok &= (fl.tassoc(g, h, rows) == 0).all(axis=1)
    return fl.codes[ok]
