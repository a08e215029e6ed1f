"""Embedding a rank-n group into a product of rank-3 groups.

For every triple alpha = (i, j, k) of generator indices there is a
retraction onto the rank-3 subgroup generated by a_i, a_j, a_k, b_i, b_j,
b_k: keep exactly the normal-form coordinates whose index set lies inside
alpha and relabel i, j, k as 1, 2, 3.  Collecting all C(n, 3) retractions
gives an injective homomorphism into the direct product of rank-3 groups,
injective because every coordinate's index set has size at most 3 and so
survives into at least one component.

The practical payoff: sigma and rho act componentwise through this map, so
their rank-n versions are computed by embedding, applying the rank-3 closed
forms to every component, and reconstructing.  Reconstruction reads each
coordinate off the lexicographically smallest component that carries it and
then verifies every component against the result; the verification is what
certifies membership in the image, so reconstruct rejects arbitrary
component tuples that do not cohere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .autos import RHO, SIGMA, TAU, AutoWord, apply_rho, apply_sigma, apply_tau
from .core import Element, GroupCtx, get_ctx

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class TripleSet:
    """All increasing triples from 1..n, in lexicographic order."""

    n: int
    triples: tuple[Triple, ...]

    @classmethod
    def for_rank(cls, n: int) -> "TripleSet":
        if n < 3:
            raise ValueError(f"rank must be >= 3, got {n}")
        return cls(n, tuple(itertools.combinations(range(1, n + 1), 3)))

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def position(self, alpha: Triple) -> int:
        return self.triples.index(alpha)

    def smallest_containing(self, indices) -> Triple:
        need = set(indices)
        if not need <= set(range(1, self.n + 1)) or len(need) > 3:
            raise ValueError(f"bad index set {sorted(need)} for rank {self.n}")
        for alpha in self.triples:
            if need <= set(alpha):
                return alpha
        raise AssertionError("unreachable: every index set of size <= 3 is covered")


@dataclass(frozen=True)
class ProductElement:
    """One rank-3 element per triple, in lexicographic triple order."""

    n: int
    mode: str
    components: tuple[Element, ...]

    def __post_init__(self):
        expected = len(TripleSet.for_rank(self.n))
        if len(self.components) != expected:
            raise ValueError(
                f"rank {self.n} needs {expected} components, got {len(self.components)}"
            )
        for c in self.components:
            if c.ctx.n != 3 or c.ctx.mode != self.mode:
                raise ValueError("components must be rank-3 elements in the stated mode")

    def component(self, i: int, j: int, k: int) -> Element:
        alpha = tuple(sorted((i, j, k)))
        return self.components[TripleSet.for_rank(self.n).position(alpha)]


@lru_cache(maxsize=None)
def _columns(n: int) -> tuple:
    """Per-triple column gathers and the per-coordinate reconstruction map.

    Returns (triple_set, zcols, fcols, z_src, f_src):
      zcols[c], fcols[c]: the rank-n column indices feeding component c, in
        the rank-3 layout order;
      z_src[col] / f_src[col]: (component index, 'z' or 'f', component
        column) naming the lex-smallest component carrying that coordinate.
    """
    ts = TripleSet.for_rank(n)
    big = get_ctx(n)
    small = get_ctx(3)
    zcols, fcols = [], []
    for alpha in ts:
        i, j, k = alpha
        zc = [i - 1, j - 1, k - 1, n + i - 1, n + j - 1, n + k - 1]
        fc = [0] * small.m
        for (p, q) in small.pairs:
            pos = big.pair_pos[(alpha[p - 1], alpha[q - 1])]
            lpos = small.pair_pos[(p, q)]
            fc[small.u_off + lpos] = big.u_off + pos
            fc[small.v_off + lpos] = big.v_off + pos
            fc[small.p_off + lpos] = big.p_off + pos
        tpos = big.triple_pos[alpha]
        fc[small.z_off] = big.z_off + tpos
        fc[small.t_off] = big.t_off + tpos
        zcols.append(zc)
        fcols.append(fc)
    z_src = []
    for col in range(2 * n):
        gen = (col % n) + 1
        alpha = ts.smallest_containing((gen,))
        r = alpha.index(gen)  # 0-based local slot
        z_src.append((ts.position(alpha), r if col < n else 3 + r))
    f_src = []
    for local_off in (small.u_off, small.v_off, small.p_off):
        for pair in big.pairs:
            alpha = ts.smallest_containing(pair)
            lpos = small.pair_pos[(alpha.index(pair[0]) + 1, alpha.index(pair[1]) + 1)]
            f_src.append((ts.position(alpha), local_off + lpos))
    for local_off in (small.z_off, small.t_off):
        for tr in big.triples:
            f_src.append((ts.position(tr), local_off))
    assert len(f_src) == big.m
    return ts, tuple(map(tuple, zcols)), tuple(map(tuple, fcols)), tuple(z_src), tuple(f_src)


def triple_set(n: int) -> TripleSet:
    return _columns(n)[0]


def project(x: Element, alpha: Triple) -> Element:
    """The retraction onto the rank-3 subgroup indexed by alpha."""
    ctx = x.ctx
    ts, zcols, fcols, _, _ = _columns(ctx.n)
    c = ts.position(tuple(sorted(alpha)))
    small = get_ctx(3, ctx.mode)
    z = tuple(x.zpart[col] for col in zcols[c])
    f = 0
    for i, col in enumerate(fcols[c]):
        f |= x.f_bit(col) << i
    return Element(small, z, f)


def embed(x: Element) -> ProductElement:
    ctx = x.ctx
    ts = triple_set(ctx.n)
    return ProductElement(ctx.n, ctx.mode, tuple(project(x, alpha) for alpha in ts))


def reconstruct(ctx: GroupCtx, pe: ProductElement) -> Element:
    """Invert embed; raises ValueError when the components do not cohere."""
    if pe.n != ctx.n or pe.mode != ctx.mode:
        raise ValueError("product element does not match the context")
    _, _, _, z_src, f_src = _columns(ctx.n)
    z = tuple(pe.components[c].zpart[col] for c, col in z_src)
    f = 0
    for i, (c, col) in enumerate(f_src):
        f |= pe.components[c].f_bit(col) << i
    x = Element(ctx, z, f)
    for alpha, comp in zip(triple_set(ctx.n), pe.components):
        if project(x, alpha) != comp:
            raise ValueError(f"components incoherent at triple {alpha}")
    return x


def apply_auto_via_embedding(w: AutoWord, x: Element) -> Element:
    """Apply an automorphism word componentwise through the embedding."""
    ctx = x.ctx
    if ctx.n == 3:
        from .autos import apply

        return apply(w, x)
    comps = list(embed(x).components)
    for letter in w.letters:
        if letter == SIGMA:
            comps = [apply_sigma(c) for c in comps]
        elif letter == RHO:
            comps = [apply_rho(c) for c in comps]
        else:
            raise ValueError("tau does not extend past rank 3; reduce the word first")
    return reconstruct(ctx, ProductElement(ctx.n, ctx.mode, tuple(comps)))


# --- batch route -------------------------------------------------------------


def embed_batch(ctx: GroupCtx, z: np.ndarray, f: np.ndarray) -> list[kernels.Batch]:
    """Component batches in lexicographic triple order."""
    _, zcols, fcols, _, _ = _columns(ctx.n)
    return [(z[:, list(zc)], f[:, list(fc)]) for zc, fc in zip(zcols, fcols)]


def reconstruct_batch(
    ctx: GroupCtx, comps: list[kernels.Batch]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rebuild rank-n rows; third return is a per-row coherence mask."""
    _, zcols, fcols, z_src, f_src = _columns(ctx.n)
    rows = len(comps[0][0])
    z = np.empty((rows, 2 * ctx.n), dtype=comps[0][0].dtype)
    f = np.empty((rows, ctx.m), dtype=np.uint8)
    for col, (c, src) in enumerate(z_src):
        z[:, col] = comps[c][0][:, src]
    for col, (c, src) in enumerate(f_src):
        f[:, col] = comps[c][1][:, src]
    ok = np.ones(rows, dtype=bool)
    for (cz, cf), zc, fc in zip(comps, zcols, fcols):
        ok &= (z[:, list(zc)] == cz).all(axis=1)
        ok &= (f[:, list(fc)] == cf).all(axis=1)
    return z, f, ok


def apply_auto_batch(
    ctx: GroupCtx, w: AutoWord, z: np.ndarray, f: np.ndarray
) -> kernels.Batch:
    """Batch version of apply_auto_via_embedding; raises on incoherence."""
    small = get_ctx(3, ctx.mode)
    if ctx.n == 3:
        letter_fn = {SIGMA: kernels.sigma3, TAU: kernels.tau3, RHO: kernels.rho3}
        for letter in w.letters:
            z, f = letter_fn[letter](small, z, f)
        return z, f
    comps = embed_batch(ctx, z, f)
    for letter in w.letters:
        if letter == SIGMA:
            comps = [kernels.sigma3(small, cz, cf) for cz, cf in comps]
        elif letter == RHO:
            comps = [kernels.rho3(small, cz, cf) for cz, cf in comps]
        else:
            raise ValueError("tau does not extend past rank 3; reduce the word first")
    rz, rf, ok = reconstruct_batch(ctx, comps)
    if not ok.all():
        raise ValueError(f"{int((~ok).sum())} rows incoherent after automorphism")
    return rz, rf
