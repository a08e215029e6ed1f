"""Coordinate arithmetic for the nilpotent class-3 groups on 2n generators.

The group of rank n is generated by a_1..a_n, b_1..b_n.  Every element has a
unique normal form

    a_1^e1 .. a_n^en  b_1^f1 .. b_n^fn  (u, v, p factors)  (z, t factors)

where u_ij = [a_i, a_j], v_ij = [b_i, b_j], p_ij = [a_i, b_j] for i < j, and
z_ijk = [p_ij, a_k], t_ijk = [p_ij, b_k] for i < j < k.  The u, v, z, t
symbols are central of order 2; the p symbols have order 2 but commute only
with the a_i, b_i carrying one of their own indices.  We store an element as

    zpart: 2n integer exponents (a-block then b-block); plain integers in
           infinite mode, residues mod 4 in finite mode (where a_i^4 = 1),
    fpart: one bit per u/v/p/z/t symbol, packed into an int.

The fpart layout is fixed: u-block, then v, then p (pairs in lexicographic
order), then z, then t (triples lexicographic).  At n = 3 this gives the
17-coordinate order (a1,a2,a3,b1,b2,b3,u12,u13,u23,v12,v13,v23,p12,p13,p23,
z123,t123) that the multiplication formulas below are written against.

The product of two coordinate vectors adds the zparts in the coefficient
ring and the fparts mod 2, plus correction bits that are polynomial in the
exponent parities of both factors and the p-bits of the left factor:

    pair (i, j), i < j:
      u: aj*Bi          v: a(j+n)*B(i+n)       p: a(i+n)*Bj + a(j+n)*Bi
    triple (i, j, k):
      z: p_ij*Bk + p_ik*Bj + p_jk*Bi
         + a(i+n)*Bj*Bk + a(j+n)*Bi*Bk + a(k+n)*Bi*Bj
      t: p_ij*B(k+n) + p_ik*B(j+n) + p_jk*B(i+n)
         + a(i+n)*a(j+n)*Bk + a(i+n)*a(k+n)*Bj + a(j+n)*a(k+n)*Bi
         + a(i+n)*(Bj*B(k+n) + B(j+n)*Bk)
         + a(j+n)*(Bi*B(k+n) + B(i+n)*Bk)
         + a(k+n)*(Bi*B(j+n) + B(i+n)*Bj)

(lowercase a = left factor exponents, B = right factor exponents, p_ij =
left factor's p-bit; everything mod 2).  This module is the plain-Python
reference; kernels.py carries the vectorized mirror and must agree bit for
bit, and the collection normalizer in oracle.py cross-checks both against
the defining relations.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

INFINITE = "z"
FINITE_Z4 = "z4"

DEFAULT_BUDGET_BITS = 26


class GroupCtx:
    """Rank, coefficient mode, and the coordinate layout they induce."""

    def __init__(self, n: int, mode: str = FINITE_Z4):
        if n < 3:
            raise ValueError(f"rank must be >= 3, got {n}")
        if mode not in (INFINITE, FINITE_Z4):
            raise ValueError(f"mode must be {INFINITE!r} or {FINITE_Z4!r}, got {mode!r}")
        self.n = n
        self.mode = mode
        self.pairs = tuple(itertools.combinations(range(1, n + 1), 2))
        self.triples = tuple(itertools.combinations(range(1, n + 1), 3))
        c2, c3 = len(self.pairs), len(self.triples)
        assert c2 == comb(n, 2) and c3 == comb(n, 3)
        self.m = 3 * c2 + 2 * c3
        self.u_off = 0
        self.v_off = c2
        self.p_off = 2 * c2
        self.z_off = 3 * c2
        self.t_off = 3 * c2 + c3
        self.pair_pos = {pq: i for i, pq in enumerate(self.pairs)}
        self.triple_pos = {tr: i for i, tr in enumerate(self.triples)}
        # one packed record: 2 bits per zpart coordinate, then the fpart bits
        self.code_bits = 4 * n + self.m

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupCtx) and (self.n, self.mode) == (other.n, other.mode)

    def __hash__(self) -> int:
        return hash((self.n, self.mode))

    def __repr__(self) -> str:
        return f"GroupCtx(n={self.n}, mode={self.mode!r})"

    @property
    def finite(self) -> bool:
        return self.mode == FINITE_Z4

    def order(self) -> int:
        """Group order in finite mode: 4^(2n) * 2^m."""
        if not self.finite:
            raise ValueError("infinite mode has no order")
        return 1 << self.code_bits

    # fpart bit positions for named symbols (indices are 1-based, any order)
    def u_bit(self, i: int, j: int) -> int:
        return self.u_off + self.pair_pos[_norm_pair(i, j)]

    def v_bit(self, i: int, j: int) -> int:
        return self.v_off + self.pair_pos[_norm_pair(i, j)]

    def p_bit(self, i: int, j: int) -> int:
        return self.p_off + self.pair_pos[_norm_pair(i, j)]

    def z_bit(self, i: int, j: int, k: int) -> int:
        return self.z_off + self.triple_pos[_norm_triple(i, j, k)]

    def t_bit(self, i: int, j: int, k: int) -> int:
        return self.t_off + self.triple_pos[_norm_triple(i, j, k)]


def _norm_pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"pair indices must differ, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


def _norm_triple(i: int, j: int, k: int) -> tuple[int, int, int]:
    tr = tuple(sorted((i, j, k)))
    if len(set(tr)) != 3:
        raise ValueError(f"triple indices must be distinct, got ({i}, {j}, {k})")
    return tr


@lru_cache(maxsize=None)
def get_ctx(n: int, mode: str = FINITE_Z4) -> GroupCtx:
    return GroupCtx(n, mode)


class Element:
    """An immutable group element in normal-form coordinates."""

    __slots__ = ("ctx", "zpart", "fpart")

    def __init__(self, ctx: GroupCtx, zpart: Sequence[int], fpart: int):
        zpart = tuple(zpart)
        if len(zpart) != 2 * ctx.n:
            raise ValueError(f"zpart must have {2 * ctx.n} entries, got {len(zpart)}")
        if ctx.finite:
            if any(not 0 <= v <= 3 for v in zpart):
                raise ValueError("finite-mode zpart entries must lie in 0..3")
        if not 0 <= fpart < (1 << ctx.m):
            raise ValueError("fpart out of range")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "zpart", zpart)
        object.__setattr__(self, "fpart", fpart)

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and self.ctx == other.ctx
            and self.zpart == other.zpart
            and self.fpart == other.fpart
        )

    def __hash__(self) -> int:
        return hash((self.ctx, self.zpart, self.fpart))

    def __repr__(self) -> str:
        return f"Element(n={self.ctx.n}, z={list(self.zpart)}, f={self.fpart:#x})"

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def __pow__(self, k: int) -> "Element":
        return power(self, k)

    def is_identity(self) -> bool:
        return self.fpart == 0 and all(v == 0 for v in self.zpart)

    def f_bit(self, pos: int) -> int:
        return (self.fpart >> pos) & 1


def identity(ctx: GroupCtx) -> Element:
    return Element(ctx, (0,) * (2 * ctx.n), 0)


def generator(ctx: GroupCtx, kind: str, *indices: int) -> Element:
    """The element with a single coordinate set: kind in 'a b u v p z t'."""
    z = [0] * (2 * ctx.n)
    f = 0
    if kind in ("a", "b"):
        (i,) = indices
        if not 1 <= i <= ctx.n:
            raise ValueError(f"index {i} out of range 1..{ctx.n}")
        z[(i - 1) if kind == "a" else (ctx.n + i - 1)] = 1
    elif kind in ("u", "v", "p"):
        i, j = indices
        if not (1 <= i < j <= ctx.n):
            raise ValueError(f"need a strictly increasing pair in 1..{ctx.n}, got ({i}, {j})")
        f = 1 << {"u": ctx.u_bit, "v": ctx.v_bit, "p": ctx.p_bit}[kind](i, j)
    elif kind in ("z", "t"):
        i, j, k = indices
        if not (1 <= i < j < k <= ctx.n):
            raise ValueError(f"need a strictly increasing triple in 1..{ctx.n}, got ({i}, {j}, {k})")
        f = 1 << (ctx.z_bit(i, j, k) if kind == "z" else ctx.t_bit(i, j, k))
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return Element(ctx, z, f)


def _add_z(ctx: GroupCtx, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    if ctx.finite:
        return tuple((a + b) & 3 for a, b in zip(x, y))
    return tuple(a + b for a, b in zip(x, y))


def multiply(x: Element, y: Element) -> Element:
    ctx = x.ctx
    if ctx != y.ctx:
        raise ValueError("elements from different contexts")
    n = ctx.n
    xa = [v & 1 for v in x.zpart]  # exponent parities of the left factor
    ya = [v & 1 for v in y.zpart]
    f = x.fpart ^ y.fpart
    for idx, (i, j) in enumerate(ctx.pairs):
        i0, j0, i1, j1 = i - 1, j - 1, n + i - 1, n + j - 1
        if xa[j0] & ya[i0]:
            f ^= 1 << (ctx.u_off + idx)
        if xa[j1] & ya[i1]:
            f ^= 1 << (ctx.v_off + idx)
        if (xa[i1] & ya[j0]) ^ (xa[j1] & ya[i0]):
            f ^= 1 << (ctx.p_off + idx)
    for idx, (i, j, k) in enumerate(ctx.triples):
        i0, j0, k0 = i - 1, j - 1, k - 1
        i1, j1, k1 = n + i - 1, n + j - 1, n + k - 1
        pij = x.f_bit(ctx.p_off + ctx.pair_pos[(i, j)])
        pik = x.f_bit(ctx.p_off + ctx.pair_pos[(i, k)])
        pjk = x.f_bit(ctx.p_off + ctx.pair_pos[(j, k)])
        zc = (
            (pij & ya[k0])
            ^ (pik & ya[j0])
            ^ (pjk & ya[i0])
            ^ (xa[i1] & ya[j0] & ya[k0])
            ^ (xa[j1] & ya[i0] & ya[k0])
            ^ (xa[k1] & ya[i0] & ya[j0])
        )
        if zc:
            f ^= 1 << (ctx.z_off + idx)
        tc = (
            (pij & ya[k1])
            ^ (pik & ya[j1])
            ^ (pjk & ya[i1])
            ^ (xa[i1] & xa[j1] & ya[k0])
            ^ (xa[i1] & xa[k1] & ya[j0])
            ^ (xa[j1] & xa[k1] & ya[i0])
            ^ (xa[i1] & ((ya[j0] & ya[k1]) ^ (ya[j1] & ya[k0])))
            ^ (xa[j1] & ((ya[i0] & ya[k1]) ^ (ya[i1] & ya[k0])))
            ^ (xa[k1] & ((ya[i0] & ya[j1]) ^ (ya[i1] & ya[j0])))
        )
        if tc:
            f ^= 1 << (ctx.t_off + idx)
    return Element(ctx, _add_z(ctx, x.zpart, y.zpart), f)


def inverse(x: Element) -> Element:
    """Solve x * y = identity coordinate by coordinate.

    The zpart negates in the coefficient ring.  Each fpart bit of y then
    satisfies 0 = x_f + y_f + correction(x, y), and every correction term
    depends only on x's coordinates and y's zpart, so multiplying x by
    (negated zpart, empty fpart) leaves exactly the solved bits x_f +
    correction in the product's fpart.  At n = 3 this reproduces the
    published closed form, which the tests pin down.
    """
    ctx = x.ctx
    if ctx.finite:
        zneg = tuple((-v) & 3 for v in x.zpart)
    else:
        zneg = tuple(-v for v in x.zpart)
    probe = Element(ctx, zneg, 0)
    return Element(ctx, zneg, multiply(x, probe).fpart)


def power(x: Element, k: int) -> Element:
    if k < 0:
        return power(inverse(x), -k)
    acc = identity(x.ctx)
    base = x
    while k:
        if k & 1:
            acc = multiply(acc, base)
        base = multiply(base, base)
        k >>= 1
    return acc


def commutator(x: Element, y: Element) -> Element:
    """[x, y] = x^-1 y^-1 x y."""
    return multiply(multiply(multiply(inverse(x), inverse(y)), x), y)


def conjugate(x: Element, g: Element) -> Element:
    """x^g = g^-1 x g."""
    return multiply(multiply(inverse(g), x), g)


def is_central(x: Element) -> bool:
    e = identity(x.ctx)
    for kind in ("a", "b"):
        for i in range(1, x.ctx.n + 1):
            if commutator(x, generator(x.ctx, kind, i)) != e:
                return False
    return True


def all_generators(ctx: GroupCtx) -> list[Element]:
    """The 2n defining generators a_1..a_n, b_1..b_n."""
    return [generator(ctx, kind, i) for kind in ("a", "b") for i in range(1, ctx.n + 1)]


# --- enumeration and packing ------------------------------------------------
#
# Two integer encodings of an element:
#  * the packed code: zpart 2-bit fields from bit 0 (a1 lowest), fpart bits
#    above them (layout index 0 lowest).  Canonical for dedup and dumps.
#  * the rank in lexicographic coordinate order (first coordinate most
#    significant), which drives enumerate_elements.


def pack(x: Element) -> int:
    ctx = x.ctx
    if not ctx.finite:
        raise ValueError("packing requires finite mode")
    code = 0
    for i, v in enumerate(x.zpart):
        code |= v << (2 * i)
    return code | (x.fpart << (4 * ctx.n))


def unpack(ctx: GroupCtx, code: int) -> Element:
    if not ctx.finite:
        raise ValueError("packing requires finite mode")
    if not 0 <= code < (1 << ctx.code_bits):
        raise ValueError("code out of range")
    z = tuple((code >> (2 * i)) & 3 for i in range(2 * ctx.n))
    return Element(ctx, z, code >> (4 * ctx.n))


def element_from_rank(ctx: GroupCtx, rank: int) -> Element:
    """The element at a given position in lexicographic coordinate order."""
    f = 0
    for i in range(ctx.m):
        if (rank >> (ctx.m - 1 - i)) & 1:
            f |= 1 << i
    rest = rank >> ctx.m
    nz = 2 * ctx.n
    z = tuple((rest >> (2 * (nz - 1 - i))) & 3 for i in range(nz))
    return Element(ctx, z, f)


def enumerate_elements(
    ctx: GroupCtx, budget_bits: int = DEFAULT_BUDGET_BITS
) -> Iterator[Element]:
    """Yield every element once, identity first, in lexicographic order."""
    if not ctx.finite:
        raise ValueError("enumeration requires finite mode")
    if ctx.code_bits > budget_bits:
        raise ValueError(
            f"state space needs {ctx.code_bits} bits, over the {budget_bits}-bit budget"
        )
    for rank in range(1 << ctx.code_bits):
        yield element_from_rank(ctx, rank)
