"""Vectorized batch arithmetic mirroring core.py.

Elements are held struct-of-arrays: ``z`` is an (N, 2n) uint8 array of
exponents (mod 4 in finite mode) and ``f`` an (N, m) uint8 array of symbol
bits in the fixed u/v/p/z/t layout.  Every function here has a scalar
counterpart in core.py or autos.py and the test suite checks the two routes
agree; nothing below is derived from the scalar code at runtime.

Batches broadcast against each other when one operand has a single row.
"""

from __future__ import annotations

import numpy as np

from .core import Element, GroupCtx

Batch = tuple[np.ndarray, np.ndarray]  # (z, f)


def from_elements(ctx: GroupCtx, elems) -> Batch:
    z = np.array([e.zpart for e in elems], dtype=np.uint8).reshape(-1, 2 * ctx.n)
    f = np.zeros((len(z), ctx.m), dtype=np.uint8)
    for r, e in enumerate(elems):
        for i in range(ctx.m):
            f[r, i] = (e.fpart >> i) & 1
    return z, f


def to_elements(ctx: GroupCtx, z: np.ndarray, f: np.ndarray) -> list[Element]:
    out = []
    for r in range(len(z)):
        fp = 0
        for i in range(ctx.m):
            if f[r, i]:
                fp |= 1 << i
        out.append(Element(ctx, tuple(int(v) for v in z[r]), fp))
    return out


def identity_batch(ctx: GroupCtx, count: int = 1) -> Batch:
    return (
        np.zeros((count, 2 * ctx.n), dtype=np.uint8),
        np.zeros((count, ctx.m), dtype=np.uint8),
    )


def random_batch(ctx: GroupCtx, rng: np.random.Generator, count: int) -> Batch:
    """Uniform random elements (finite mode)."""
    z = rng.integers(0, 4, size=(count, 2 * ctx.n), dtype=np.uint8)
    f = rng.integers(0, 2, size=(count, ctx.m), dtype=np.uint8)
    return z, f


def _broadcast(xz, xf, yz, yf):
    if xz.shape[0] != yz.shape[0]:
        rows = max(xz.shape[0], yz.shape[0])
        xz = np.broadcast_to(xz, (rows, xz.shape[1]))
        xf = np.broadcast_to(xf, (rows, xf.shape[1]))
        yz = np.broadcast_to(yz, (rows, yz.shape[1]))
        yf = np.broadcast_to(yf, (rows, yf.shape[1]))
    return xz, xf, yz, yf


def mul(ctx: GroupCtx, xz, xf, yz, yf) -> Batch:
    n = ctx.n
    xz, xf, yz, yf = _broadcast(xz, xf, yz, yf)
    xa = xz & 1
    ya = yz & 1
    f = xf ^ yf
    for idx, (i, j) in enumerate(ctx.pairs):
        i0, j0, i1, j1 = i - 1, j - 1, n + i - 1, n + j - 1
        f[:, ctx.u_off + idx] ^= xa[:, j0] & ya[:, i0]
        f[:, ctx.v_off + idx] ^= xa[:, j1] & ya[:, i1]
        f[:, ctx.p_off + idx] ^= (xa[:, i1] & ya[:, j0]) ^ (xa[:, j1] & ya[:, i0])
    for idx, (i, j, k) in enumerate(ctx.triples):
        i0, j0, k0 = i - 1, j - 1, k - 1
        i1, j1, k1 = n + i - 1, n + j - 1, n + k - 1
        pij = xf[:, ctx.p_off + ctx.pair_pos[(i, j)]]
        pik = xf[:, ctx.p_off + ctx.pair_pos[(i, k)]]
        pjk = xf[:, ctx.p_off + ctx.pair_pos[(j, k)]]
        f[:, ctx.z_off + idx] ^= (
            (pij & ya[:, k0])
            ^ (pik & ya[:, j0])
            ^ (pjk & ya[:, i0])
            ^ (xa[:, i1] & ya[:, j0] & ya[:, k0])
            ^ (xa[:, j1] & ya[:, i0] & ya[:, k0])
            ^ (xa[:, k1] & ya[:, i0] & ya[:, j0])
        )
        f[:, ctx.t_off + idx] ^= (
            (pij & ya[:, k1])
            ^ (pik & ya[:, j1])
            ^ (pjk & ya[:, i1])
            ^ (xa[:, i1] & xa[:, j1] & ya[:, k0])
            ^ (xa[:, i1] & xa[:, k1] & ya[:, j0])
            ^ (xa[:, j1] & xa[:, k1] & ya[:, i0])
            ^ (xa[:, i1] & ((ya[:, j0] & ya[:, k1]) ^ (ya[:, j1] & ya[:, k0])))
            ^ (xa[:, j1] & ((ya[:, i0] & ya[:, k1]) ^ (ya[:, i1] & ya[:, k0])))
            ^ (xa[:, k1] & ((ya[:, i0] & ya[:, j1]) ^ (ya[:, i1] & ya[:, j0])))
        )
    if ctx.finite:
        z = (xz + yz) & 3
    else:
        z = xz.astype(np.int64) + yz
    return z, f


def inv(ctx: GroupCtx, z, f) -> Batch:
    # Same one-pass solve as core.inverse: multiply by the negated zpart with
    # an empty fpart; the product's fpart is the inverse's fpart.
    if ctx.finite:
        zneg = (-z.astype(np.int16)) & 3
        zneg = zneg.astype(np.uint8)
    else:
        zneg = -z
    _, pf = mul(ctx, z, f, zneg, np.zeros_like(f))
    return zneg, pf


def commutator_batch(ctx: GroupCtx, xz, xf, yz, yf) -> Batch:
    xiz, xif = inv(ctx, xz, xf)
    yiz, yif = inv(ctx, yz, yf)
    az, af = mul(ctx, xiz, xif, yiz, yif)
    az, af = mul(ctx, az, af, xz, xf)
    return mul(ctx, az, af, yz, yf)


def conjugate_batch(ctx: GroupCtx, xz, xf, gz, gf) -> Batch:
    giz, gif = inv(ctx, gz, gf)
    az, af = mul(ctx, giz, gif, xz, xf)
    return mul(ctx, az, af, gz, gf)


# --- the rank-3 graph automorphisms, column form -----------------------------
#
# Layout reminder for n = 3: f columns are
#   0 1 2   u12 u13 u23
#   3 4 5   v12 v13 v23
#   6 7 8   p12 p13 p23
#   9       z123
#   10      t123


def _require_rank3(ctx: GroupCtx):
    if ctx.n != 3:
        raise ValueError("closed-form automorphisms are rank-3 only")


def sigma3(ctx: GroupCtx, z, f) -> Batch:
    """Order-2 graph automorphism swapping the two generator families."""
    _require_rank3(ctx)
    a = (z & 1).astype(np.uint8)
    a1, a2, a3, a4, a5, a6 = (a[:, i] for i in range(6))
    zo = z[:, [3, 4, 5, 0, 1, 2]].copy()
    fo = np.empty_like(f)
    fo[:, [0, 1, 2]] = f[:, [3, 4, 5]]
    fo[:, [3, 4, 5]] = f[:, [0, 1, 2]]
    fo[:, 6] = f[:, 6] ^ (a1 & a5) ^ (a2 & a4)
    fo[:, 7] = f[:, 7] ^ (a1 & a6) ^ (a3 & a4)
    fo[:, 8] = f[:, 8] ^ (a2 & a6) ^ (a3 & a5)
    fo[:, 9] = f[:, 10] ^ (a1 & a5 & a6) ^ (a2 & a4 & a6) ^ (a3 & a4 & a5)
    fo[:, 10] = f[:, 9] ^ (a1 & a2 & a6) ^ (a1 & a3 & a5) ^ (a2 & a3 & a4)
    return zo, fo


def tau3(ctx: GroupCtx, z, f) -> Batch:
    """Order-2 graph automorphism fixing the second generator family's span."""
    _require_rank3(ctx)
    a = (z & 1).astype(np.uint8)
    a1, a2, a3, a4, a5, a6 = (a[:, i] for i in range(6))
    zs = z.astype(np.int16)
    zo = np.empty_like(zs)
    zo[:, 0] = zs[:, 0] - zs[:, 3]
    zo[:, 1] = zs[:, 1] - zs[:, 4]
    zo[:, 2] = zs[:, 2] - zs[:, 5]
    zo[:, 3] = -zs[:, 3]
    zo[:, 4] = -zs[:, 4]
    zo[:, 5] = -zs[:, 5]
    if ctx.finite:
        zo = (zo & 3).astype(np.uint8)
    fo = f.copy()
    fo[:, 0] = f[:, 0] ^ f[:, 3] ^ f[:, 6] ^ (a2 & a4)
    fo[:, 1] = f[:, 1] ^ f[:, 4] ^ f[:, 7] ^ (a3 & a4)
    fo[:, 2] = f[:, 2] ^ f[:, 5] ^ f[:, 8] ^ (a3 & a5)
    fo[:, 6] = f[:, 6] ^ (a4 & a5)
    fo[:, 7] = f[:, 7] ^ (a4 & a6)
    fo[:, 8] = f[:, 8] ^ (a5 & a6)
    fo[:, 9] = f[:, 9] ^ f[:, 10] ^ (a4 & a5 & a6)
    return zo, fo


def rho3(ctx: GroupCtx, z, f) -> Batch:
    """Order-3 automorphism: first tau, then sigma."""
    return sigma3(ctx, *tau3(ctx, z, f))


# --- packed integer codes ----------------------------------------------------


def pack_batch(ctx: GroupCtx, z, f) -> np.ndarray:
    """Canonical uint64 codes: 2-bit zpart fields from bit 0, then f bits."""
    if not ctx.finite:
        raise ValueError("packing requires finite mode")
    if ctx.code_bits > 64:
        raise ValueError(f"{ctx.code_bits}-bit codes exceed uint64")
    code = np.zeros(len(z), dtype=np.uint64)
    for i in range(2 * ctx.n):
        code |= z[:, i].astype(np.uint64) << np.uint64(2 * i)
    for i in range(ctx.m):
        code |= f[:, i].astype(np.uint64) << np.uint64(4 * ctx.n + i)
    return code


def unpack_batch(ctx: GroupCtx, code: np.ndarray) -> Batch:
    if not ctx.finite:
        raise ValueError("packing requires finite mode")
    z = np.empty((len(code), 2 * ctx.n), dtype=np.uint8)
    f = np.empty((len(code), ctx.m), dtype=np.uint8)
    for i in range(2 * ctx.n):
        z[:, i] = (code >> np.uint64(2 * i)) & np.uint64(3)
    for i in range(ctx.m):
        f[:, i] = (code >> np.uint64(4 * ctx.n + i)) & np.uint64(1)
    return z, f


def lex_chunk(ctx: GroupCtx, start: int, stop: int) -> Batch:
    """Elements at lexicographic ranks [start, stop).

    Rank order puts the first coordinate most significant: the fpart bits
    are the low digits (last layout bit least significant) and the zpart
    coordinates sit above them (last coordinate in the lowest pair).
    """
    if not (0 <= start <= stop <= (1 << ctx.code_bits)):
        raise ValueError("rank range out of bounds")
    ranks = np.arange(start, stop, dtype=np.uint64)
    m, nz = ctx.m, 2 * ctx.n
    f = np.empty((len(ranks), m), dtype=np.uint8)
    for i in range(m):
        f[:, i] = (ranks >> np.uint64(m - 1 - i)) & np.uint64(1)
    rest = ranks >> np.uint64(m)
    z = np.empty((len(ranks), nz), dtype=np.uint8)
    for i in range(nz):
        z[:, i] = (rest >> np.uint64(2 * (nz - 1 - i))) & np.uint64(3)
    return z, f
