"""The graph automorphisms sigma, tau, rho and words over them.

At rank 3 all three have closed coordinate forms, implemented here directly
(kernels.py carries the batch mirrors).  sigma swaps the two generator
families a_i <-> b_i; tau fixes each a_i and sends b_i to (a_i b_i)^-1;
rho = sigma after tau cycles a_i -> b_i -> (a_i b_i)^-1 -> a_i.  Together
they generate a symmetric group S3 on the outer structure: sigma and tau
are involutions, rho has order 3, and sigma rho sigma = rho^-1.

At higher rank sigma and rho act componentwise through the triple-projection
embedding (see embedding.py); tau has no closed form there and is rejected.

An AutoWord is a formal word over {sigma, tau, rho}.  Its image in S3 is
tracked as a permutation of three points, so words can be reduced to a
canonical short pipeline before application.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Element, identity, inverse, multiply

SIGMA, TAU, RHO = "sigma", "tau", "rho"
_LETTERS = (SIGMA, TAU, RHO)

# Images on three points, written as image tuples (entry i is where i goes).
# Composition below is "apply the word left to right".
_IMAGES = {SIGMA: (1, 0, 2), TAU: (0, 2, 1), RHO: (1, 2, 0)}

# Canonical pipeline realizing each permutation, letters applied left first.
_PIPELINES = {
    (0, 1, 2): (),
    (1, 0, 2): (SIGMA,),
    (1, 2, 0): (RHO,),
    (2, 0, 1): (RHO, RHO),
    (0, 2, 1): (RHO, SIGMA),
    (2, 1, 0): (SIGMA, RHO),
}

_PERM_ORDER = {p: o for p, o in [
    ((0, 1, 2), 1), ((1, 0, 2), 2), ((0, 2, 1), 2),
    ((2, 1, 0), 2), ((1, 2, 0), 3), ((2, 0, 1), 3),
]}


def _compose(f: tuple, g: tuple) -> tuple:
    """Permutation doing g first, then f."""
    return (f[g[0]], f[g[1]], f[g[2]])


@dataclass(frozen=True)
class AutoWord:
    """A word in sigma, tau, rho; applied to elements left letter first."""

    letters: tuple[str, ...]

    def __post_init__(self):
        for letter in self.letters:
            if letter not in _LETTERS:
                raise ValueError(f"unknown automorphism letter {letter!r}")

    def __mul__(self, other: "AutoWord") -> "AutoWord":
        """Concatenation: self acts first, then other."""
        return AutoWord(self.letters + other.letters)

    def permutation(self) -> tuple:
        perm = (0, 1, 2)
        for letter in self.letters:
            perm = _compose(_IMAGES[letter], perm)
        return perm

    def order(self) -> int:
        return _PERM_ORDER[self.permutation()]

    def reduced(self, allow_tau: bool = False) -> "AutoWord":
        """Shortest canonical word with the same action.

        With allow_tau the transposition fixing the first point comes back
        as the single letter tau (valid at rank 3 only).
        """
        perm = self.permutation()
        if allow_tau and perm == (0, 2, 1):
            return AutoWord((TAU,))
        return AutoWord(_PIPELINES[perm])

    def inverse_word(self) -> "AutoWord":
        perm = self.permutation()
        inv_perm = tuple(perm.index(i) for i in range(3))
        return AutoWord(_PIPELINES[inv_perm])


def sigma_word() -> AutoWord:
    return AutoWord((SIGMA,))


def tau_word() -> AutoWord:
    return AutoWord((TAU,))


def rho_word() -> AutoWord:
    return AutoWord((RHO,))


def apply_sigma(x: Element) -> Element:
    ctx = x.ctx
    if ctx.n != 3:
        from .embedding import apply_auto_via_embedding

        return apply_auto_via_embedding(sigma_word(), x)
    z = x.zpart
    a1, a2, a3, a4, a5, a6 = (v & 1 for v in z)
    zo = (z[3], z[4], z[5], z[0], z[1], z[2])
    u12, u13, u23, v12, v13, v23, p12, p13, p23, z123, t123 = (
        x.f_bit(i) for i in range(11)
    )
    bits = (
        v12, v13, v23,
        u12, u13, u23,
        p12 ^ (a1 & a5) ^ (a2 & a4),
        p13 ^ (a1 & a6) ^ (a3 & a4),
        p23 ^ (a2 & a6) ^ (a3 & a5),
        t123 ^ (a1 & a5 & a6) ^ (a2 & a4 & a6) ^ (a3 & a4 & a5),
        z123 ^ (a1 & a2 & a6) ^ (a1 & a3 & a5) ^ (a2 & a3 & a4),
    )
    return Element(ctx, zo, _pack_bits(bits))


def apply_tau(x: Element) -> Element:
    ctx = x.ctx
    if ctx.n != 3:
        raise ValueError("tau has a closed form at rank 3 only")
    z = x.zpart
    a1, a2, a3, a4, a5, a6 = (v & 1 for v in z)
    zo = (z[0] - z[3], z[1] - z[4], z[2] - z[5], -z[3], -z[4], -z[5])
    if ctx.finite:
        zo = tuple(v & 3 for v in zo)
    u12, u13, u23, v12, v13, v23, p12, p13, p23, z123, t123 = (
        x.f_bit(i) for i in range(11)
    )
    bits = (
        u12 ^ v12 ^ p12 ^ (a2 & a4),
        u13 ^ v13 ^ p13 ^ (a3 & a4),
        u23 ^ v23 ^ p23 ^ (a3 & a5),
        v12, v13, v23,
        p12 ^ (a4 & a5),
        p13 ^ (a4 & a6),
        p23 ^ (a5 & a6),
        z123 ^ t123 ^ (a4 & a5 & a6),
        t123,
    )
    return Element(ctx, zo, _pack_bits(bits))


def apply_rho(x: Element) -> Element:
    if x.ctx.n != 3:
        from .embedding import apply_auto_via_embedding

        return apply_auto_via_embedding(rho_word(), x)
    return apply_sigma(apply_tau(x))


def _pack_bits(bits) -> int:
    fp = 0
    for i, bit in enumerate(bits):
        fp |= (bit & 1) << i
    return fp


_APPLY = {SIGMA: apply_sigma, TAU: apply_tau, RHO: apply_rho}


def apply(w: AutoWord, x: Element) -> Element:
    for letter in w.letters:
        x = _APPLY[letter](x)
    return x


def check_triality(x: Element) -> bool:
    """The triality identity: with c(x) = x^-1 x^sigma,

        c(x) * c(x)^rho * c(x)^(rho^2) = 1.
    """
    a = multiply(inverse(x), apply_sigma(x))
    b = apply_rho(a)
    c = apply_rho(b)
    return multiply(multiply(a, b), c) == identity(x.ctx)


def triality_holds_batch(ctx, z, f):
    """Boolean mask of the triality identity over a batch.

    Rank 3 runs on the closed-form kernels; higher ranks route sigma and
    rho componentwise through the embedding.
    """
    from . import kernels

    iz, ifp = kernels.inv(ctx, z, f)
    if ctx.n == 3:
        sz, sf = kernels.sigma3(ctx, z, f)
        az, af = kernels.mul(ctx, iz, ifp, sz, sf)
        bz, bf = kernels.rho3(ctx, az, af)
        cz, cf = kernels.rho3(ctx, bz, bf)
    else:
        from .embedding import apply_auto_batch

        sz, sf = apply_auto_batch(ctx, sigma_word(), z, f)
        az, af = kernels.mul(ctx, iz, ifp, sz, sf)
        bz, bf = apply_auto_batch(ctx, rho_word(), az, af)
        cz, cf = apply_auto_batch(ctx, rho_word(), bz, bf)
    pz, pf = kernels.mul(ctx, az, af, bz, bf)
    pz, pf = kernels.mul(ctx, pz, pf, cz, cf)
    return ~(pz.any(axis=1) | pf.any(axis=1))
