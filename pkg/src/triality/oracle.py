"""Independent normal-form computation by collection in the presentation.

This module never touches the coordinate formulas in core.py.  It works
directly from the defining relations: a word in the generators a_i, b_i is
rewritten into the normal form (a-block, b-block, pair symbols, triple
symbols) by moving one letter at a time into place and recording the
commutator symbols that fall out.  Agreement between this route and the
coordinate multiplication is the main correctness check for both.

The rewriting facts, all consequences of the presentation:

  * [a_i, a_j] = u_ij, [b_i, b_j] = v_ij, [a_i, b_j] = p_ij (i != j), all
    of order 2, with u, v central and [a_i, b_i] = 1.
  * p_ij commutes with a_i, a_j, b_i, b_j.  (From [a_i^2, b_j] = 1 one gets
    p_ij^2 [p_ij, a_i] = 1, so [p_ij, a_i] = 1; the three companions follow
    from the class-3 Jacobi identity
    [[x, y], z] [[y, z], x] [[z, x], y] = 1
    applied to (a_i, b_j, a_j) and (a_i, b_j, b_i).)
  * [p_ij, a_k] = z_ijk and [p_ij, b_k] = t_ijk for k outside {i, j}, fully
    symmetric in their three indices, central, of order 2.

Since every emitted symbol has order 2, only exponent parities matter for
the symbol bits, and signs on the crossing rules can be dropped.  Moving
a_i^d left across b_j^e (j != i) therefore emits p_ij^(de) together with
whatever z and t symbols that p then produces while completing its own trip
to the back; the bookkeeping is spelled out inline below.

Two strategies are provided: "left-to-right" appends letters to a growing
normal form, "right-to-left" prepends them.  They implement independent
rule sets and must agree on every word, which the tests exercise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Element, GroupCtx

_LETTER_RE = re.compile(r"^(a|b)(\d+)(?:\^(-?\d+))?$")

STRATEGIES = ("left-to-right", "right-to-left")


@dataclass(frozen=True)
class Word:
    """A word in the generators: a sequence of (kind, index, exponent)."""

    letters: tuple[tuple[str, int, int], ...]

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((k, i, -e) for k, i, e in reversed(self.letters)))


def word(letters: Iterable[tuple[str, int, int]]) -> Word:
    out = []
    for kind, idx, exp in letters:
        if kind not in ("a", "b"):
            raise ValueError(f"letter kind must be 'a' or 'b', got {kind!r}")
        if idx < 1:
            raise ValueError(f"letter index must be >= 1, got {idx}")
        out.append((kind, idx, exp))
    return Word(tuple(out))


def parse_word(text: str) -> Word:
    """Parse 'a1 b2^-1 a3^2' style syntax.  Whitespace separates letters."""
    letters = []
    for token in text.split():
        m = _LETTER_RE.match(token)
        if not m:
            raise ValueError(f"bad word token {token!r}")
        kind, idx, exp = m.group(1), int(m.group(2)), m.group(3)
        letters.append((kind, idx, 1 if exp is None else int(exp)))
    return word(letters)


def format_word(w: Word) -> str:
    parts = []
    for kind, idx, exp in w.letters:
        parts.append(f"{kind}{idx}" if exp == 1 else f"{kind}{idx}^{exp}")
    return " ".join(parts)


class _Collector:
    """Accumulator for the normal form being built up."""

    def __init__(self, ctx: GroupCtx):
        self.ctx = ctx
        self.aexp = [0] * ctx.n  # 0-based; entry i is the exponent of a_(i+1)
        self.bexp = [0] * ctx.n
        self.fpart = 0

    def _flip(self, bit: int) -> None:
        self.fpart ^= 1 << bit

    def _p_parity(self, i: int, j: int) -> int:
        return (self.fpart >> self.ctx.p_bit(i, j)) & 1

    # -- appending (left-to-right collection) --------------------------------
    # The new letter starts at the far right and walks left to its block.

    def append_a(self, i: int) -> None:
        """Multiply on the right by a_i^(+-1); the sign only moves aexp."""
        ctx = self.ctx
        n = ctx.n
        # a_i passes the pair symbols: each present p_jk with i outside {j,k}
        # contributes z.  (p with one of its own indices commutes; u, v, z, t
        # are central.)
        for (j, k) in ctx.pairs:
            if i != j and i != k and self._p_parity(j, k):
                self._flip(ctx.z_bit(i, j, k))
        # a_i passes the b-block right to left.  Crossing b_j (j != i) with
        # odd exponent emits p_ij, which must itself finish crossing the
        # remaining (already-passed, i.e. higher-index) part of the b-block,
        # emitting t symbols against odd b_j' with j' > j, j' distinct.
        for j in range(n, 0, -1):
            if j == i or self.bexp[j - 1] & 1 == 0:
                continue
            self._flip(ctx.p_bit(i, j))
            for jp in range(j + 1, n + 1):
                if jp != i and self.bexp[jp - 1] & 1:
                    self._flip(ctx.t_bit(i, j, jp))
        # a_i passes a_j for j > i, emitting u_ij when a_j is odd.
        for j in range(i + 1, n + 1):
            if self.aexp[j - 1] & 1:
                self._flip(ctx.u_bit(i, j))

    def append_b(self, i: int) -> None:
        ctx = self.ctx
        # b_i passes the pair symbols, emitting t against p_jk for i outside.
        for (j, k) in ctx.pairs:
            if i != j and i != k and self._p_parity(j, k):
                self._flip(ctx.t_bit(j, k, i))
        # b_i passes b_j for j > i, emitting v_ij.
        for j in range(i + 1, ctx.n + 1):
            if self.bexp[j - 1] & 1:
                self._flip(ctx.v_bit(i, j))

    def append(self, kind: str, idx: int, step: int) -> None:
        if kind == "a":
            self.append_a(idx)
            self.aexp[idx - 1] += step
        else:
            self.append_b(idx)
            self.bexp[idx - 1] += step
        if self.ctx.finite:
            blk = self.aexp if kind == "a" else self.bexp
            blk[idx - 1] &= 3

    # -- prepending (right-to-left collection) -------------------------------
    # The new letter starts at the far left and walks right to its block.

    def prepend_a(self, i: int) -> None:
        # Only a_j with j < i stand between the front and a_i's slot.
        for j in range(1, i):
            if self.aexp[j - 1] & 1:
                self._flip(self.ctx.u_bit(j, i))

    def prepend_b(self, i: int) -> None:
        ctx = self.ctx
        n = ctx.n
        # b_i crosses the whole a-block.  Odd a_j (j != i) emits p_ij, and
        # that p must then clear the rest of the a-block (z against odd a_j'
        # for j' > j) and the entire b-block (t against odd b_j'').
        for j in range(1, n + 1):
            if j == i or self.aexp[j - 1] & 1 == 0:
                continue
            self._flip(ctx.p_bit(i, j))
            for jp in range(j + 1, n + 1):
                if jp != i and self.aexp[jp - 1] & 1:
                    self._flip(ctx.z_bit(i, j, jp))
            for jpp in range(1, n + 1):
                if jpp != i and jpp != j and self.bexp[jpp - 1] & 1:
                    self._flip(ctx.t_bit(i, j, jpp))
        # then b_i crosses b_j for j < i.
        for j in range(1, i):
            if self.bexp[j - 1] & 1:
                self._flip(ctx.v_bit(j, i))

    def prepend(self, kind: str, idx: int, step: int) -> None:
        if kind == "a":
            self.prepend_a(idx)
            self.aexp[idx - 1] += step
        else:
            self.prepend_b(idx)
            self.bexp[idx - 1] += step
        if self.ctx.finite:
            blk = self.aexp if kind == "a" else self.bexp
            blk[idx - 1] &= 3

    def element(self) -> Element:
        z = tuple(self.aexp) + tuple(self.bexp)
        if not self.ctx.finite:
            return Element(self.ctx, z, self.fpart)
        return Element(self.ctx, tuple(v & 3 for v in z), self.fpart)


def normalize(w: Word, ctx: GroupCtx, strategy: str = "left-to-right") -> Element:
    """Collect a word into normal-form coordinates, one unit letter at a time."""
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    for kind, idx, _ in w.letters:
        if idx > ctx.n:
            raise ValueError(f"letter index {idx} exceeds rank {ctx.n}")
    col = _Collector(ctx)
    if strategy == "left-to-right":
        for kind, idx, exp in w.letters:
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                col.append(kind, idx, step)
    else:
        for kind, idx, exp in reversed(w.letters):
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                col.prepend(kind, idx, step)
    return col.element()


def random_word(
    ctx: GroupCtx, length: int, seed: int | np.random.Generator
) -> Word:
    """A uniform random word: each letter independent over kind, index, and
    exponent in {-2, -1, 1, 2}."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(
        np.random.Philox(seed)
    )
    kinds = rng.integers(0, 2, size=length)
    idxs = rng.integers(1, ctx.n + 1, size=length)
    exps = rng.choice(np.array([-2, -1, 1, 2]), size=length)
    return Word(
        tuple(
            ("a" if k == 0 else "b", int(i), int(e))
            for k, i, e in zip(kinds, idxs, exps)
        )
    )


def word_element(w: Word, ctx: GroupCtx) -> Element:
    """Evaluate a word through the coordinate multiplication (not collection)."""
    from . import core

    acc = core.identity(ctx)
    for kind, idx, exp in w.letters:
        acc = core.multiply(acc, core.power(core.generator(ctx, kind, idx), exp))
    return acc
