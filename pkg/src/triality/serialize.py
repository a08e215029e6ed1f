"""Wire formats: JSON elements, bit-packed enumeration dumps, loop tables.

Three formats live here, all tied to the fixed coordinate layout of core:

  * JSON element: {"n": 3, "mode": "z4", "z": [..2n ints..], "f": "hex"}.
    The hex string is the fpart as an integer, lowercase, zero-padded to
    ceil(m/4) digits; bit 0 is the first layout coordinate (u-block first).
  * packed record dump: one little-endian record per element, fixed width
    ceil((4n+m)/8) bytes, zpart 2-bit fields in the low bits (a1 lowest)
    and fpart bits above them.  Same integer as core.pack.
  * loop table: CSV with |L| rows of |L| indices, or a binary file with an
    8-byte magic, uint32 element count, uint8 index width, then the
    row-major index matrix in little-endian width-byte cells.

Indices into a loop table follow the table's own convention: row i, column
j holds the index of element i times element j, with the identity at 0.
"""

from __future__ import annotations

import json
from typing import IO, Iterable

import numpy as np

from .core import Element, GroupCtx, get_ctx
from .embedding import ProductElement, triple_set

LOOP_MAGIC = b"MLOOPTB1"


# --- JSON elements ----------------------------------------------------------


def fpart_hex(ctx: GroupCtx, fpart: int) -> str:
    width = max(1, (ctx.m + 3) // 4)
    return format(fpart, f"0{width}x")


def element_to_json(x: Element) -> dict:
    return {
        "n": x.ctx.n,
        "mode": x.ctx.mode,
        "z": list(x.zpart),
        "f": fpart_hex(x.ctx, x.fpart),
    }


def element_from_json(obj: dict) -> Element:
    try:
        ctx = get_ctx(int(obj["n"]), str(obj["mode"]))
        z = [int(v) for v in obj["z"]]
        f = int(str(obj["f"]), 16)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad element JSON: {exc}") from exc
    return Element(ctx, z, f)


def element_dumps(x: Element) -> str:
    return json.dumps(element_to_json(x), separators=(", ", ": "))


def element_loads(text: str) -> Element:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad element JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("bad element JSON: expected an object")
    return element_from_json(obj)


def triple_key(alpha: tuple[int, int, int]) -> str:
    return ",".join(str(i) for i in alpha)


def product_to_json(pe: ProductElement) -> dict:
    comps = {
        triple_key(alpha): element_to_json(comp)
        for alpha, comp in zip(triple_set(pe.n), pe.components)
    }
    return {"n": pe.n, "mode": pe.mode, "components": comps}


def product_from_json(obj: dict) -> ProductElement:
    try:
        n = int(obj["n"])
        mode = str(obj["mode"])
        raw = dict(obj["components"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad product JSON: {exc}") from exc
    comps = []
    for alpha in triple_set(n):
        key = triple_key(alpha)
        if key not in raw:
            raise ValueError(f"bad product JSON: missing component {key!r}")
        comps.append(element_from_json(raw[key]))
    if len(raw) != len(comps):
        extra = sorted(set(raw) - {triple_key(a) for a in triple_set(n)})
        raise ValueError(f"bad product JSON: unexpected components {extra}")
    return ProductElement(n, mode, tuple(comps))


# --- packed record dumps ----------------------------------------------------


def record_width(ctx: GroupCtx) -> int:
    return (ctx.code_bits + 7) // 8


def codes_to_records(ctx: GroupCtx, codes: np.ndarray) -> bytes:
    """Fixed-width little-endian records from packed codes (width <= 8)."""
    width = record_width(ctx)
    if width > 8:
        raise ValueError(f"{ctx.code_bits}-bit codes exceed the 8-byte record cap")
    flat = np.ascontiguousarray(codes, dtype="<u8").view(np.uint8).reshape(-1, 8)
    return flat[:, :width].tobytes()


def records_to_codes(ctx: GroupCtx, data: bytes) -> np.ndarray:
    width = record_width(ctx)
    if len(data) % width:
        raise ValueError(f"dump length {len(data)} is not a multiple of {width}")
    raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, width)
    full = np.zeros((len(raw), 8), dtype=np.uint8)
    full[:, :width] = raw
    return full.reshape(-1).view("<u8").copy()


def write_records(fh: IO[bytes], ctx: GroupCtx, codes: np.ndarray) -> int:
    data = codes_to_records(ctx, codes)
    fh.write(data)
    return len(codes)


def dump_enumeration(
    fh: IO[bytes], ctx: GroupCtx, budget_bits: int, chunk_bits: int = 20
) -> int:
    """Write every element in lexicographic order; returns the count."""
    from . import kernels

    if not ctx.finite:
        raise ValueError("enumeration requires finite mode")
    if ctx.code_bits > budget_bits:
        raise ValueError(
            f"state space needs {ctx.code_bits} bits, over the {budget_bits}-bit budget"
        )
    total = 1 << ctx.code_bits
    step = 1 << chunk_bits
    for start in range(0, total, step):
        z, f = kernels.lex_chunk(ctx, start, min(start + step, total))
        write_records(fh, ctx, kernels.pack_batch(ctx, z, f))
    return total


def read_records(fh: IO[bytes], ctx: GroupCtx) -> np.ndarray:
    return records_to_codes(ctx, fh.read())


# --- loop tables ------------------------------------------------------------


def index_width(order: int) -> int:
    if order <= 1 << 8:
        return 1
    if order <= 1 << 16:
        return 2
    return 4


def write_loop_csv(fh: IO[str], mul: np.ndarray) -> None:
    np.savetxt(fh, mul, fmt="%d", delimiter=",")


def read_loop_csv(fh: IO[str]) -> np.ndarray:
    mul = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
    return mul.astype(_index_dtype(len(mul)))


def write_loop_binary(fh: IO[bytes], mul: np.ndarray) -> None:
    order = len(mul)
    width = index_width(order)
    fh.write(LOOP_MAGIC)
    fh.write(np.uint32(order).tobytes())
    fh.write(np.uint8(width).tobytes())
    fh.write(np.ascontiguousarray(mul, dtype=f"<u{width}").tobytes())


def read_loop_binary(fh: IO[bytes]) -> np.ndarray:
    magic = fh.read(len(LOOP_MAGIC))
    if magic != LOOP_MAGIC:
        raise ValueError(f"bad loop table magic {magic!r}")
    order = int(np.frombuffer(fh.read(4), dtype="<u4")[0])
    width = int(np.frombuffer(fh.read(1), dtype=np.uint8)[0])
    if width not in (1, 2, 4):
        raise ValueError(f"bad index width {width}")
    body = fh.read(order * order * width)
    if len(body) != order * order * width:
        raise ValueError("truncated loop table body")
    mul = np.frombuffer(body, dtype=f"<u{width}").reshape(order, order)
    return mul.astype(_index_dtype(order))


def _index_dtype(order: int):
    return np.uint16 if order <= 1 << 16 else np.uint32


def write_loop_codes(fh: IO[str], codes: Iterable[int]) -> None:
    """Companion column of packed element codes, one per table index."""
    for code in codes:
        fh.write(f"{int(code)}\n")
