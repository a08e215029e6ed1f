"""Command-line front end: construction, verification campaigns, exports.

Exit codes: 0 on a full pass, 1 when a verification found a
counterexample (printed to stdout as JSON), 2 on usage errors.  Campaign
commands write a JSON-lines report to stdout, or, given --out DIR, write
report.jsonl, summary.csv, and rendered figures into that directory.
The number of worker processes comes from --jobs, defaulting to the
TRIALITY_JOBS environment variable, then 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import loops, oracle, serialize
from .campaigns import EXHAUSTIVE, TARGETS, Campaign, run_campaign
from .core import DEFAULT_BUDGET_BITS, FINITE_Z4, INFINITE, get_ctx

PASS, FAIL, USAGE = 0, 1, 2

DEFAULT_SAMPLES = {"moufang": 10_000_000, "variety-E": 10_000_000}


def _perr(message: str) -> int:
    print(f"triality: error: {message}", file=sys.stderr)
    return USAGE


def _pjson(obj) -> None:
    print(json.dumps(obj, separators=(", ", ": ")))


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=None, help="rank (default 3)")
    parser.add_argument("--mode", choices=(FINITE_Z4, INFINITE), default=FINITE_Z4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default $TRIALITY_JOBS or 1)")
    parser.add_argument("--budget-bits", type=int, default=DEFAULT_BUDGET_BITS)
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory for reports and exports")


def _scope_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--exhaustive", action="store_true")
    group.add_argument("--samples", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triality",
        description="Construct the class-3 groups with triality, extract "
                    "their Moufang loops, and run verification campaigns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="print the coordinate layout and order")
    _common_flags(p)

    p = sub.add_parser("verify", help="run a verification campaign")
    p.add_argument("target", choices=TARGETS)
    _scope_flags(p)
    _common_flags(p)

    p = sub.add_parser("oracle", help="collection-based word normalizer")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    q = osub.add_parser("normalize", help='normal form of a word like "a1 b2^-1"')
    q.add_argument("word")
    q.add_argument("--strategy", choices=oracle.STRATEGIES,
                   default="left-to-right")
    _common_flags(q)

    p = sub.add_parser("embed", help="component map of an element, by triple")
    p.add_argument("--element", required=True, help="element JSON, or - for stdin")
    _common_flags(p)

    p = sub.add_parser("loop", help="the extracted Moufang loop")
    lsub = p.add_subparsers(dest="loop_command", required=True)
    q = lsub.add_parser("extract", help="build the loop table and summarize")
    _common_flags(q)
    q = lsub.add_parser("verify", help="check Moufang identities on the table")
    q.add_argument("--identity", choices=loops.MOUFANG_LAWS + ("all",),
                   required=True)
    _scope_flags(q)
    _common_flags(q)
    q = lsub.add_parser("center", help="center, nucleus, and the center basis")
    _common_flags(q)
    q = lsub.add_parser("export", help="write the table as CSV and binary")
    q.add_argument("--format", choices=("csv", "binary", "both"), default="both")
    _common_flags(q)

    p = sub.add_parser("codeloop", help="codimension-1 central quotients")
    csub = p.add_subparsers(dest="codeloop_command", required=True)
    q = csub.add_parser("quotient", help="quotient named by a characteristic vector")
    q.add_argument("--lambda", dest="lam", required=True,
                   help="bit string over the center basis, e.g. 0000001")
    _common_flags(q)
    q = csub.add_parser("sweep", help="all codimension-1 subspaces at rank 3")
    _common_flags(q)
    q = csub.add_parser("charvec", help="round-trip lambda through its quotient")
    q.add_argument("--lambda", dest="lam", required=True)
    _common_flags(q)

    p = sub.add_parser("export", help="bit-packed enumeration dump")
    _common_flags(p)

    return parser


def _resolve_n(args, default: int = 3) -> int:
    return args.n if args.n is not None else default


def _resolve_jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    return int(os.environ.get("TRIALITY_JOBS", "1"))


def _resolve_scope(args, target: str):
    if args.exhaustive:
        return EXHAUSTIVE
    if args.samples is not None:
        return args.samples
    if target == "codeloop-sweep":
        return EXHAUSTIVE
    return DEFAULT_SAMPLES.get(target, 1_000_000)


def _rank3_table(args) -> loops.LoopTable:
    n = _resolve_n(args)
    if n != 3:
        raise ValueError("the loop commands run on the rank-3 table")
    if args.mode != FINITE_Z4:
        raise ValueError("the loop commands require finite mode")
    return loops.extract_m_set(get_ctx(3, FINITE_Z4), args.budget_bits)


def _emit_campaign(args, campaign: Campaign, argv: list[str]) -> int:
    from . import reporting

    result = run_campaign(campaign)
    command = "triality " + " ".join(argv)
    files = reporting.emit(result, command, args.out, sys.stdout)
    for path in files:
        print(path, file=sys.stderr)
    if not result.passed:
        _pjson(result.counterexample)
        return FAIL
    return PASS


# --- subcommand bodies ------------------------------------------------------


def _cmd_construct(args, argv) -> int:
    ctx = get_ctx(_resolve_n(args), args.mode)
    info = {
        "n": ctx.n,
        "mode": ctx.mode,
        "pairs": len(ctx.pairs),
        "triples": len(ctx.triples),
        "m": ctx.m,
        "code_bits": ctx.code_bits,
        "generators": [f"{kind}{i}" for kind in ("a", "b")
                       for i in range(1, ctx.n + 1)],
    }
    if ctx.finite:
        info["order"] = ctx.order()
    _pjson(info)
    return PASS


def _cmd_verify(args, argv) -> int:
    campaign = Campaign(
        target=args.target,
        scope=_resolve_scope(args, args.target),
        n=_resolve_n(args),
        mode=args.mode,
        seed=args.seed,
        jobs=_resolve_jobs(args),
        budget_bits=args.budget_bits,
    )
    return _emit_campaign(args, campaign, argv)


def _cmd_oracle(args, argv) -> int:
    ctx = get_ctx(_resolve_n(args), args.mode)
    w = oracle.parse_word(args.word)
    elem = oracle.normalize(w, ctx, strategy=args.strategy)
    _pjson(serialize.element_to_json(elem))
    return PASS


def _cmd_embed(args, argv) -> int:
    from . import embedding

    text = sys.stdin.read() if args.element == "-" else args.element
    elem = serialize.element_loads(text)
    if args.n is not None and args.n != elem.ctx.n:
        raise ValueError(f"--n {args.n} does not match the element's rank "
                         f"{elem.ctx.n}")
    _pjson(serialize.product_to_json(embedding.embed(elem)))
    return PASS


def _cmd_loop_extract(args, argv) -> int:
    table = _rank3_table(args)
    _pjson({
        "order": table.order,
        "generators": list(table.n_gens),
        "identity_index": 0,
        "codes_first": [int(c) for c in table.codes[:4]],
    })
    return PASS


def _cmd_loop_verify(args, argv) -> int:
    table = _rank3_table(args)
    laws = loops.MOUFANG_LAWS if args.identity == "all" else (args.identity,)
    mode = "exhaustive" if args.exhaustive else "sampled"
    samples = args.samples if args.samples is not None else 10_000_000
    if mode == "sampled" and samples <= 0:
        raise ValueError("sample count must be positive")
    failed = None
    for law in laws:
        rep = loops.check_moufang(table, law, mode, samples=samples,
                                  seed=args.seed)
        _pjson({"law": law, "mode": rep.mode, "checked": rep.checked,
                "passed": rep.passed})
        if not rep.passed and failed is None:
            failed = {"law": law, "indices": list(rep.counterexample),
                      "codes": [int(table.codes[i]) for i in rep.counterexample]}
    if failed is not None:
        _pjson(failed)
        return FAIL
    return PASS


def _cmd_loop_center(args, argv) -> int:
    from . import codeloops

    table = _rank3_table(args)
    basis = codeloops.center_basis(table)
    _pjson({
        "center_size": len(loops.center(table)),
        "nucleus_size": len(loops.nucleus(table)),
        "squares": len(loops.squares_set(table)),
        "basis_dim": basis.dim,
        "basis_labels": list(basis.labels),
        "basis_indices": list(basis.indices),
        "independent": basis.independent,
        "span_equals_center": basis.span_equals_center,
    })
    return PASS


def _cmd_loop_export(args, argv) -> int:
    if args.out is None:
        raise ValueError("loop export needs --out DIR")
    table = _rank3_table(args)
    args.out.mkdir(parents=True, exist_ok=True)
    files = []
    if args.format in ("csv", "both"):
        path = args.out / "loop_table.csv"
        with open(path, "w") as fh:
            serialize.write_loop_csv(fh, table.mul)
        files.append(path)
        codes_path = args.out / "loop_codes.csv"
        with open(codes_path, "w") as fh:
            serialize.write_loop_codes(fh, table.codes)
        files.append(codes_path)
    if args.format in ("binary", "both"):
        path = args.out / "loop_table.bin"
        with open(path, "wb") as fh:
            serialize.write_loop_binary(fh, table.mul)
        files.append(path)
    _pjson({"order": table.order, "files": [str(p) for p in files]})
    return PASS


def _parse_lambda(lam_text: str):
    from . import codeloops

    bits = lam_text.strip()
    if bits and set(bits) <= {"0", "1"}:
        for n in (3, 4, 5):
            if len(bits) == codeloops.center_dim(n):
                return codeloops.CharacteristicVector.from_bits(
                    n, [int(b) for b in bits])
    raise ValueError(
        "--lambda must be a bit string over the center basis "
        "(7 bits at rank 3, 14 at rank 4)")


def _quotient_summary(lam, qtable, gens) -> dict:
    from . import codeloops

    moufang = all(loops.check_moufang(qtable, law, mode="exhaustive").passed
                  for law in loops.MOUFANG_LAWS)
    try:
        back = codeloops.characteristic_vector_table(qtable, gens, lam.n)
        roundtrip = back == lam
    except ValueError:
        roundtrip = False
    return {
        "lambda": "".join(str(b) for b in lam.bits()),
        "n": lam.n,
        "order": qtable.order,
        "moufang": moufang,
        "squares": len(loops.squares_set(qtable)),
        "code_loop": codeloops.is_code_loop(qtable),
        "is_group": codeloops.is_associative(qtable),
        "group_expected": not any(lam.triple_bits),
        "roundtrip": roundtrip,
    }


def _quotient_table(args, lam):
    from . import codeloops, freeloop

    table = _rank3_table(args)
    if lam.n == 3:
        loop, _ = codeloops.quotient_from_charvec(table, lam)
        return loop.table, loop.gen_images()
    fl, _ = freeloop.build_free_loop(table, lam.n, spot_samples=100_000,
                                     seed=args.seed)
    qtable = codeloops.quotient_free(fl, lam, seed=args.seed)
    return qtable, qtable.n_gens


def _cmd_codeloop_quotient(args, argv) -> int:
    lam = _parse_lambda(args.lam)
    if args.n is not None and args.n != lam.n:
        raise ValueError(f"--n {args.n} does not match the {len(lam.bits())}-bit "
                         "characteristic vector")
    qtable, gens = _quotient_table(args, lam)
    summary = _quotient_summary(lam, qtable, gens)
    _pjson(summary)
    ok = (summary["moufang"] and summary["code_loop"] and summary["roundtrip"]
          and summary["is_group"] == summary["group_expected"])
    return PASS if ok else FAIL


def _cmd_codeloop_sweep(args, argv) -> int:
    campaign = Campaign(
        target="codeloop-sweep",
        scope=EXHAUSTIVE,
        n=_resolve_n(args),
        mode=args.mode,
        seed=args.seed,
        jobs=_resolve_jobs(args),
        budget_bits=args.budget_bits,
    )
    return _emit_campaign(args, campaign, argv)


def _cmd_codeloop_charvec(args, argv) -> int:
    from . import codeloops

    lam = _parse_lambda(args.lam)
    qtable, gens = _quotient_table(args, lam)
    back = codeloops.characteristic_vector_table(qtable, gens, lam.n)
    agree = back == lam
    _pjson({
        "lambda": "".join(str(b) for b in lam.bits()),
        "recovered": "".join(str(b) for b in back.bits()),
        "agree": agree,
    })
    return PASS if agree else FAIL


def _cmd_export(args, argv) -> int:
    if args.out is None:
        raise ValueError("export needs --out DIR")
    ctx = get_ctx(_resolve_n(args), args.mode)
    if not ctx.finite:
        raise ValueError("enumeration export requires finite mode")
    if ctx.code_bits > args.budget_bits:
        raise ValueError(f"state space needs {ctx.code_bits} bits, over the "
                         f"{args.budget_bits}-bit budget")
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / "elements.bin"
    with open(path, "wb") as fh:
        count = serialize.dump_enumeration(fh, ctx, args.budget_bits)
    _pjson({"count": count, "record_bytes": serialize.record_width(ctx),
            "file": str(path)})
    return PASS


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    dispatch = {
        "construct": _cmd_construct,
        "verify": _cmd_verify,
        "oracle": _cmd_oracle,
        "embed": _cmd_embed,
        "export": _cmd_export,
    }
    try:
        if args.command == "loop":
            handler = {
                "extract": _cmd_loop_extract,
                "verify": _cmd_loop_verify,
                "center": _cmd_loop_center,
                "export": _cmd_loop_export,
            }[args.loop_command]
        elif args.command == "codeloop":
            handler = {
                "quotient": _cmd_codeloop_quotient,
                "sweep": _cmd_codeloop_sweep,
                "charvec": _cmd_codeloop_charvec,
            }[args.codeloop_command]
        else:
            handler = dispatch[args.command]
        return handler(args, argv)
    except ValueError as exc:
        return _perr(str(exc))


if __name__ == "__main__":
    sys.exit(main())
