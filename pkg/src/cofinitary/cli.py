"""Command-line front end: ``forge build | verify | decode | leq``.

Exit codes: 0 success, 1 verification or order failure (or a failed
operation), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys

from .coding import PeriodicStreamError, UndefinedIteration, decode
from .groups import CofinitaryViolation, get_group, parse_pairs
from .partial import PartialInjection
from .poset import Condition, order_violations
from .runner import RunConfig, RunError, Transcript, TranscriptError, run, verify_transcript
from .words import parse_word

OK, FAILED, USAGE = 0, 1, 2


def _err(msg: str) -> None:
    print(f"forge: {msg}", file=sys.stderr)


def cmd_build(args) -> int:
    config = RunConfig(
        group=args.group,
        z=None if args.z == "none" else args.z,
        words=args.words or None,
        depth=args.depth,
        code_length=args.code_length,
        targets=args.target or [],
        hit_stride=args.hit_stride,
        hit_count=args.hit_count,
        distinguish_tokens=args.distinguish_tokens,
        budget=args.budget,
    )
    try:
        t = run(config)
    except RunError as exc:
        _err(str(exc))
        return FAILED
    except (PeriodicStreamError, CofinitaryViolation, KeyError, ValueError, OSError) as exc:
        _err(f"invalid configuration: {exc}")
        return USAGE
    text = t.dumps()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    certs = t.data["certificates"]
    witnesses = len(certs["hits"]) + len(certs["distinguish"])
    out = sys.stderr if not args.out else sys.stdout
    print(f"steps: {len(t.steps)}", file=out)
    print(f"window B: {t.data['window']}", file=out)
    print(f"coding certificates: {len(certs['coding'])}", file=out)
    for c in certs["coding"]:
        print(f"  {c['word']}: parameter {c['parameter']}, exact length {c['length']}", file=out)
    print(f"witnesses: {witnesses} ({len(certs['hits'])} hit, {len(certs['distinguish'])} distinguish)", file=out)
    return OK


def cmd_verify(args) -> int:
    try:
        with open(args.path) as fh:
            t = Transcript.loads(fh.read())
    except (OSError, TranscriptError) as exc:
        _err(f"cannot read transcript: {exc}")
        return USAGE
    report = verify_transcript(t)
    print(report.render(verbose=args.verbose))
    return OK if report.ok else FAILED


def cmd_decode(args) -> int:
    try:
        group = get_group(args.group)
        with open(args.table) as fh:
            s = PartialInjection(parse_pairs(fh.read()))
        w = parse_word(args.word, group)
    except (OSError, KeyError, ValueError) as exc:
        _err(str(exc))
        return USAGE
    if w.is_group_word():
        _err(f"{args.word!r} is a group word")
        return USAGE
    try:
        print(decode(w, s, args.parameter, args.count))
    except UndefinedIteration as exc:
        _err(f"error at step {exc.step}: {exc}")
        return FAILED
    return OK


def _load_condition(path: str) -> Condition:
    with open(path) as fh:
        return Condition.loads(fh.read())


def cmd_leq(args) -> int:
    try:
        q = _load_condition(args.q)
        p = _load_condition(args.p)
        problems = order_violations(q, p)
    except (OSError, KeyError, ValueError) as exc:
        _err(str(exc))
        return USAGE
    if problems:
        for v in problems:
            print(v)
        return FAILED
    print("q <= p")
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="forge", description="Finite approximations of a generic cofinitary permutation.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="run the scheduler and write a transcript")
    b.add_argument("--group", default="trivial", help="trivial, swap, swap-tail, shift or table:<path>")
    b.add_argument("--z", default="thue-morse", help="thue-morse, champernowne, file:<path> or none")
    b.add_argument("--words", action="append", metavar="WORD", help="word to track (repeatable)")
    b.add_argument("--depth", type=int, help="also track every reduced non-group word up to this length")
    b.add_argument("--code-length", type=int, default=32)
    b.add_argument("--target", action="append", metavar="NAME", help="tau, gamma, zeta or a table file (repeatable)")
    b.add_argument("--hit-stride", type=int, default=5)
    b.add_argument("--hit-count", type=int, default=10)
    b.add_argument("--distinguish-tokens", type=int, default=1)
    b.add_argument("--budget", type=int, default=200)
    b.add_argument("--out", help="transcript path (default: standard output)")
    b.set_defaults(fn=cmd_build)

    v = sub.add_parser("verify", help="re-check a transcript")
    v.add_argument("path")
    v.add_argument("-v", "--verbose", action="store_true", help="list passing checks too")
    v.set_defaults(fn=cmd_verify)

    d = sub.add_parser("decode", help="print the parities of w[s]^k(m) for k < COUNT")
    d.add_argument("table", help='file of "n n\'" lines')
    d.add_argument("word")
    d.add_argument("parameter", type=int)
    d.add_argument("count", type=int)
    d.add_argument("--group", default="trivial")
    d.set_defaults(fn=cmd_decode)

    lq = sub.add_parser("leq", help="check q <= p for two condition files")
    lq.add_argument("q")
    lq.add_argument("p")
    lq.set_defaults(fn=cmd_leq)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
