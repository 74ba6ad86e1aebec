"""Batch campaigns: prime sweeps with parallel workers, JSONL checkpointing
with resume, and the command-line interface.

Exit codes: 0 completed with no quadruple found, 2 completed and at least one
quadruple found (which would contradict the two-prime conjecture), 1 runtime
error, 3 invalid arguments.
"""

from __future__ import annotations

import argparse
import decimal
import json
import math
import multiprocessing
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import PrimePair, is_prime
from .diolog import PrecisionPolicy
from .reduce import DEFAULT_STOP
from .search import (
    PairReport,
    brute_force_oracle,
    lemma_predicates,
    search_pair,
)

__all__ = [
    "SweepSpec",
    "SweepSummary",
    "CheckpointError",
    "primes_in_range",
    "load_checkpoint",
    "sweep",
    "main",
    "entry",
]

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOTABLE = 2
EXIT_USAGE = 3


class CheckpointError(Exception):
    """Unreadable or corrupt checkpoint file."""


# -- primes -------------------------------------------------------------------

def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(2, n + 1) if sieve[i]]


def primes_in_range(lo: int, hi: int, segment: int = 1 << 20) -> list[int]:
    """Primes in [lo, hi] by a segmented sieve; hi can be large without
    memory pressure."""
    if hi < 2 or hi < lo:
        return []
    lo = max(lo, 2)
    base = _primes_upto(math.isqrt(hi) + 1)
    out = [p for p in base if lo <= p <= hi]
    start0 = max(lo, base[-1] + 1 if base else 2)
    for start in range(start0, hi + 1, segment):
        end = min(start + segment - 1, hi)
        marks = bytearray([1]) * (end - start + 1)
        for p in base:
            first = max(p * p, ((start + p - 1) // p) * p)
            if first <= end:
                marks[first - start::p] = bytearray(len(range(first, end + 1, p)))
        out.extend(start + i for i, ok in enumerate(marks) if ok)
    return out


# -- checkpoint ---------------------------------------------------------------

def _dec15(x: Fraction) -> str:
    with decimal.localcontext() as ctx:
        ctx.prec = 15
        return str(decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator))


def record_from_report(report: PairReport) -> dict:
    return {
        "v": SCHEMA_VERSION,
        "p": report.pair.p,
        "q": report.pair.q,
        "status": "done",
        "final_bound": _dec15(report.trace.final_bound),
        "b1": _dec15(report.trace.final_B1),
        "pair_count": report.pair_count,
        "triple_candidates": report.triple_candidates,
        "triples": [[t.a, t.b, t.c] for t in report.triples],
        "quad_candidates": report.quad_candidates,
        "quadruples": [[w.a, w.b, w.c, w.d] for w in report.quadruples],
        "ms": report.wall_ms,
    }


def _error_record(p: int, q: int, message: str, ms: int) -> dict:
    return {"v": SCHEMA_VERSION, "p": p, "q": q, "status": "error",
            "error": message, "ms": ms}


def load_checkpoint(path: Path) -> dict[tuple[int, int], dict]:
    """Parse a JSONL checkpoint.  A corrupt trailing partial line is cut off
    with a warning; corruption anywhere else refuses to load."""
    records: dict[tuple[int, int], dict] = {}
    if not path.exists():
        return records
    raw = path.read_bytes()
    lines = raw.split(b"\n")
    good_bytes = 0
    for i, line in enumerate(lines):
        if not line.strip():
            good_bytes += len(line) + 1
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict) or "p" not in rec or "q" not in rec:
                raise ValueError("missing fields")
        except (ValueError, json.JSONDecodeError) as exc:
            if i == len(lines) - 1:
                print("warning: truncating corrupt trailing checkpoint line",
                      file=sys.stderr)
                with open(path, "r+b") as fh:
                    fh.truncate(good_bytes)
                return records
            raise CheckpointError(
                f"corrupt checkpoint line {i + 1} in {path}; "
                f"use --force-restart to discard") from exc
        records[(rec["p"], rec["q"])] = rec
        good_bytes += len(line) + 1
    return records


# -- sweep --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    mode: str = "fixed-p"                 # or "all-pairs"
    p_fixed: int | None = 2
    q_min: int = 3
    q_max: int = 100
    skip_33: bool = False
    workers: int = 1
    checkpoint_path: Path | None = None
    start_bits: int = 128
    max_bits: int = 16384
    reduction_stop: Fraction = DEFAULT_STOP
    max_pairs: int | None = None


@dataclass
class SweepSummary:
    pairs_total: int = 0
    pairs_skipped: int = 0
    pairs_processed: int = 0
    quadruples_found: int = 0
    violations: int = 0                   # pairs that ended in an error record
    notable: list[tuple[int, int]] = field(default_factory=list)
    wall_ms: int = 0


def _pair_list(spec: SweepSpec) -> list[tuple[int, int]]:
    if spec.mode == "fixed-p":
        if spec.p_fixed is None or not is_prime(spec.p_fixed):
            raise ValueError("fixed-p mode needs a prime --p")
        qs = primes_in_range(spec.q_min, spec.q_max)
        pairs = [(spec.p_fixed, q) for q in qs if q != spec.p_fixed]
    elif spec.mode == "all-pairs":
        ps = primes_in_range(max(3, spec.q_min), spec.q_max)
        pairs = [(ps[i], ps[j]) for i in range(len(ps)) for j in range(i + 1, len(ps))]
    else:
        raise ValueError(f"unknown sweep mode {spec.mode!r}")
    if spec.skip_33:
        pairs = [(p, q) for (p, q) in pairs if not (p % 4 == 3 and q % 4 == 3)]
    if spec.max_pairs is not None:
        pairs = pairs[: spec.max_pairs]
    return pairs


def _run_pair(task: tuple[int, int, int, int, int, int]) -> dict:
    p, q, start_bits, max_bits, stop_num, stop_den = task
    t0 = time.perf_counter()
    try:
        policy = PrecisionPolicy(start_bits=start_bits, max_bits=max_bits)
        pair = PrimePair.of(p, q)
        report = search_pair(pair, policy, stop=Fraction(stop_num, stop_den))
        return record_from_report(report)
    except Exception as exc:  # worker failures isolate to their pair
        ms = int((time.perf_counter() - t0) * 1000)
        return _error_record(p, q, f"{type(exc).__name__}: {exc}", ms)


def sweep(spec: SweepSpec, force_restart: bool = False) -> SweepSummary:
    """Run the pair list through workers, append one checkpoint record per
    completion, and resume past already-checkpointed pairs."""
    t0 = time.perf_counter()
    pairs = _pair_list(spec)
    summary = SweepSummary(pairs_total=len(pairs))

    done: dict[tuple[int, int], dict] = {}
    ckpt_file = None
    if spec.checkpoint_path is not None:
        path = Path(spec.checkpoint_path)
        if force_restart and path.exists():
            path.unlink()
        done = load_checkpoint(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ckpt_file = open(path, "a", encoding="utf-8")

    pending = [pq for pq in pairs if pq not in done]
    summary.pairs_skipped = len(pairs) - len(pending)
    for rec in done.values():
        if rec.get("quadruples"):
            summary.quadruples_found += len(rec["quadruples"])
            summary.notable.append((rec["p"], rec["q"]))
        if rec.get("status") == "error":
            summary.violations += 1

    tasks = [(p, q, spec.start_bits, spec.max_bits,
              spec.reduction_stop.numerator, spec.reduction_stop.denominator)
             for (p, q) in pending]

    def consume(rec: dict) -> None:
        summary.pairs_processed += 1
        if rec.get("status") == "error":
            summary.violations += 1
        if rec.get("quadruples"):
            summary.quadruples_found += len(rec["quadruples"])
            summary.notable.append((rec["p"], rec["q"]))
        if ckpt_file is not None:
            ckpt_file.write(json.dumps(rec, sort_keys=True) + "\n")
            ckpt_file.flush()

    try:
        if spec.workers <= 1:
            for task in tasks:
                consume(_run_pair(task))
        else:
            with multiprocessing.Pool(spec.workers) as pool:
                for rec in pool.imap_unordered(_run_pair, tasks):
                    consume(rec)
    finally:
        if ckpt_file is not None:
            ckpt_file.close()

    summary.wall_ms = int((time.perf_counter() - t0) * 1000)
    return summary


# -- CLI ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _policy_from_env() -> tuple[int, int]:
    start = int(os.environ.get("SQS_START_BITS", "128"))
    cap = int(os.environ.get("SQS_MAX_BITS", "16384"))
    return start, cap


def _print_report(report: PairReport) -> None:
    pair = report.pair
    print(f"pair ({pair.p}, {pair.q})")
    print(f"  initial bound on log d : {_dec15(report.trace.B0)}")
    for i, s in enumerate(report.trace.steps, start=1):
        print(f"  step {i}: log d < {_dec15(s.B2)}   (delta = {_dec15(s.delta)})")
    print(f"  final bound            : {_dec15(report.trace.final_bound)}")
    box = report.box
    print(f"  exponent caps          : a1,a2 <= {box.a12_cap}; b1,b2 <= {box.b12_cap}; "
          f"a3..a6 <= {box.a_cap}; b3..b6 <= {box.b_cap}")
    print(f"  candidate pairs        : {report.pair_count}")
    print(f"  triple candidates      : {report.triple_candidates}")
    print(f"  triples                : {len(report.triples)}")
    for t in report.triples:
        print(f"    ({t.a}, {t.b}, {t.c})")
    print(f"  quadruple candidates   : {report.quad_candidates}")
    print(f"  {len(report.quadruples)} quadruples")
    for w in report.quadruples:
        print(f"    NOTABLE: ({w.a}, {w.b}, {w.c}, {w.d})")
    print(f"  wall time              : {report.wall_ms} ms")


def _report_json(report: PairReport) -> dict:
    rec = record_from_report(report)
    rec["initial_bound"] = _dec15(report.trace.B0)
    rec["steps"] = [
        {"B_in": _dec15(s.B_in), "B1": _dec15(s.B1), "B2": _dec15(s.B2),
         "delta": _dec15(s.delta),
         "delta_exact": f"{s.delta.numerator}/{s.delta.denominator}"}
        for s in report.trace.steps
    ]
    rec["box"] = {"a12_cap": report.box.a12_cap, "b12_cap": report.box.b12_cap,
                  "a_cap": report.box.a_cap, "b_cap": report.box.b_cap,
                  "a4_cap": report.box.a4_cap, "b4_cap": report.box.b4_cap}
    return rec


def _cmd_pair(args) -> int:
    for r in (args.p, args.q):
        if not is_prime(r):
            print(f"error: {r} is not prime", file=sys.stderr)
            return EXIT_USAGE
    if args.p == args.q:
        print("error: p and q must be distinct", file=sys.stderr)
        return EXIT_USAGE
    start, cap = _policy_from_env()
    policy = PrecisionPolicy(start_bits=start, max_bits=cap)
    report = search_pair(PrimePair.of(args.p, args.q), policy)
    _print_report(report)
    if args.json:
        Path(args.json).write_text(json.dumps(_report_json(report), indent=2) + "\n",
                                   encoding="utf-8")
    return EXIT_NOTABLE if report.notable else EXIT_OK


def _cmd_sweep(args) -> int:
    if not is_prime(args.p) and not args.all_pairs:
        print(f"error: {args.p} is not prime", file=sys.stderr)
        return EXIT_USAGE
    start, cap = _policy_from_env()
    spec = SweepSpec(
        mode="all-pairs" if args.all_pairs else "fixed-p",
        p_fixed=None if args.all_pairs else args.p,
        q_min=args.q_min, q_max=args.q_max,
        skip_33=args.skip_33, workers=args.workers,
        checkpoint_path=Path(args.checkpoint) if args.checkpoint else None,
        start_bits=start, max_bits=cap,
        max_pairs=args.max,
    )
    summary = sweep(spec, force_restart=args.force_restart)
    print(f"pairs total      : {summary.pairs_total}")
    print(f"pairs resumed    : {summary.pairs_skipped}")
    print(f"pairs processed  : {summary.pairs_processed}")
    print(f"quadruples found : {summary.quadruples_found}")
    print(f"errors           : {summary.violations}")
    print(f"wall time        : {summary.wall_ms} ms")
    for (p, q) in summary.notable:
        print(f"NOTABLE pair ({p}, {q})")
    return EXIT_NOTABLE if summary.quadruples_found else EXIT_OK


def _cmd_oracle(args) -> int:
    for r in (args.p, args.q):
        if not is_prime(r):
            print(f"error: {r} is not prime", file=sys.stderr)
            return EXIT_USAGE
    pair = PrimePair.of(args.p, args.q)
    tuples = brute_force_oracle(pair, args.max, args.arity)
    for t in tuples:
        print("(" + ", ".join(str(x) for x in t) + ")")
    print(f"{len(tuples)} tuples of arity {args.arity} up to {args.max}")
    return EXIT_NOTABLE if args.arity == 4 and tuples else EXIT_OK


def _cmd_verify_lemmas(args) -> int:
    primes = primes_in_range(2, args.p_max)
    total = 0
    violations: list[str] = []
    quadruple_found = False
    for i in range(len(primes)):
        for j in range(i + 1, len(primes)):
            pair = PrimePair.of(primes[i], primes[j])
            triples = brute_force_oracle(pair, args.height, 3)
            quads = brute_force_oracle(pair, args.height, 4)
            quadruple_found = quadruple_found or bool(quads)
            found = lemma_predicates(pair, triples + quads)
            for v in found:
                violations.append(f"({primes[i]},{primes[j]}) {v}")
            total += len(triples) + len(quads)
    print(f"checked {total} tuples over {len(primes)} primes up to {args.p_max}")
    print(f"{len(violations)} violations")
    for v in violations:
        print("  " + v)
    if quadruple_found or violations:
        return EXIT_NOTABLE
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        records = load_checkpoint(Path(args.checkpoint))
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    done = [r for r in records.values() if r.get("status") == "done"]
    errors = [r for r in records.values() if r.get("status") == "error"]
    quads = [(r["p"], r["q"], tuple(w)) for r in done for w in r.get("quadruples", [])]
    agg = {
        "v": SCHEMA_VERSION,
        "pairs": len(records),
        "done": len(done),
        "error": len(errors),
        "triples": sum(len(r.get("triples", [])) for r in done),
        "quadruples": [list(q) for q in quads],
        "ms": sum(r.get("ms", 0) for r in records.values()),
    }
    print(f"{'p':>10} {'q':>10} {'status':>7} {'triples':>8} {'quads':>6} {'ms':>8}")
    for (p, q) in sorted(records):
        r = records[(p, q)]
        print(f"{p:>10} {q:>10} {r['status']:>7} "
              f"{len(r.get('triples', [])):>8} {len(r.get('quadruples', [])):>6} "
              f"{r.get('ms', 0):>8}")
    print(json.dumps(agg, sort_keys=True))
    return EXIT_NOTABLE if quads else EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="sqsearch",
                     description="Search for S-Diophantine quadruples over {p, q}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("pair", help="run the full pipeline for one prime pair")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--json", type=str, default=None,
                    help="also write the report as JSON to this path")
    sp.set_defaults(func=_cmd_pair)

    sp = sub.add_parser("sweep", help="sweep a range of prime pairs")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q-min", type=int, required=True)
    sp.add_argument("--q-max", type=int, required=True)
    sp.add_argument("--all-pairs", action="store_true",
                    help="all odd prime pairs p < q in [q-min, q-max]")
    sp.add_argument("--max", type=int, default=None,
                    help="process at most this many pairs")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--checkpoint", type=str, default=None)
    sp.add_argument("--skip-33", action="store_true",
                    help="skip pairs with p = q = 3 (mod 4)")
    sp.add_argument("--force-restart", action="store_true",
                    help="discard an existing checkpoint")
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("oracle", help="brute-force tuple enumeration by value")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--arity", type=int, choices=(2, 3, 4), required=True)
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("verify-lemmas",
                        help="check the structural lemmas on oracle output")
    sp.add_argument("--p-max", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.set_defaults(func=_cmd_verify_lemmas)

    sp = sub.add_parser("report", help="summarize a checkpoint file")
    sp.add_argument("--checkpoint", type=str, required=True)
    sp.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not getattr(args, "func", None):
        parser.print_help()
        return EXIT_USAGE
    try:
        return args.func(args)
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
