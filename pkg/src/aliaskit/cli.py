"""Command-line surface: generate, build, sample, verify, bench, convert.

Counts accept scientific notation ("--n 1e7").  ``verify`` exits 0 only when
every check passes, 1 on a failed check, and 2 when an input cannot be read
or parsed, so it can gate CI jobs.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .backend import HAVE_NUMBA, active_backend
from .bench import BenchConfig, ConfigError, bench_run, rows_to_csv
from .io import FormatError, load_table, load_weights, save_table, save_weights
from .model import AliasTable, make_weight_set, validate_table
from .pack import psa_construct, psa_plus_construct
from .rng import RngStream
from .sample import sample_batch, sectioned_sample
from .seqbuild import vose_construct
from .stats import chi_square_test, frequency_counts
from .weightgen import gen_power_law, gen_uniform

__all__ = [
    "gen_uniform",
    "gen_power_law",
    "bench_run",
    "BenchConfig",
    "ConfigError",
    "main",
]


def _count(text: str) -> int:
    """Parse a count, accepting scientific notation like 1e7."""
    try:
        value = int(text)
    except ValueError:
        value = int(float(text))
        if value != float(text):
            raise argparse.ArgumentTypeError(f"{text!r} is not a whole number")
    return value


def _seed(text: str) -> int:
    return int(text, 0)


def _csv_list(choices):
    def parse(text: str):
        items = tuple(t.strip() for t in text.split(",") if t.strip())
        for item in items:
            if item not in choices:
                raise argparse.ArgumentTypeError(
                    f"{item!r} is not one of {', '.join(choices)}"
                )
        return items

    return parse


def _add_dist_flags(sp):
    sp.add_argument("--dist", choices=("uniform", "powerlaw"), default="uniform")
    sp.add_argument("--alpha", type=float, default=1.0,
                    help="power-law exponent (powerlaw only)")
    sp.add_argument("--n", type=_count, default=10**6)
    sp.add_argument("--seed", type=_seed, default=1)


def _make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aliaskit",
        description="Alias tables: construction, weighted sampling, verification.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a weights file")
    _add_dist_flags(g)
    g.add_argument("--out", required=True, help="output weights file")

    b = sub.add_parser("build", help="construct an alias table")
    b.add_argument("weights", nargs="?", help="weights file (omit to generate)")
    _add_dist_flags(b)
    b.add_argument("--method", choices=("vose", "psa", "psa-plus"), default="psa")
    b.add_argument("--splits", type=_count, default=64)
    b.add_argument("--workers", type=_count, default=1)
    b.add_argument("--chunked", action="store_true")
    b.add_argument("--chunk-capacity", type=_count, default=1024)
    b.add_argument("--out", help="output table file")

    s = sub.add_parser("sample", help="draw samples from a table file")
    s.add_argument("table", help="alias-table file")
    s.add_argument("--sampler", choices=("baseline", "sectioned"), default="baseline")
    s.add_argument("--samples", type=_count, default=10**6)
    s.add_argument("--section-size", type=_count, default=2**14)
    s.add_argument("--workers", type=_count, default=1)
    s.add_argument("--seed", type=_seed, default=1)
    s.add_argument("--out", help="write one item index per line")

    v = sub.add_parser("verify", help="validate a table (and its weights file)")
    v.add_argument("table", help="alias-table file")
    v.add_argument("weights", nargs="?", help="weights file the table was built from")
    v.add_argument("--samples", type=_count, default=10**6)
    v.add_argument("--section-size", type=_count, default=2**14)
    v.add_argument("--seed", type=_seed, default=1)

    be = sub.add_parser("bench", help="time construction and sampling, emit CSV")
    _add_dist_flags(be)
    be.add_argument("--method", type=_csv_list(("vose", "psa", "psa-plus")),
                    default=(), help="comma-separated construction methods")
    be.add_argument("--splits", type=_count, default=64)
    be.add_argument("--workers", type=_count, default=1)
    be.add_argument("--chunked", action="store_true")
    be.add_argument("--chunk-capacity", type=_count, default=1024)
    be.add_argument("--sampler", type=_csv_list(("baseline", "sectioned")),
                    default=(), help="comma-separated samplers")
    be.add_argument("--samples", type=_count, default=10**6)
    be.add_argument("--section-size", type=_count, default=2**14)
    be.add_argument("--reps", type=_count, default=5)
    be.add_argument("--warmup", type=_count, default=1)
    be.add_argument("--compare-backends", action="store_true",
                    help="run every measurement under both backends")
    be.add_argument("--csv", help="output CSV path (default: stdout)")

    c = sub.add_parser("convert", help="convert between weight/table formats")
    c.add_argument("input", help="weights file, table file, or text weights")
    c.add_argument("output", help=".wts for binary weights, anything else for text")
    return ap


def _load_or_gen_weights(args):
    if getattr(args, "weights", None):
        return load_weights(args.weights)
    r = RngStream(seed=args.seed)
    if args.dist == "uniform":
        return gen_uniform(args.n, r)
    return gen_power_law(args.n, args.alpha, r)


def _build_table(w, args) -> AliasTable:
    if args.method == "vose":
        return vose_construct(w)
    if args.method == "psa":
        return psa_construct(w, s=args.splits, workers=args.workers,
                             chunked=args.chunked,
                             chunk_capacity=args.chunk_capacity)
    return psa_plus_construct(w, s=args.splits, workers=args.workers)


def _cmd_gen(args) -> int:
    w = _load_or_gen_weights(args)
    save_weights(w, args.out)
    print(f"wrote {w.n} weights (total {w.total:.6g}) to {args.out}")
    return 0


def _cmd_build(args) -> int:
    w = _load_or_gen_weights(args)
    t = _build_table(w, args)
    rep = validate_table(t, w)
    if args.out:
        save_table(t, args.out)
        print(f"wrote table n={t.n} to {args.out}")
    print(f"built with {args.method}: n={t.n} total={t.total:.6g} "
          f"valid={rep.ok} worst_rel_error={rep.worst_rel_error:.3e}")
    return 0 if rep.ok else 1


def _cmd_sample(args) -> int:
    t = load_table(args.table)
    r = RngStream(seed=args.seed)
    if args.sampler == "sectioned":
        out = sectioned_sample(t, args.section_size, args.samples, r)
    else:
        out = sample_batch(t, args.samples, r, workers=args.workers)
    if args.out:
        np.savetxt(args.out, out, fmt="%d")
        print(f"wrote {out.size} samples to {args.out}")
    else:
        counts = frequency_counts(out, t.n)
        top = np.argsort(counts)[::-1][:5]
        summary = ", ".join(f"item {i+1}: {counts[i]}" for i in top)
        print(f"{out.size} samples drawn; most frequent: {summary}")
    return 0


def _implied_weights(t: AliasTable) -> np.ndarray:
    """Reconstruct item masses from the table via mass conservation."""
    w = t.tw.copy()
    contrib = t.average - t.tw
    others = t.alias - 1 != np.arange(t.n)
    np.add.at(w, t.alias[others] - 1, contrib[others])
    return w


def _cmd_verify(args) -> int:
    t = load_table(args.table)
    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line)
        if not ok:
            failures += 1

    eps = 1e-9 * t.average
    check("thresholds within [0, W/N]",
          bool(np.all(t.tw >= 0) and np.all(t.tw <= t.average + eps)))
    check("alias indices within 1..N",
          bool(t.n == 0 or (t.alias.min() >= 1 and t.alias.max() <= t.n)))
    if args.weights:
        w = load_weights(args.weights)
        if w.n != t.n:
            print(f"FAIL  weights file has {w.n} items, table has {t.n}")
            return 1
        rep = validate_table(t, w)
        check("per-item mass conservation at 1e-9", rep.ok,
              f"worst_rel_error={rep.worst_rel_error:.3e}")
        probs = w.weights / w.total
    else:
        iw = _implied_weights(t)
        total = float(iw.sum())
        check("implied masses positive", bool(total > 0 and np.all(iw >= 0)))
        probs = iw / total
    for sampler in ("baseline", "sectioned"):
        r = RngStream(seed=args.seed, stream=3)
        if sampler == "sectioned":
            s = sectioned_sample(t, args.section_size, args.samples, r)
        else:
            s = sample_batch(t, args.samples, r)
        stat, df, ok = chi_square_test(frequency_counts(s, t.n), probs, 0.001)
        check(f"chi-square {sampler} sampler at 0.001", ok,
              f"stat={stat:.2f} df={df}")
    return 0 if failures == 0 else 1


def _cmd_bench(args) -> int:
    cfg = BenchConfig(
        n=args.n, dist=args.dist, alpha=args.alpha,
        methods=tuple(args.method), splits=args.splits, workers=args.workers,
        chunked=args.chunked, chunk_capacity=args.chunk_capacity,
        samplers=tuple(args.sampler), samples=args.samples,
        section_size=args.section_size, seed=args.seed,
        repetitions=args.reps, warmup=args.warmup,
        compare_backends=args.compare_backends,
    )
    rows = bench_run(cfg)
    text = rows_to_csv(rows)
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(text)
        print(f"wrote {len(rows)} rows to {args.csv}")
    else:
        sys.stdout.write(text)
    med = [r for r in rows if r["repetition"] == "median"]
    for r in med:
        print(f"# median {r['method']}: {r['wall_time_ns']/1e6:.3f} ms, "
              f"{r['throughput_per_s']:.3e}/s  [{r['param']}]", file=sys.stderr)
    return 0


def _read_any_weights(path):
    with open(path, "rb") as f:
        magic = f.read(4)
    if magic == b"ALT1":
        t = load_table(path)
        return _implied_weights(t)
    if magic == b"WTS1":
        return load_weights(path).weights
    return np.loadtxt(path, dtype=np.float64, ndmin=1)


def _cmd_convert(args) -> int:
    w = _read_any_weights(args.input)
    if args.output.endswith(".wts"):
        save_weights(make_weight_set(w), args.output)
    else:
        np.savetxt(args.output, w)
    print(f"wrote {w.size} weights to {args.output}")
    return 0


_DISPATCH = {
    "gen": _cmd_gen,
    "build": _cmd_build,
    "sample": _cmd_sample,
    "verify": _cmd_verify,
    "bench": _cmd_bench,
    "convert": _cmd_convert,
}


def main(argv=None) -> int:
    args = _make_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
