"""Command-line entry point: ``python -m rocp {gen,bench,decompose,stream}``.

Exit status is 0 on success, 2 on a configuration error and 3 when a
solver hits non-finite values.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

import numpy as np

from .baselines import cp_als
from .bench import ALGORITHMS, REAL_DATA_SHAPES, BenchConfig, gen_synthetic, run_benchmark, split_stream
from .errors import DomainError, NumericalFailure
from .factor_model import fitness, reconstruct
from .online import init_state, rocp_update
from .randomized_init import cprand_decompose, default_sample_size
from .tensor_io import read_tensor, write_tensor

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _dims(text):
    try:
        dims = tuple(int(d) for d in text.replace("x", ",").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; use e.g. 30,30,100") from None
    if len(dims) < 2 or min(dims) < 1:
        raise argparse.ArgumentTypeError("need at least two positive extents")
    return dims


def _sir(text):
    return None if text.lower() == "none" else float(text)


def _samples(text):
    return "auto" if text == "auto" else int(text)


def cmd_gen(args):
    x, _ = gen_synthetic(args.dims, args.rank, args.sir_db, np.random.default_rng(args.seed))
    write_tensor(args.out, x)
    print(f"wrote {args.out} shape={x.shape}")


def cmd_bench(args):
    kwargs = dict(
        dims=args.dims, rank=args.rank, s=args.samples, init_fraction=args.init_frac,
        batch_size=args.batch, algorithms=tuple(args.algorithms.split(",")),
        trials=args.trials, seed=args.seed, sir_db=args.sir_db, same_data=args.same_data,
        input=args.input, output=args.csv,
    )
    if args.emulate:
        dims, batch, rank = REAL_DATA_SHAPES[args.emulate]
        kwargs.update(dims=dims, batch_size=batch, rank=rank)
    report = run_benchmark(BenchConfig(**kwargs))
    if args.updates_csv:
        report.write_update_series(args.updates_csv)
    print(report.summary())
    for algo, stats in report.aggregates().items():
        mean, std = stats["total_seconds"]
        print(f"{algo:<12} total {mean:.4f} ± {std:.4f} s")


def cmd_decompose(args):
    x = read_tensor(args.input)
    rng = np.random.default_rng(args.seed)
    t = time.perf_counter()
    if args.algo == "als":
        model = cp_als(x, args.rank, tol=args.tol, max_iters=args.max_iters, rng=rng)
    else:
        model = cprand_decompose(x, args.rank, tol=args.tol, max_iters=args.max_iters, rng=rng).model
    elapsed = time.perf_counter() - t
    print(f"fitness {fitness(x, reconstruct(model)):.6f}  seconds {elapsed:.4f}")


def cmd_stream(args):
    x = read_tensor(args.input)
    rng = np.random.default_rng(args.seed)
    s = default_sample_size(args.rank) if args.samples == "auto" else args.samples
    x_init, batches = split_stream(x, args.init_frac, args.batch)
    t = time.perf_counter()
    init = cprand_decompose(x_init, args.rank, s=s, rng=rng)
    state, model = init_state(init, s), init.model
    init_seconds = time.perf_counter() - t
    rows = []
    for k, b in enumerate(batches):
        t = time.perf_counter()
        model, state = rocp_update(state, model, b, rng)
        rows.append((k, b.shape[-1], time.perf_counter() - t))
    fit = fitness(x, reconstruct(model))
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(("update", "slices", "seconds"))
            w.writerows(rows)
    stream_seconds = sum(r[2] for r in rows)
    print(f"fitness {fit:.6f}  init {init_seconds:.4f} s  stream {stream_seconds:.4f} s  "
          f"updates {len(rows)}")


def build_parser():
    parser = argparse.ArgumentParser(prog="rocp", description="Randomized online CP decomposition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic low-rank tensor")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--sir-db", type=_sir, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="compare streaming and batch algorithms")
    p.add_argument("--dims", type=_dims, default=(30, 30, 30, 100))
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--samples", type=_samples, default="auto")
    p.add_argument("--init-frac", type=float, default=0.2)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sir-db", type=_sir, default=20.0)
    p.add_argument("--same-data", action="store_true", help="reuse one tensor for every trial")
    p.add_argument("--emulate", choices=sorted(REAL_DATA_SHAPES),
                   help="use the shape, batch size and rank of a video dataset")
    p.add_argument("--input", help="tensor file to stream instead of synthetic data")
    p.add_argument("--csv", help="per-trial report")
    p.add_argument("--updates-csv", help="per-update timing series")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("decompose", help="one-shot CP fit of a tensor file")
    p.add_argument("input")
    p.add_argument("--algo", choices=("als", "cprand"), default="als")
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("stream", help="run ROCP over a tensor file")
    p.add_argument("input")
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--samples", type=_samples, default="auto")
    p.add_argument("--init-frac", type=float, default=0.2)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="per-update timings")
    p.set_defaults(func=cmd_stream)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
