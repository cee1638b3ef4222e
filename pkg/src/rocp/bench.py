"""Synthetic streams and the four-way benchmark (ROCP, full online, batch cold/hot)."""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .baselines import batch_cold, batch_hot, cp_als, online_full_init, online_full_update
from .errors import DomainError
from .factor_model import KruskalModel, fitness, reconstruct
from .online import init_state, rocp_update
from .randomized_init import cprand_decompose, default_sample_size
from .tensor_core import as_tensor, frobenius_norm
from .tensor_io import read_tensor

__all__ = [
    "ALGORITHMS",
    "DEFAULT_TOLERANCES",
    "REAL_DATA_SHAPES",
    "BenchConfig",
    "TrialResult",
    "BenchReport",
    "gen_synthetic",
    "split_stream",
    "run_trial",
    "run_benchmark",
    "shape_emulation_config",
]

ALGORITHMS = ("rocp", "online_full", "batch_cold", "batch_hot")

#: stopping rules per algorithm: (tolerance, max sweeps)
DEFAULT_TOLERANCES = {
    "rocp": (1e-4, 100),
    "online_full": (1e-8, 100),
    "batch_cold": (1e-4, 50),
    "batch_hot": (1e-4, 50),
}

#: surveillance-video shapes emulated with synthetic data: dims, batch size, rank
REAL_DATA_SHAPES = {
    "CWSi": ((600, 800, 3, 31), 1, 5),
    "Camera1": ((288, 384, 3, 500), 10, 5),
    "Camera2": ((288, 384, 3, 500), 10, 5),
    "Indoor": ((1040, 1392, 3, 100), 10, 6),
    "Outdoor": ((1040, 1392, 3, 100), 10, 7),
    "Seq1": ((480, 640, 3, 221), 10, 5),
}


@dataclass
class BenchConfig:
    dims: tuple = (30, 30, 30, 100)
    rank: int = 5
    s: object = "auto"
    init_fraction: float = 0.2
    batch_size: int = 1
    algorithms: tuple = ALGORITHMS
    trials: int = 10
    seed: int = 0
    sir_db: Optional[float] = 20.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    same_data: bool = False
    input: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.algorithms = tuple(self.algorithms)
        if not 0.0 < self.init_fraction < 1.0:
            raise DomainError(f"init_fraction must lie in (0, 1), got {self.init_fraction}")
        if self.batch_size < 1:
            raise DomainError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.rank < 1:
            raise DomainError(f"rank must be >= 1, got {self.rank}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise DomainError(f"unknown algorithms: {sorted(unknown)}")
        if self.s != "auto" and int(self.s) < 1:
            raise DomainError(f"s must be 'auto' or >= 1, got {self.s}")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

    @property
    def samples(self) -> int:
        return default_sample_size(self.rank) if self.s == "auto" else int(self.s)


def shape_emulation_config(name, **overrides) -> BenchConfig:
    """Config with the dims, batch size and rank of a named real dataset."""
    dims, batch, rank = REAL_DATA_SHAPES[name]
    return BenchConfig(**{"dims": dims, "batch_size": batch, "rank": rank, **overrides})


@dataclass
class TrialResult:
    trial: int
    algorithm: str
    fitness: float
    init_seconds: float
    stream_seconds: float
    updates: int
    slices: int
    update_seconds: list = field(default_factory=list, repr=False)

    @property
    def total_seconds(self) -> float:
        return self.init_seconds + self.stream_seconds

    @property
    def seconds_per_update(self) -> float:
        return self.stream_seconds / self.updates if self.updates else 0.0

    @property
    def seconds_per_slice(self) -> float:
        return self.stream_seconds / self.slices if self.slices else 0.0


CSV_COLUMNS = ("trial", "algorithm", "fitness", "init_seconds", "stream_seconds",
               "updates", "seconds_per_update", "seconds_per_slice")
_NUMERIC = ("fitness", "init_seconds", "stream_seconds", "updates",
            "seconds_per_update", "seconds_per_slice")


@dataclass
class BenchReport:
    config: BenchConfig
    rows: list

    def by_algorithm(self, algorithm) -> list:
        return [r for r in self.rows if r.algorithm == algorithm]

    def aggregates(self) -> dict:
        """Per algorithm, mean and sample standard deviation of every numeric column."""
        out = {}
        for algo in dict.fromkeys(r.algorithm for r in self.rows):
            rows = self.by_algorithm(algo)
            stats = {}
            for col in _NUMERIC + ("total_seconds",):
                vals = np.array([float(getattr(r, col)) for r in rows])
                stats[col] = (float(vals.mean()), float(vals.std(ddof=1)) if len(vals) > 1 else 0.0)
            out[algo] = stats
        return out

    def summary(self) -> str:
        """``algorithm: mean ± std`` of final fitness in percent, one line each."""
        lines = []
        for algo, stats in self.aggregates().items():
            mean, std = stats["fitness"]
            lines.append(f"{algo:<12} {100 * mean:.2f} ± {100 * std:.2f}")
        return "\n".join(lines)

    def write_csv(self, path):
        """One row per (trial, algorithm), then ``mean`` and ``std`` rows per algorithm."""
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(CSV_COLUMNS)
            for r in self.rows:
                w.writerow([r.trial, r.algorithm] + [repr(float(getattr(r, c))) for c in _NUMERIC])
            for algo, stats in self.aggregates().items():
                for k, label in enumerate(("mean", "std")):
                    w.writerow([label, algo] + [repr(stats[c][k]) for c in _NUMERIC])

    def write_update_series(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(("trial", "algorithm", "update", "seconds"))
            for r in self.rows:
                for k, t in enumerate(r.update_seconds):
                    w.writerow((r.trial, r.algorithm, k, repr(t)))


def gen_synthetic(dims, rank, sir_db=20.0, rng=None):
    """Random rank-``rank`` tensor plus Gaussian noise at a given SIR.

    Factors have standard normal entries.  The noise draw is rescaled so
    that ``10 log10(||signal||^2 / ||noise||^2)`` equals ``sir_db``;
    ``sir_db=None`` returns the noiseless signal.

    Returns
    -------
    x : ndarray
    truth : KruskalModel
    """
    if rank < 1:
        raise DomainError(f"rank must be >= 1, got {rank}")
    rng = np.random.default_rng(rng)
    truth = KruskalModel(tuple(rng.standard_normal((int(d), rank)) for d in dims))
    signal = reconstruct(truth)
    if sir_db is None:
        return signal, truth
    noise = np.asfortranarray(rng.standard_normal(signal.shape))
    noise *= frobenius_norm(signal) / (frobenius_norm(noise) * 10.0 ** (sir_db / 20.0))
    return signal + noise, truth


def split_stream(x, init_fraction=0.2, batch_size=1):
    """Leading ``floor(init_fraction * I_N)`` slabs, then batches along the last mode."""
    x = as_tensor(x)
    if batch_size < 1:
        raise DomainError(f"batch_size must be >= 1, got {batch_size}")
    t = x.shape[-1]
    t0 = math.floor(init_fraction * t)
    if t0 < 1:
        raise DomainError(f"init fraction {init_fraction} of {t} slabs leaves nothing to initialize")
    batches = [x[..., k:k + batch_size] for k in range(t0, t, batch_size)]
    return x[..., :t0], batches


def _run_rocp(x_init, batches, cfg, rng):
    tol, max_iters = cfg.tolerances["rocp"]
    s = cfg.samples
    t = time.perf_counter()
    init = cprand_decompose(x_init, cfg.rank, s=s, tol=tol, max_iters=max_iters, rng=rng)
    state = init_state(init, s)
    model = init.model
    init_seconds = time.perf_counter() - t
    series = []
    for b in batches:
        t = time.perf_counter()
        model, state = rocp_update(state, model, b, rng)
        series.append(time.perf_counter() - t)
    return model, init_seconds, series


def _run_online_full(x_init, batches, cfg, rng):
    tol, max_iters = cfg.tolerances["online_full"]
    t = time.perf_counter()
    model = cp_als(x_init, cfg.rank, tol=tol, max_iters=max_iters, rng=rng)
    state = online_full_init(x_init, model)
    init_seconds = time.perf_counter() - t
    series = []
    for b in batches:
        t = time.perf_counter()
        model, state = online_full_update(state, model, b)
        series.append(time.perf_counter() - t)
    return model, init_seconds, series


def _run_batch(x_init, batches, cfg, rng, hot):
    tol, max_iters = cfg.tolerances["batch_hot" if hot else "batch_cold"]
    t = time.perf_counter()
    model = batch_cold(x_init, cfg.rank, tol=tol, max_iters=max_iters, rng=rng)
    init_seconds = time.perf_counter() - t
    seen = x_init
    series = []
    for b in batches:
        t = time.perf_counter()
        seen = np.concatenate([seen, b], axis=-1)
        if hot:
            model = batch_hot(seen, cfg.rank, model, tol=tol, max_iters=max_iters)
        else:
            model = batch_cold(seen, cfg.rank, tol=tol, max_iters=max_iters, rng=rng)
        series.append(time.perf_counter() - t)
    return model, init_seconds, series


_RUNNERS = {
    "rocp": _run_rocp,
    "online_full": _run_online_full,
    "batch_cold": lambda *a: _run_batch(*a, hot=False),
    "batch_hot": lambda *a: _run_batch(*a, hot=True),
}


def run_trial(cfg: BenchConfig, trial: int, x=None) -> list:
    """Run every configured algorithm on one stream; returns one TrialResult each.

    Data and per-algorithm generators are derived from ``cfg.seed`` and the
    trial number only, so results do not depend on which other algorithms
    or trials are run.  With ``cfg.same_data`` every trial sees the same
    tensor and only the algorithms' own randomness varies.
    """
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(trial,))
    data_seq, *algo_seqs = seq.spawn(1 + len(ALGORITHMS))
    if x is None:
        if cfg.same_data:
            data_seq = np.random.SeedSequence(cfg.seed)
        x, _ = gen_synthetic(cfg.dims, cfg.rank, cfg.sir_db, np.random.default_rng(data_seq))
    x_init, batches = split_stream(x, cfg.init_fraction, cfg.batch_size)
    results = []
    for algo in cfg.algorithms:
        rng = np.random.default_rng(algo_seqs[ALGORITHMS.index(algo)])
        model, init_seconds, series = _RUNNERS[algo](x_init, batches, cfg, rng)
        results.append(TrialResult(
            trial=trial,
            algorithm=algo,
            fitness=fitness(x, reconstruct(model)),
            init_seconds=init_seconds,
            stream_seconds=float(sum(series)),
            updates=len(series),
            slices=sum(b.shape[-1] for b in batches),
            update_seconds=series,
        ))
    return results


def run_benchmark(cfg: BenchConfig) -> BenchReport:
    """Run ``cfg.trials`` trials and collect a report (written to ``cfg.output`` if set).

    Trials run concurrently when the ``ROCP_THREADS`` environment variable
    is above 1; timings are then contended and only fitness is comparable.
    """
    x = None
    if cfg.input is not None:
        x = read_tensor(cfg.input)
        cfg.dims = x.shape
    threads = max(1, int(os.environ.get("ROCP_THREADS", "1")))
    if threads > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=min(threads, cfg.trials)) as pool:
            per_trial = list(pool.map(lambda k: run_trial(cfg, k, x), range(cfg.trials)))
    else:
        per_trial = [run_trial(cfg, k, x) for k in range(cfg.trials)]
    report = BenchReport(cfg, [r for rows in per_trial for r in rows])
    if cfg.output is not None:
        report.write_csv(cfg.output)
    return report
