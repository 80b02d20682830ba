"""Wall-clock benchmarks for construction and sampling, emitted as CSV rows.

Every row carries the full configuration in its ``param`` field
(semicolon-joined key=value pairs), so a CSV file is self-describing.  After
the per-repetition rows of a configuration, one summary row with
``repetition=median`` reports the median wall time and throughput.
Construction throughput is items per second; sampling throughput is samples
per second.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .backend import HAVE_NUMBA, active_backend, set_backend
from .model import WeightSet
from .pack import psa_construct, psa_plus_construct
from .rng import RngStream
from .sample import sample_batch, sectioned_sample
from .seqbuild import vose_construct
from .weightgen import gen_power_law, gen_uniform

CSV_HEADER = "method,n,s,workers,param,repetition,wall_time_ns,throughput_per_s"

_METHODS = ("vose", "psa", "psa-plus")
_SAMPLERS = ("baseline", "sectioned")
_DISTS = ("uniform", "powerlaw")


class ConfigError(ValueError):
    pass


@dataclass
class BenchConfig:
    n: int = 10**6
    dist: str = "uniform"
    alpha: float = 1.0
    methods: tuple = ()
    splits: int = 64
    workers: int = 1
    chunked: bool = False
    chunk_capacity: int = 1024
    samplers: tuple = ()
    samples: int = 10**6
    section_size: int = 2**14
    seed: int = 1
    repetitions: int = 5
    warmup: int = 1
    compare_backends: bool = False

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.dist not in _DISTS:
            raise ConfigError(f"unknown distribution {self.dist!r}")
        for m in self.methods:
            if m not in _METHODS:
                raise ConfigError(f"unknown method {m!r}")
        for s in self.samplers:
            if s not in _SAMPLERS:
                raise ConfigError(f"unknown sampler {s!r}")
        if not self.methods and not self.samplers:
            raise ConfigError("nothing to benchmark: no methods and no samplers")
        if self.repetitions < 5:
            raise ConfigError("medians need at least 5 repetitions")
        if self.warmup < 0:
            raise ConfigError("warmup must be non-negative")
        if self.splits < 1 or self.workers < 1:
            raise ConfigError("splits and workers must be positive")
        if self.samples < 1 or self.section_size < 1:
            raise ConfigError("samples and section_size must be positive")
        if self.chunk_capacity < 2:
            raise ConfigError("chunk_capacity must be at least 2")


def _param_str(pairs: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in pairs.items())


def _emit(rows, method, n, s, workers, params, times, work):
    for rep, dt in enumerate(times):
        rows.append(
            {
                "method": method,
                "n": n,
                "s": s,
                "workers": workers,
                "param": _param_str(params),
                "repetition": rep,
                "wall_time_ns": dt,
                "throughput_per_s": work / (dt * 1e-9),
            }
        )
    med = statistics.median(times)
    rows.append(
        {
            "method": method,
            "n": n,
            "s": s,
            "workers": workers,
            "param": _param_str(params),
            "repetition": "median",
            "wall_time_ns": med,
            "throughput_per_s": work / (med * 1e-9),
        }
    )


def _time_reps(fn, reps, warmup):
    for _ in range(warmup):
        fn()
    out = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        out.append(time.perf_counter_ns() - t0)
    return out


def _gen(cfg: BenchConfig) -> WeightSet:
    r = RngStream(seed=cfg.seed)
    if cfg.dist == "uniform":
        return gen_uniform(cfg.n, r)
    return gen_power_law(cfg.n, cfg.alpha, r)


def _constructor(cfg: BenchConfig, method: str):
    if method == "vose":
        return vose_construct
    if method == "psa":
        return lambda w: psa_construct(
            w, s=cfg.splits, workers=cfg.workers,
            chunked=cfg.chunked, chunk_capacity=cfg.chunk_capacity,
        )
    return lambda w: psa_plus_construct(w, s=cfg.splits, workers=cfg.workers)


def bench_run(cfg: BenchConfig) -> list[dict]:
    """Run the configured benchmarks and return CSV-ready row dicts."""
    cfg.validate()
    backends = ["numba", "numpy"] if cfg.compare_backends else [active_backend()]
    if cfg.compare_backends and not HAVE_NUMBA:
        backends = ["numpy"]
    rows: list[dict] = []
    base = {"dist": cfg.dist, "seed": cfg.seed}
    if cfg.dist == "powerlaw":
        base["alpha"] = cfg.alpha
    prev = active_backend()
    try:
        for bk in backends:
            set_backend(bk)
            w = _gen(cfg)
            params = dict(base, backend=bk)
            for method in cfg.methods:
                p = dict(params)
                if method != "vose":
                    p["chunked"] = int(cfg.chunked)
                    if cfg.chunked:
                        p["chunk_capacity"] = cfg.chunk_capacity
                times = _time_reps(
                    lambda: _constructor(cfg, method)(w),
                    cfg.repetitions, cfg.warmup,
                )
                s = cfg.splits if method != "vose" else 1
                wk = cfg.workers if method != "vose" else 1
                _emit(rows, method, cfg.n, s, wk, p, times, cfg.n)
            if cfg.samplers:
                t = vose_construct(w)
                for sampler in cfg.samplers:
                    p = dict(params, samples=cfg.samples)
                    if sampler == "sectioned":
                        p["section_size"] = cfg.section_size
                        fn = lambda: sectioned_sample(
                            t, cfg.section_size, cfg.samples,
                            RngStream(seed=cfg.seed, stream=7),
                        )
                        s = cfg.section_size
                    else:
                        fn = lambda: sample_batch(
                            t, cfg.samples,
                            RngStream(seed=cfg.seed, stream=7),
                            workers=cfg.workers,
                        )
                        s = 0
                    times = _time_reps(fn, cfg.repetitions, cfg.warmup)
                    _emit(rows, sampler, cfg.n, s, cfg.workers, p, times, cfg.samples)
    finally:
        set_backend(prev)
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r['method']},{r['n']},{r['s']},{r['workers']},"
            f"{r['param']},{r['repetition']},{r['wall_time_ns']},"
            f"{r['throughput_per_s']}"
        )
    return "\n".join(lines) + "\n"
