"""Discrete-event simulation of the queue and of the free process.

Each replication draws from its own stream
``default_rng(SeedSequence(seed, spawn_key=(rep,)))``, so a replication's
path depends only on ``(seed, rep)`` and results are reduced in replication
order whatever the number of workers.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .model import ModelError, QueueModel
from .queueing import SystemState

__all__ = ["SimConfig", "SimEstimate", "SimResult", "ESTIMANDS", "simulate", "replication_rng",
           "write_histogram_csv", "write_summary_json"]

ESTIMANDS = ("busy_period", "first_loss_time", "first_loss_count", "occupancy_at_t",
             "time_average_occupancy", "exit_side")
_EVENT_CAP = 50_000_000
_BLOCK0, _BLOCK_MAX = 8, 1024


@dataclass(frozen=True)
class SimConfig:
    model: QueueModel
    initial: SystemState = SystemState(0)
    horizon: float = 1.0
    replications: int = 1000
    seed: int = 0
    estimands: tuple = ("busy_period",)
    exit_bounds: tuple | None = None    # (r, k) for exit_side: free process leaves [-r, k]
    workers: int = 1

    def __post_init__(self):
        if int(self.replications) != self.replications or self.replications < 1:
            raise ModelError("replications must be an integer >= 1")
        if not self.horizon > 0:
            raise ModelError("horizon must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ModelError("seed must be a 64-bit nonnegative integer")
        est = tuple(self.estimands)
        bad = [e for e in est if e not in ESTIMANDS]
        if bad or not est:
            raise ModelError(f"unknown estimand(s) {bad}; choose from {list(ESTIMANDS)}")
        object.__setattr__(self, "estimands", est)
        init = self.initial if isinstance(self.initial, SystemState) else SystemState(*self.initial)
        object.__setattr__(self, "initial", init.check(self.model))
        if "exit_side" in est:
            if self.exit_bounds is None:
                raise ModelError("exit_side needs exit_bounds=(r, k)")
            r, k = self.exit_bounds
            if r < 0 or k < 0:
                raise ModelError("exit_bounds must be nonnegative")


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    variance: float
    half_width_99: float
    n: int

    def covers(self, value: float) -> bool:
        return abs(value - self.mean) <= self.half_width_99

    @classmethod
    def from_samples(cls, x) -> "SimEstimate":
        x = np.asarray(x, dtype=float)
        n = len(x)
        mean = float(np.mean(x))
        var = float(np.var(x, ddof=1)) if n > 1 else 0.0
        hw = float(stats.t.ppf(0.995, n - 1) * math.sqrt(var / n)) if n > 1 else math.inf
        return cls(mean, var, hw, n)


@dataclass
class SimResult:
    config: SimConfig
    estimates: dict = field(default_factory=dict)       # estimand -> SimEstimate
    by_level: dict = field(default_factory=dict)        # estimand -> list[SimEstimate], one per level or count
    histograms: dict = field(default_factory=dict)      # estimand -> counts per level or count

    def summary(self) -> dict:
        out = {"replications": self.config.replications, "seed": int(self.config.seed),
               "horizon": self.config.horizon, "estimates": {}}
        for k, e in self.estimates.items():
            out["estimates"][k] = {"mean": e.mean, "variance": e.variance,
                                   "half_width_99": e.half_width_99, "n": e.n}
        for k, lst in self.by_level.items():
            out["estimates"][k + "_by_level"] = [{"mean": e.mean, "half_width_99": e.half_width_99}
                                                 for e in lst]
        return out


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(rep),)))


class _Draws:
    """Block-buffered draws from one stream."""

    def __init__(self, model: QueueModel, rng: np.random.Generator):
        self.m, self.rng = model, rng
        self._buf = {}

    def _next(self, key, gen):
        buf = self._buf.get(key)
        if buf is None or buf[1] >= len(buf[0]):
            # short paths are common, so blocks start small and double
            n = _BLOCK0 if buf is None else min(2 * len(buf[0]), _BLOCK_MAX)
            buf = [gen(n), 0]
            self._buf[key] = buf
        v = buf[0][buf[1]]
        buf[1] += 1
        return v

    def gap(self):
        return float(self._next("e", lambda n: self.rng.exponential(1.0 / self.m.mu, n)))

    def kappa(self):
        return int(self._next("k", lambda n: self.m.batch.sample(self.rng, n)))

    def delta(self):
        if self.m.lam == 0:
            return 1
        return int(self._next("d", lambda n: self.rng.geometric(1 - self.m.lam, n)))

    def eta(self):
        return float(self._next("h", lambda n: self.m.service.sample(self.rng, n)))

    def eta_residual(self, x):
        if x == 0:
            return self.eta()
        return float(self.m.service.sample_residual(x, self.rng))


def _queue_path(cfg: SimConfig, d: _Draws) -> dict:
    """One path of the queue until every requested estimand is resolved.

    ``busy_period`` is the busy period in progress at time 0, or the first
    one after time 0 when the system starts empty.
    """
    top = cfg.model.B + 1
    want = set(cfg.estimands)
    r = cfg.initial.r
    t = 0.0
    na = d.gap()
    nc = d.eta_residual(cfg.initial.x) if r else math.inf
    out = {}
    occ = np.zeros(top + 1) if "time_average_occupancy" in want else None
    busy_start = 0.0 if r else None
    need_busy = "busy_period" in want
    need_loss = bool(want & {"first_loss_time", "first_loss_count"})
    need_horizon = bool(want & {"occupancy_at_t", "time_average_occupancy"})
    for _ in range(_EVENT_CAP):
        nt = min(na, nc)
        if need_horizon and nt >= cfg.horizon:
            if occ is not None:
                occ[r] += cfg.horizon - t
                out["time_average_occupancy"] = occ / cfg.horizon
            out["occupancy_at_t"] = r
            need_horizon = False
        elif occ is not None and need_horizon:
            occ[r] += nt - t
        if not (need_busy or need_loss or need_horizon):
            return out
        t = nt
        if na <= nc:
            k = d.kappa()
            admitted = min(top - r, k)
            if k > admitted and need_loss:
                out["first_loss_time"] = t
                out["first_loss_count"] = k - admitted
                need_loss = False
            if r == 0 and admitted:
                nc = t + d.eta()
                if busy_start is None:
                    busy_start = t
            r += admitted
            na = t + d.gap()
        else:
            r -= min(r, d.delta())
            if r:
                nc = t + d.eta()
            else:
                nc = math.inf
                if need_busy and busy_start is not None:
                    out["busy_period"] = t - busy_start
                    need_busy = False
        assert r > 0 or nc == math.inf   # empty system has no service in progress
    raise ModelError("event cap reached before all estimands were resolved")


def _exit_path(cfg: SimConfig, d: _Draws) -> int:
    """1 if the free process leaves ``[-r, k]`` upward, else 0."""
    lo, hi = cfg.exit_bounds
    D = 0
    na, nc = d.gap(), d.eta_residual(cfg.initial.x)
    for _ in range(_EVENT_CAP):
        if na <= nc:
            D += d.kappa()
            if D > hi:
                return 1
            na += d.gap()
        else:
            D -= d.delta()
            if D < -lo:
                return 0
            nc += d.eta()
    raise ModelError("event cap reached in exit simulation")


def _replication(args) -> dict:
    cfg, rep = args
    rng = replication_rng(cfg.seed, rep)
    d = _Draws(cfg.model, rng)
    out = {}
    if set(cfg.estimands) - {"exit_side"}:
        out = _queue_path(cfg, d)
    if "exit_side" in cfg.estimands:
        out["exit_side"] = _exit_path(cfg, d)
    return out


def _run(cfg: SimConfig, reps) -> list:
    jobs = [(cfg, rep) for rep in reps]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            return list(ex.map(_replication, jobs, chunksize=256))
    return [_replication(j) for j in jobs]


def simulate(config: SimConfig) -> SimResult:
    """Run the replications and reduce them in replication order."""
    rows = _run(config, range(config.replications))
    top = config.model.B + 1
    res = SimResult(config)
    for est in config.estimands:
        vals = [row[est] for row in rows]
        if est == "time_average_occupancy":
            arr = np.array(vals)
            res.by_level[est] = [SimEstimate.from_samples(arr[:, u]) for u in range(top + 1)]
            res.estimates[est] = SimEstimate.from_samples(arr @ np.arange(top + 1))
            res.histograms[est] = arr.mean(axis=0)
            continue
        arr = np.asarray(vals, dtype=float)
        res.estimates[est] = SimEstimate.from_samples(arr)
        if est in ("occupancy_at_t", "first_loss_count"):
            n = top + 1 if est == "occupancy_at_t" else int(arr.max()) + 1
            counts = np.bincount(arr.astype(int), minlength=n)
            res.histograms[est] = counts
            res.by_level[est] = [SimEstimate.from_samples(arr == u) for u in range(n)]
    return res


def write_histogram_csv(result: SimResult, estimand: str, path) -> None:
    if estimand not in result.histograms:
        raise ModelError(f"no histogram for estimand {estimand!r}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "count"])
        for u, c in enumerate(result.histograms[estimand]):
            w.writerow([u, c.item() if hasattr(c, "item") else c])


def write_summary_json(result: SimResult, path) -> None:
    Path(path).write_text(json.dumps(result.summary(), indent=2))
