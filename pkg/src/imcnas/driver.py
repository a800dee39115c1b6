"""Search loop orchestration: suggest -> expand -> estimate -> evaluate ->
fitness -> observe -> log, with a resumable JSONL trial log and reporting.

Each trial draws its randomness from an rng seeded by (run seed, trial index),
so a killed run resumed from its log replays identically. A trial line is
appended (and flushed) before the next suggestion is made; any valid log
prefix is a valid resume state.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from .evaluation import (AccuracyResult, AccuracySource, EvalCache, EvaluatorTimeout,
                         ExternalEvaluator, ProtocolError, SurrogateParams,
                         surrogate_accuracy)
from .fitness import CostMetric, FitnessSpec, fitness_eval
from .imc import DEFAULT_HARDWARE, HardwareConfig, estimate_network
from .netir import HeadSpec, expand
from .space import (ArchGenome, SearchSpace, encode, parse_genome, validate)
from .tpe import TpeParams, tpe_suggest

SCATTER_HEADER = ["trial", "accuracy", "latency_ms", "energy_mj", "fitness",
                  "depth", "genome", "best"]


@dataclass(frozen=True)
class RunConfig:
    space: SearchSpace = SearchSpace()
    input_shape: tuple[int, int, int] = (3, 32, 32)
    head: HeadSpec = HeadSpec()
    hardware: HardwareConfig = DEFAULT_HARDWARE
    tpe: TpeParams = TpeParams()
    fitness: FitnessSpec = FitnessSpec()
    surrogate: SurrogateParams = SurrogateParams()
    evaluator: str = "surrogate"   # "surrogate" or "external:<command>"
    trials: int = 100
    seed: int = 0
    dataset_tag: str = "cifar10"
    epochs: int = 1
    relu_per_conv: bool = False
    parallel: int = 1              # concurrent evaluations during TPE startup
    evaluator_timeout_s: float = 3600.0
    out_dir: str = "runs/default"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        if not (self.evaluator == "surrogate" or self.evaluator.startswith("external:")):
            raise ValueError(f"unknown evaluator {self.evaluator!r}")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RunConfig":
        kw = {}
        if "space" in obj:
            kw["space"] = SearchSpace.from_json_obj(obj["space"])
        if "input_shape" in obj:
            kw["input_shape"] = tuple(obj["input_shape"])
        if "head" in obj:
            kw["head"] = HeadSpec.from_json_obj(obj["head"])
        if "hardware" in obj:
            kw["hardware"] = HardwareConfig.from_json_obj(obj["hardware"])
        if "tpe" in obj:
            kw["tpe"] = TpeParams.from_json_obj(obj["tpe"])
        if "fitness" in obj:
            kw["fitness"] = FitnessSpec.from_json_obj(obj["fitness"])
        if "surrogate" in obj:
            kw["surrogate"] = SurrogateParams.from_json_obj(obj["surrogate"])
        for name in ("evaluator", "trials", "seed", "dataset_tag", "epochs",
                     "relu_per_conv", "parallel", "evaluator_timeout_s", "out_dir"):
            if name in obj:
                kw[name] = obj[name]
        return cls(**kw)

    @classmethod
    def from_json_file(cls, path: str | Path) -> "RunConfig":
        with open(path) as f:
            return cls.from_json_obj(json.load(f))

    def to_json_obj(self) -> dict:
        return {
            "space": self.space.to_json_obj(),
            "input_shape": list(self.input_shape),
            "head": self.head.to_json_obj(),
            "hardware": self.hardware.to_json_obj(),
            "tpe": self.tpe.to_json_obj(),
            "fitness": self.fitness.to_json_obj(),
            "evaluator": self.evaluator,
            "trials": self.trials,
            "seed": self.seed,
            "dataset_tag": self.dataset_tag,
            "epochs": self.epochs,
            "relu_per_conv": self.relu_per_conv,
            "parallel": self.parallel,
            "evaluator_timeout_s": self.evaluator_timeout_s,
            "out_dir": self.out_dir,
        }


@dataclass(frozen=True)
class Trial:
    index: int
    genome: ArchGenome
    accuracy: float | None
    latency_ms: float | None
    energy_mj: float | None
    fitness: float | None     # None for failed trials (treated as -inf)
    suggestion_path: str      # "prior" | "model"
    source: str               # "surrogate" | "external" | "cache" | "" when failed
    status: str               # "ok" | "failed"
    wall_time_s: float
    timestamp: str            # ISO-8601 UTC
    seed: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def effective_fitness(self) -> float:
        return self.fitness if self.fitness is not None else -math.inf

    def to_json_line(self) -> str:
        obj = {
            "trial": self.index,
            "genome": encode(self.genome),
            "accuracy": self.accuracy,
            "latency_ms": self.latency_ms,
            "energy_mj": self.energy_mj,
            "fitness": self.fitness,
            "path": self.suggestion_path,
            "source": self.source,
            "status": self.status,
            "wall_time_s": self.wall_time_s,
            "timestamp": self.timestamp,
            "seed": self.seed,
        }
        if self.error is not None:
            obj["error"] = self.error
        return json.dumps(obj)

    @classmethod
    def from_json_obj(cls, obj: dict, space: SearchSpace | None = None) -> "Trial":
        return cls(
            index=obj["trial"],
            genome=parse_genome(obj["genome"], space),
            accuracy=obj["accuracy"],
            latency_ms=obj["latency_ms"],
            energy_mj=obj["energy_mj"],
            fitness=obj["fitness"],
            suggestion_path=obj["path"],
            source=obj["source"],
            status=obj["status"],
            wall_time_s=obj["wall_time_s"],
            timestamp=obj["timestamp"],
            seed=obj["seed"],
            error=obj.get("error"),
        )


def load_trial_log(path: str | Path, space: SearchSpace | None = None) -> list[Trial]:
    trials = []
    p = Path(path)
    if not p.exists():
        return trials
    with p.open() as f:
        for line in f:
            line = line.strip()
            if line:
                trials.append(Trial.from_json_obj(json.loads(line), space))
    return trials


class _Evaluator:
    """Accuracy provider selected by the config's evaluator string, fronted by
    the result cache."""

    def __init__(self, config: RunConfig, cache: EvalCache):
        self.config = config
        self.cache = cache
        self.external = None
        if config.evaluator.startswith("external:"):
            self.external = ExternalEvaluator(
                config.evaluator[len("external:"):],
                timeout_s=config.evaluator_timeout_s)

    def accuracy(self, genome: ArchGenome, ir, trial_seed: int) -> AccuracyResult:
        cached = self.cache.lookup(genome, self.config.dataset_tag, self.config.epochs)
        if cached is not None:
            return cached
        if self.external is not None:
            result = self.external.evaluate(genome, self.config.dataset_tag,
                                            trial_seed, self.config.epochs)
        else:
            result = surrogate_accuracy(genome, ir, self.config.surrogate)
        self.cache.record(genome, self.config.dataset_tag, self.config.epochs, result)
        return result

    def close(self):
        if self.external is not None:
            self.external.close()


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _trial_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def run_search(config: RunConfig, log_path: str | Path | None = None,
               clock: Callable[[], float] | None = None) -> list[Trial]:
    """Execute the search loop for ``config.trials`` iterations.

    If ``log_path`` (default ``<out_dir>/trials.jsonl``) already holds trials,
    they are replayed as observations and the loop continues from the recorded
    count. Evaluator failures are recorded as failed trials and the loop
    continues. ``clock`` is injectable for reproducible timestamps.
    """
    clock = clock or time.time
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = Path(log_path) if log_path is not None else out_dir / "trials.jsonl"
    log_path.parent.mkdir(parents=True, exist_ok=True)

    trials = load_trial_log(log_path, config.space)
    if len(trials) > config.trials:
        raise ValueError(f"log already holds {len(trials)} trials, budget is {config.trials}")
    history = [(t.genome, t.fitness) for t in trials if t.ok]

    cache = EvalCache(out_dir / "cache.jsonl")
    evaluator = _Evaluator(config, cache)
    try:
        with log_path.open("a") as log:

            def commit(trial: Trial):
                log.write(trial.to_json_line() + "\n")
                log.flush()
                trials.append(trial)
                if trial.ok:
                    history.append((trial.genome, trial.fitness))

            start_index = len(trials)
            startup_end = min(config.trials, config.tpe.n_startup)
            if config.parallel > 1 and start_index < startup_end:
                # prior-path trials are independent of the history: safe to
                # evaluate concurrently, then commit in index order
                from concurrent.futures import ThreadPoolExecutor
                indices = range(start_index, startup_end)
                with ThreadPoolExecutor(max_workers=config.parallel) as pool:
                    futures = [pool.submit(_run_one, config, evaluator, [],
                                           i, clock) for i in indices]
                    for fut in futures:
                        commit(fut.result())
                start_index = startup_end
            for index in range(start_index, config.trials):
                commit(_run_one(config, evaluator, history, index, clock))
    finally:
        evaluator.close()
    return trials


def _run_one(config: RunConfig, evaluator: _Evaluator,
             history: list[tuple[ArchGenome, float]], index: int,
             clock: Callable[[], float]) -> Trial:
    start = clock()
    rng = _trial_rng(config.seed, index)
    path = "prior" if (index < config.tpe.n_startup or not history) else "model"
    genome = tpe_suggest(history, config.space, config.tpe, rng,
                         input_shape=config.input_shape, n_observed=index)
    ir = expand(genome, config.input_shape, config.head, config.relu_per_conv)
    cost = estimate_network(ir, config.hardware)
    timestamp = datetime.fromtimestamp(start, tz=timezone.utc).isoformat()
    try:
        result = evaluator.accuracy(genome, ir, _trial_seed(config.seed, index))
        score = fitness_eval(result.accuracy, cost, config.fitness)
        return Trial(index, genome, result.accuracy, cost.latency_ms, cost.energy_mj,
                     score, path, result.source.value, "ok",
                     clock() - start, timestamp, config.seed)
    except (EvaluatorTimeout, ProtocolError) as exc:
        return Trial(index, genome, None, cost.latency_ms, cost.energy_mj,
                     None, path, "", "failed",
                     clock() - start, timestamp, config.seed, error=str(exc))


def recompute_fitness(trial: Trial, spec: FitnessSpec) -> float:
    """Fitness from a trial's stored fields; bit-equal to the logged value."""
    top = trial.accuracy ** spec.accuracy_exponent
    if spec.cost_metric is CostMetric.NONE:
        return top
    denom = trial.latency_ms if spec.cost_metric is CostMetric.LATENCY else trial.energy_mj
    return top / denom


def report_best(trials: list[Trial], k: int = 1) -> list[Trial]:
    """Top-k successful trials by fitness, ties broken by earlier index."""
    ok = [t for t in trials if t.ok]
    if not ok:
        raise ValueError("empty trial log: nothing to report")
    return sorted(ok, key=lambda t: (-t.fitness, t.index))[:k]


def render_best_table(best: list[Trial]) -> str:
    lines = [f"{'rank':>4}  {'trial':>5}  {'architecture':<48}  {'accuracy':>8}  "
             f"{'latency (ms)':>12}  {'energy (mJ)':>11}  {'fitness':>12}"]
    for rank, t in enumerate(best, 1):
        arch = " ".join(f"{b.block_type.value}/{b.kernels}" for b in t.genome.blocks)
        lines.append(f"{rank:>4}  {t.index:>5}  {arch:<48}  {t.accuracy * 100:>7.2f}%  "
                     f"{t.latency_ms:>12.4g}  {t.energy_mj:>11.4g}  {t.fitness:>12.6g}")
    return "\n".join(lines)


def export_scatter(trials: list[Trial]) -> str:
    """CSV of successful trials, one row each, the best flagged in the final
    column. Failed trials are skipped, counted in a trailing comment line."""
    ok = [t for t in trials if t.ok]
    best_index = min(ok, key=lambda t: (-t.fitness, t.index)).index if ok else None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCATTER_HEADER)
    for t in ok:
        writer.writerow([t.index, repr(t.accuracy), repr(t.latency_ms),
                         repr(t.energy_mj), repr(t.fitness), t.genome.depth,
                         encode(t.genome), str(t.index == best_index).lower()])
    failed = len(trials) - len(ok)
    if failed:
        buf.write(f"# skipped_failed={failed}\n")
    return buf.getvalue()


def parse_scatter(text: str) -> list[dict]:
    rows = []
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        rows.append({
            "trial": int(row["trial"]),
            "accuracy": float(row["accuracy"]),
            "latency_ms": float(row["latency_ms"]),
            "energy_mj": float(row["energy_mj"]),
            "fitness": float(row["fitness"]),
            "depth": int(row["depth"]),
            "genome": row["genome"],
            "best": row["best"] == "true",
        })
    return rows
