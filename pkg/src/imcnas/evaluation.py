"""Accuracy providers: deterministic surrogate, external-evaluator client over
line-delimited JSON on a child process's stdin/stdout, and an exact-match
result cache keyed by genome hash + dataset + budget."""

from __future__ import annotations

import json
import hashlib
import math
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .netir import NetworkIR
from .space import ArchGenome, encode


class AccuracySource(Enum):
    SURROGATE = "surrogate"
    EXTERNAL = "external"
    CACHE = "cache"


@dataclass(frozen=True)
class AccuracyResult:
    accuracy: float
    source: AccuracySource
    metadata: str = ""

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0):
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")


@dataclass(frozen=True)
class SurrogateParams:
    a_max: float = 0.95
    a_min: float = 0.40
    tau: float = 5e5       # parameter-count scale
    jitter_amp: float = 0.01
    salt: int = 0

    def __post_init__(self):
        if self.a_min >= self.a_max:
            raise ValueError("a_min must be < a_max")
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.jitter_amp < 0:
            raise ValueError("jitter_amp must be >= 0")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SurrogateParams":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})


def surrogate_jitter(genome_text: str, salt: int, amp: float) -> float:
    """Deterministic jitter in [-amp, amp] from a hash of (genome text, salt)."""
    digest = hashlib.sha256(f"{genome_text}|{salt}".encode("utf-8")).digest()
    u = int.from_bytes(digest[:8], "big") / 2 ** 64  # [0, 1)
    return (2.0 * u - 1.0) * amp


def surrogate_accuracy(genome: ArchGenome, ir: NetworkIR,
                       p: SurrogateParams = SurrogateParams()) -> AccuracyResult:
    """Saturating curve in total parameter count plus per-genome jitter.

    Deterministic; bounded in [0, 1]; pre-jitter strictly increasing in
    total_params.
    """
    base = p.a_max - (p.a_max - p.a_min) * math.exp(-ir.total_params / p.tau)
    jitter = surrogate_jitter(encode(genome), p.salt, p.jitter_amp)
    acc = min(1.0, max(0.0, base + jitter))
    return AccuracyResult(acc, AccuracySource.SURROGATE, "surrogate")


class ProtocolError(RuntimeError):
    def __init__(self, message: str, raw_line: str | None = None):
        super().__init__(message if raw_line is None else f"{message}: {raw_line!r}")
        self.raw_line = raw_line


class EvaluatorTimeout(RuntimeError):
    pass


class ExternalEvaluator:
    """Client for a child-process evaluator speaking one JSON object per line.

    Requests are strictly sequential per process; an internal lock serializes
    callers. The child is expected to answer every request with a line whose
    ``id`` matches.
    """

    def __init__(self, command: str, timeout_s: float = 3600.0):
        self.command = command
        self.timeout_s = timeout_s
        self._proc = subprocess.Popen(
            shlex.split(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, bufsize=1)
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._next_id = 0
        self._lock = threading.Lock()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def evaluate(self, genome: ArchGenome, dataset_tag: str, seed: int,
                 epochs: int) -> AccuracyResult:
        with self._lock:
            req_id = self._next_id
            self._next_id += 1
            request = {"id": req_id, "genome": genome.to_json_obj(),
                       "dataset": dataset_tag, "seed": seed,
                       "budget": {"epochs": epochs}}
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
            try:
                line = self._lines.get(timeout=self.timeout_s)
            except queue.Empty:
                raise EvaluatorTimeout(
                    f"no response within {self.timeout_s} s") from None
            if line is None:
                raise ProtocolError("evaluator closed its output stream")
            try:
                response = json.loads(line)
            except json.JSONDecodeError:
                raise ProtocolError("response is not valid JSON", line) from None
            if not isinstance(response, dict):
                raise ProtocolError("response is not an object", line)
            if "error" in response:
                raise ProtocolError(f"evaluator error: {response['error']}", line)
            if response.get("id") != req_id:
                raise ProtocolError(
                    f"id mismatch: expected {req_id}, got {response.get('id')}", line)
            acc = response.get("accuracy")
            if not isinstance(acc, (int, float)) or not (0.0 <= acc <= 1.0):
                raise ProtocolError(f"accuracy {acc!r} outside [0, 1]", line)
            meta = json.dumps(response["meta"]) if "meta" in response else ""
            return AccuracyResult(float(acc), AccuracySource.EXTERNAL, meta)

    def close(self):
        if self._proc.stdin and not self._proc.stdin.closed:
            self._proc.stdin.close()
        self._proc.wait(timeout=30)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class EvalCache:
    """Exact-match memoization of successful evaluations, optionally persisted
    as JSONL alongside the trial log. Failed trials are never cached."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._entries: dict[str, float] = {}
        if self._path is not None and self._path.exists():
            with self._path.open() as f:
                for line in f:
                    obj = json.loads(line)
                    self._entries[obj["key"]] = obj["accuracy"]

    @staticmethod
    def key(genome: ArchGenome, dataset_tag: str, epochs: int) -> str:
        return f"{genome.stable_hash()}:{dataset_tag}:{epochs}"

    def lookup(self, genome: ArchGenome, dataset_tag: str, epochs: int) -> AccuracyResult | None:
        acc = self._entries.get(self.key(genome, dataset_tag, epochs))
        if acc is None:
            return None
        return AccuracyResult(acc, AccuracySource.CACHE, "cache")

    def record(self, genome: ArchGenome, dataset_tag: str, epochs: int,
               result: AccuracyResult) -> None:
        k = self.key(genome, dataset_tag, epochs)
        if k in self._entries:
            return
        self._entries[k] = result.accuracy
        if self._path is not None:
            with self._path.open("a") as f:
                f.write(json.dumps({"key": k, "accuracy": result.accuracy}) + "\n")
