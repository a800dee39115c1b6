"""Request loop: one JSON object per input line, one JSON response per
request, flushed immediately; malformed requests get {"id": null, "error":
...} and the loop continues. Exits cleanly on EOF."""

from __future__ import annotations

import json
from typing import Callable, TextIO

from .genome import DATASETS, GenomeError, count_params, decode_genome, encode_genome
from .surrogate import stub_accuracy


def handle_request(line: str, evaluate: Callable) -> dict:
    try:
        request = json.loads(line)
    except json.JSONDecodeError:
        return {"id": None, "error": "request is not valid JSON"}
    if not isinstance(request, dict):
        return {"id": None, "error": "request is not an object"}
    req_id = request.get("id")
    try:
        blocks = decode_genome(request.get("genome"))
        dataset = request.get("dataset")
        if dataset not in DATASETS:
            raise GenomeError(f"unknown dataset tag {dataset!r}")
        seed = int(request.get("seed", 0))
        epochs = int(request.get("budget", {}).get("epochs", 1))
        if epochs < 0:
            raise GenomeError("epochs budget must be >= 0")
        accuracy, meta = evaluate(blocks, dataset, seed, epochs)
    except (GenomeError, ValueError, TypeError, AttributeError) as exc:
        return {"id": req_id, "error": str(exc)}
    except (MemoryError, RuntimeError) as exc:  # e.g. torch out-of-memory
        return {"id": req_id, "error": f"evaluation failed: {exc}"}
    return {"id": req_id, "accuracy": accuracy, "meta": meta}


def stub_evaluate(blocks, dataset, seed, epochs):
    shape, classes = DATASETS[dataset]
    params = count_params(blocks, shape, classes)
    return stub_accuracy(encode_genome(blocks), params), {"mode": "stub",
                                                          "params": params}


def serve_protocol(stdin: TextIO, stdout: TextIO, evaluate: Callable) -> None:
    for line in stdin:
        if not line.strip():
            continue
        response = handle_request(line, evaluate)
        stdout.write(json.dumps(response) + "\n")
        stdout.flush()
