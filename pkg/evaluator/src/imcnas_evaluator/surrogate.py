"""Stub accuracy: the same deterministic saturating-curve-plus-jitter formula
the search engine uses internally, so a stub-mode run is comparable
bit-for-bit with a surrogate-mode run."""

from __future__ import annotations

import hashlib
import math

A_MAX = 0.95
A_MIN = 0.40
TAU = 5e5
JITTER_AMP = 0.01
SALT = 0


def jitter(genome_text: str, salt: int = SALT, amp: float = JITTER_AMP) -> float:
    digest = hashlib.sha256(f"{genome_text}|{salt}".encode("utf-8")).digest()
    u = int.from_bytes(digest[:8], "big") / 2 ** 64
    return (2.0 * u - 1.0) * amp


def stub_accuracy(genome_text: str, total_params: int) -> float:
    base = A_MAX - (A_MAX - A_MIN) * math.exp(-total_params / TAU)
    return min(1.0, max(0.0, base + jitter(genome_text)))
