"""Genome decoding and network bookkeeping for the evaluator.

The evaluator is a separate process from the search engine and talks to it
only over the JSON protocol, so the block semantics are restated here:

- VGG : Conv3x3(cin->k), Conv3x3(k->k), ReLU, MaxPool2x2 (floor-halves h, w)
- MVGG: Conv3x3(cin->k), Conv3x3(k->k), ReLU (no pool)
- RES : Conv3x3(cin->k), BN, ReLU, Conv3x3(k->k), BN on the main path,
        Conv1x1(cin->k) shortcut, elementwise add, ReLU
- head: Flatten, FC(->256), ReLU, Dropout(0.5), FC(->classes), Softmax

All convs are stride 1 with "same" padding and a bias term.
"""

from __future__ import annotations

from dataclasses import dataclass

BLOCK_TYPES = ("VGG", "MVGG", "RES")

# dataset tag -> (input shape (c, h, w), number of classes)
DATASETS = {
    "cifar10": ((3, 32, 32), 10),
    "asl": ((1, 28, 28), 24),
    "ckplus": ((1, 48, 48), 7),
    "synthetic": ((3, 16, 16), 2),
}

HIDDEN_UNITS = 256


class GenomeError(ValueError):
    pass


@dataclass(frozen=True)
class Block:
    block_type: str
    kernels: int


def decode_genome(obj) -> tuple[Block, ...]:
    """Accepts the wire form {"blocks": [{"type": ..., "k": ...}, ...]}."""
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise GenomeError("genome must be an object with a 'blocks' list")
    blocks = []
    for entry in obj["blocks"]:
        try:
            btype, k = entry["type"], int(entry["k"])
        except (TypeError, KeyError) as exc:
            raise GenomeError(f"malformed block entry {entry!r}") from exc
        if btype not in BLOCK_TYPES:
            raise GenomeError(f"unknown block type {btype!r}")
        if k < 1:
            raise GenomeError(f"kernels must be >= 1, got {k}")
        blocks.append(Block(btype, k))
    if not blocks:
        raise GenomeError("genome has no blocks")
    return tuple(blocks)


def encode_genome(blocks: tuple[Block, ...]) -> str:
    """Canonical text form, e.g. "VGG/16,RES/32,MVGG/64"."""
    return ",".join(f"{b.block_type}/{b.kernels}" for b in blocks)


def count_params(blocks: tuple[Block, ...], input_shape: tuple[int, int, int],
                 num_classes: int) -> int:
    """Total trainable parameters of the expanded network."""
    c, h, w = input_shape
    total = 0
    for i, b in enumerate(blocks):
        if h < 1 or w < 1:
            raise GenomeError(f"spatial size collapsed before block {i}")
        k = b.kernels
        total += c * 9 * k + k      # first 3x3 conv
        total += k * 9 * k + k      # second 3x3 conv
        if b.block_type == "RES":
            total += 2 * (2 * k)    # two batch norms
            total += c * k + k      # 1x1 shortcut conv
        if b.block_type == "VGG":
            h, w = h // 2, w // 2
        c = k
    if h < 1 or w < 1:
        raise GenomeError("spatial size collapsed at the network head")
    flat = c * h * w
    total += flat * HIDDEN_UNITS + HIDDEN_UNITS
    total += HIDDEN_UNITS * num_classes + num_classes
    return total
