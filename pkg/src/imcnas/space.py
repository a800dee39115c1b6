"""Block-structured CNN search space: genome encoding, sampling, validity, counting.

A genome is an ordered list of (block type, kernel count) pairs. The canonical
text form is comma-separated ``TYPE/k`` tokens, e.g. ``"VGG/16,RES/32"``; the
JSON form is ``{"blocks": [{"type": "VGG", "k": 16}, ...]}``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class BlockType(Enum):
    VGG = "VGG"    # two 3x3 convs + ReLU + 2x2 max-pool
    MVGG = "MVGG"  # two 3x3 convs + ReLU, no pooling
    RES = "RES"    # residual pair with 1x1 shortcut


@dataclass(frozen=True)
class BlockSpec:
    block_type: BlockType
    kernels: int

    def __post_init__(self):
        if self.kernels < 1:
            raise ValueError(f"kernels must be positive, got {self.kernels}")


@dataclass(frozen=True)
class ArchGenome:
    blocks: tuple[BlockSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def encode(self) -> str:
        return encode(self)

    def to_json_obj(self) -> dict:
        return {"blocks": [{"type": b.block_type.value, "k": b.kernels} for b in self.blocks]}

    def stable_hash(self) -> str:
        """Hex digest of the canonical text form; stable across runs and platforms."""
        return hashlib.sha256(encode(self).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SearchSpace:
    depth_min: int = 3
    depth_max: int = 8
    allowed_types: tuple[BlockType, ...] = (BlockType.VGG, BlockType.MVGG, BlockType.RES)
    allowed_kernels: tuple[int, ...] = (16, 32, 64, 128, 256)

    def __post_init__(self):
        if self.depth_min < 1:
            raise ValueError("depth_min must be >= 1")
        if self.depth_max < self.depth_min:
            raise ValueError("depth_max must be >= depth_min")
        if not self.allowed_types or not self.allowed_kernels:
            raise ValueError("allowed_types and allowed_kernels must be non-empty")
        object.__setattr__(self, "allowed_types", tuple(self.allowed_types))
        object.__setattr__(self, "allowed_kernels", tuple(self.allowed_kernels))

    def contains(self, genome: ArchGenome) -> bool:
        """Membership check, spatial rule excluded."""
        if not (self.depth_min <= genome.depth <= self.depth_max):
            return False
        return all(
            b.block_type in self.allowed_types and b.kernels in self.allowed_kernels
            for b in genome.blocks
        )

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SearchSpace":
        kw = {}
        if "depth_min" in obj:
            kw["depth_min"] = int(obj["depth_min"])
        if "depth_max" in obj:
            kw["depth_max"] = int(obj["depth_max"])
        if "allowed_types" in obj:
            kw["allowed_types"] = tuple(BlockType(t) for t in obj["allowed_types"])
        if "allowed_kernels" in obj:
            kw["allowed_kernels"] = tuple(int(k) for k in obj["allowed_kernels"])
        return cls(**kw)

    def to_json_obj(self) -> dict:
        return {
            "depth_min": self.depth_min,
            "depth_max": self.depth_max,
            "allowed_types": [t.value for t in self.allowed_types],
            "allowed_kernels": list(self.allowed_kernels),
        }


DEFAULT_SPACE = SearchSpace()


@dataclass(frozen=True)
class Validity:
    ok: bool
    reason: str | None = None
    block_index: int | None = None  # 0-based index of the offending block

    def __bool__(self) -> bool:
        return self.ok


VALID = Validity(True)


def validate(genome: ArchGenome, input_shape: tuple[int, int, int],
             space: SearchSpace | None = None) -> Validity:
    """Check a genome against a spatial input shape (and optionally a space).

    Every VGG block halves spatial dims with floor division (2x2 max-pool);
    a genome is invalid if any spatial dimension would reach 0.
    """
    c, h, w = input_shape
    if c < 1 or h < 1 or w < 1:
        raise ValueError(f"input dims must be >= 1, got {input_shape}")
    if space is not None:
        if not (space.depth_min <= genome.depth <= space.depth_max):
            return Validity(False, f"depth {genome.depth} outside [{space.depth_min}, {space.depth_max}]")
        for i, b in enumerate(genome.blocks):
            if b.block_type not in space.allowed_types:
                return Validity(False, f"block type {b.block_type.value} not allowed", i)
            if b.kernels not in space.allowed_kernels:
                return Validity(False, f"kernel count {b.kernels} not allowed", i)
    for i, b in enumerate(genome.blocks):
        if b.block_type is BlockType.VGG:
            h, w = h // 2, w // 2
            if h == 0 or w == 0:
                return Validity(False, "pooling reduces a spatial dimension to 0", i)
    return VALID


def sample_uniform(space: SearchSpace, rng: np.random.Generator) -> ArchGenome:
    """Uniform draw: depth from [depth_min, depth_max], each block type and
    kernel count independently uniform."""
    depth = int(rng.integers(space.depth_min, space.depth_max + 1))
    blocks = []
    for _ in range(depth):
        bt = space.allowed_types[int(rng.integers(len(space.allowed_types)))]
        k = space.allowed_kernels[int(rng.integers(len(space.allowed_kernels)))]
        blocks.append(BlockSpec(bt, k))
    return ArchGenome(tuple(blocks))


def sample_valid(space: SearchSpace, input_shape: tuple[int, int, int],
                 rng: np.random.Generator, max_attempts: int = 1000) -> ArchGenome:
    """Uniform sampling with retry on spatially-invalid draws."""
    for _ in range(max_attempts):
        g = sample_uniform(space, rng)
        if validate(g, input_shape):
            return g
    raise RuntimeError(f"no spatially valid genome found in {max_attempts} attempts")


def count_configurations(space: SearchSpace) -> int:
    """Pure combinatorial count: sum over depths of (|types| * |kernels|)^d.

    Ignores the spatial-validity rule.
    """
    per_block = len(space.allowed_types) * len(space.allowed_kernels)
    return sum(per_block ** d for d in range(space.depth_min, space.depth_max + 1))


def encode(genome: ArchGenome) -> str:
    return ",".join(f"{b.block_type.value}/{b.kernels}" for b in genome.blocks)


class GenomeDecodeError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


def decode(text: str, space: SearchSpace | None = DEFAULT_SPACE) -> ArchGenome:
    """Parse the canonical text form. Tokens are checked against ``space``
    membership unless ``space`` is None."""
    tokens = text.strip().split(",")
    blocks = []
    for i, tok in enumerate(tokens):
        parts = tok.strip().split("/")
        if len(parts) != 2:
            raise GenomeDecodeError(f"malformed token {tok!r}, expected TYPE/k", i)
        try:
            bt = BlockType(parts[0])
        except ValueError:
            raise GenomeDecodeError(f"unknown block type {parts[0]!r}", i) from None
        try:
            k = int(parts[1])
        except ValueError:
            raise GenomeDecodeError(f"kernel count {parts[1]!r} is not an integer", i) from None
        if k < 1:
            raise GenomeDecodeError(f"kernel count {k} is not positive", i)
        if space is not None:
            if bt not in space.allowed_types:
                raise GenomeDecodeError(f"block type {bt.value} not in space", i)
            if k not in space.allowed_kernels:
                raise GenomeDecodeError(f"kernel count {k} not in space", i)
        blocks.append(BlockSpec(bt, k))
    g = ArchGenome(tuple(blocks))
    if space is not None and not (space.depth_min <= g.depth <= space.depth_max):
        raise GenomeDecodeError(
            f"depth {g.depth} outside [{space.depth_min}, {space.depth_max}]", len(blocks) - 1)
    return g


def genome_from_json_obj(obj: dict, space: SearchSpace | None = None) -> ArchGenome:
    blocks = tuple(BlockSpec(BlockType(b["type"]), int(b["k"])) for b in obj["blocks"])
    g = ArchGenome(blocks)
    if space is not None and not space.contains(g):
        raise ValueError(f"genome {encode(g)} not a member of the space")
    return g


def parse_genome(text: str, space: SearchSpace | None = DEFAULT_SPACE) -> ArchGenome:
    """Accept either the compact text form or the JSON form."""
    s = text.strip()
    if s.startswith("{"):
        return genome_from_json_obj(json.loads(s), space)
    return decode(s, space)
