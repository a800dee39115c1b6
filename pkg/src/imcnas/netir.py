"""Layer-level network IR: expands a genome into convs/BN/pool/residual-add
layers plus a fixed FC head, with inferred shapes, parameter and MAC counts.

Layers form a DAG over indices: each layer names its producer indices in
``inputs`` (index -1 is the network input). The main chain is sequential;
residual shortcuts are the only extra edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .space import ArchGenome, BlockType, validate

NETWORK_INPUT = -1


class LayerKind(Enum):
    CONV = "conv"
    BATCHNORM = "batchnorm"
    RELU = "relu"
    MAXPOOL = "maxpool"
    RESIDUAL_ADD = "residual_add"
    FLATTEN = "flatten"
    FC = "fc"
    DROPOUT = "dropout"
    SOFTMAX = "softmax"


Shape = tuple[int, int, int] | int  # (c, h, w) for spatial layers, int for flat


@dataclass(frozen=True)
class LayerIR:
    kind: LayerKind
    in_shape: Shape
    out_shape: Shape
    params: int = 0
    macs: int = 0
    inputs: tuple[int, ...] = ()
    # kind-specific attributes
    kernel: tuple[int, int] | None = None  # (kh, kw) for conv
    stride: int = 1
    padding: int = 0
    bias: bool = True
    rate: float | None = None  # dropout

    @property
    def out_elements(self) -> int:
        if isinstance(self.out_shape, int):
            return self.out_shape
        c, h, w = self.out_shape
        return c * h * w

    @property
    def in_elements(self) -> int:
        if isinstance(self.in_shape, int):
            return self.in_shape
        c, h, w = self.in_shape
        return c * h * w

    def to_json_obj(self) -> dict:
        obj = {
            "kind": self.kind.value,
            "in_shape": list(self.in_shape) if isinstance(self.in_shape, tuple) else self.in_shape,
            "out_shape": list(self.out_shape) if isinstance(self.out_shape, tuple) else self.out_shape,
            "params": self.params,
            "macs": self.macs,
            "inputs": list(self.inputs),
        }
        if self.kernel is not None:
            obj.update(kernel=list(self.kernel), stride=self.stride,
                       padding=self.padding, bias=self.bias)
        if self.rate is not None:
            obj["rate"] = self.rate
        return obj


@dataclass(frozen=True)
class HeadSpec:
    hidden_units: int = 256
    dropout_rate: float = 0.5
    num_classes: int = 10

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be >= 1")
        if not (0 <= self.dropout_rate < 1):
            raise ValueError("dropout_rate must be in [0, 1)")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HeadSpec":
        return cls(int(obj.get("hidden_units", 256)),
                   float(obj.get("dropout_rate", 0.5)),
                   int(obj.get("num_classes", 10)))

    def to_json_obj(self) -> dict:
        return {"hidden_units": self.hidden_units, "dropout_rate": self.dropout_rate,
                "num_classes": self.num_classes}


@dataclass(frozen=True)
class NetworkIR:
    layers: tuple[LayerIR, ...]
    skip_edges: tuple[tuple[int, int], ...]  # (shortcut conv index, residual add index)
    input_shape: tuple[int, int, int]

    @property
    def total_params(self) -> int:
        return count_params(self)

    @property
    def total_macs(self) -> int:
        return count_macs(self)

    def to_json_obj(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "layers": [l.to_json_obj() for l in self.layers],
            "skip_edges": [list(e) for e in self.skip_edges],
            "total_params": self.total_params,
            "total_macs": self.total_macs,
        }


def count_params(ir: NetworkIR) -> int:
    return sum(l.params for l in ir.layers)


def count_macs(ir: NetworkIR) -> int:
    return sum(l.macs for l in ir.layers)


def _conv(cin: int, cout: int, h: int, w: int, kh: int, kw: int,
          inputs: tuple[int, ...], padding: int) -> LayerIR:
    # padding preserves h,w for the kernel sizes used here (3x3 pad 1, 1x1 pad 0)
    params = cin * kh * kw * cout + cout
    macs = cout * h * w * cin * kh * kw
    return LayerIR(LayerKind.CONV, (cin, h, w), (cout, h, w), params, macs,
                   inputs, kernel=(kh, kw), stride=1, padding=padding, bias=True)


def expand(genome: ArchGenome, input_shape: tuple[int, int, int], head: HeadSpec,
           relu_per_conv: bool = False) -> NetworkIR:
    """Expand a genome into the full layer list.

    VGG block: conv3x3, conv3x3, ReLU, 2x2 max-pool.
    MVGG block: conv3x3, conv3x3, ReLU.
    RES block: conv3x3, BN, ReLU, conv3x3, BN on the main path, a 1x1 conv on
    the shortcut, elementwise add, ReLU.
    Head: flatten, FC(hidden), ReLU, dropout, FC(classes), softmax.

    ``relu_per_conv`` inserts a ReLU after each conv in VGG/MVGG blocks
    instead of a single one after the pair.
    """
    v = validate(genome, input_shape)
    if not v:
        raise ValueError(f"invalid genome: {v.reason} (block {v.block_index})")

    layers: list[LayerIR] = []
    skip_edges: list[tuple[int, int]] = []
    c, h, w = input_shape

    def push(layer: LayerIR) -> int:
        layers.append(layer)
        return len(layers) - 1

    def prev() -> int:
        return len(layers) - 1 if layers else NETWORK_INPUT

    for block in genome.blocks:
        k = block.kernels
        block_in = prev()
        if block.block_type in (BlockType.VGG, BlockType.MVGG):
            push(_conv(c, k, h, w, 3, 3, (prev(),), padding=1))
            if relu_per_conv:
                push(LayerIR(LayerKind.RELU, (k, h, w), (k, h, w), inputs=(prev(),)))
            push(_conv(k, k, h, w, 3, 3, (prev(),), padding=1))
            push(LayerIR(LayerKind.RELU, (k, h, w), (k, h, w), inputs=(prev(),)))
            c = k
            if block.block_type is BlockType.VGG:
                ho, wo = h // 2, w // 2
                push(LayerIR(LayerKind.MAXPOOL, (k, h, w), (k, ho, wo),
                             inputs=(prev(),), kernel=(2, 2), stride=2))
                h, w = ho, wo
        else:  # RES
            push(_conv(c, k, h, w, 3, 3, (prev(),), padding=1))
            push(LayerIR(LayerKind.BATCHNORM, (k, h, w), (k, h, w),
                         params=2 * k, inputs=(prev(),)))
            push(LayerIR(LayerKind.RELU, (k, h, w), (k, h, w), inputs=(prev(),)))
            push(_conv(k, k, h, w, 3, 3, (prev(),), padding=1))
            main_out = push(LayerIR(LayerKind.BATCHNORM, (k, h, w), (k, h, w),
                                    params=2 * k, inputs=(prev(),)))
            shortcut = push(_conv(c, k, h, w, 1, 1, (block_in,), padding=0))
            add = push(LayerIR(LayerKind.RESIDUAL_ADD, (k, h, w), (k, h, w),
                               inputs=(main_out, shortcut)))
            skip_edges.append((shortcut, add))
            push(LayerIR(LayerKind.RELU, (k, h, w), (k, h, w), inputs=(prev(),)))
            c = k

    flat = c * h * w
    push(LayerIR(LayerKind.FLATTEN, (c, h, w), flat, inputs=(prev(),)))
    push(LayerIR(LayerKind.FC, flat, head.hidden_units,
                 params=flat * head.hidden_units + head.hidden_units,
                 macs=flat * head.hidden_units, inputs=(prev(),)))
    push(LayerIR(LayerKind.RELU, head.hidden_units, head.hidden_units, inputs=(prev(),)))
    push(LayerIR(LayerKind.DROPOUT, head.hidden_units, head.hidden_units,
                 inputs=(prev(),), rate=head.dropout_rate))
    push(LayerIR(LayerKind.FC, head.hidden_units, head.num_classes,
                 params=head.hidden_units * head.num_classes + head.num_classes,
                 macs=head.hidden_units * head.num_classes, inputs=(prev(),)))
    push(LayerIR(LayerKind.SOFTMAX, head.num_classes, head.num_classes, inputs=(prev(),)))

    return NetworkIR(tuple(layers), tuple(skip_edges), input_shape)
