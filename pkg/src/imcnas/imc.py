"""Analytical cost model for the analog crossbar hierarchy.

Conv and FC layers are unrolled onto memristive crossbars: the receptive field
becomes the crossbar rows, output channels (bit-sliced across ceil(Wb/Cb)
columns) become the columns. Oversized layers are tiled by ceiling division
into row/column partitions that operate in parallel; partial sums from extra
row partitions are merged digitally. Activations stream over ceil(Ab/Db)
input cycles. Windows (output positions) execute sequentially on one logical
PE unless a duplication factor is configured.

Non-matrix layers: max-pool runs on the tile pooling unit, residual adds on
the chip-level global accumulator (which also pays network-on-chip transfer
for both operands), everything else is free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from .netir import LayerIR, LayerKind, NetworkIR

NS_PER_MS = 1e6
PJ_PER_MJ = 1e9


@dataclass(frozen=True)
class HardwareConfig:
    xbar_rows: int = 256
    xbar_cols: int = 256
    weight_bits: int = 8
    cell_bits: int = 2
    activation_bits: int = 8
    dac_bits: int = 1
    adc_share: int = 8           # columns time-multiplexed per ADC
    t_dac: float = 1.0           # ns
    t_xbar: float = 10.0
    t_adc: float = 1.0
    t_psum: float = 2.0
    t_pool_per_elem: float = 1.0
    t_gacc_per_elem: float = 2.0
    e_dac: float = 0.5           # pJ per driven row per input cycle
    e_cell: float = 0.05         # pJ per cell per pass
    e_adc: float = 2.0           # pJ per conversion
    e_psum: float = 0.1          # pJ per merged element
    e_buf: float = 1.0           # pJ per byte
    e_noc: float = 2.0           # pJ per byte per hop
    e_gacc: float = 0.5          # pJ per accumulated element
    e_pool: float = 0.2          # pJ per pooled element
    hops_local: int = 1
    hops_global: int = 4
    bytes_per_activation: int = 1
    xbar_duplication: int = 1    # windows executed concurrently on duplicated crossbars

    def __post_init__(self):
        for name in ("xbar_rows", "xbar_cols", "weight_bits", "cell_bits",
                     "activation_bits", "dac_bits", "adc_share", "hops_local",
                     "hops_global", "bytes_per_activation", "xbar_duplication"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("t_dac", "t_xbar", "t_adc", "t_psum", "t_pool_per_elem",
                     "t_gacc_per_elem", "e_dac", "e_cell", "e_adc", "e_psum",
                     "e_buf", "e_noc", "e_gacc", "e_pool"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.cell_bits > self.weight_bits:
            raise ValueError("cell_bits must not exceed weight_bits")
        if self.dac_bits > self.activation_bits:
            raise ValueError("dac_bits must not exceed activation_bits")

    @property
    def weight_slices(self) -> int:
        return math.ceil(self.weight_bits / self.cell_bits)

    @property
    def input_cycles(self) -> int:
        return math.ceil(self.activation_bits / self.dac_bits)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HardwareConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown hardware config fields: {sorted(unknown)}")
        return cls(**obj)

    def to_json_obj(self) -> dict:
        return asdict(self)


DEFAULT_HARDWARE = HardwareConfig()


@dataclass(frozen=True)
class MappingReport:
    rows_needed: int
    cols_needed: int
    row_parts: int
    col_parts: int
    windows: int

    @property
    def xbars(self) -> int:
        return self.row_parts * self.col_parts

    def to_json_obj(self) -> dict:
        return {"rows_needed": self.rows_needed, "cols_needed": self.cols_needed,
                "row_parts": self.row_parts, "col_parts": self.col_parts,
                "xbars": self.xbars, "windows": self.windows}


@dataclass(frozen=True)
class LayerCost:
    kind: str
    latency_ns: float
    energy_pj: float
    mapping: MappingReport | None = None

    def to_json_obj(self) -> dict:
        obj = {"kind": self.kind, "latency_ns": self.latency_ns, "energy_pj": self.energy_pj}
        if self.mapping is not None:
            obj["mapping"] = self.mapping.to_json_obj()
        return obj


@dataclass(frozen=True)
class CostReport:
    per_layer: tuple[LayerCost, ...]
    total_latency_ns: float
    total_energy_pj: float

    @property
    def latency_ms(self) -> float:
        return self.total_latency_ns / NS_PER_MS

    @property
    def energy_mj(self) -> float:
        return self.total_energy_pj / PJ_PER_MJ

    def to_json_obj(self) -> dict:
        return {
            "latency_ms": self.latency_ms,
            "energy_mj": self.energy_mj,
            "total_latency_ns": self.total_latency_ns,
            "total_energy_pj": self.total_energy_pj,
            "per_layer": [lc.to_json_obj() for lc in self.per_layer],
        }


def _is_matrix(layer: LayerIR) -> bool:
    return layer.kind in (LayerKind.CONV, LayerKind.FC)


def map_layer(layer: LayerIR, hw: HardwareConfig) -> MappingReport:
    """Crossbar mapping of a conv or FC layer."""
    if layer.kind is LayerKind.CONV:
        cin, _, _ = layer.in_shape
        cout, hout, wout = layer.out_shape
        kh, kw = layer.kernel
        rows = cin * kh * kw
        cols = cout * hw.weight_slices
        windows = hout * wout
    elif layer.kind is LayerKind.FC:
        rows = layer.in_shape
        cols = layer.out_shape * hw.weight_slices
        windows = 1
    else:
        raise ValueError(f"cannot map non-matrix layer {layer.kind.value}")
    return MappingReport(
        rows_needed=rows,
        cols_needed=cols,
        row_parts=math.ceil(rows / hw.xbar_rows),
        col_parts=math.ceil(cols / hw.xbar_cols),
        windows=windows,
    )


def latency_layer(layer: LayerIR, mapping: MappingReport | None, hw: HardwareConfig) -> float:
    """Layer latency in ns. Partitions run in parallel, windows sequentially."""
    if _is_matrix(layer):
        m = mapping if mapping is not None else map_layer(layer, hw)
        max_part_cols = min(m.cols_needed, hw.xbar_cols)
        per_window = (hw.input_cycles
                      * (hw.t_dac + hw.t_xbar + math.ceil(max_part_cols / hw.adc_share) * hw.t_adc)
                      + (m.row_parts - 1) * hw.t_psum)
        return math.ceil(m.windows / hw.xbar_duplication) * per_window
    if layer.kind is LayerKind.MAXPOOL:
        return layer.out_elements * hw.t_pool_per_elem
    if layer.kind is LayerKind.RESIDUAL_ADD:
        return layer.out_elements * hw.t_gacc_per_elem
    return 0.0


def _partition_sizes(total: int, cap: int) -> list[int]:
    full, rem = divmod(total, cap)
    return [cap] * full + ([rem] if rem else [])


def energy_layer(layer: LayerIR, mapping: MappingReport | None, hw: HardwareConfig) -> float:
    """Layer energy in pJ."""
    if _is_matrix(layer):
        m = mapping if mapping is not None else map_layer(layer, hw)
        # sum over the partition grid of rows_p * cols_p collapses to rows * cols
        core = hw.input_cycles * (m.rows_needed * hw.e_dac
                                  + m.rows_needed * m.cols_needed * hw.e_cell
                                  + m.cols_needed * hw.e_adc)
        psum = (m.row_parts - 1) * (m.cols_needed / hw.weight_slices) * hw.e_psum
        movement = ((layer.in_elements + layer.out_elements) * hw.bytes_per_activation
                    * (hw.e_buf + hw.e_noc * hw.hops_local))
        return m.windows * (core + psum) + movement
    if layer.kind is LayerKind.MAXPOOL:
        return layer.out_elements * hw.e_pool
    if layer.kind is LayerKind.RESIDUAL_ADD:
        n = layer.out_elements
        return (n * hw.bytes_per_activation * 2 * hw.e_noc * hw.hops_global
                + n * hw.e_gacc)
    return 0.0


def estimate_network(ir: NetworkIR, hw: HardwareConfig = DEFAULT_HARDWARE) -> CostReport:
    per_layer = []
    total_ns = 0.0
    total_pj = 0.0
    for layer in ir.layers:
        mapping = map_layer(layer, hw) if _is_matrix(layer) else None
        lat = latency_layer(layer, mapping, hw)
        en = energy_layer(layer, mapping, hw)
        per_layer.append(LayerCost(layer.kind.value, lat, en, mapping))
        total_ns += lat
        total_pj += en
    return CostReport(tuple(per_layer), total_ns, total_pj)
