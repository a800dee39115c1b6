"""Walk through the analog in-memory-computing cost model.

Expands a genome into its layer-level network, maps each layer onto
crossbars, and prints the per-layer latency/energy breakdown, then shows how
the totals react to wider kernels and to a residual block.
"""
from imcnas import (DEFAULT_HARDWARE, HeadSpec, decode, encode,
                    estimate_network, expand)

SHAPE = (3, 32, 32)
HEAD = HeadSpec()


def show(text):
    g = decode(text)
    ir = expand(g, SHAPE, HEAD)
    report = estimate_network(ir, DEFAULT_HARDWARE)
    print(f"\n{encode(g)}  ({ir.total_params:,} params, {ir.total_macs:,} MACs)")
    print(f"{'layer':<14}{'xbars':>6}{'windows':>9}{'latency (ns)':>14}{'energy (pJ)':>14}")
    for layer, cost in zip(ir.layers, report.per_layer):
        m = cost.mapping
        xbars = m.xbars if m is not None else 0
        windows = m.windows if m is not None else 0
        print(f"{layer.kind.value:<14}{xbars:>6}{windows:>9}"
              f"{cost.latency_ns:>14,.0f}{cost.energy_pj:>14,.1f}")
    print(f"total: {report.latency_ms:.4f} ms, {report.energy_mj:.4f} mJ")
    return report


base = show("VGG/16,VGG/16,MVGG/32")
wider = show("VGG/64,VGG/64,MVGG/128")
residual = show("VGG/16,VGG/16,RES/32")

print("\n=== Takeaways ===")
print(f"4x kernels  -> {wider.latency_ms / base.latency_ms:.1f}x latency, "
      f"{wider.energy_mj / base.energy_mj:.1f}x energy")
print(f"RES vs MVGG -> +{(residual.energy_mj / base.energy_mj - 1) * 100:.0f}% energy "
      "(shortcut conv + global accumulation)")
