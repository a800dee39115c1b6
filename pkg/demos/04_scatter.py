"""Export a search log as a scatter-ready CSV and print a terminal preview
of the accuracy/latency trade-off, with the best trial starred.
"""
from imcnas import (CostMetric, FitnessSpec, RunConfig, TpeParams,
                    export_scatter, parse_scatter, run_search)

config = RunConfig(trials=60, seed=2, tpe=TpeParams(n_startup=15),
                   fitness=FitnessSpec(1.0, CostMetric.LATENCY),
                   out_dir="runs/demo-scatter")
trials = run_search(config)
csv_text = export_scatter(trials)
with open("runs/demo-scatter/scatter.csv", "w") as f:
    f.write(csv_text)
rows = parse_scatter(csv_text)
print(f"wrote runs/demo-scatter/scatter.csv ({len(rows)} rows)")

# terminal scatter: accuracy (y) vs log-latency (x)
import math
xs = [math.log10(r["latency_ms"]) for r in rows]
ys = [r["accuracy"] for r in rows]
W, H = 64, 16
x0, x1 = min(xs), max(xs)
y0, y1 = min(ys), max(ys)
grid = [[" "] * W for _ in range(H)]
for r, x, y in sorted(zip(rows, xs, ys), key=lambda t: t[0]["best"]):
    c = int((x - x0) / (x1 - x0 + 1e-12) * (W - 1))
    l = H - 1 - int((y - y0) / (y1 - y0 + 1e-12) * (H - 1))
    grid[l][c] = "*" if r["best"] else "."
print(f"\naccuracy {y0:.2f}..{y1:.2f} (vertical) vs latency "
      f"{10 ** x0:.2g}..{10 ** x1:.2g} ms (horizontal, log scale); best = *")
for line in grid:
    print("|" + "".join(line) + "|")
