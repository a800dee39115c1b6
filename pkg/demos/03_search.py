"""Run a small hardware-aware search three times, once per fitness function,
and compare the winning architectures.

Accuracy comes from the deterministic surrogate, so the demo finishes in
seconds and is reproducible.
"""
from imcnas import (CostMetric, FitnessSpec, RunConfig, TpeParams,
                    render_best_table, report_best, run_search)

for metric in (CostMetric.NONE, CostMetric.LATENCY, CostMetric.ENERGY):
    config = RunConfig(
        trials=40,
        seed=1,
        input_shape=(3, 12, 12),
        tpe=TpeParams(n_startup=10),
        fitness=FitnessSpec(1.0, metric),
        out_dir=f"runs/demo-{metric.value}",
    )
    trials = run_search(config)
    print(f"\n=== fitness = accuracy{'' if metric is CostMetric.NONE else ' / ' + metric.value} ===")
    print(render_best_table(report_best(trials, 3)))

print("\nCost pressure pulls the winners toward shallower, narrower networks.")
