"""Scalar fitness: accuracy^n, optionally divided by latency (ms) or energy (mJ)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .imc import CostReport


class CostMetric(Enum):
    NONE = "none"
    LATENCY = "latency"
    ENERGY = "energy"


# CLI spellings for the three fitness forms
FF_ALIASES = {"acc": CostMetric.NONE, "acc_lat": CostMetric.LATENCY, "acc_en": CostMetric.ENERGY}


@dataclass(frozen=True)
class FitnessSpec:
    accuracy_exponent: float = 1.0
    cost_metric: CostMetric = CostMetric.NONE

    def __post_init__(self):
        if self.accuracy_exponent <= 0:
            raise ValueError("accuracy_exponent must be > 0")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FitnessSpec":
        metric = obj.get("cost_metric", "none")
        if metric in FF_ALIASES:
            metric = FF_ALIASES[metric]
        else:
            metric = CostMetric(metric)
        return cls(float(obj.get("accuracy_exponent", 1.0)), metric)

    def to_json_obj(self) -> dict:
        return {"accuracy_exponent": self.accuracy_exponent,
                "cost_metric": self.cost_metric.value}


def fitness_eval(accuracy: float, cost: CostReport | None, spec: FitnessSpec) -> float:
    """Score to maximize. ``accuracy`` is a fraction in [0, 1]; cost units are
    fixed at ms / mJ so scores are comparable across a run."""
    if not (0.0 <= accuracy <= 1.0):
        raise ValueError(f"accuracy must be in [0, 1], got {accuracy}")
    top = accuracy ** spec.accuracy_exponent
    if spec.cost_metric is CostMetric.NONE:
        return top
    if cost is None:
        raise ValueError("cost report required for a cost-bearing fitness")
    denom = cost.latency_ms if spec.cost_metric is CostMetric.LATENCY else cost.energy_mj
    if denom <= 0:
        raise ValueError(f"degenerate network: {spec.cost_metric.value} is {denom}")
    return top / denom
