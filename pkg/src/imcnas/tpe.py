"""Tree-structured Parzen Estimator over the conditional categorical space.

The history is split into good/bad sets at a gamma quantile of fitness
(maximization). Independent categorical Parzen estimators are fitted per
dimension: depth, and (type_i, kernels_i) for each position i, the latter
fitted only on trials deep enough to contain position i. Candidates are drawn
from the good-density model and the one maximizing the summed log-density
ratio over its active dimensions is suggested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import (ArchGenome, BlockSpec, SearchSpace, sample_uniform,
                    sample_valid, validate)

Observation = tuple[ArchGenome, float]


@dataclass(frozen=True)
class TpeParams:
    gamma: float = 0.25
    n_startup: int = 20
    n_candidates: int = 24
    prior_weight: float = 1.0
    good_cap: int = 25

    def __post_init__(self):
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must be in (0, 1)")
        if self.n_startup < 1 or self.n_candidates < 1:
            raise ValueError("n_startup and n_candidates must be >= 1")
        if self.prior_weight <= 0:
            raise ValueError("prior_weight must be > 0")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TpeParams":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})

    def to_json_obj(self) -> dict:
        return {"gamma": self.gamma, "n_startup": self.n_startup,
                "n_candidates": self.n_candidates, "prior_weight": self.prior_weight,
                "good_cap": self.good_cap}


def split_good_bad(history: list[Observation], gamma: float,
                   good_cap: int) -> tuple[list[Observation], list[Observation]]:
    """Top max(1, min(cap, ceil(gamma*n))) trials by fitness are good, ties
    broken by earlier trial index."""
    if not history:
        raise ValueError("history must be non-empty")
    n = len(history)
    n_good = max(1, min(good_cap, math.ceil(gamma * n)))
    order = sorted(range(n), key=lambda i: (-history[i][1], i))
    good_idx = set(order[:n_good])
    good = [history[i] for i in range(n) if i in good_idx]
    bad = [history[i] for i in range(n) if i not in good_idx]
    return good, bad


def categorical_posterior(values, domain, prior_weight: float = 1.0) -> np.ndarray:
    """Parzen categorical estimate: smoothed counts, normalized over ``domain``."""
    domain = list(domain)
    if not domain:
        raise ValueError("domain must be non-empty")
    index = {v: i for i, v in enumerate(domain)}
    weights = np.full(len(domain), prior_weight / len(domain))
    for v in values:
        weights[index[v]] += 1
    return weights / weights.sum()


class _DimModel:
    """Per-dimension posteriors for one of the good/bad sets."""

    def __init__(self, genomes: list[ArchGenome], space: SearchSpace, prior_weight: float):
        depths = list(range(space.depth_min, space.depth_max + 1))
        self.depth_domain = depths
        self.type_domain = list(space.allowed_types)
        self.kernel_domain = list(space.allowed_kernels)
        self.p_depth = categorical_posterior([g.depth for g in genomes], depths, prior_weight)
        self.p_type = []
        self.p_kernel = []
        for i in range(space.depth_max):
            active = [g for g in genomes if g.depth > i]
            self.p_type.append(categorical_posterior(
                [g.blocks[i].block_type for g in active], self.type_domain, prior_weight))
            self.p_kernel.append(categorical_posterior(
                [g.blocks[i].kernels for g in active], self.kernel_domain, prior_weight))

    def log_density(self, genome: ArchGenome) -> float:
        total = math.log(self.p_depth[self.depth_domain.index(genome.depth)])
        for i, b in enumerate(genome.blocks):
            total += math.log(self.p_type[i][self.type_domain.index(b.block_type)])
            total += math.log(self.p_kernel[i][self.kernel_domain.index(b.kernels)])
        return total

    def draw(self, rng: np.random.Generator) -> ArchGenome:
        depth = self.depth_domain[int(rng.choice(len(self.depth_domain), p=self.p_depth))]
        blocks = []
        for i in range(depth):
            bt = self.type_domain[int(rng.choice(len(self.type_domain), p=self.p_type[i]))]
            k = self.kernel_domain[int(rng.choice(len(self.kernel_domain), p=self.p_kernel[i]))]
            blocks.append(BlockSpec(bt, k))
        return ArchGenome(tuple(blocks))


def random_suggest(space: SearchSpace, rng: np.random.Generator) -> ArchGenome:
    """Uniform baseline, identical to prior sampling."""
    return sample_uniform(space, rng)


def tpe_suggest(history: list[Observation], space: SearchSpace, params: TpeParams,
                rng: np.random.Generator,
                input_shape: tuple[int, int, int] | None = None,
                n_observed: int | None = None,
                max_retries: int = 1000) -> ArchGenome:
    """Suggest the next genome. Below ``n_startup`` observations the prior is
    sampled; afterwards the candidate maximizing the good/bad log-density
    ratio is returned. Deterministic given the rng seed.

    ``n_observed`` overrides len(history) for the startup decision (drivers
    that exclude failed trials from the history pass the trial index here).
    """

    def prior():
        if input_shape is None:
            return sample_uniform(space, rng)
        return sample_valid(space, input_shape, rng)

    observed = len(history) if n_observed is None else n_observed
    if observed < params.n_startup or not history:
        return prior()

    good, bad = split_good_bad(history, params.gamma, params.good_cap)
    l_model = _DimModel([g for g, _ in good], space, params.prior_weight)
    g_model = _DimModel([g for g, _ in bad], space, params.prior_weight)

    candidates = []
    attempts = 0
    while len(candidates) < params.n_candidates and attempts < max_retries:
        attempts += 1
        cand = l_model.draw(rng)
        if input_shape is not None and not validate(cand, input_shape):
            continue
        candidates.append(cand)
    if not candidates:
        return prior()

    scores = [l_model.log_density(c) - g_model.log_density(c) for c in candidates]
    return candidates[int(np.argmax(scores))]
