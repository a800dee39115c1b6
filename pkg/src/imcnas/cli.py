"""Command-line entry point.

Subcommands: count, sample, validate, estimate, search, report, scatter.
All accept ``--config <path>`` (a JSON run config); command-line flags
override config values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .driver import (RunConfig, export_scatter, load_trial_log, render_best_table,
                     report_best, run_search)
from .fitness import FF_ALIASES, FitnessSpec
from .imc import estimate_network
from .netir import expand
from .space import count_configurations, encode, parse_genome, sample_valid, validate


def _load_config(args) -> RunConfig:
    config = (RunConfig.from_json_file(args.config) if getattr(args, "config", None)
              else RunConfig())
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "evaluator", None) is not None:
        overrides["evaluator"] = args.evaluator
    if getattr(args, "out", None) is not None:
        overrides["out_dir"] = args.out
    if getattr(args, "ff", None) is not None or getattr(args, "acc_exponent", None) is not None:
        metric = (FF_ALIASES[args.ff] if getattr(args, "ff", None) is not None
                  else config.fitness.cost_metric)
        exponent = (args.acc_exponent if getattr(args, "acc_exponent", None) is not None
                    else config.fitness.accuracy_exponent)
        overrides["fitness"] = FitnessSpec(exponent, metric)
    return replace(config, **overrides) if overrides else config


def _add_common(parser):
    parser.add_argument("--config", help="JSON run config path")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--ff", choices=sorted(FF_ALIASES))
    parser.add_argument("--acc-exponent", type=float, dest="acc_exponent")
    parser.add_argument("--evaluator",
                        help='"surrogate" or "external:<command>"')
    parser.add_argument("--out", help="output directory")


def cmd_count(args) -> int:
    config = _load_config(args)
    print(count_configurations(config.space))
    return 0


def cmd_sample(args) -> int:
    config = _load_config(args)
    rng = np.random.default_rng(config.seed)
    for _ in range(args.n):
        print(encode(sample_valid(config.space, config.input_shape, rng)))
    return 0


def cmd_validate(args) -> int:
    config = _load_config(args)
    genome = parse_genome(args.genome, None)
    v = validate(genome, config.input_shape, config.space)
    if v:
        print("Valid")
        return 0
    where = "" if v.block_index is None else f" at block {v.block_index}"
    print(f"Invalid{where}: {v.reason}")
    return 1


def cmd_estimate(args) -> int:
    config = _load_config(args)
    genome = parse_genome(args.genome, config.space)
    ir = expand(genome, config.input_shape, config.head, config.relu_per_conv)
    report = estimate_network(ir, config.hardware)
    obj = report.to_json_obj()
    obj["genome"] = encode(genome)
    obj["total_params"] = ir.total_params
    obj["total_macs"] = ir.total_macs
    print(json.dumps(obj, indent=2))
    return 0


def cmd_search(args) -> int:
    config = _load_config(args)
    trials = run_search(config)
    best = report_best(trials, k=1)
    print(render_best_table(best))
    print(f"log: {Path(config.out_dir) / 'trials.jsonl'}")
    return 0


def cmd_report(args) -> int:
    config = _load_config(args)
    trials = load_trial_log(args.log, config.space)
    print(render_best_table(report_best(trials, k=args.k)))
    return 0


def cmd_scatter(args) -> int:
    config = _load_config(args)
    trials = load_trial_log(args.log, config.space)
    csv_text = export_scatter(trials)
    if args.csv_out:
        Path(args.csv_out).write_text(csv_text)
        print(f"wrote {args.csv_out}")
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imcnas",
                                     description="Hardware-aware NAS for analog IMC")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="count configurations in the search space")
    _add_common(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="sample genomes from the space")
    _add_common(p)
    p.add_argument("-n", type=int, default=1, help="number of genomes")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("validate", help="validate a genome (text or JSON form)")
    _add_common(p)
    p.add_argument("genome")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("estimate", help="latency/energy estimate for a genome")
    _add_common(p)
    p.add_argument("genome")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("search", help="run the NAS loop")
    _add_common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="best models from a trial log")
    _add_common(p)
    p.add_argument("--log", required=True)
    p.add_argument("-k", type=int, default=5)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("scatter", help="export accuracy/latency/energy CSV")
    _add_common(p)
    p.add_argument("--log", required=True)
    p.add_argument("--csv-out", dest="csv_out")
    p.set_defaults(func=cmd_scatter)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
