"""Hardware-aware NAS over block-structured CNNs with an analytical analog
in-memory-computing cost model and TPE search."""

from .space import (ArchGenome, BlockSpec, BlockType, SearchSpace, DEFAULT_SPACE,
                    count_configurations, decode, encode, parse_genome,
                    sample_uniform, sample_valid, validate)
from .netir import HeadSpec, LayerIR, LayerKind, NetworkIR, count_macs, count_params, expand
from .imc import (CostReport, DEFAULT_HARDWARE, HardwareConfig, LayerCost,
                  MappingReport, energy_layer, estimate_network, latency_layer,
                  map_layer)
from .tpe import TpeParams, categorical_posterior, random_suggest, split_good_bad, tpe_suggest
from .fitness import CostMetric, FitnessSpec, fitness_eval
from .evaluation import (AccuracyResult, AccuracySource, EvalCache,
                         ExternalEvaluator, ProtocolError, SurrogateParams,
                         surrogate_accuracy)
from .driver import (RunConfig, Trial, export_scatter, load_trial_log,
                     parse_scatter, recompute_fitness, render_best_table,
                     report_best, run_search)

__version__ = "0.1.0"
