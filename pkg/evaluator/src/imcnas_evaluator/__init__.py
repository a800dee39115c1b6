from .genome import (BLOCK_TYPES, DATASETS, Block, GenomeError, count_params,
                     decode_genome, encode_genome)
from .server import handle_request, serve_protocol, stub_evaluate
from .surrogate import jitter, stub_accuracy

__version__ = "0.1.0"
