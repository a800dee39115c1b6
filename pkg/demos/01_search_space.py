"""Tour of the architecture search space.

Shows the genome encoding, how big the space is, uniform sampling, and why
some genomes are spatially invalid (too many pooled blocks for the input).
"""
import numpy as np

from imcnas import (DEFAULT_SPACE, count_configurations, decode, encode,
                    sample_valid, validate)

print("=== Search space ===")
print(f"depths {DEFAULT_SPACE.depth_min}..{DEFAULT_SPACE.depth_max}, "
      f"types {[t.value for t in DEFAULT_SPACE.allowed_types]}, "
      f"kernels {list(DEFAULT_SPACE.allowed_kernels)}")
print(f"total configurations: {count_configurations(DEFAULT_SPACE):,}")

print("\n=== Encoding ===")
g = decode("RES/128,MVGG/32,VGG/256,RES/32,VGG/128,RES/256")
print(f"text form : {encode(g)}")
print(f"json form : {g.to_json_obj()}")
print(f"hash      : {g.stable_hash()[:16]}...")

print("\n=== Validity ===")
for text, shape in [("VGG/16,VGG/16,VGG/16,VGG/16,VGG/16", (1, 28, 28)),
                    ("MVGG/16,MVGG/16,MVGG/16,MVGG/16,MVGG/16,MVGG/16,MVGG/16,MVGG/16",
                     (1, 28, 28))]:
    v = validate(decode(text), shape)
    verdict = "Valid" if v else f"Invalid at block {v.block_index}: {v.reason}"
    print(f"{text} on {shape}: {verdict}")

print("\n=== Sampling ===")
rng = np.random.default_rng(0)
for _ in range(5):
    print(" ", encode(sample_valid(DEFAULT_SPACE, (3, 32, 32), rng)))
