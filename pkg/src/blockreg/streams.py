"""Keyed counter-based random streams.

Every random draw in the package comes from a stream addressed by an integer
key tuple, e.g. ``(master_seed, lambda_index, replicate, tag, row)``.  Streams
for distinct keys are independent Philox instances, so any subset of the work
can be generated in any order (or in parallel) and produce identical bytes.
"""
from __future__ import annotations

import numpy as np

# stream tags; appended to key tuples to separate the draws of one cell
SIGNAL_TAG = 101
LAMBDA_TAG = 102
DEP_DESIGN_TAG = 103
GAUSS_DESIGN_TAG = 104
DEP_NOISE_TAG = 105
GAUSS_NOISE_TAG = 106


def stream(*key: int) -> np.random.Generator:
    """Return the Philox generator addressed by an integer key tuple."""
    flat = []
    for part in key:
        if isinstance(part, (tuple, list)):
            flat.extend(int(k) for k in part)
        else:
            flat.append(int(part))
    if any(k < 0 for k in flat):
        raise ValueError(f"stream keys must be non-negative integers, got {flat}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(flat)))
