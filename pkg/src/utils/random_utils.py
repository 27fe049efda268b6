"""
Seeded randomness.

Every random draw in the pipeline comes from numpy's PCG64 generator (O'Neill's
permuted congruential generator, 128-bit state) seeded through numpy's
SeedSequence. Independent streams are keyed by integer tuples such as
(seed, tree_index) or (seed, cell_index, fold_index), so a result never depends
on how work is spread over workers.
"""

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """PCG64 generator for the stream keyed by (seed, *stream)."""
    entropy = [int(seed)] + [int(s) for s in stream]
    if any(value < 0 for value in entropy):
        raise ValueError(f"seed and stream keys must be non-negative, got {entropy}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def fisher_yates(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Durstenfeld's in-place Fisher-Yates shuffle of 0..n-1.

    Step i (from n-1 down to 1) swaps position i with j drawn uniformly from 0..i.
    """
    perm = np.arange(n, dtype=np.int64)
    if n < 2:
        return perm
    uniforms = rng.random(n - 1)
    for step, i in enumerate(range(n - 1, 0, -1)):
        j = int(uniforms[step] * (i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm
