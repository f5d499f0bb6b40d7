"""Shared fixtures: the expensive Monte-Carlo samples are drawn once per session."""

import numpy as np
import pytest

from dothash.bounds import sample_intersection_estimates
from dothash.encoding import MinwiseFamily
from dothash.sketches import minhash_build

MC_SIZE = 200
MC_DIMS = 1024
MC_TRIALS = 10_000
MC_OVERLAPS = (0, 50, 100, 200)


@pytest.fixture(scope="session")
def unit_mc_estimates() -> dict[int, np.ndarray]:
    """10^4 unit-weight intersection estimates per overlap, |A|=|B|=200, d=1024."""
    return {
        overlap: sample_intersection_estimates(
            MC_SIZE, MC_SIZE, overlap, MC_DIMS, MC_TRIALS, seed0=1_000_000 * (overlap + 1)
        )
        for overlap in MC_OVERLAPS
    }


@pytest.fixture(scope="session")
def minhash_half_jaccard_counts() -> np.ndarray:
    """Matching-minima counts over 1000 seeds for a pair with exact Jaccard 0.5.

    |A| = |B| = 150 with overlap 100, so J = 100 / 200 = 0.5; k = 128.
    """
    set_a = np.arange(150, dtype=np.uint64)
    set_b = np.arange(50, 200, dtype=np.uint64)
    counts = np.empty(1000, dtype=np.int64)
    for trial in range(1000):
        family = MinwiseFamily(seed=7_000_000 + trial, k=128)
        sk_a = minhash_build(family, set_a)
        sk_b = minhash_build(family, set_b)
        counts[trial] = int(np.count_nonzero(sk_a.minima == sk_b.minima))
    return counts
