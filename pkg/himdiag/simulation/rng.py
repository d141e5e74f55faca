# himdiag/simulation/rng.py
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReplicationStreams:
    generation: np.random.Generator
    cv: np.random.Generator


def make_streams(master_seed: int, replication: int) -> ReplicationStreams:
    """
    Independent generators for one replication, derived from (master_seed, replication).

    Structure:
      replication
        ├── generation   (X, noise, Bernoulli uniforms)
        └── cv           (LASSO fold assignment)

    Calling this again with the same pair restarts both streams, which is how
    every kappa of a grid sees the same draws.
    """
    root = np.random.SeedSequence([master_seed, replication])
    ss_generation, ss_cv = root.spawn(2)
    return ReplicationStreams(
        generation=np.random.default_rng(ss_generation),
        cv=np.random.default_rng(ss_cv),
    )


def draw_seed(rng: np.random.Generator) -> int:
    """Integer seed for consumers that take one (fold assignment)"""
    return int(rng.integers(0, 2**63 - 1))
