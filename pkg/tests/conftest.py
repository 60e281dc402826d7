"""Shared fixtures: cached generator batches reused across test modules."""

from dataclasses import dataclass

import pytest

from fairank.bpam import BpamParams, GenerationStats, generate
from fairank.graph import ColoredDigraph

BASE_SEED = 20250800


@dataclass
class Batch:
    params: BpamParams
    seeds: list[int]
    graphs: list[ColoredDigraph]
    stats: list[GenerationStats]


@pytest.fixture(scope="session")
def batch_cache():
    """Factory returning (and memoizing) replica batches per parameter set."""
    cache: dict[tuple, Batch] = {}

    def get(
        r: float = 0.3,
        rho: float = 0.3,
        n: int = 1000,
        d: int = 6,
        reps: int = 100,
        base_seed: int = BASE_SEED,
    ) -> Batch:
        key = (r, rho, n, d, reps, base_seed)
        if key not in cache:
            params = BpamParams(n, d, r, rho)
            seeds = [base_seed + i for i in range(reps)]
            graphs = []
            stats = []
            for s in seeds:
                g, st = generate(params, seed=s)
                graphs.append(g)
                stats.append(st)
            cache[key] = Batch(params, seeds, graphs, stats)
        return cache[key]

    return get
