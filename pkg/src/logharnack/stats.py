"""Monte Carlo estimate container and deterministic reductions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["MonteCarloEstimate", "estimate_from_values", "pairwise_mean"]


@dataclass
class MonteCarloEstimate:
    """Sample mean with its standard error and provenance."""

    mean: float
    stderr: float
    n: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    def band(self, k: float = 3.0) -> float:
        return k * self.stderr

    def __repr__(self):
        return f"{self.mean:.6g} +- {self.stderr:.2g} (n={self.n})"


def pairwise_mean(block_sums: np.ndarray, n: int) -> float:
    """Deterministic pairwise reduction of per-block sums.

    numpy's sum over a fixed-order array is pairwise internally, which
    makes the result independent of how many workers produced the blocks.
    """
    return float(np.sum(np.asarray(block_sums, dtype=float)) / n)


def estimate_from_values(values: np.ndarray, seed: int = 0) -> MonteCarloEstimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    mean = float(np.sum(values) / n)
    if n > 1:
        var = float(np.sum((values - mean) ** 2) / (n - 1))
        stderr = math.sqrt(var / n)
    else:
        stderr = math.nan
    return MonteCarloEstimate(mean=mean, stderr=stderr, n=n, seed=seed)
