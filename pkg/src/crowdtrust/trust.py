"""Final trust value: weighted sum of reputation and experience."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reputation import ExperienceGraph, ReputationVector

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TrustParams:
    w1: float = 0.5  # reputation weight
    w2: float = 0.5  # experience weight

    def __post_init__(self):
        if self.w1 < 0.0 or self.w2 < 0.0:
            raise ValueError("weights must be non-negative")
        if abs(self.w1 + self.w2 - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {self.w1 + self.w2}")


def trust(rep_overall: float, exp_value: float, params: TrustParams) -> float:
    """Pairwise trust from one reputation and one experience value."""
    if rep_overall < 0.0:
        raise ValueError("overall reputation must be >= 0")
    if not 0.0 <= exp_value <= 1.0:
        raise ValueError("experience must be in [0, 1]")
    return params.w1 * rep_overall + params.w2 * exp_value


def trust_row(requester: int, graph: ExperienceGraph, rep: ReputationVector,
              params: TrustParams, exp0: float = 0.3) -> np.ndarray:
    """Trust from a requester toward every user.

    Pairs without an experience relation fall back to the bootstrap value
    ``exp0``. The requester's own entry is set to -inf so it can never be
    recruited.
    """
    if not 0 <= requester < graph.n:
        raise ValueError(f"unknown requester id {requester}")
    exp_values = np.full(graph.n, exp0)
    for (i, j), w in graph.edges.items():
        if i == requester:
            exp_values[j] = w
    row = params.w1 * rep.overall + params.w2 * exp_values
    row[requester] = -np.inf
    return row
