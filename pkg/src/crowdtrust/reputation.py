"""Two-channel global reputation over the experience graph.

Each user gets a positive and a negative reputation, the stationary
distributions of two random-surfer chains built from the experience
relations:

* positive channel: edges with experience above ``theta_split``, weighted
  by the experience value itself;
* negative channel: edges below ``theta_split``, weighted by the
  complement (1 - experience), so worse relations push harder.

Within a channel the surfer at user ``i`` follows an out-edge with
probability proportional to its weight (damped by ``d``) or jumps to a
uniformly random user with probability ``1 - d``. Users without out-edges
in a channel jump uniformly, which keeps the chain irreducible and the
fixed point unique. The overall score is ``max(0, pos - neg)``.

The fixed point is found by power iteration; an algebraic solve is
quadratic-to-cubic in the user count and only worth it for tiny graphs,
so it lives in the test suite as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NonConvergenceError(RuntimeError):
    """Power iteration did not reach the tolerance within max_iter."""

    def __init__(self, iterations: int, residual: float, last_iterate: np.ndarray):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual
        self.last_iterate = last_iterate


@dataclass
class ExperienceGraph:
    """Sparse directed experience graph: (trustor, trustee) -> value."""

    n: int
    edges: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one user")
        for (i, j), w in self.edges.items():
            if i == j:
                raise ValueError(f"self-edge on user {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"edge ({i}, {j}) weight {w} outside [0, 1]")

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        values = np.zeros((self.n, self.n))
        exists = np.zeros((self.n, self.n), dtype=bool)
        for (i, j), w in self.edges.items():
            values[i, j] = w
            exists[i, j] = True
        return values, exists


@dataclass(frozen=True)
class ReputationParams:
    """Solver settings.

    ``theta_split`` defaults to the experience bootstrap value 0.3: a
    relation only counts as negative evidence once interactions have
    driven it strictly below the level every pair starts from (idle decay
    floors there and cannot). Splitting at 0.5 instead marks every young
    or stale relation negative and drowns the signal of actively bad
    users, which measurably breaks malicious-user detection.
    """

    d: float = 0.85
    theta_split: float = 0.3
    tol: float = 1e-3
    max_iter: int = 200

    def __post_init__(self):
        if not 0.0 < self.d < 1.0:
            raise ValueError("damping factor d must be in (0, 1)")
        if not 0.0 < self.theta_split < 1.0:
            raise ValueError("theta_split must be in (0, 1)")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class ReputationVector:
    pos: np.ndarray
    neg: np.ndarray
    overall: np.ndarray
    iterations_pos: int
    iterations_neg: int


def uniform_reputation(n: int) -> ReputationVector:
    """Bootstrap reputation of an empty graph: both channels uniform."""
    u = np.full(n, 1.0 / n)
    return ReputationVector(pos=u, neg=u.copy(), overall=np.zeros(n),
                            iterations_pos=0, iterations_neg=0)


def split_graph(graph: ExperienceGraph,
                theta_split: float) -> tuple[ExperienceGraph, ExperienceGraph]:
    """Split into (positive, negative) channel graphs.

    Positive keeps edges strictly above the threshold at their own weight;
    negative keeps edges strictly below at the complement weight. Edges
    exactly at the threshold appear in neither.
    """
    pos = {e: w for e, w in graph.edges.items() if w > theta_split}
    neg = {e: 1.0 - w for e, w in graph.edges.items() if w < theta_split}
    return ExperienceGraph(graph.n, pos), ExperienceGraph(graph.n, neg)


def _power_iterate_dense(weights: np.ndarray, d: float, tol: float,
                         max_iter: int) -> tuple[np.ndarray, int]:
    """Stationary distribution of the damped chain on a dense weight matrix.

    ``weights[i, j]`` is the weight of edge i -> j. Matrix-free in the
    jump term: with the iterate normalized to sum 1, one step is
    (1-d)/n + d * (weights^T @ (r / out_sums)) + d * (dangling mass)/n.
    """
    n = weights.shape[0]
    out_sums = weights.sum(axis=1)
    dangling = out_sums <= 0.0
    safe = np.where(dangling, 1.0, out_sums)
    r = np.full(n, 1.0 / n)
    for iteration in range(1, max_iter + 1):
        scaled = r / safe
        if dangling.any():
            scaled = np.where(dangling, 0.0, scaled)
            jump_mass = r[dangling].sum() / n
        else:
            jump_mass = 0.0
        new = (1.0 - d) / n + d * (weights.T @ scaled) + d * jump_mass
        new /= new.sum()
        residual = np.abs(new - r).sum()
        r = new
        if residual < tol:
            return r, iteration
    raise NonConvergenceError(max_iter, residual, r)


def power_iterate(graph, d: float, tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    """Stationary vector of one channel; accepts a graph or dense weights.

    Returns (vector summing to 1, iterations used). Raises
    :class:`NonConvergenceError` with the last iterate attached if the
    L1 change between iterates never drops below ``tol``.
    """
    if isinstance(graph, ExperienceGraph):
        weights, _ = graph.dense()
    else:
        weights = np.asarray(graph, dtype=float)
    return _power_iterate_dense(weights, d, tol, max_iter)


def reputation_from_dense(values: np.ndarray, exists: np.ndarray,
                          params: ReputationParams) -> ReputationVector:
    """Both channels from dense experience values plus an existence mask.

    The mask matters because an existing relation at value 0 is a maximal
    negative edge, while an absent relation is no edge at all.
    """
    pos_w = np.where(exists & (values > params.theta_split), values, 0.0)
    neg_w = np.where(exists & (values < params.theta_split), 1.0 - values, 0.0)
    pos, it_pos = _power_iterate_dense(pos_w, params.d, params.tol, params.max_iter)
    neg, it_neg = _power_iterate_dense(neg_w, params.d, params.tol, params.max_iter)
    return ReputationVector(pos=pos, neg=neg,
                            overall=np.maximum(0.0, pos - neg),
                            iterations_pos=it_pos, iterations_neg=it_neg)


def compute_reputation(graph: ExperienceGraph,
                       params: ReputationParams) -> ReputationVector:
    """Positive, negative and overall reputation of every user."""
    values, exists = graph.dense()
    return reputation_from_dense(values, exists, params)
