"""Quality scoring for sensing tasks and service requests.

A task's quality is the mean of its participants' data-quality scores.
A request over T tasks scores QoS = T / |log(prod of task scores)|,
computed as a log sum so small scores cannot underflow the product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QOD_EPS = 1e-9
DEGENERATE_TOL = 1e-12


class DegenerateQoSError(ValueError):
    """All task scores were so close to 1 that the QoS diverges."""


@dataclass
class SensingTaskResult:
    """Per-participant quality scores of one completed sensing task."""

    task: int
    qods: np.ndarray

    def __post_init__(self):
        qods = np.asarray(self.qods, dtype=float)
        if qods.size == 0:
            raise ValueError("a sensing task needs at least one participant")
        self.qods = np.clip(qods, QOD_EPS, 1.0 - QOD_EPS)


@dataclass
class ServiceRequestResult:
    """Task-level scores and the final QoS of one service request."""

    request: int
    task_qods: list[float] = field(default_factory=list)
    qos: float = 0.0

    def __post_init__(self):
        if len(self.task_qods) < 1:
            raise ValueError("a service request needs at least one task")
        if not np.isfinite(self.qos):
            raise ValueError("qos must be finite")


def task_qod(result: SensingTaskResult) -> float:
    """Mean participant score of one task."""
    return float(np.mean(result.qods))


def request_qos(task_qods) -> float:
    """QoS of a request from its per-task scores."""
    scores = np.clip(np.asarray(task_qods, dtype=float), QOD_EPS, 1.0 - QOD_EPS)
    if scores.size == 0:
        raise ValueError("a service request needs at least one task")
    log_sum = float(np.log(scores).sum())
    if abs(log_sum) < DEGENERATE_TOL:
        raise DegenerateQoSError(f"|sum of log scores| = {abs(log_sum):.3e}")
    return scores.size / abs(log_sum)
