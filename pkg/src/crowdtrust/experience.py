"""Pairwise experience model.

Experience is an asymmetric trustor -> trustee value in [0, 1] maintained
from the outcome of each interaction. An interaction is classified by its
data-quality score against two thresholds:

* cooperative   (qod >= theta_co):   value rises, with diminishing gains
  as it approaches 1,
* uncooperative (qod <= theta_unco): value falls ``beta`` times faster
  than it rises, floored at ``min_exp``,
* neutral / no interaction:          value decays slowly toward ``exp0``,
  strong relations decaying less than weak ones.

The scalar operations below are pure; :class:`ExperienceStore` applies the
same arithmetic to whole rows of relations at once for simulation use.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ExperienceParams:
    """Update-rule coefficients. Defaults are the reference setting."""

    max_exp: float = 1.0
    min_exp: float = 0.0
    exp0: float = 0.3
    alpha: float = 0.1
    beta: float = 2.0
    theta_co: float = 0.6
    theta_unco: float = 0.3
    delta: float = 0.005
    gamma_decay: float = 0.005

    def __post_init__(self):
        if self.max_exp != 1.0:
            raise ValueError("max_exp must be 1")
        if not 0.0 <= self.min_exp < self.exp0 < self.max_exp:
            raise ValueError("requires 0 <= min_exp < exp0 < max_exp")
        if not 0.0 < self.theta_unco < self.theta_co < 1.0:
            raise ValueError("requires 0 < theta_unco < theta_co < 1")
        if not 0.0 < self.alpha < self.max_exp:
            raise ValueError("alpha must be in (0, max_exp)")
        if self.beta <= 1.0:
            raise ValueError("beta must be > 1")
        if self.delta <= 0.0 or self.gamma_decay <= 0.0:
            raise ValueError("delta and gamma_decay must be > 0")


class Interaction(enum.Enum):
    COOPERATIVE = "cooperative"
    UNCOOPERATIVE = "uncooperative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class ExperienceRelation:
    """Directed trustor -> trustee experience value.

    ``prev_value`` is the value before the most recent update; the decay
    rule reads it instead of the current value, so a relation that has
    never been updated decays as if its history were flat at ``exp0``.
    """

    trustor: int
    trustee: int
    value: float
    prev_value: float
    last_update: int = 0

    def __post_init__(self):
        if self.trustor == self.trustee:
            raise ValueError("self-relations are not allowed")


def new_relation(trustor: int, trustee: int, params: ExperienceParams,
                 step: int = 0) -> ExperienceRelation:
    """Bootstrap relation for a pair that has never interacted."""
    return ExperienceRelation(trustor, trustee, params.exp0, params.exp0, step)


def classify_interaction(qod: float, params: ExperienceParams) -> Interaction:
    """Classify a data-quality score; thresholds themselves are inclusive."""
    if not 0.0 <= qod <= 1.0:
        raise ValueError(f"qod must be in [0, 1], got {qod}")
    if qod >= params.theta_co:
        return Interaction.COOPERATIVE
    if qod <= params.theta_unco:
        return Interaction.UNCOOPERATIVE
    return Interaction.NEUTRAL


def apply_increase(rel: ExperienceRelation, qod: float,
                   params: ExperienceParams) -> ExperienceRelation:
    """Cooperative update: gain is qod * alpha * (1 - value/max)."""
    gain = qod * params.alpha * (1.0 - rel.value / params.max_exp)
    return replace(rel, value=rel.value + gain, prev_value=rel.value)


def apply_decrease(rel: ExperienceRelation, qod: float,
                   params: ExperienceParams) -> ExperienceRelation:
    """Uncooperative update: loss is beta times the matching gain rate."""
    loss = (1.0 - qod) * params.beta * params.alpha * (1.0 - rel.value / params.max_exp)
    return replace(rel, value=max(params.min_exp, rel.value - loss),
                   prev_value=rel.value)


def apply_decay(rel: ExperienceRelation, params: ExperienceParams) -> ExperienceRelation:
    """Idle/neutral update: slow drift toward exp0.

    The exp0 floor only stops decay from above; a value already below it
    (driven down by uncooperative interactions) stays put, so bad history
    is not forgotten by mere inactivity.
    """
    drop = params.delta * (1.0 + params.gamma_decay - rel.prev_value / params.max_exp)
    decayed = max(params.exp0, rel.value - drop)
    return replace(rel, value=min(rel.value, decayed), prev_value=rel.value)


def update_on_interaction(rel: ExperienceRelation, qod: float,
                          params: ExperienceParams, step: int = 0) -> ExperienceRelation:
    """Route one interaction to the matching update and stamp the step."""
    kind = classify_interaction(qod, params)
    if kind is Interaction.COOPERATIVE:
        rel = apply_increase(rel, qod, params)
    elif kind is Interaction.UNCOOPERATIVE:
        rel = apply_decrease(rel, qod, params)
    else:
        rel = apply_decay(rel, params)
    return replace(rel, last_update=step)


class ExperienceStore:
    """All experience relations of one simulation, row per trustor.

    Rows are dense length-n arrays created lazily on a trustor's first
    interaction; an existence mask separates real relations from the
    bootstrap default. Single-writer: the simulator owns all mutation.
    """

    def __init__(self, n_users: int, params: ExperienceParams):
        self.n = n_users
        self.params = params
        self._rows: dict[int, dict[str, np.ndarray]] = {}

    def _row(self, trustor: int) -> dict[str, np.ndarray]:
        row = self._rows.get(trustor)
        if row is None:
            row = {
                "value": np.full(self.n, self.params.exp0),
                "prev": np.full(self.n, self.params.exp0),
                "exists": np.zeros(self.n, dtype=bool),
            }
            self._rows[trustor] = row
        return row

    @property
    def trustors(self):
        return self._rows.keys()

    def edge_count(self) -> int:
        return sum(int(row["exists"].sum()) for row in self._rows.values())

    def values_for(self, trustor: int) -> np.ndarray:
        """Experience row of a trustor; unknown pairs read as exp0."""
        row = self._rows.get(trustor)
        if row is None:
            return np.full(self.n, self.params.exp0)
        return row["value"].copy()

    def interact(self, trustor: int, trustees: np.ndarray, qods: np.ndarray) -> None:
        """Apply one interaction per (trustor, trustee) pair, vectorized.

        Mirrors classify/increase/decrease/decay exactly; relations are
        created at exp0 on first contact before the update is applied.
        """
        if np.any(qods < 0.0) or np.any(qods > 1.0):
            raise ValueError("qod values must lie in [0, 1]")
        if np.any(trustees == trustor):
            raise ValueError("trustor cannot interact with itself")
        p = self.params
        row = self._row(trustor)
        row["exists"][trustees] = True
        old = row["value"][trustees]
        prev = row["prev"][trustees]
        headroom = 1.0 - old / p.max_exp

        coop = qods >= p.theta_co
        unco = qods <= p.theta_unco
        neutral = ~(coop | unco)

        new = np.empty_like(old)
        new[coop] = old[coop] + qods[coop] * p.alpha * headroom[coop]
        new[unco] = np.maximum(
            p.min_exp,
            old[unco] - (1.0 - qods[unco]) * p.beta * p.alpha * headroom[unco])
        decayed = np.maximum(
            p.exp0,
            old[neutral] - p.delta * (1.0 + p.gamma_decay - prev[neutral] / p.max_exp))
        new[neutral] = np.minimum(old[neutral], decayed)

        row["prev"][trustees] = old
        row["value"][trustees] = new

    def decay_stale(self, active_trustor: int | None, refreshed: np.ndarray | None) -> int:
        """Decay every existing relation not refreshed this round.

        ``refreshed`` is a boolean mask over the active trustor's row;
        rows of other trustors had no interaction and decay entirely.
        Returns the number of relations decayed.
        """
        p = self.params
        touched = 0
        for trustor, row in self._rows.items():
            stale = row["exists"]
            if trustor == active_trustor and refreshed is not None:
                stale = stale & ~refreshed
            idx = np.nonzero(stale)[0]
            if idx.size == 0:
                continue
            old = row["value"][idx]
            drop = p.delta * (1.0 + p.gamma_decay - row["prev"][idx] / p.max_exp)
            row["prev"][idx] = old
            row["value"][idx] = np.minimum(old, np.maximum(p.exp0, old - drop))
            touched += idx.size
        return touched

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, exists) dense n x n views for the reputation solver."""
        values = np.zeros((self.n, self.n))
        exists = np.zeros((self.n, self.n), dtype=bool)
        for trustor in sorted(self._rows):
            row = self._rows[trustor]
            values[trustor] = np.where(row["exists"], row["value"], 0.0)
            exists[trustor] = row["exists"]
        return values, exists

    def edges(self) -> dict[tuple[int, int], float]:
        """Sparse (trustor, trustee) -> value map of existing relations."""
        out: dict[tuple[int, int], float] = {}
        for trustor in sorted(self._rows):
            row = self._rows[trustor]
            for trustee in np.nonzero(row["exists"])[0]:
                out[(trustor, int(trustee))] = float(row["value"][trustee])
        return out


def scripted_curves(params: ExperienceParams | None = None,
                    cooperative_steps: int = 60,
                    burst_steps: int = 30,
                    decay_steps: int = 400) -> dict[str, np.ndarray]:
    """Reference single-relation trajectories for the three regimes.

    cooperative:   pure cooperative interactions at qod = theta_co
    uncooperative: 30 cooperative steps, then an uncooperative burst at 0.1
    decay:         30 cooperative steps, then idle decay down to the floor

    Each curve starts at exp0 (step 0). Returned values include step 0.
    """
    params = params or ExperienceParams()

    def run(qods) -> np.ndarray:
        rel = new_relation(0, 1, params)
        out = [rel.value]
        for step, qod in enumerate(qods, start=1):
            if qod is None:
                rel = apply_decay(rel, params)
            else:
                rel = update_on_interaction(rel, qod, params, step=step)
            out.append(rel.value)
        return np.asarray(out)

    lead_in = [params.theta_co] * 30
    return {
        "cooperative": run([params.theta_co] * cooperative_steps),
        "uncooperative": run(lead_in + [0.1] * burst_steps),
        "decay": run(lead_in + [None] * decay_steps),
    }
