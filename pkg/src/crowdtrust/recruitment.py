"""Participant recruitment schemes.

Four ways to pick the P participants of a sensing task:

* trust-based:  highest trust (reputation + experience) with the requester;
* average:      highest running mean of a user's past quality scores;
* regression:   highest cubic least-squares extrapolation of a user's
                score history, clamped to [0, 1];
* random:       uniform subset, the baseline.

Average and regression start unseen users at an optimistic prior of 1.0 so
everyone gets explored. All schemes break score ties with a seeded shuffle
followed by a stable sort, so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .experience import ExperienceParams, ExperienceStore
from .reputation import ReputationParams, ReputationVector, reputation_from_dense, uniform_reputation
from .trust import TrustParams

UNSEEN_PRIOR = 1.0
POLY_DEGREE = 3


@dataclass
class RecruitDecision:
    """Outcome of one selection round."""

    task: int
    requester: int
    selected: np.ndarray
    scores: np.ndarray
    truncated: bool = False  # requested more participants than exist

    def __post_init__(self):
        if len(self.selected) != len(set(self.selected.tolist())):
            raise ValueError("duplicate participants selected")
        if self.requester in self.selected:
            raise ValueError("requester selected as participant")


def pick_top(scores: np.ndarray, p: int, requester: int,
             rng: np.random.Generator, task: int) -> RecruitDecision:
    """Top-p users by score, excluding the requester.

    Candidates are shuffled with the scheme's stream and then stably
    sorted by score, so exact ties resolve to a uniform random choice.
    Asking for more than n-1 participants recruits everyone and flags it.
    """
    n = scores.shape[0]
    if p < 1:
        raise ValueError("p must be >= 1")
    candidates = np.arange(n)
    candidates = candidates[candidates != requester]
    perm = rng.permutation(candidates)
    order = np.argsort(-scores[perm], kind="stable")
    take = min(p, candidates.size)
    selected = perm[order[:take]]
    return RecruitDecision(task=task, requester=requester, selected=selected,
                           scores=scores[selected], truncated=take < p)


class RandomScheme:
    """Uniform selection without replacement; keeps no state."""

    name = "random"

    def __init__(self, n_users: int):
        self.n = n_users

    def recruit(self, requester: int, p: int, rng: np.random.Generator,
                task: int) -> RecruitDecision:
        return pick_top(np.zeros(self.n), p, requester, rng, task)

    def update(self, requester: int, decision: RecruitDecision,
               qods: np.ndarray) -> None:
        pass


class AverageScheme:
    """Selection by running mean of observed quality scores."""

    name = "average"

    def __init__(self, n_users: int):
        self.n = n_users
        self.avg = np.zeros(n_users)
        self.count = np.zeros(n_users, dtype=np.int64)

    def scores(self) -> np.ndarray:
        return np.where(self.count > 0, self.avg, UNSEEN_PRIOR)

    def recruit(self, requester: int, p: int, rng: np.random.Generator,
                task: int) -> RecruitDecision:
        return pick_top(self.scores(), p, requester, rng, task)

    def update(self, requester: int, decision: RecruitDecision,
               qods: np.ndarray) -> None:
        sel = decision.selected
        if len(sel) != len(qods):
            raise ValueError("qods misaligned with selected participants")
        self.count[sel] += 1
        self.avg[sel] += (qods - self.avg[sel]) / self.count[sel]


def fit_poly3(points) -> np.ndarray:
    """Cubic least-squares fit; coefficients ascending (c0, c1, c2, c3).

    Solves the normal equations in a rescaled coordinate (t / max|t|) to
    keep the 4x4 system well conditioned. With fewer than 4 points or
    fewer than 4 distinct abscissas the design is rank deficient and the
    fit falls back to the constant mean predictor.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (t, y) pairs")
    t, y = pts[:, 0], pts[:, 1]
    if len(t) < POLY_DEGREE + 1 or len(np.unique(t)) < POLY_DEGREE + 1:
        return np.array([float(np.mean(y)), 0.0, 0.0, 0.0])
    scale = np.abs(t).max()
    if scale == 0.0:
        scale = 1.0
    tau = t / scale
    phi = np.vander(tau, POLY_DEGREE + 1, increasing=True)
    coef_scaled = np.linalg.solve(phi.T @ phi, phi.T @ y)
    powers = scale ** np.arange(POLY_DEGREE + 1)
    return coef_scaled / powers


def poly_eval(coefficients: np.ndarray, t: float) -> float:
    """Evaluate an ascending-coefficient polynomial at t (Horner)."""
    result = 0.0
    for c in coefficients[::-1]:
        result = result * t + c
    return float(result)


class RegressionScheme:
    """Selection by one-step cubic extrapolation of each user's history.

    Histories are kept as running power sums (sum of t^j and t^j * y for
    the user's own observation index t = 1, 2, ...), which is all a cubic
    normal-equations fit needs; predictions for the whole population are
    then a batched 4x4 solve instead of per-user refits.
    """

    name = "regression"

    def __init__(self, n_users: int):
        self.n = n_users
        self.count = np.zeros(n_users, dtype=np.int64)
        self.t_pow = np.zeros((2 * POLY_DEGREE + 1, n_users))  # sum t^j, j=0..6
        self.ty_pow = np.zeros((POLY_DEGREE + 1, n_users))     # sum t^j * y, j=0..3

    def predictions(self) -> np.ndarray:
        """Predicted next-task score per user, clamped to [0, 1].

        Unseen users get the optimistic prior; users with fewer than 4
        observations get their plain mean.
        """
        scores = np.full(self.n, UNSEEN_PRIOR)
        seen = self.count > 0
        few = seen & (self.count <= POLY_DEGREE)
        if few.any():
            scores[few] = self.ty_pow[0, few] / self.count[few]
        fit = self.count > POLY_DEGREE
        if fit.any():
            scores[fit] = self._fit_predict(np.nonzero(fit)[0])
        return np.clip(scores, 0.0, 1.0)

    def _fit_predict(self, users: np.ndarray) -> np.ndarray:
        """Batched scaled normal-equations solve; predicts at t = k + 1."""
        k = self.count[users].astype(float)
        m = users.size
        inv = 1.0 / k
        # scaled moments: sum (t/k)^j = (sum t^j) / k^j
        scaled_t = np.empty((2 * POLY_DEGREE + 1, m))
        scaled_t[0] = self.t_pow[0, users]
        for j in range(1, 2 * POLY_DEGREE + 1):
            scaled_t[j] = self.t_pow[j, users] * inv ** j
        rhs = np.empty((m, POLY_DEGREE + 1))
        for j in range(POLY_DEGREE + 1):
            rhs[:, j] = self.ty_pow[j, users] * inv ** j
        system = np.empty((m, POLY_DEGREE + 1, POLY_DEGREE + 1))
        for i in range(POLY_DEGREE + 1):
            for j in range(POLY_DEGREE + 1):
                system[:, i, j] = scaled_t[i + j]
        coef = np.linalg.solve(system, rhs[:, :, None])[:, :, 0]
        target = (k + 1.0) * inv  # next index in the scaled coordinate
        pred = np.zeros(m)
        for j in range(POLY_DEGREE, -1, -1):
            pred = pred * target + coef[:, j]
        return pred

    def recruit(self, requester: int, p: int, rng: np.random.Generator,
                task: int) -> RecruitDecision:
        return pick_top(self.predictions(), p, requester, rng, task)

    def update(self, requester: int, decision: RecruitDecision,
               qods: np.ndarray) -> None:
        sel = decision.selected
        if len(sel) != len(qods):
            raise ValueError("qods misaligned with selected participants")
        self.count[sel] += 1
        t = self.count[sel].astype(float)
        t_j = np.ones_like(t)
        for j in range(2 * POLY_DEGREE + 1):
            self.t_pow[j, sel] += t_j
            if j <= POLY_DEGREE:
                self.ty_pow[j, sel] += t_j * qods
            t_j = t_j * t


class TrustBasedScheme:
    """Selection by trust with the requester, learned from interactions.

    Keeps the experience store and the latest reputation vector; trust
    rows are derived lazily from both, so experience updates show up in
    the very next selection while reputation refreshes on the simulator's
    cadence.
    """

    name = "trust"

    def __init__(self, n_users: int, exp_params: ExperienceParams,
                 rep_params: ReputationParams, trust_params: TrustParams):
        self.n = n_users
        self.exp_params = exp_params
        self.rep_params = rep_params
        self.trust_params = trust_params
        self.store = ExperienceStore(n_users, exp_params)
        self.rep = uniform_reputation(n_users)
        self.rep_age = 0  # requests since the last reputation refresh

    def trust_scores(self, requester: int) -> np.ndarray:
        row = (self.trust_params.w1 * self.rep.overall
               + self.trust_params.w2 * self.store.values_for(requester))
        row[requester] = -np.inf
        return row

    def recruit(self, requester: int, p: int, rng: np.random.Generator,
                task: int) -> RecruitDecision:
        return pick_top(self.trust_scores(requester), p, requester, rng, task)

    def update(self, requester: int, decision: RecruitDecision,
               qods: np.ndarray, recompute_rep: bool = False) -> None:
        if len(decision.selected) != len(qods):
            raise ValueError("qods misaligned with selected participants")
        self.store.interact(requester, decision.selected, np.asarray(qods, dtype=float))
        if recompute_rep:
            self.recompute_reputation()

    def recompute_reputation(self) -> ReputationVector:
        values, exists = self.store.dense()
        self.rep = reputation_from_dense(values, exists, self.rep_params)
        self.rep_age = 0
        return self.rep


SCHEME_NAMES = ("trust", "average", "regression", "random")


def make_scheme(name: str, n_users: int, exp_params: ExperienceParams,
                rep_params: ReputationParams, trust_params: TrustParams):
    if name == "trust":
        return TrustBasedScheme(n_users, exp_params, rep_params, trust_params)
    if name == "average":
        return AverageScheme(n_users)
    if name == "regression":
        return RegressionScheme(n_users)
    if name == "random":
        return RandomScheme(n_users)
    raise ValueError(f"unknown scheme {name!r}")
