"""User behavior models and data-quality sampling.

Three user kinds, each emitting one quality score per sensing task:

* high quality: unimodal Beta, bulk of the mass around 0.75-0.85;
* low quality:  unimodal Beta, bulk around 0.5-0.65;
* malicious:    bimodal mixture that looks excellent most of the time
  (Beta with mean near 0.87) but intermittently submits near-garbage
  (Beta with mean near 0.15-0.19). The component is drawn per task.

Per-user shape parameters are drawn uniformly inside the ranges below, so
every user of a kind has its own distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HIGH = "high"
LOW = "low"
MALICIOUS = "malicious"
KINDS = (HIGH, LOW, MALICIOUS)

# (lo, hi) open intervals for per-user shape parameters
HIGH_A = (10.0, 15.0)
HIGH_B = (3.0, 5.0)
LOW_A = (9.0, 12.0)
LOW_B = (7.0, 9.0)
MAL_A_HIGH = (18.0, 22.0)
MAL_B_HIGH = (2.5, 3.5)
MAL_A_LOW = (4.0, 6.0)
MAL_B_LOW = (25.0, 35.0)
MAL_MIX = 0.7  # probability of the high component per task

_OPEN_EPS = 1e-12  # keep samples strictly inside (0, 1)


@dataclass(frozen=True)
class UserProfile:
    """Behavior model of one user.

    For high/low kinds (a, b) are the Beta shapes. For malicious users
    (a, b) is the high component, (a_low, b_low) the low one and ``mix``
    the per-task probability of drawing from the high component.
    """

    user_id: int
    kind: str
    a: float
    b: float
    a_low: float | None = None
    b_low: float | None = None
    mix: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown user kind {self.kind!r}")
        ranges = {HIGH: (HIGH_A, HIGH_B), LOW: (LOW_A, LOW_B),
                  MALICIOUS: (MAL_A_HIGH, MAL_B_HIGH)}[self.kind]
        _check_range("a", self.a, ranges[0])
        _check_range("b", self.b, ranges[1])
        if self.kind == MALICIOUS:
            if self.a_low is None or self.b_low is None or self.mix is None:
                raise ValueError("malicious profile needs a_low, b_low and mix")
            _check_range("a_low", self.a_low, MAL_A_LOW)
            _check_range("b_low", self.b_low, MAL_B_LOW)
            if not 0.0 < self.mix < 1.0:
                raise ValueError("mix must be in (0, 1)")
        elif self.a_low is not None or self.b_low is not None or self.mix is not None:
            raise ValueError(f"{self.kind} profile takes only (a, b)")

    def mean_qod(self) -> float:
        """Long-run expected quality score of this user."""
        primary = self.a / (self.a + self.b)
        if self.kind != MALICIOUS:
            return primary
        low = self.a_low / (self.a_low + self.b_low)
        return self.mix * primary + (1.0 - self.mix) * low


def _check_range(name: str, value: float, bounds: tuple[float, float]) -> None:
    lo, hi = bounds
    if not lo < value < hi:
        raise ValueError(f"{name}={value} outside ({lo}, {hi})")


@dataclass
class Population:
    users: list[UserProfile]

    def __post_init__(self):
        for i, user in enumerate(self.users):
            if user.user_id != i:
                raise ValueError("user ids must be dense 0..n-1")

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def kinds(self) -> np.ndarray:
        return np.array([u.kind for u in self.users])

    def count(self, kind: str) -> int:
        return sum(1 for u in self.users if u.kind == kind)


def sample_beta(a: float, b: float, rng: np.random.Generator) -> float:
    """One Beta(a, b) variate, strictly inside (0, 1)."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("Beta shape parameters must be > 0")
    return float(np.clip(rng.beta(a, b), _OPEN_EPS, 1.0 - _OPEN_EPS))


def sample_qod(profile: UserProfile, rng: np.random.Generator) -> float:
    """One quality score for one task from a user's behavior model."""
    if profile.kind == MALICIOUS:
        if rng.random() < profile.mix:
            return sample_beta(profile.a, profile.b, rng)
        return sample_beta(profile.a_low, profile.b_low, rng)
    return sample_beta(profile.a, profile.b, rng)


def sample_qod_many(profile: UserProfile, rng: np.random.Generator,
                    size: int) -> np.ndarray:
    """Quality scores for ``size`` tasks, vectorized.

    Malicious draws consume one uniform and both component arrays per
    call, so the stream layout does not depend on the mixture outcomes.
    """
    if size < 0:
        raise ValueError("size must be >= 0")
    if profile.kind == MALICIOUS:
        take_high = rng.random(size) < profile.mix
        high = rng.beta(profile.a, profile.b, size)
        low = rng.beta(profile.a_low, profile.b_low, size)
        out = np.where(take_high, high, low)
    else:
        out = rng.beta(profile.a, profile.b, size)
    return np.clip(out, _OPEN_EPS, 1.0 - _OPEN_EPS)


def generate_population(n_high: int, n_low: int, n_malicious: int,
                        rng: np.random.Generator) -> Population:
    """Population with per-user shapes drawn inside the kind's range.

    Users are id-ordered by kind: high, then low, then malicious.
    """
    if min(n_high, n_low, n_malicious) < 0:
        raise ValueError("counts must be >= 0")
    users: list[UserProfile] = []
    uid = 0
    for _ in range(n_high):
        users.append(UserProfile(uid, HIGH, rng.uniform(*HIGH_A), rng.uniform(*HIGH_B)))
        uid += 1
    for _ in range(n_low):
        users.append(UserProfile(uid, LOW, rng.uniform(*LOW_A), rng.uniform(*LOW_B)))
        uid += 1
    for _ in range(n_malicious):
        users.append(UserProfile(
            uid, MALICIOUS,
            rng.uniform(*MAL_A_HIGH), rng.uniform(*MAL_B_HIGH),
            a_low=rng.uniform(*MAL_A_LOW), b_low=rng.uniform(*MAL_B_LOW),
            mix=MAL_MIX))
        uid += 1
    return Population(users)
