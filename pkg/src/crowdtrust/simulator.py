"""Scenario simulator: request stream, recruitment, learning and scoring.

One run processes ``n_requests`` service requests. Per request the
scenario stream draws a requester, a task count T and a participant count
P per task; the configured scheme selects participants, their quality
scores come from per-(user, task) substreams, the scheme learns from the
outcome and the request is scored. Trust-based runs additionally decay
every experience relation untouched by the request and refresh reputation
on the configured cadence.

Scenario and quality draws never depend on the scheme, so runs that share
a seed and differ only in ``scheme`` face identical potential data
(common random numbers) and their QoS series are directly comparable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .experience import ExperienceParams
from .population import Population, UserProfile, generate_population, sample_qod_many
from .qos import SensingTaskResult, ServiceRequestResult, request_qos, task_qod
from .recruitment import (RecruitDecision, SCHEME_NAMES, TrustBasedScheme,
                          make_scheme)
from .reputation import ReputationParams, ReputationVector
from .rng import child_seed, substream
from .trust import TrustParams

DETECTION_BUCKETS = (0.025, 0.05, 0.075, 0.10, 0.20)
SWEEP_FRACTIONS = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25)
SWEEP_CHECKPOINTS = (10, 40, 80, 160)
MOVING_AVERAGE_WINDOW = 10


@dataclass
class SimConfig:
    seed: int = 0
    n_users: int = 400
    malicious_fraction: float = 0.10
    low_quality_fraction: float = 0.15
    n_requests: int = 160
    tasks_per_request: tuple[int, int] = (5, 15)
    participants_per_task: tuple[int, int] = (5, 200)
    scheme: str = "trust"
    experience: ExperienceParams = field(default_factory=ExperienceParams)
    reputation: ReputationParams = field(default_factory=ReputationParams)
    trust: TrustParams = field(default_factory=TrustParams)
    rep_recompute_every: int = 1
    reputation_snapshot_every: int = 0  # 0 = final snapshot only
    log_decisions: bool = False

    def __post_init__(self):
        if self.n_users < 2:
            raise ValueError("need at least 2 users")
        if self.n_requests < 0:
            raise ValueError("n_requests must be >= 0")
        if self.scheme not in SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 <= self.malicious_fraction <= 0.25:
            raise ValueError("malicious_fraction must be in [0, 0.25]")
        if self.low_quality_fraction < 0.0:
            raise ValueError("low_quality_fraction must be >= 0")
        if self.malicious_fraction + self.low_quality_fraction > 1.0:
            raise ValueError("kind fractions exceed 1")
        for name, (lo, hi) in (("tasks_per_request", self.tasks_per_request),
                               ("participants_per_task", self.participants_per_task)):
            if lo > hi:
                raise ValueError(f"{name} range is empty")
            if lo < 1 or hi > self.n_users - 1:
                raise ValueError(f"{name} must lie within [1, n_users-1]")
        if self.rep_recompute_every < 1:
            raise ValueError("rep_recompute_every must be >= 1")
        if self.reputation_snapshot_every < 0:
            raise ValueError("reputation_snapshot_every must be >= 0")

    def kind_counts(self) -> tuple[int, int, int]:
        """(n_high, n_low, n_malicious) realizing the configured fractions."""
        n_mal = round(self.n_users * self.malicious_fraction)
        n_low = round(self.n_users * self.low_quality_fraction)
        n_high = self.n_users - n_low - n_mal
        return n_high, n_low, n_mal


@dataclass
class DetectionRow:
    """Kind breakdown of the lowest-reputation bucket of one size."""

    fraction: float
    size: int
    n_malicious: int
    n_low: int
    n_high: int


@dataclass
class RunReport:
    config: SimConfig
    population: Population
    requests: list[ServiceRequestResult]
    cumulative_qos: float
    snapshots: list[tuple[int, ReputationVector]]
    detection: list[DetectionRow] | None
    rep_iterations: list[tuple[int, int, int]]  # (request, pos iters, neg iters)
    decisions: list[RecruitDecision] | None
    wall_time_s: float
    n_tasks: int

    @property
    def qos_series(self) -> np.ndarray:
        return np.array([r.qos for r in self.requests])

    def moving_average(self, window: int = MOVING_AVERAGE_WINDOW) -> np.ndarray:
        """Trailing moving average; early entries average what exists."""
        series = self.qos_series
        out = np.empty_like(series)
        for i in range(series.size):
            out[i] = series[max(0, i + 1 - window):i + 1].mean()
        return out

    def max_rep_iterations(self) -> tuple[int, int]:
        if not self.rep_iterations:
            return 0, 0
        return (max(it for _, it, _ in self.rep_iterations),
                max(it for _, _, it in self.rep_iterations))


def potential_qod_matrix(population: Population, seed: int,
                         n_tasks: int) -> np.ndarray:
    """Potential quality draw of every (user, task) pair.

    Row u is user u's own substream, so the value a user would submit for
    task t is fixed by (seed, u, t) alone, whatever scheme runs and
    whoever else gets selected.
    """
    matrix = np.empty((population.n, n_tasks))
    for user in population.users:
        rng = substream(seed, "qod", user.user_id)
        matrix[user.user_id] = sample_qod_many(user, rng, n_tasks)
    return matrix


def _draw_scenario(config: SimConfig):
    """Requester and task sizes per request, scheme-independent."""
    rng = substream(config.seed, "scenario")
    t_lo, t_hi = config.tasks_per_request
    p_lo, p_hi = config.participants_per_task
    scenario = []
    for _ in range(config.n_requests):
        requester = int(rng.integers(0, config.n_users))
        n_tasks = int(rng.integers(t_lo, t_hi, endpoint=True))
        sizes = rng.integers(p_lo, p_hi, size=n_tasks, endpoint=True)
        scenario.append((requester, sizes))
    return scenario


def detection_report(rep: ReputationVector, population: Population,
                     buckets=DETECTION_BUCKETS) -> list[DetectionRow]:
    """Kind counts in the lowest-reputation buckets.

    Users are ranked by overall reputation; the clamp at zero leaves many
    exact ties, so the raw pos-neg difference breaks them (most negative
    first) and the user id makes the order total.
    """
    n = population.n
    diff = rep.pos - rep.neg
    order = sorted(range(n), key=lambda u: (rep.overall[u], diff[u], u))
    kinds = population.kinds
    rows = []
    for fraction in buckets:
        size = round(n * fraction)
        bucket = kinds[order[:size]]
        rows.append(DetectionRow(
            fraction=fraction, size=size,
            n_malicious=int((bucket == "malicious").sum()),
            n_low=int((bucket == "low").sum()),
            n_high=int((bucket == "high").sum())))
    return rows


def run_simulation(config: SimConfig) -> RunReport:
    """One full scenario run; identical config means identical report."""
    start = time.perf_counter()
    n_high, n_low, n_mal = config.kind_counts()
    population = generate_population(n_high, n_low, n_mal,
                                     substream(config.seed, "population"))
    scenario = _draw_scenario(config)
    total_tasks = sum(len(sizes) for _, sizes in scenario)
    qod = potential_qod_matrix(population, config.seed, total_tasks)

    scheme = make_scheme(config.scheme, config.n_users, config.experience,
                         config.reputation, config.trust)
    scheme_rng = substream(config.seed, "scheme")
    trust_run = isinstance(scheme, TrustBasedScheme)

    requests: list[ServiceRequestResult] = []
    snapshots: list[tuple[int, ReputationVector]] = []
    rep_iterations: list[tuple[int, int, int]] = []
    decisions: list[RecruitDecision] | None = [] if config.log_decisions else None
    cumulative = 0.0
    task_id = 0

    for index, (requester, sizes) in enumerate(scenario, start=1):
        task_scores = []
        refreshed = np.zeros(config.n_users, dtype=bool) if trust_run else None
        for p in sizes:
            decision = scheme.recruit(requester, int(p), scheme_rng, task_id)
            qods = qod[decision.selected, task_id]
            scheme.update(requester, decision, qods)
            if trust_run:
                refreshed[decision.selected] = True
            if decisions is not None:
                decisions.append(decision)
            task_scores.append(task_qod(SensingTaskResult(task_id, qods)))
            task_id += 1
        qos = request_qos(task_scores)
        cumulative += qos
        requests.append(ServiceRequestResult(request=index, task_qods=task_scores,
                                             qos=qos))
        if trust_run:
            scheme.store.decay_stale(requester, refreshed)
            scheme.rep_age += 1
            if scheme.rep_age >= config.rep_recompute_every:
                rep = scheme.recompute_reputation()
                rep_iterations.append((index, rep.iterations_pos, rep.iterations_neg))
            every = config.reputation_snapshot_every
            if every and index % every == 0:
                snapshots.append((index, scheme.rep))

    detection = None
    if trust_run and config.n_requests > 0:
        snapshots.append((config.n_requests, scheme.rep))
        detection = detection_report(scheme.rep, population)

    return RunReport(config=config, population=population, requests=requests,
                     cumulative_qos=cumulative, snapshots=snapshots,
                     detection=detection, rep_iterations=rep_iterations,
                     decisions=decisions, wall_time_s=time.perf_counter() - start,
                     n_tasks=total_tasks)


@dataclass
class SweepCell:
    scheme: str
    malicious_fraction: float
    checkpoint: int
    mean_qos: float
    stderr: float
    replicates: int


def _checkpoint_values(report: RunReport, checkpoints) -> list[float]:
    ma = report.moving_average()
    return [float(ma[c - 1]) for c in checkpoints]


def _sweep_run(args) -> tuple[tuple[str, float, int], list[float]]:
    config, checkpoints, scheme, fraction, replicate = args
    run_config = replace(config, scheme=scheme, malicious_fraction=fraction,
                         seed=child_seed(config.seed, "replicate", replicate),
                         log_decisions=False)
    report = run_simulation(run_config)
    return (scheme, fraction, replicate), _checkpoint_values(report, checkpoints)


def run_sweep(base: SimConfig, malicious_fractions=SWEEP_FRACTIONS,
              checkpoints=SWEEP_CHECKPOINTS, replicates: int = 1,
              schemes=SCHEME_NAMES, jobs: int = 1) -> list[SweepCell]:
    """Mean QoS (trailing moving average) per scheme/fraction/checkpoint.

    Replicate r of every cell uses the seed derived from (base seed, r),
    shared across schemes and fractions so scheme comparisons within a
    replicate see the same potential quality draws.
    """
    checkpoints = tuple(int(c) for c in checkpoints)
    if not checkpoints or max(checkpoints) > base.n_requests:
        raise ValueError("checkpoints must be within [1, n_requests]")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    for fraction in malicious_fractions:
        if not 0.0 <= fraction <= 0.25:
            raise ValueError("malicious fractions must be in [0, 0.25]")

    cells = [(base, checkpoints, scheme, float(fraction), r)
             for scheme in schemes
             for fraction in malicious_fractions
             for r in range(replicates)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_sweep_run, cells))
    else:
        results = dict(map(_sweep_run, cells))

    out = []
    for scheme in schemes:
        for fraction in malicious_fractions:
            fraction = float(fraction)
            values = np.array([results[(scheme, fraction, r)]
                               for r in range(replicates)])
            means = values.mean(axis=0)
            if replicates > 1:
                stderrs = values.std(axis=0, ddof=1) / math.sqrt(replicates)
            else:
                stderrs = np.zeros(len(checkpoints))
            for k, checkpoint in enumerate(checkpoints):
                out.append(SweepCell(scheme=scheme, malicious_fraction=fraction,
                                     checkpoint=checkpoint,
                                     mean_qos=float(means[k]),
                                     stderr=float(stderrs[k]),
                                     replicates=replicates))
    return out


# ---------------------------------------------------------------------------
# CSV serialization (12 significant digits, '.' decimal, header row)
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def write_qos_series(path, report: RunReport) -> None:
    lines = ["request_index,qos,cumulative_qos,scheme,seed"]
    running = 0.0
    for result in report.requests:
        running += result.qos
        lines.append(f"{result.request},{_fmt(result.qos)},{_fmt(running)},"
                     f"{report.config.scheme},{report.config.seed}")
    _write_lines(path, lines)


def write_snapshot(path, population: Population, rep: ReputationVector) -> None:
    lines = ["user_id,kind,pos,neg,overall"]
    for user in population.users:
        u = user.user_id
        lines.append(f"{u},{user.kind},{_fmt(rep.pos[u])},{_fmt(rep.neg[u])},"
                     f"{_fmt(rep.overall[u])}")
    _write_lines(path, lines)


def write_detection(path, rows: list[DetectionRow]) -> None:
    lines = ["bucket_fraction,n_malicious,n_low,n_high"]
    for row in rows:
        lines.append(f"{_fmt(row.fraction)},{row.n_malicious},{row.n_low},{row.n_high}")
    _write_lines(path, lines)


def write_sweep(path, cells: list[SweepCell]) -> None:
    lines = ["scheme,malicious_fraction,checkpoint,mean_qos,stderr,replicates"]
    for cell in cells:
        lines.append(f"{cell.scheme},{_fmt(cell.malicious_fraction)},{cell.checkpoint},"
                     f"{_fmt(cell.mean_qos)},{_fmt(cell.stderr)},{cell.replicates}")
    _write_lines(path, lines)


def write_decisions(path, report: RunReport) -> None:
    lines = ["task_id,scheme,selected_ids,scores"]
    for decision in report.decisions or []:
        ids = " ".join(str(int(u)) for u in decision.selected)
        scores = " ".join(_fmt(s) for s in decision.scores)
        lines.append(f"{decision.task},{report.config.scheme},{ids},{scores}")
    _write_lines(path, lines)


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
