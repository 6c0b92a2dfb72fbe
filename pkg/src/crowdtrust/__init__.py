"""Trust-driven participant recruitment simulator for mobile crowd-sensing.

Builds pairwise experience from interaction quality, turns the experience
graph into global two-channel reputation, combines both into trust, and
compares trust-based recruitment against average, regression and random
baselines in a reproducible scenario simulator.
"""

from .experience import (ExperienceParams, ExperienceRelation, ExperienceStore,
                         Interaction, apply_decay, apply_decrease, apply_increase,
                         classify_interaction, new_relation, scripted_curves,
                         update_on_interaction)
from .population import (Population, UserProfile, generate_population,
                         sample_beta, sample_qod, sample_qod_many)
from .qos import (DegenerateQoSError, SensingTaskResult, ServiceRequestResult,
                  request_qos, task_qod)
from .recruitment import (AverageScheme, RandomScheme, RecruitDecision,
                          RegressionScheme, TrustBasedScheme, fit_poly3,
                          make_scheme, pick_top, poly_eval)
from .reputation import (ExperienceGraph, NonConvergenceError, ReputationParams,
                         ReputationVector, compute_reputation, power_iterate,
                         split_graph, uniform_reputation)
from .rng import child_seed, substream
from .simulator import (DetectionRow, RunReport, SimConfig, SweepCell,
                        detection_report, potential_qod_matrix, run_simulation,
                        run_sweep)
from .trust import TrustParams, trust, trust_row

__version__ = "0.1.0"
