"""Finite-buffer batch-arrival queue with partial rejection.

Batches of κ customers arrive at Poisson(μ) epochs; a batch that does not
fit in the ``B + 1`` places is admitted in part and the rest is lost.  The
server removes a ge(λ) number of customers at each service completion.
Transforms of busy periods, first-loss epochs, occupancy laws and
two-sided exit problems are computed from one resolvent sequence.
"""
from .model import (AgeBeyondSupport, BatchLaw, Deterministic, Empirical, Erlang, ErlangMixture,
                    Exponential, HyperExponential, ModelError, QueueModel, ServiceLaw, build_model,
                    load_model)
from .root import solve_c
from .resolvent import q_contour, q_table
from .exit import sup_inf_law, sup_joint, trivariate, two_sided
from .reflected import (reflected_ergodic, reflected_increments, reflected_passage_general,
                        reflected_passage_geometric, reflected_two_sided)
from .queueing import (SystemState, busy_period_lt, busy_period_mean, first_loss_count, first_loss_joint,
                       first_loss_lt, first_loss_mean, stationary_dist, transient_counts)
from .diffusion_limit import WienerSpec, convergence_report, reference_model
from .inversion import InversionRequest, invert
from .simulator import SimConfig, simulate

__version__ = "0.1.0"

__all__ = [
    "AgeBeyondSupport", "BatchLaw", "Deterministic", "Empirical", "Erlang", "ErlangMixture", "Exponential",
    "HyperExponential", "ModelError", "QueueModel", "ServiceLaw", "build_model", "load_model",
    "solve_c", "q_table", "q_contour", "two_sided", "sup_joint", "trivariate", "sup_inf_law",
    "reflected_passage_geometric", "reflected_passage_general", "reflected_increments", "reflected_ergodic",
    "reflected_two_sided", "SystemState", "busy_period_lt", "busy_period_mean", "first_loss_lt",
    "first_loss_mean", "first_loss_joint", "first_loss_count", "transient_counts", "stationary_dist",
    "WienerSpec", "convergence_report", "reference_model", "InversionRequest", "invert",
    "SimConfig", "simulate", "__version__",
]
