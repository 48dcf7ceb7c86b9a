"""Continuous and discrete optimizers plus the multi-start campaign harness."""

from .anneal import SAConfig, simulated_annealing
from .campaign import (DEFAULT_ALPHAS, AlphaSummary, anneal_campaign, multi_start, parameter_report,
                       random_start, summarize, tradeoff_points)
from .cobyla import OptimizerConfig, local_minimize
from .results import RunResult
from .rounding import round_to_discrete

__all__ = [
    "DEFAULT_ALPHAS", "AlphaSummary", "OptimizerConfig", "RunResult", "SAConfig", "anneal_campaign",
    "local_minimize", "multi_start", "parameter_report", "random_start", "round_to_discrete",
    "simulated_annealing", "summarize", "tradeoff_points",
]
