"""Compound outage probability and outage capacity under fading-law uncertainty."""
from ._kernels import BACKEND
from .capacity import CapacityQuery, capacity_floor, capacity_loss_bound, outage_capacity
from .channel import (
    EpsEstimate,
    IidRayleigh,
    MimoScenario,
    PointMass,
    estimate_eps,
    mutual_information,
    rayleigh_siso_capacity,
    rayleigh_siso_eps,
)
from .compound import compound_outage, solve
from .core import (
    BracketError,
    ClassKind,
    CompoundSolution,
    ConvergenceError,
    DomainError,
    ForwardDual,
    Regime,
    ReverseRoot,
    UncertaintyClass,
    WorstCaseRatio,
    bernoulli_kl,
)
from .forward_kl import ForwardResult, solve_forward
from .lp_bounds import LpBoundChain, lp_lower_bounds, tv_exact_outage
from .oracle import oracle_discrete, oracle_forward, oracle_reverse
from .reverse_kl import ReverseResult, solve_reverse, solve_reverse_dual

__all__ = [
    "BACKEND",
    "CapacityQuery",
    "capacity_floor",
    "capacity_loss_bound",
    "outage_capacity",
    "EpsEstimate",
    "IidRayleigh",
    "MimoScenario",
    "PointMass",
    "estimate_eps",
    "mutual_information",
    "rayleigh_siso_capacity",
    "rayleigh_siso_eps",
    "compound_outage",
    "solve",
    "BracketError",
    "ClassKind",
    "CompoundSolution",
    "ConvergenceError",
    "DomainError",
    "ForwardDual",
    "Regime",
    "ReverseRoot",
    "UncertaintyClass",
    "WorstCaseRatio",
    "bernoulli_kl",
    "ForwardResult",
    "solve_forward",
    "LpBoundChain",
    "lp_lower_bounds",
    "tv_exact_outage",
    "oracle_discrete",
    "oracle_forward",
    "oracle_reverse",
    "ReverseResult",
    "solve_reverse",
    "solve_reverse_dual",
]
