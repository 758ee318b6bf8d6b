"""Illustrative structural models: steady states, linearized systems, exogenous processes."""

from tvpfactor.dsge.ncg import (
    NcgParams,
    SteadyState,
    LinearizedSystem,
    CoefficientBuilder,
    ncg_steady_state,
    build_linearized_system,
)
from tvpfactor.dsge.rbc import RbcParams, RbcSteadyState, rbc_steady_state, rbc_linear_system
from tvpfactor.dsge.exo import ContinuousAR, MarkovChain, simulate_exo
from tvpfactor.dsge.policy import PolicyFunction, GridSpec, solve_policy_grid

__all__ = [
    "NcgParams",
    "SteadyState",
    "LinearizedSystem",
    "CoefficientBuilder",
    "ncg_steady_state",
    "build_linearized_system",
    "RbcParams",
    "RbcSteadyState",
    "rbc_steady_state",
    "rbc_linear_system",
    "ContinuousAR",
    "MarkovChain",
    "simulate_exo",
    "PolicyFunction",
    "GridSpec",
    "solve_policy_grid",
]
