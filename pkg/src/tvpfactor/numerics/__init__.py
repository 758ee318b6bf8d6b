"""Shared numerical kernels: QZ factorization and linear-Gaussian state space."""

from tvpfactor.numerics.qz import QzFactorization, qz_decompose
from tvpfactor.numerics.state_space import (
    StateSpaceModel,
    SmootherOutput,
    diffuse_initial,
    kalman_smooth,
    simulation_smoother,
    simulation_smoother_many,
)

__all__ = [
    "QzFactorization",
    "qz_decompose",
    "StateSpaceModel",
    "SmootherOutput",
    "diffuse_initial",
    "kalman_smooth",
    "simulation_smoother",
    "simulation_smoother_many",
]
