"""Factor TVP-VAR toolkit.

Solvers for linear rational-expectations systems (constant, time-varying and
regime-switching), closed-form neoclassical-growth / RBC model builders,
Bayesian random-walk TVP-VAR estimation with stochastic volatility, principal
component factor compression of drifting parameters, predictive-density
simulation, forecast evaluation, and time-varying impulse responses.
"""

__version__ = "0.1.0"

from tvpfactor import exceptions  # noqa: F401
