"""Linear rational-expectations solvers and subvector VARMA extraction."""

from tvpfactor.re_solver.system import ReSystem, ReSolution
from tvpfactor.re_solver.gensys import solve_cp, solve_tvp, solve_rs, simulate_solution, system_residual
from tvpfactor.re_solver.marginalize import VarmaModel, marginalize, marginalize_tvp
from tvpfactor.re_solver.assemble import (
    assemble_re_system,
    simulate_ncg_path,
    time_varying_entry_paths,
)

__all__ = [
    "ReSystem",
    "ReSolution",
    "solve_cp",
    "solve_tvp",
    "solve_rs",
    "simulate_solution",
    "system_residual",
    "VarmaModel",
    "marginalize",
    "marginalize_tvp",
    "assemble_re_system",
    "simulate_ncg_path",
    "time_varying_entry_paths",
]
