"""1D drift-diffusion corrosion model with Butler-Volmer boundary kinetics."""

from .discretization import Grid, solve_carrier, solve_poisson
from .params import InterfaceKinetics, ModelParams, Side, Species, check_admissibility, tau_max
from .timeloop import InitSpec, RunConfig, SimState, Trajectory, init, run, step

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "InitSpec",
    "InterfaceKinetics",
    "ModelParams",
    "RunConfig",
    "Side",
    "SimState",
    "Species",
    "Trajectory",
    "check_admissibility",
    "init",
    "run",
    "solve_carrier",
    "solve_poisson",
    "step",
    "tau_max",
]
