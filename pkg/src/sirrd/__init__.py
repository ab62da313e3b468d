"""Reaction-diffusion SIR model with constant birth and death rates."""

__version__ = "0.1.0"

from .kinetics import (  # noqa: E402
    PAPER_L,
    PAPER_PARAMS,
    EquilibriumSet,
    InvariantRegionBounds,
    Params,
    SirPoint,
    equilibria,
    invariant_region,
    jacobian,
    reaction_rates,
)
from .grid import Field, Grid, integrate, laplacian_neumann, norm  # noqa: E402
from .integrator import (  # noqa: E402
    DivergenceError,
    SimConfig,
    State,
    Trajectory,
    initial_state,
    run_to_steady_state,
    simulate,
    stable_dt,
    step,
)

__all__ = [
    "PAPER_L", "PAPER_PARAMS", "EquilibriumSet", "InvariantRegionBounds", "Params", "SirPoint",
    "equilibria", "invariant_region", "jacobian", "reaction_rates",
    "Field", "Grid", "integrate", "laplacian_neumann", "norm",
    "DivergenceError", "SimConfig", "State", "Trajectory", "initial_state",
    "run_to_steady_state", "simulate", "stable_dt", "step",
]
