"""Random-transaction service economy simulator.

Agents buy fixed-quality services from randomly chosen sellers, a commercial
bank lends against a reserve requirement and absorbs defaults, and a
government taxes transactions and spends the proceeds.

>>> from service_economy import SimParams, run_simulation
>>> result = run_simulation(SimParams(), seed=1)
>>> len(result.weeks)
53
"""

__version__ = "0.1.0"

from .engine import run_simulation, step_week
from .harness import EnsembleSummary, SweepTable, derive_seeds, run_ensemble, sweep
from .market import market_step_week
from .model import (
    DefaultEvent,
    EconomyState,
    SimParams,
    SimResult,
    ValidationError,
    WeekRecord,
    init_state,
    average_over_weeks,
)
from .rng import Rng, rng_new

__all__ = [
    "DefaultEvent",
    "EconomyState",
    "EnsembleSummary",
    "Rng",
    "SimParams",
    "SimResult",
    "SweepTable",
    "ValidationError",
    "WeekRecord",
    "derive_seeds",
    "init_state",
    "market_step_week",
    "average_over_weeks",
    "rng_new",
    "run_ensemble",
    "run_simulation",
    "step_week",
    "sweep",
]
