"""Agent-based simulation of a hidden-action principal-agent relationship with limited information."""

from .benchmark import BenchmarkSolution, second_best_oracle
from .engine import ScenarioConfig, run_scenario, scenario_grid
from .model import ActorParams, Contract

__all__ = [
    "ActorParams",
    "BenchmarkSolution",
    "Contract",
    "ScenarioConfig",
    "run_scenario",
    "scenario_grid",
    "second_best_oracle",
]
__version__ = "0.1.0"
