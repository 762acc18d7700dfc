"""Period loop, run orchestration and the scenario grid.

Every run draws from its own counter-based stream (Philox keyed by the
master seed, the scenario id and the run index), so results do not depend
on how runs are scheduled across workers. Within a period the draws happen
in a fixed order: the environment, then the mode coin when the principal's
memory has no spread, then the search draws. Period 1 additionally starts
with the draw of the initial target.
"""

from __future__ import annotations

import itertools
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .beliefs import AGENT, PRINCIPAL, BeliefState, estimate_theta, predict, predicted_action_space, record
from .benchmark import BenchmarkSolution, second_best_oracle
from .decision import (
    REOPTIMIZE,
    SearchMode,
    SearchParams,
    agent_respond,
    choose_mode,
    design_contract,
    exploration_threshold,
    search_step,
)
from .model import ActorParams, agent_utility, outcome, principal_utility, sharing

DELTAS = (0.25, 0.5, 0.75)
MEMORIES = (1, 3, math.inf)
LOCAL_FRACTIONS = (1 / 10, 1 / 5, 1 / 3)
SIGMA_FRACTIONS = (0.05, 0.25, 0.45, 0.65)

GRID_AXES = {
    "delta": DELTAS,
    "m": MEMORIES,
    "local_fraction": LOCAL_FRACTIONS,
    "sigma_fraction": SIGMA_FRACTIONS,
}


class ConfigError(ValueError):
    """Invalid scenario configuration."""


def _on_grid(value, allowed) -> bool:
    return any(value == a or math.isclose(value, a, rel_tol=1e-9) for a in allowed)


def format_fraction(value: float) -> str:
    """``0.2 -> '1/5'`` for unit fractions, plain ``%g`` otherwise."""
    inv = 1.0 / value
    if math.isclose(inv, round(inv), rel_tol=1e-9):
        return f"1/{round(inv)}"
    return f"{value:g}"


def format_memory(m: float) -> str:
    return "inf" if math.isinf(m) else str(int(m))


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of the experiment grid plus the global simulation settings."""

    delta: float = 0.5
    m: float = math.inf
    local_fraction: float = 1 / 5
    sigma_fraction: float = 0.05
    actor: ActorParams = ActorParams()
    mu: float = 0.0
    T: int = 20
    R: int = 700
    master_seed: int = 0
    literal_threshold: bool = False
    candidate_premium: str = REOPTIMIZE
    n_candidates: int = 2
    search_final_period: bool = True
    allow_offgrid: bool = False

    def __post_init__(self):
        if self.T < 1 or self.R < 1:
            raise ConfigError("T and R must be positive")
        if not (self.m >= 1 and (math.isinf(self.m) or float(self.m).is_integer())):
            raise ConfigError(f"m must be a positive integer or inf, got {self.m}")
        if not self.sigma_fraction > 0:
            raise ConfigError(f"sigma_fraction must be positive, got {self.sigma_fraction}")
        try:
            self.search_params
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.allow_offgrid:
            for name, allowed in GRID_AXES.items():
                if not _on_grid(getattr(self, name), allowed):
                    shown = ", ".join(format_memory(a) if name == "m" else format_fraction(a)
                                      if name == "local_fraction" else f"{a:g}" for a in allowed)
                    raise ConfigError(f"{name}={getattr(self, name)} is outside the experiment grid "
                                      f"{{{shown}}}; set allow_offgrid = true to override")

    @property
    def scenario_id(self) -> str:
        return (f"d{self.delta:g}_m{format_memory(self.m)}_"
                f"l{format_fraction(self.local_fraction)}_s{self.sigma_fraction:g}")

    @property
    def search_params(self) -> SearchParams:
        return SearchParams(self.delta, self.local_fraction, self.n_candidates,
                            self.literal_threshold, self.candidate_premium)

    @property
    def benchmark(self) -> BenchmarkSolution:
        return second_best_oracle(self.actor, self.mu)

    @property
    def sigma(self) -> float:
        return self.sigma_fraction * self.benchmark.x_star


@dataclass(frozen=True)
class PeriodRecord:
    t: int
    target_action: float
    premium: float
    capped: bool
    accepted: bool
    action: float
    theta: float
    outcome: float
    estimate: float
    mode: SearchMode
    u_p: float
    u_a: float
    principal_prediction: float
    agent_prediction: float
    agent_upper: float | None


@dataclass
class RunState:
    principal: BeliefState
    agent: BeliefState
    incumbent: float
    t: int = 1


@dataclass
class RunRecord:
    r: int
    spawn_key: tuple[int, ...]
    periods: list[PeriodRecord] = field(default_factory=list)

    @property
    def actions(self) -> np.ndarray:
        return np.array([p.action for p in self.periods])

    @property
    def resets(self) -> int:
        return sum(p.mode is SearchMode.RESET for p in self.periods)


def scenario_key(scenario_id: str) -> int:
    return zlib.crc32(scenario_id.encode())


def run_stream(master_seed: int, scenario_id: str, r: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(scenario_key(scenario_id), r))
    return np.random.Generator(np.random.Philox(seq))


def initial_state(config: ScenarioConfig, rng) -> RunState:
    """Empty memories and a first target drawn uniformly from the prior action space."""
    bench = config.benchmark
    space = predicted_action_space(0.0, bench.phi_star, config.actor)
    incumbent = space.lower + rng.random() * space.width
    return RunState(BeliefState(config.m, PRINCIPAL), BeliefState(config.m, AGENT), incumbent)


def run_period(state: RunState, config: ScenarioConfig, rng) -> tuple[RunState, PeriodRecord]:
    actor = config.actor
    rho = actor.rho
    target = state.incumbent

    e_p = predict(state.principal)
    contract = design_contract(target, e_p, actor)
    e_a = predict(state.agent)
    accepted, action = agent_respond(contract, e_a, actor)

    theta = float(rng.normal(config.mu, config.sigma))
    if accepted:
        x = outcome(action, rho, theta)
        share = sharing(x, contract.premium)
        u_p = principal_utility(x, share)
        u_a = agent_utility(share, action, actor)
        agent_upper = action
    else:
        # rejection: no effort, the principal keeps the raw environment
        action, x = 0.0, theta
        u_p = principal_utility(x, 0.0)
        u_a = actor.reservation_utility
        agent_upper = None

    estimate = estimate_theta(x, target, rho)
    principal = record(state.principal, estimate)
    agent = record(state.agent, theta)

    if state.t < config.T or config.search_final_period:
        sp = config.search_params
        e_next = predict(principal)
        space = predicted_action_space(e_next, config.benchmark.phi_star, actor)
        kappa = exploration_threshold(principal, sp.delta, sp.literal_threshold)
        mode = choose_mode(estimate, kappa, sp.delta, rng)
        step = search_step(space, target, mode, e_next, actor, sp, rng, contract.premium)
        next_target, mode = step.next_target, step.mode
    else:
        next_target, mode = target, SearchMode.NONE

    rec = PeriodRecord(state.t, target, contract.premium, contract.capped, accepted, action,
                       theta, x, estimate, mode, u_p, u_a, e_p, e_a, agent_upper)
    return RunState(principal, agent, next_target, state.t + 1), rec


def run_single(config: ScenarioConfig, r: int) -> RunRecord:
    rng = run_stream(config.master_seed, config.scenario_id, r)
    state = initial_state(config, rng)
    run = RunRecord(r, (scenario_key(config.scenario_id), r))
    for _ in range(config.T):
        state, rec = run_period(state, config, rng)
        run.periods.append(rec)
    return run


def _run_chunk(args):
    config, runs = args
    return [run_single(config, r) for r in runs]


def _chunks(runs, size):
    it = iter(runs)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def run_many(configs: list[ScenarioConfig], jobs: int = 1, runs=None,
             chunk_size: int = 100) -> dict[str, list[RunRecord]]:
    """Run every scenario in ``configs``; panels are keyed by scenario id, ordered by run index."""
    tasks = []
    for cfg in configs:
        indices = range(cfg.R) if runs is None else runs
        tasks.extend((cfg, chunk) for chunk in _chunks(indices, chunk_size))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chunk, tasks))
    else:
        results = [_run_chunk(t) for t in tasks]
    panels: dict[str, list[RunRecord]] = {cfg.scenario_id: [] for cfg in configs}
    for (cfg, _), chunk in zip(tasks, results):
        panels[cfg.scenario_id].extend(chunk)
    for panel in panels.values():
        panel.sort(key=lambda run: run.r)
    return panels


def iter_panels(configs: list[ScenarioConfig], jobs: int = 1, runs=None, chunk_size: int = 100):
    """Yield ``(config, panel)`` scenario by scenario, in the order given.

    One worker pool serves all scenarios, so memory stays bounded by a
    single panel however large the grid.
    """
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for cfg in configs:
            indices = range(cfg.R) if runs is None else runs
            tasks = [(cfg, chunk) for chunk in _chunks(indices, chunk_size)]
            results = pool.map(_run_chunk, tasks) if pool else map(_run_chunk, tasks)
            panel = [run for chunk in results for run in chunk]
            panel.sort(key=lambda run: run.r)
            yield cfg, panel
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)


def run_scenario(config: ScenarioConfig, jobs: int = 1, runs=None) -> list[RunRecord]:
    """Panel of ``config.R`` runs (or of the given run indices)."""
    return run_many([config], jobs=jobs, runs=runs)[config.scenario_id]


def scenario_grid(base: ScenarioConfig | None = None, **filters) -> list[ScenarioConfig]:
    """Cartesian product of the experiment axes, optionally restricted.

    ``filters`` maps an axis name to a value or a sequence of values.
    """
    base = base or ScenarioConfig()
    axes = dict(GRID_AXES)
    for key, value in filters.items():
        if key not in axes:
            raise ConfigError(f"unknown grid axis {key!r}; expected one of {sorted(axes)}")
        values = tuple(value) if isinstance(value, (list, tuple)) else (value,)
        axes[key] = values
    configs = []
    for delta, m, sigma_fraction, local_fraction in itertools.product(
            axes["delta"], axes["m"], axes["sigma_fraction"], axes["local_fraction"]):
        configs.append(replace(base, delta=delta, m=m, local_fraction=local_fraction,
                               sigma_fraction=sigma_fraction))
    return configs
