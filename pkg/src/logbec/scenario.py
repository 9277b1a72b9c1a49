"""A fully resolved experiment in internal units, and how to run it."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .dkc import KickSpec, kick_state, simulate_with_kick
from .model import BECParams, GaussianState, TrapSchedule, TrapSegment, WidthTrajectory
from .pde import Impulse, PDEResult, RadialGrid, evolve, init_gaussian, suggest_grid
from .units import UnitSystem
from .variational import IntegratorSettings, integrate


@dataclass(frozen=True)
class Scenario:
    units: UnitSystem
    params: BECParams
    state0: GaussianState
    t_end: float
    schedule: TrapSchedule = field(default_factory=TrapSchedule)
    kick: Optional[KickSpec] = None
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)

    def with_log_strength(self, b: float) -> "Scenario":
        return replace(self, params=self.params.replace(log_strength=b))

    def with_state(self, state0: GaussianState) -> "Scenario":
        return replace(self, state0=state0)


def run_variational(scenario: Scenario, t_eval: Optional[Sequence[float]] = None) -> WidthTrajectory:
    if scenario.kick is None:
        return integrate(scenario.state0, scenario.params, scenario.schedule, scenario.t_end,
                         scenario.settings, t_eval)
    return simulate_with_kick(scenario.state0, scenario.params, scenario.kick, scenario.t_end,
                              scenario.settings, scenario.schedule, t_eval)


def expansion_start(scenario: Scenario) -> GaussianState:
    """State from which the far-field expansion is counted.

    With a collimation pulse this is the state at the end of the pulse
    (its time taken as the new origin); otherwise the initial state.
    """
    if scenario.kick is None:
        return scenario.state0
    _, state = kick_state(scenario.state0, scenario.params, scenario.kick,
                          scenario.settings, scenario.schedule)
    return state


@dataclass(eq=False)
class SolverComparison:
    times: np.ndarray
    variational: np.ndarray
    pde: np.ndarray
    pde_result: PDEResult
    grid: RadialGrid

    @property
    def relative_discrepancy(self) -> np.ndarray:
        return np.abs(self.pde / self.variational - 1.0)

    @property
    def max_relative_discrepancy(self) -> float:
        return float(self.relative_discrepancy.max())


def compare_solvers(scenario: Scenario, n_samples: int = 50, grid: Optional[RadialGrid] = None,
                    dt: Optional[float] = None) -> SolverComparison:
    """Run the width equations and the radial field solver side by side.

    Collimation pulses use the frequency found by the width equations so
    both solvers see the same trap sequence.
    """
    t0 = scenario.state0.t
    times = np.linspace(t0, scenario.t_end, n_samples + 1)
    if scenario.kick is not None:
        k = scenario.kick
        times = times[(times <= k.t_kick) | (times >= k.t_after)]
    traj = run_variational(scenario, t_eval=times)
    idx = np.searchsorted(traj.t, times)
    var_widths = traj.width[idx]

    s0, v0 = scenario.state0.spherical_width(), scenario.state0.spherical_rate()
    if grid is None:
        grid = suggest_grid(s0, float(traj.width.max()), float(traj.width.min()),
                            float(np.abs(traj.sigma_dot).max()))
    schedule = scenario.schedule
    impulses = []
    if scenario.kick is not None:
        k = scenario.kick
        omega = traj.metadata["kick_omega"]
        if k.mode == "thin_lens":
            impulses.append(Impulse(k.t_kick, omega, k.duration))
        else:
            schedule = schedule.add(TrapSegment(k.t_kick, k.t_after, omega))
    field0 = init_gaussian(grid, s0, v0, t0)
    res = evolve(field0, scenario.params, schedule, scenario.t_end, dt=dt,
                 sample_times=times, impulses=impulses)
    pde_widths = np.interp(times, res.times, res.widths)
    return SolverComparison(times, var_widths, pde_widths, res, grid)
