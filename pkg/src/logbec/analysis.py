"""Far-field expansion rate, its error budget, and b-sweep difference maps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .model import SQRT_PI, BECParams, GaussianState, spherical_state
from .scenario import Scenario, run_variational
from .units import ELECTRON_VOLT, UnitSystem
from .variational import chi


@dataclass(frozen=True)
class FarFieldRate:
    """Squared contributions to the asymptotic width rate (b = 0).

    ``residual_sq`` comes from the initial rate, ``heisenberg_sq`` from
    quantum pressure and ``interaction_sq`` from the contact interaction.
    """

    residual_sq: float
    heisenberg_sq: float
    interaction_sq: float

    @property
    def total_sq(self) -> float:
        return self.residual_sq + self.heisenberg_sq + self.interaction_sq

    @property
    def total(self) -> float:
        return math.sqrt(self.total_sq)

    @property
    def residual(self) -> float:
        return math.sqrt(self.residual_sq)

    @property
    def heisenberg(self) -> float:
        return math.sqrt(self.heisenberg_sq)

    @property
    def interaction(self) -> float:
        return math.copysign(math.sqrt(abs(self.interaction_sq)), self.interaction_sq)


def farfield_rate(state0: GaussianState, params: BECParams) -> FarFieldRate:
    s0, v0 = state0.spherical_width(), state0.spherical_rate()
    if not s0 > 0:
        raise DomainError("sigma(0) must be positive")
    return FarFieldRate(
        residual_sq=v0 * v0,
        heisenberg_sq=0.25 / (s0 * s0),
        interaction_sq=params.atom_number * params.scatter_length / (6.0 * SQRT_PI * s0**3),
    )


@dataclass(frozen=True)
class RelativeErrors:
    n: float = 0.0
    a: float = 0.0
    sigma0: float = 0.0
    sigma_dot0: float = 0.0

    def __post_init__(self):
        for name in ("n", "a", "sigma0", "sigma_dot0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"relative error {name} must be finite and >= 0, got {v!r}")


def rate_error(state0: GaussianState, params: BECParams,
               errs: RelativeErrors) -> tuple[float, float]:
    """Relative and absolute uncertainty of the far-field width rate."""
    c = farfield_rate(state0, params)
    gp2 = c.interaction_sq
    var = (c.residual_sq**2 * errs.sigma_dot0**2
           + (1.5 * gp2 + c.heisenberg_sq) ** 2 * errs.sigma0**2
           + 0.25 * gp2**2 * (errs.a**2 + errs.n**2))
    rel = math.sqrt(var) / c.total_sq
    return rel, rel * c.total


def magnetic_threshold(params: BECParams) -> float:
    """Largest parasitic trap frequency distinguishable from the log term (b/hbar)."""
    if not params.log_strength > 0:
        raise DomainError("the magnetic threshold requires b > 0")
    return params.log_strength


def sigma0_for_chi(target: float, params: BECParams, units: UnitSystem,
                   bracket_m: tuple[float, float] = (0.01e-6, 1000e-6),
                   rtol: float = 1e-10) -> float:
    """Initial width (internal units) at rest giving the requested chi."""
    lo, hi = (units.to_internal(x, "length") for x in bracket_m)

    def g(s):
        return chi(spherical_state(s), params) - target

    if not target > 0 or g(lo) * g(hi) > 0:
        raise DomainError(f"chi = {target!r} is not attainable for sigma(0) in {bracket_m} m")
    return bisect(g, lo, hi, xtol=1e-300, rtol=rtol, maxiter=2000)


AXIS_KINDS = ("chi", "b")


@dataclass(eq=False)
class DifferenceMap:
    """Width differences sigma(t; b=0) - sigma(t; b) in internal units.

    ``diffs[i, j]`` belongs to ``times[i]`` and ``values[j]``; for the
    chi axis ``values`` are chi, for the b axis internal energies.
    """

    axis: str
    times: np.ndarray
    values: np.ndarray
    diffs: np.ndarray

    def __post_init__(self):
        if self.diffs.shape != (len(self.times), len(self.values)):
            raise ValueError("difference matrix does not match its axes")

    def to_csv(self, fh: TextIO, units: UnitSystem, comments: Sequence[str] = ()) -> None:
        for line in comments:
            fh.write(f"# {line}\n")
        if self.axis == "b":
            label = "t_s\\b_eV"
            head = units.from_internal(self.values, "energy") / ELECTRON_VOLT
        else:
            label = "t_s\\chi"
            head = self.values
        fh.write(",".join([label] + [f"{v:.8e}" for v in head]) + "\n")
        times = units.from_internal(self.times, "time")
        diffs = units.from_internal(self.diffs, "length")
        for t, row in zip(times, diffs):
            fh.write(",".join([f"{t:.8e}"] + [f"{d:.8e}" for d in row]) + "\n")


def difference_map(scenario: Scenario, axis: str, values: Sequence[float],
                   t_grid: Sequence[float], b_test: Optional[float] = None) -> DifferenceMap:
    """Width differences between linear and logarithmic runs.

    ``axis="b"``: each value is a log strength tested against b = 0.
    ``axis="chi"``: b is fixed (``b_test`` or the scenario's value) and the
    initial width is solved from each chi with the rate held at zero.
    """
    if axis not in AXIS_KINDS:
        raise DomainError(f"sweep axis must be one of {AXIS_KINDS}, got {axis!r}")
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("sweep needs at least one value")
    t_grid = np.asarray(t_grid, dtype=float)
    base = scenario.with_log_strength(0.0)
    cols = []
    if axis == "b":
        ref = _widths_at(base, t_grid)
        for b in values:
            cols.append(ref - _widths_at(scenario.with_log_strength(b), t_grid))
    else:
        b = scenario.params.log_strength if b_test is None else b_test
        if not b > 0:
            raise DomainError("a chi sweep needs a positive log strength")
        test_params = scenario.params.replace(log_strength=b)
        for c in values:
            s0 = sigma0_for_chi(c, test_params, scenario.units)
            state = spherical_state(s0, 0.0, scenario.state0.t)
            lin = base.with_state(state)
            log = scenario.with_state(state).with_log_strength(b)
            cols.append(_widths_at(lin, t_grid) - _widths_at(log, t_grid))
    return DifferenceMap(axis, t_grid, values, np.column_stack(cols))


def _widths_at(scenario: Scenario, t_grid: np.ndarray) -> np.ndarray:
    traj = run_variational(scenario, t_eval=t_grid)
    idx = np.searchsorted(traj.t, t_grid)
    if np.any(idx >= len(traj.t)) or np.any(traj.t[np.minimum(idx, len(traj.t) - 1)] != t_grid):
        raise DomainError("time grid must lie inside the simulated interval")
    return traj.width[idx]
