"""Gaussian-ansatz width dynamics and closed-form quantities.

With hbar = m = 1 the width of axis x obeys

    sigma_x'' = 1/(4 sigma_x^3) - omega_x^2 sigma_x
                + Na/(4 sqrt(pi)) / (sigma_x^2 sigma_y sigma_z) - b / sigma_x

and cyclic permutations. The spherical reduction replaces the
interaction term by Na/(4 sqrt(pi)) / sigma^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, DomainError, SimulationError, StiffnessError
from .model import (AXES, SQRT_PI, BECParams, GaussianState, TrapSchedule,
                    WidthTrajectory, _triple)

WIDTH_FLOOR = 1e-6


@dataclass(frozen=True)
class IntegratorSettings:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    sample_interval: Optional[float] = None

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.max_step > 0):
            raise ConfigurationError("integrator tolerances and max_step must be positive")
        if self.sample_interval is not None and not self.sample_interval > 0:
            raise ConfigurationError("sample_interval must be positive")


def _check_widths(sigma) -> None:
    for axis, s in zip(AXES, sigma):
        if not s > 0:
            raise DomainError(f"sigma_{axis} must be positive, got {s!r}")


def rhs_anisotropic(state: GaussianState, params: BECParams, omega=0.0) -> tuple[float, float, float]:
    """Width accelerations (sigma_x'', sigma_y'', sigma_z'')."""
    sx, sy, sz = state.sigma
    _check_widths(state.sigma)
    return _accel3(sx, sy, sz, _triple(omega), params.gp_coefficient, params.log_strength)


def rhs_spherical(sigma: float, params: BECParams, omega: float = 0.0) -> float:
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    return _accel1(sigma, omega, params.gp_coefficient, params.log_strength)


# the operand order in the interaction denominators keeps the spherical and
# anisotropic forms bit-identical on isotropic states
def _accel1(s, w, gp, b):
    return 0.25 / (s * s * s) - w * w * s + gp / (s * s * s * s) - b / s


def _accel3(sx, sy, sz, w, gp, b):
    wx, wy, wz = w
    return (
        0.25 / (sx * sx * sx) - wx * wx * sx + gp / (sx * sx * sy * sz) - b / sx,
        0.25 / (sy * sy * sy) - wy * wy * sy + gp / (sy * sy * sz * sx) - b / sy,
        0.25 / (sz * sz * sz) - wz * wz * sz + gp / (sz * sz * sx * sy) - b / sz,
    )


def _energy_arrays(sigma, sigma_dot, omega, params: BECParams):
    """Energy per particle for arrays of shape (..., 3)."""
    sigma = np.asarray(sigma, dtype=float)
    sigma_dot = np.asarray(sigma_dot, dtype=float)
    w = np.asarray(omega, dtype=float)
    per_axis = (0.5 * sigma_dot**2 + 0.125 / sigma**2 + 0.5 * w**2 * sigma**2
                + params.log_strength * np.log(sigma))
    return per_axis.sum(axis=-1) + params.gp_coefficient / np.prod(sigma, axis=-1)


def energy_per_particle(state: GaussianState, params: BECParams, omega=0.0) -> float:
    """Energy per particle with the additive constant set to zero.

    For a spherical state this is
    3/2 sigma_dot^2 + 3/(8 sigma^2) + 3/2 omega^2 sigma^2
    + Na/(4 sqrt(pi) sigma^3) + 3 b ln(sigma).
    """
    _check_widths(state.sigma)
    return float(_energy_arrays(state.sigma, state.sigma_dot, _triple(omega), params))


def _initial_energy_terms(sigma0: float, sigma_dot0: float, params: BECParams) -> float:
    return (1.5 * sigma_dot0**2 + 0.375 / sigma0**2
            + params.gp_coefficient / sigma0**3)


def chi(state0: GaussianState, params: BECParams) -> float:
    """Ratio of the initial kinetic, pressure and interaction energy to 3b."""
    b = params.log_strength
    if b == 0:
        raise DomainError("chi is undefined for b = 0")
    s0, v0 = state0.spherical_width(), state0.spherical_rate()
    return _initial_energy_terms(s0, v0, params) / (3.0 * b)


def sigma_max(state0: GaussianState, params: BECParams) -> float:
    """Upper bound sigma(0) exp(chi) on the width for b > 0."""
    if not params.log_strength > 0:
        raise DomainError("the width bound requires b > 0")
    c = chi(state0, params)
    if c > 700.0:
        return math.inf
    return state0.spherical_width() * math.exp(c)


def gausson_width(params: BECParams) -> float:
    """Stationary width 1/(2 sqrt(b)) of the non-interacting equation."""
    b = params.log_strength
    if not b > 0:
        raise DomainError("the stationary width requires b > 0")
    return 0.5 / math.sqrt(b)


def _sample_times(t0: float, t1: float, settings: IntegratorSettings,
                  t_eval: Optional[Sequence[float]]) -> np.ndarray:
    pts = [np.array([t0, t1])]
    if settings.sample_interval is not None:
        n = int(math.floor((t1 - t0) / settings.sample_interval + 1e-9))
        pts.append(t0 + settings.sample_interval * np.arange(n + 1))
    if t_eval is not None:
        te = np.asarray(t_eval, dtype=float)
        pts.append(te[(te >= t0) & (te <= t1)])
    return np.unique(np.concatenate(pts))


def integrate(state0: GaussianState, params: BECParams, schedule: Optional[TrapSchedule],
              t_end: float, settings: Optional[IntegratorSettings] = None,
              t_eval: Optional[Sequence[float]] = None) -> WidthTrajectory:
    """Integrate the width equations from ``state0.t`` to ``t_end``.

    Integration restarts at every schedule boundary. Samples are taken at
    ``settings.sample_interval`` spacing from ``state0.t``, at every
    boundary, and at any extra times in ``t_eval``.

    Spherical runs integrate one width. Without contact interaction the
    axes decouple and each is integrated on its own, so a perturbation of
    one axis cannot leak into another through shared step-size control.

    Raises:
        SimulationError: a width fell below ``WIDTH_FLOOR``.
        StiffnessError: the step size underflowed.
    """
    settings = settings or IntegratorSettings()
    schedule = schedule or TrapSchedule()
    t0 = state0.t
    if not t_end > t0:
        raise ConfigurationError(f"t_end ({t_end}) must exceed the start time ({t0})")

    gp, b = params.gp_coefficient, params.log_strength
    pieces = list(schedule.pieces(t0, t_end))
    samples = _sample_times(t0, t_end, settings, t_eval)
    samples = np.union1d(samples, [p[0] for p in pieces])

    def single_axis(i):
        def make(omega):
            w = omega[i]

            def fun(t, u):
                return (u[1], _accel1(u[0], w, gp, b))
            return fun
        return make

    def coupled(omega):
        def fun(t, u):
            return (u[3], u[4], u[5], *_accel3(u[0], u[1], u[2], omega, gp, b))
        return fun

    if state0.is_spherical and schedule.is_isotropic:
        t, yy = _run([state0.sigma[0], state0.sigma_dot[0]], pieces, samples, settings,
                     single_axis(0), ("all",))
        sigma = np.repeat(yy[0][:, None], 3, axis=1)
        sigma_dot = np.repeat(yy[1][:, None], 3, axis=1)
    elif gp == 0:
        cols = [_run([state0.sigma[i], state0.sigma_dot[i]], pieces, samples, settings,
                     single_axis(i), (AXES[i],)) for i in range(3)]
        t = cols[0][0]
        sigma = np.column_stack([c[1][0] for c in cols])
        sigma_dot = np.column_stack([c[1][1] for c in cols])
    else:
        t, yy = _run(list(state0.sigma + state0.sigma_dot), pieces, samples, settings,
                     coupled, AXES)
        sigma, sigma_dot = yy[:3].T.copy(), yy[3:].T.copy()

    w = np.array([schedule.omega_at(ti) for ti in t])
    # a sample on a boundary belongs to the piece it closes
    for ta, tb, omega in pieces:
        w[t == tb] = omega
    energy = _energy_arrays(sigma, sigma_dot, w, params)
    meta = {"rtol": settings.rtol, "atol": settings.atol, "params": params,
            "schedule": schedule}
    return WidthTrajectory(t, sigma, sigma_dot, energy, meta)


def _run(y0, pieces, samples, settings: IntegratorSettings, make_fun, axis_names):
    nw = len(axis_names)
    y = np.asarray(y0, dtype=float)

    def floor(t, u):
        return min(u[:nw]) - WIDTH_FLOOR
    floor.terminal = True
    floor.direction = -1

    ts, ys = [], []
    for ta, tb, omega in pieces:
        fun = make_fun(omega)
        te = samples[(samples >= ta) & (samples <= tb)]
        sol = solve_ivp(fun, (ta, tb), y, method="RK45", t_eval=te, events=floor,
                        rtol=settings.rtol, atol=settings.atol, max_step=settings.max_step)
        if sol.status == 1:
            tc = float(sol.t_events[0][0])
            axis = axis_names[int(np.argmin(sol.y_events[0][0][:nw]))]
            raise SimulationError(f"width collapse on axis {axis} at t = {tc:.6g} (internal units)")
        if sol.status == -1:
            _raise_failure(fun, ta, tb, y, settings, axis_names, sol.message)
        y = sol.y[:, -1]
        ts.append(sol.t)
        ys.append(sol.y)
    t = np.concatenate(ts)
    yy = np.concatenate(ys, axis=1)
    keep = np.concatenate([[True], np.diff(t) > 0])
    return t[keep], yy[:, keep]


def _raise_failure(fun, ta, tb, y0, settings, axis_names, message):
    # rerun without t_eval to see where the integrator stopped
    sol = solve_ivp(fun, (ta, tb), y0, method="RK45", rtol=settings.rtol,
                    atol=settings.atol, max_step=settings.max_step)
    nw = len(axis_names)
    widths = sol.y[:nw, -1]
    t = sol.t[-1]
    if float(np.min(widths)) < 1e-3 * float(np.min(y0[:nw])):
        axis = axis_names[int(np.argmin(widths))]
        raise SimulationError(
            f"width collapse on axis {axis} at t = {t:.6g} (internal units); "
            f"width {float(np.min(widths)):.3g} unresolvable: {message}"
        )
    raise StiffnessError(f"step size underflow at t = {t:.6g} (internal units): {message}")
