"""Delta-kick collimation.

A short harmonic pulse of frequency omega and duration dt acts on an
expanding cloud like a thin lens, changing the width rate by
-omega**2 * dt * sigma. Choosing omega**2 = sigma_dot / (sigma * dt) nulls
the rate; for a far-field cloud (sigma ~ sigma_dot * t_kick) this is the
familiar omega**2 * dt ~ 1 / t_kick.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigurationError, DomainError
from .model import BECParams, GaussianState, TrapSchedule, TrapSegment, WidthTrajectory
from .variational import IntegratorSettings, integrate

MODES = ("thin_lens", "finite_pulse")


@dataclass(frozen=True)
class KickSpec:
    """A collimation pulse starting at ``t_kick``.

    ``omega=None`` means: pick the frequency that leaves the cloud
    collimated (sigma_dot = 0) at the end of the pulse.
    """

    t_kick: float
    duration: float
    omega: Optional[float] = None
    mode: str = "finite_pulse"

    def __post_init__(self):
        if not (self.t_kick > 0 and self.duration > 0):
            raise ConfigurationError("kick time and pulse duration must be positive")
        if self.mode not in MODES:
            raise ConfigurationError(f"kick mode must be one of {MODES}, got {self.mode!r}")
        if self.omega is not None and self.omega < 0:
            raise ConfigurationError("kick frequency must be non-negative")
        if self.duration >= self.t_kick / 10:
            warnings.warn(
                f"pulse duration {self.duration:.3g} is not short compared to the kick "
                f"time {self.t_kick:.3g}; the thin-lens picture is inaccurate",
                stacklevel=2,
            )

    @property
    def t_after(self) -> float:
        return self.t_kick + self.duration


def collimation_frequency(state: GaussianState, duration: float) -> float:
    """Thin-lens frequency that brings a spherical state to rest."""
    sigma, rate = state.spherical_width(), state.spherical_rate()
    if not rate > 0:
        raise DomainError(f"nothing to collimate: sigma_dot = {rate!r}")
    if not duration > 0:
        raise DomainError("pulse duration must be positive")
    return math.sqrt(rate / (sigma * duration))


def apply_thin_lens(state: GaussianState, omega, duration: float) -> GaussianState:
    if not duration > 0:
        raise DomainError("pulse duration must be positive")
    w = omega if isinstance(omega, tuple) else (omega,) * 3
    rate = tuple(v - wi * wi * duration * s for s, v, wi in zip(state.sigma, state.sigma_dot, w))
    return state.replace(sigma_dot=rate, t=state.t + duration)


def apply_finite_pulse(state: GaussianState, omega, duration: float, params: BECParams,
                       settings: Optional[IntegratorSettings] = None) -> GaussianState:
    """Integrate the width equations with the trap on for ``duration``."""
    schedule = TrapSchedule((TrapSegment(state.t, state.t + duration, omega),))
    return integrate(state, params, schedule, state.t + duration, settings).final_state()


def finite_pulse_collimation_frequency(state: GaussianState, duration: float, params: BECParams,
                                       settings: Optional[IntegratorSettings] = None) -> float:
    """Frequency for which the integrated pulse ends with sigma_dot = 0.

    Starts from the thin-lens value and root-finds the residual rate.
    """
    w0 = collimation_frequency(state, duration)

    def residual(w):
        return apply_finite_pulse(state, w, duration, params, settings).spherical_rate()

    lo, hi = 0.5 * w0, 2.0 * w0
    while residual(hi) > 0:
        hi *= 2.0
        if hi > 1e6 * w0:
            raise DomainError("could not bracket the collimation frequency")
    return brentq(residual, lo, hi, xtol=1e-14 * w0, rtol=1e-13)


def resolve_kick(state_at_kick: GaussianState, kick: KickSpec, params: BECParams,
                 settings: Optional[IntegratorSettings] = None) -> float:
    """Kick frequency for ``kick``, solving for collimation when none is given."""
    if kick.omega is not None:
        return kick.omega
    if kick.mode == "thin_lens":
        return collimation_frequency(state_at_kick, kick.duration)
    return finite_pulse_collimation_frequency(state_at_kick, kick.duration, params, settings)


def kick_state(state0: GaussianState, params: BECParams, kick: KickSpec,
               settings: Optional[IntegratorSettings] = None,
               schedule: Optional[TrapSchedule] = None) -> tuple[float, GaussianState]:
    """Kick frequency and the state at the end of the pulse."""
    schedule = schedule or TrapSchedule()
    at_kick = integrate(state0, params, schedule, kick.t_kick, settings).final_state()
    omega = resolve_kick(at_kick, kick, params, settings)
    if kick.mode == "thin_lens":
        return omega, apply_thin_lens(at_kick, omega, kick.duration)
    pulse = TrapSegment(kick.t_kick, kick.t_after, omega)
    after = integrate(at_kick, params, schedule.add(pulse), kick.t_after, settings)
    return omega, after.final_state()


def simulate_with_kick(state0: GaussianState, params: BECParams, kick: KickSpec, t_end: float,
                       settings: Optional[IntegratorSettings] = None,
                       schedule: Optional[TrapSchedule] = None,
                       t_eval=None) -> WidthTrajectory:
    """Free expansion (or ``schedule``) with one collimation pulse inserted.

    The returned trajectory's metadata carries the applied ``kick_omega``
    and the ``post_kick_state``.
    """
    schedule = schedule or TrapSchedule()
    if not (state0.t < kick.t_kick and kick.t_after < t_end):
        raise ConfigurationError("kick must fall strictly inside the simulated interval")
    settings = settings or IntegratorSettings()
    if settings.sample_interval is not None:
        # keep one sampling grid anchored at the start across all stages
        n = int(math.floor((t_end - state0.t) / settings.sample_interval + 1e-9))
        grid = state0.t + settings.sample_interval * np.arange(n + 1)
        t_eval = grid if t_eval is None else np.union1d(grid, t_eval)
        settings = replace(settings, sample_interval=None)
    before = integrate(state0, params, schedule, kick.t_kick, settings, t_eval)
    at_kick = before.final_state()
    omega = resolve_kick(at_kick, kick, params, settings)
    if kick.mode == "thin_lens":
        after_kick = apply_thin_lens(at_kick, omega, kick.duration)
        parts = [before]
        rest = schedule
    else:
        pulse = TrapSegment(kick.t_kick, kick.t_after, omega)
        rest = schedule.add(pulse)
        during = integrate(at_kick, params, rest, kick.t_after, settings, t_eval)
        after_kick = during.final_state()
        parts = [before, during]
    after = integrate(after_kick, params, rest, t_end, settings, t_eval)
    parts.append(after)
    meta = dict(after.metadata)
    meta.update(kick=kick, kick_omega=omega, post_kick_state=after_kick)
    return WidthTrajectory.concatenate(parts, meta)
