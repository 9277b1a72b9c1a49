"""Value types shared by the solvers.

Every quantity stored here is in internal units (hbar = m = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .units import MASS_RB87

Triple = tuple[float, float, float]
AXES = ("x", "y", "z")

SQRT_PI = math.sqrt(math.pi)


def _triple(value) -> Triple:
    if np.ndim(value) == 0:
        v = float(value)
        return (v, v, v)
    out = tuple(float(v) for v in value)
    if len(out) != 3:
        raise ConfigurationError(f"expected a scalar or 3 values, got {value!r}")
    return out


@dataclass(frozen=True)
class BECParams:
    """Species and interaction constants.

    ``scatter_length`` and ``log_strength`` are internal-unit length and
    energy. The mass is 1 by construction of the unit system; the SI mass
    is kept only for reporting.
    """

    atom_number: float
    scatter_length: float
    log_strength: float = 0.0
    species: str = "Rb87"
    mass_kg: float = MASS_RB87

    def __post_init__(self):
        if not math.isfinite(self.atom_number) or self.atom_number < 0:
            raise ConfigurationError(f"atom_number must be >= 0, got {self.atom_number!r}")
        for name in ("scatter_length", "log_strength"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")

    @property
    def gp_coefficient(self) -> float:
        """Na / (4 sqrt(pi)), the width-equation interaction prefactor."""
        return self.atom_number * self.scatter_length / (4.0 * SQRT_PI)

    @property
    def coupling(self) -> float:
        """Contact coupling g = 4 pi a (hbar = m = 1)."""
        return 4.0 * math.pi * self.scatter_length

    def replace(self, **changes) -> "BECParams":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass(frozen=True)
class GaussianState:
    """Widths and width rates of the Gaussian ansatz at time ``t``.

    The curvature phase ``beta`` is not stored; it follows from
    sigma_dot = -2 beta sigma.
    """

    sigma: Triple
    sigma_dot: Triple = (0.0, 0.0, 0.0)
    t: float = 0.0
    alpha: Triple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "sigma", _triple(self.sigma))
        object.__setattr__(self, "sigma_dot", _triple(self.sigma_dot))
        object.__setattr__(self, "alpha", _triple(self.alpha))
        object.__setattr__(self, "t", float(self.t))
        for axis, s in zip(AXES, self.sigma):
            if not (s > 0 and math.isfinite(s)):
                raise DomainError(f"sigma_{axis} must be positive, got {s!r}")

    @property
    def beta(self) -> Triple:
        return tuple(-v / (2.0 * s) for s, v in zip(self.sigma, self.sigma_dot))

    @property
    def is_spherical(self) -> bool:
        return len(set(self.sigma)) == 1 and len(set(self.sigma_dot)) == 1

    def spherical_width(self) -> float:
        if not self.is_spherical:
            raise DomainError("state is not spherically symmetric")
        return self.sigma[0]

    def spherical_rate(self) -> float:
        if not self.is_spherical:
            raise DomainError("state is not spherically symmetric")
        return self.sigma_dot[0]

    def replace(self, **changes) -> "GaussianState":
        from dataclasses import replace
        return replace(self, **changes)


def spherical_state(sigma: float, sigma_dot: float = 0.0, t: float = 0.0) -> GaussianState:
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    return GaussianState(sigma=(sigma,) * 3, sigma_dot=(sigma_dot,) * 3, t=t)


@dataclass(frozen=True)
class TrapSegment:
    t_start: float
    t_end: float
    omega: Triple

    def __post_init__(self):
        object.__setattr__(self, "omega", _triple(self.omega))
        if not self.t_start < self.t_end:
            raise ConfigurationError(
                f"segment needs t_start < t_end, got [{self.t_start}, {self.t_end}]"
            )

    @property
    def is_isotropic(self) -> bool:
        return len(set(self.omega)) == 1


FREE: Triple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TrapSchedule:
    """Piecewise-constant trap frequencies; gaps between segments are free flight."""

    segments: tuple[TrapSegment, ...] = ()

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: (s.t_start, s.t_end)))
        for prev, nxt in zip(segs, segs[1:]):
            if nxt.t_start < prev.t_end:
                raise ConfigurationError(
                    f"overlapping trap segments [{prev.t_start}, {prev.t_end}] and "
                    f"[{nxt.t_start}, {nxt.t_end}]"
                )
        object.__setattr__(self, "segments", segs)

    def add(self, segment: TrapSegment) -> "TrapSchedule":
        return TrapSchedule(self.segments + (segment,))

    def omega_at(self, t: float) -> Triple:
        for seg in self.segments:
            if seg.t_start <= t < seg.t_end:
                return seg.omega
        return FREE

    def pieces(self, t0: float, t1: float) -> Iterator[tuple[float, float, Triple]]:
        """Yield ``(ta, tb, omega)`` intervals with constant frequency covering [t0, t1]."""
        t = t0
        for seg in self.segments:
            if seg.t_end <= t:
                continue
            if seg.t_start >= t1:
                break
            if seg.t_start > t:
                yield t, seg.t_start, FREE
                t = seg.t_start
            tb = min(seg.t_end, t1)
            yield t, tb, seg.omega
            t = tb
        if t < t1:
            yield t, t1, FREE

    @property
    def is_isotropic(self) -> bool:
        return all(s.is_isotropic for s in self.segments)


@dataclass(eq=False)
class WidthTrajectory:
    """Sampled run of the width equations.

    Arrays have shape ``(n,)`` for ``t`` and ``energy`` and ``(n, 3)`` for
    ``sigma`` and ``sigma_dot``.
    """

    t: np.ndarray
    sigma: np.ndarray
    sigma_dot: np.ndarray
    energy: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        if np.any(self.sigma <= 0):
            raise ValueError("trajectory widths must be positive")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def width(self) -> np.ndarray:
        """Geometric-mean width; equals every axis for spherical runs."""
        return np.cbrt(np.prod(self.sigma, axis=1))

    @property
    def is_spherical(self) -> bool:
        return bool(np.all(self.sigma == self.sigma[:, :1]))

    def final_state(self) -> GaussianState:
        return GaussianState(sigma=tuple(self.sigma[-1]),
                             sigma_dot=tuple(self.sigma_dot[-1]),
                             t=float(self.t[-1]))

    def state_at(self, index: int) -> GaussianState:
        return GaussianState(sigma=tuple(self.sigma[index]),
                             sigma_dot=tuple(self.sigma_dot[index]),
                             t=float(self.t[index]))

    @classmethod
    def concatenate(cls, parts: Sequence["WidthTrajectory"],
                    metadata: Optional[dict] = None) -> "WidthTrajectory":
        """Join trajectories, dropping samples that do not advance in time."""
        ts, ss, vs, es = [], [], [], []
        last = -math.inf
        for part in parts:
            keep = part.t > last
            ts.append(part.t[keep])
            ss.append(part.sigma[keep])
            vs.append(part.sigma_dot[keep])
            es.append(part.energy[keep])
            if len(part.t):
                last = max(last, part.t[-1])
        return cls(np.concatenate(ts), np.concatenate(ss), np.concatenate(vs),
                   np.concatenate(es), dict(metadata or {}))
