"""Radial split-step solver for the logarithmic Gross-Pitaevskii equation.

The spherically symmetric field is stored as u(r) = r psi(r) on the interior
points r_j = j h, j = 1..n-1, with u = 0 at r = 0 and r = R. In these
variables the kinetic operator is -u''/2, diagonal in the type-I sine
transform with wavenumbers k_m = pi m / R.

Each step is a Strang splitting: half a potential phase, a full kinetic
step, half a potential phase, with

    V = omega^2 r^2 / 2 + g N |psi|^2 - b ln(max(|psi|^2, eps))

and g = 4 pi a. The field is normalised to one particle; it is never
renormalised during evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np
import scipy.fft

from .errors import ConfigurationError, NumericalQualityError
from .model import BECParams, TrapSchedule

PHASE_LIMIT = 0.1
DEFAULT_PHASE_FACTOR = 0.05
EPS_FACTOR = 1e-12
MAX_NORM_DRIFT = 1e-4


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    n: int = 4096

    def __post_init__(self):
        if not self.r_max > 0:
            raise ConfigurationError(f"r_max must be positive, got {self.r_max!r}")
        if self.n < 256 or self.n & (self.n - 1):
            raise ConfigurationError(f"grid size must be a power of two >= 256, got {self.n}")

    @property
    def h(self) -> float:
        return self.r_max / self.n

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(1, self.n)

    @property
    def k(self) -> np.ndarray:
        return math.pi * np.arange(1, self.n) / self.r_max


@dataclass(eq=False)
class RadialField:
    grid: RadialGrid
    u: np.ndarray
    t: float = 0.0

    def density(self) -> np.ndarray:
        """|psi|^2 at the interior grid points."""
        return np.abs(self.u) ** 2 / self.grid.r ** 2

    def psi(self) -> np.ndarray:
        return self.u / self.grid.r

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.u.copy(), self.t)


def norm(f: RadialField) -> float:
    return 4.0 * math.pi * f.grid.h * float(np.sum(np.abs(f.u) ** 2))


def width(f: RadialField) -> float:
    """Per-axis width sqrt(<r^2>/3)."""
    w = np.abs(f.u) ** 2
    r2 = float(np.sum(w * f.grid.r ** 2)) / float(np.sum(w))
    return math.sqrt(r2 / 3.0)


def init_gaussian(grid: RadialGrid, sigma0: float, sigma_dot0: float = 0.0,
                  t: float = 0.0) -> RadialField:
    """Unit-norm Gaussian of per-axis width ``sigma0`` and width rate ``sigma_dot0``."""
    if not sigma0 > 0:
        raise ConfigurationError("sigma0 must be positive")
    if grid.h > sigma0 / 8:
        raise ConfigurationError(
            f"grid spacing {grid.h:.4g} does not resolve sigma0 = {sigma0:.4g} (need h <= sigma0/8)"
        )
    if grid.r_max < 8 * sigma0:
        raise ConfigurationError(f"r_max {grid.r_max:.4g} must be at least 8 sigma0")
    r = grid.r
    beta = -sigma_dot0 / (2.0 * sigma0)
    u = r * np.exp(-r**2 / (4.0 * sigma0**2) + 1j * beta * r**2)
    f = RadialField(grid, u.astype(complex), t)
    f.u /= math.sqrt(norm(f))
    return f


def potential(f: RadialField, params: BECParams, omega: float, eps: float) -> np.ndarray:
    rho = f.density()
    v = params.coupling * params.atom_number * rho
    if params.log_strength:
        v = v - params.log_strength * np.log(np.maximum(rho, eps))
    if omega:
        v = v + 0.5 * omega**2 * f.grid.r**2
    return v


def max_phase_rate(f: RadialField, params: BECParams, omega: float, eps: float) -> float:
    """Largest |V| over the region the field occupies (density above ``eps``)."""
    v = potential(f, params, omega, eps)
    occupied = f.density() > eps
    if not occupied.any():
        return 0.0
    return float(np.max(np.abs(v[occupied])))


def default_time_step(f: RadialField, params: BECParams, schedule: Optional[TrapSchedule] = None,
                      t_end: Optional[float] = None, factor: float = DEFAULT_PHASE_FACTOR,
                      eps_factor: float = EPS_FACTOR) -> float:
    """Step with dt * max|V| = ``factor``, capped where V is small."""
    eps = eps_factor * float(np.max(f.density()))
    schedule = schedule or TrapSchedule()
    omegas = {0.0} | {seg.omega[0] for seg in schedule.segments}
    vmax = max(max_phase_rate(f, params, w, eps) for w in omegas)
    cap = factor * width(f) ** 2
    if t_end is not None:
        cap = min(cap, (t_end - f.t) / 200)
    return min(factor / vmax, cap) if vmax > 0 else cap


@dataclass(eq=False)
class PDEResult:
    times: np.ndarray
    widths: np.ndarray
    norms: np.ndarray
    field: RadialField
    eps: float
    steps: int
    snapshots: list = field(default_factory=list)


@dataclass(frozen=True)
class Impulse:
    """Instantaneous harmonic kick at ``t``, worth ``omega^2 * duration``.

    The clock jumps from ``t`` to ``t + duration``.
    """

    t: float
    omega: float
    duration: float


def evolve(f: RadialField, params: BECParams, schedule: Optional[TrapSchedule], t_end: float,
           dt: Optional[float] = None, sample_times: Optional[Sequence[float]] = None,
           impulses: Iterable[Impulse] = (), eps_factor: float = EPS_FACTOR,
           max_norm_drift: float = MAX_NORM_DRIFT, keep_snapshots: bool = False) -> PDEResult:
    """Evolve ``f`` to ``t_end``; ``f`` itself is not modified.

    Widths and norms are recorded at ``f.t``, ``t_end`` and every time in
    ``sample_times``. The step is shortened so that every schedule boundary,
    impulse and sample time is hit exactly.

    Raises:
        ConfigurationError: the phase-resolution condition dt*max|V| < 0.1 fails.
        NumericalQualityError: the norm drifted by more than ``max_norm_drift``.
    """
    schedule = schedule or TrapSchedule()
    if not schedule.is_isotropic:
        raise ConfigurationError("the radial solver needs isotropic trap frequencies")
    if not t_end > f.t:
        raise ConfigurationError("t_end must exceed the field time")
    f = f.copy()
    grid = f.grid
    eps = eps_factor * float(np.max(f.density()))
    if dt is None:
        dt = default_time_step(f, params, schedule, t_end, eps_factor=eps_factor)
    if not dt > 0:
        raise ConfigurationError("dt must be positive")

    impulses = sorted(impulses, key=lambda k: k.t)
    for imp in impulses:
        if not f.t < imp.t and imp.t + imp.duration < t_end:
            raise ConfigurationError("impulses must fall strictly inside the run")
    marks = {f.t, t_end}
    marks.update(s.t_start for s in schedule.segments)
    marks.update(s.t_end for s in schedule.segments)
    if sample_times is not None:
        marks.update(float(s) for s in sample_times)
    for imp in impulses:
        marks.update((imp.t, imp.t + imp.duration))
    marks = sorted(m for m in marks if f.t <= m <= t_end)
    samples = {f.t, t_end} | ({float(s) for s in sample_times} if sample_times is not None else set())
    kicks = {imp.t: imp for imp in impulses}

    norm0 = norm(f)
    times, widths, norms, snaps = [], [], [], []
    r2 = grid.r ** 2
    gn = params.coupling * params.atom_number
    b = params.log_strength
    k2 = grid.k ** 2
    nsteps_total = 0
    skip_until = -math.inf

    def record():
        nv = norm(f)
        if abs(nv - norm0) > max_norm_drift * norm0:
            raise NumericalQualityError(
                f"norm drift {abs(nv - norm0) / norm0:.3g} at t = {f.t:.6g} exceeds {max_norm_drift:g}"
            )
        times.append(f.t)
        widths.append(width(f))
        norms.append(nv)
        if keep_snapshots:
            snaps.append(f.copy())

    def phase(u, w, tau):
        rho = np.abs(u) ** 2 / r2
        v = gn * rho
        if b:
            v -= b * np.log(np.maximum(rho, eps))
        if w:
            v += 0.5 * w * w * r2
        return u * np.exp(-1j * tau * v)

    checked = set()
    record()
    for ta, tb in zip(marks, marks[1:]):
        if tb <= skip_until:
            continue
        if ta in kicks:
            imp = kicks[ta]
            f.u = f.u * np.exp(-0.5j * imp.omega**2 * imp.duration * r2)
            f.t = imp.t + imp.duration
            skip_until = f.t
            if tb in samples:
                record()
            continue
        w = schedule.omega_at(ta)[0]
        if w not in checked:
            rate = max_phase_rate(f, params, w, eps)
            if dt * rate >= PHASE_LIMIT:
                raise ConfigurationError(
                    f"time step {dt:.4g} too coarse: dt*max|V| = {dt * rate:.3g} >= {PHASE_LIMIT}"
                )
            checked.add(w)
        n = max(1, math.ceil((tb - ta) / dt - 1e-9))
        tau = (tb - ta) / n
        kin = np.exp(-0.5j * tau * k2)
        u = f.u
        for _ in range(n):
            u = phase(u, w, 0.5 * tau)
            u = scipy.fft.idst(kin * scipy.fft.dst(u, type=1, norm="ortho"), type=1, norm="ortho")
            u = phase(u, w, 0.5 * tau)
        f.u = u
        f.t = tb
        nsteps_total += n
        if tb in samples:
            record()

    return PDEResult(np.array(times), np.array(widths), np.array(norms), f, eps,
                     nsteps_total, snaps)


def suggest_grid(sigma0: float, max_width: float, min_width: Optional[float] = None,
                 max_rate: float = 0.0) -> RadialGrid:
    """Smallest power-of-two grid that holds and resolves the expected run."""
    min_width = min(sigma0, min_width or sigma0)
    r_max = max(8.0 * sigma0, 6.0 * max_width)
    h = min_width / 8.0
    # keep the local flow velocity at ~6 widths well inside the spectral band
    k_needed = 2.0 * (6.0 * abs(max_rate) + 3.0 / min_width)
    h = min(h, math.pi / k_needed)
    n = 256
    while r_max / n > h:
        n *= 2
    return RadialGrid(r_max, n)


def write_snapshot(f: RadialField, fh: TextIO, header: Optional[dict] = None) -> None:
    """Plain-text dump: '#' header lines, then 'r re im' per grid point."""
    fh.write(f"# t = {f.t:.9e}\n")
    for key, value in (header or {}).items():
        fh.write(f"# {key} = {value}\n")
    for r, u in zip(f.grid.r, f.psi()):
        fh.write(f"{r:.9e} {u.real:.9e} {u.imag:.9e}\n")
