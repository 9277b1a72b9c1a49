"""JSON experiment configs with explicit unit tags.

Every dimensioned field is an object ``{"value": ..., "unit": ...}``. A
minimal config::

    {
      "atom_number": 5e4,
      "scatter_length": {"value": 90, "unit": "a0"},
      "log_strength": {"value": 3.3e-15, "unit": "eV"},
      "initial": {"sigma": {"value": 2.5, "unit": "um"},
                  "sigma_dot": {"value": 0, "unit": "um/s"}},
      "t_end": {"value": 1, "unit": "s"}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .dkc import KickSpec
from .errors import ConfigurationError
from .model import BECParams, GaussianState, TrapSchedule, TrapSegment, spherical_state
from .scenario import Scenario
from .units import ATOMIC_MASS_UNIT, BOHR_RADIUS, ELECTRON_VOLT, MASS_RB87, UnitSystem
from .variational import IntegratorSettings

UNIT_TABLE = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "a0": BOHR_RADIUS},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6},
    "velocity": {"m/s": 1.0, "mm/s": 1e-3, "um/s": 1e-6, "µm/s": 1e-6},
    "energy": {"J": 1.0, "eV": ELECTRON_VOLT},
    "frequency": {"rad/s": 1.0, "Hz": 2.0 * math.pi},
    "mass": {"kg": 1.0, "u": ATOMIC_MASS_UNIT},
}
SOLVERS = ("variational", "pde", "both")


def quantity(node: Any, dimension: str, path: str, vector: bool = False):
    """SI value of a unit-tagged field."""
    if not isinstance(node, dict) or set(node) != {"value", "unit"}:
        raise ConfigurationError(f"{path}: expected {{\"value\": ..., \"unit\": ...}}")
    unit = node["unit"]
    table = UNIT_TABLE[dimension]
    if unit not in table:
        raise ConfigurationError(f"{path}: unit {unit!r} is not a {dimension} unit "
                                 f"(allowed: {', '.join(table)})")
    value = node["value"]
    if vector and isinstance(value, list):
        if len(value) != 3:
            raise ConfigurationError(f"{path}: expected 3 values")
        return tuple(_number(v, path) * table[unit] for v in value)
    return _number(value, path) * table[unit]


def _number(v: Any, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigurationError(f"{path}: expected a finite number, got {v!r}")
    return float(v)


def _get(node: dict, key: str, path: str, default: Any = ...):
    if key in node:
        return node[key]
    if default is ...:
        raise ConfigurationError(f"{path}.{key}: missing required field")
    return default


@dataclass
class ExperimentConfig:
    """Validated config; SI values plus the raw JSON for provenance."""

    raw: dict
    units: UnitSystem
    species: str
    atom_number: float
    scatter_length_m: float
    log_strength_J: float
    sigma0_m: float
    sigma_dot0_m_per_s: float
    t_end_s: float
    segments_si: list = field(default_factory=list)
    kick_si: Optional[dict] = None
    sample_interval_s: Optional[float] = None
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step_s: float = math.inf
    solver: str = "variational"
    compare_linear: bool = False
    pde: dict = field(default_factory=dict)

    def params(self) -> BECParams:
        u = self.units
        return BECParams(
            atom_number=self.atom_number,
            scatter_length=u.to_internal(self.scatter_length_m, "length"),
            log_strength=u.to_internal(self.log_strength_J, "energy"),
            species=self.species,
            mass_kg=u.species_mass,
        )

    def initial_state(self) -> GaussianState:
        u = self.units
        return spherical_state(u.to_internal(self.sigma0_m, "length"),
                               u.to_internal(self.sigma_dot0_m_per_s, "velocity"))

    def scenario(self, t_end_s: Optional[float] = None) -> Scenario:
        u = self.units
        T = lambda s: u.to_internal(s, "time")  # noqa: E731
        segs = tuple(TrapSegment(T(a), T(b), tuple(u.to_internal(w, "frequency") for w in om))
                     for a, b, om in self.segments_si)
        kick = None
        if self.kick_si is not None:
            k = self.kick_si
            omega = None if k["omega"] is None else u.to_internal(k["omega"], "frequency")
            kick = KickSpec(T(k["t_kick"]), T(k["duration"]), omega, k["mode"])
        settings = IntegratorSettings(
            rtol=self.rtol, atol=self.atol,
            max_step=T(self.max_step_s) if math.isfinite(self.max_step_s) else math.inf,
            sample_interval=None if self.sample_interval_s is None else T(self.sample_interval_s),
        )
        return Scenario(u, self.params(), self.initial_state(),
                        T(self.t_end_s if t_end_s is None else t_end_s),
                        TrapSchedule(segs), kick, settings)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config: top level must be a JSON object")
    p = "config"
    species = _get(raw, "species", p, {"name": "Rb87", "mass": {"value": MASS_RB87, "unit": "kg"}})
    name = str(_get(species, "name", f"{p}.species", "Rb87"))
    mass = quantity(_get(species, "mass", f"{p}.species"), "mass", f"{p}.species.mass")
    unit_node = _get(raw, "units", p, {})
    ref = quantity(_get(unit_node, "reference_length", f"{p}.units", {"value": 1, "unit": "um"}),
                   "length", f"{p}.units.reference_length")
    units = UnitSystem(ref, mass)

    n = _number(_get(raw, "atom_number", p), f"{p}.atom_number")
    if n < 0:
        raise ConfigurationError(f"{p}.atom_number: must be >= 0")
    a = quantity(_get(raw, "scatter_length", p), "length", f"{p}.scatter_length")
    b = quantity(_get(raw, "log_strength", p), "energy", f"{p}.log_strength")

    init = _get(raw, "initial", p)
    s0 = quantity(_get(init, "sigma", f"{p}.initial"), "length", f"{p}.initial.sigma")
    if not s0 > 0:
        raise ConfigurationError(f"{p}.initial.sigma: must be positive")
    v0 = quantity(_get(init, "sigma_dot", f"{p}.initial", {"value": 0, "unit": "m/s"}),
                  "velocity", f"{p}.initial.sigma_dot")
    t_end = quantity(_get(raw, "t_end", p), "time", f"{p}.t_end")
    if not t_end > 0:
        raise ConfigurationError(f"{p}.t_end: must be positive")

    sched = _get(raw, "schedule", p, {})
    segments = []
    for i, seg in enumerate(_get(sched, "segments", f"{p}.schedule", [])):
        sp = f"{p}.schedule.segments[{i}]"
        ta = quantity(_get(seg, "t_start", sp), "time", f"{sp}.t_start")
        tb = quantity(_get(seg, "t_end", sp), "time", f"{sp}.t_end")
        om = quantity(_get(seg, "omega", sp), "frequency", f"{sp}.omega", vector=True)
        om = om if isinstance(om, tuple) else (om,) * 3
        if not ta < tb:
            raise ConfigurationError(f"{sp}: t_start must be before t_end")
        segments.append((ta, tb, om))
    try:
        TrapSchedule(tuple(TrapSegment(*s) for s in segments))
    except ConfigurationError as exc:
        raise ConfigurationError(f"{p}.schedule.segments: {exc}") from None

    kick = None
    if sched.get("dkc") is not None:
        kp = f"{p}.schedule.dkc"
        k = sched["dkc"]
        w = _get(k, "omega", kp, "auto")
        kick = {
            "t_kick": quantity(_get(k, "t_kick", kp), "time", f"{kp}.t_kick"),
            "duration": quantity(_get(k, "duration", kp), "time", f"{kp}.duration"),
            "omega": None if w == "auto" else quantity(w, "frequency", f"{kp}.omega"),
            "mode": _get(k, "mode", kp, "finite_pulse"),
        }
        if kick["mode"] not in ("thin_lens", "finite_pulse"):
            raise ConfigurationError(f"{kp}.mode: must be thin_lens or finite_pulse")
        if not (0 < kick["t_kick"] and kick["t_kick"] + kick["duration"] < t_end):
            raise ConfigurationError(f"{kp}: kick must lie inside (0, t_end)")

    si = _get(raw, "sample_interval", p, None)
    sample = None if si is None else quantity(si, "time", f"{p}.sample_interval")
    integ = _get(raw, "integrator", p, {})
    rtol = _number(_get(integ, "rtol", f"{p}.integrator", 1e-10), f"{p}.integrator.rtol")
    atol = _number(_get(integ, "atol", f"{p}.integrator", 1e-12), f"{p}.integrator.atol")
    ms = integ.get("max_step")
    max_step = math.inf if ms is None else quantity(ms, "time", f"{p}.integrator.max_step")
    solver = _get(raw, "solver", p, "variational")
    if solver not in SOLVERS:
        raise ConfigurationError(f"{p}.solver: must be one of {SOLVERS}")

    pde_raw = _get(raw, "pde", p, {})
    pde = {}
    if "r_max" in pde_raw:
        pde["r_max"] = quantity(pde_raw["r_max"], "length", f"{p}.pde.r_max")
    if "n" in pde_raw:
        pde["n"] = int(_number(pde_raw["n"], f"{p}.pde.n"))
    if "dt" in pde_raw:
        pde["dt"] = quantity(pde_raw["dt"], "time", f"{p}.pde.dt")
    if "samples" in pde_raw:
        pde["samples"] = int(_number(pde_raw["samples"], f"{p}.pde.samples"))

    cfg = ExperimentConfig(
        raw=raw, units=units, species=name, atom_number=n, scatter_length_m=a,
        log_strength_J=b, sigma0_m=s0, sigma_dot0_m_per_s=v0, t_end_s=t_end,
        segments_si=segments, kick_si=kick, sample_interval_s=sample, rtol=rtol, atol=atol,
        max_step_s=max_step, solver=solver,
        compare_linear=bool(_get(raw, "compare_linear", p, False)), pde=pde,
    )
    try:
        cfg.scenario()
    except ConfigurationError as exc:
        raise ConfigurationError(f"{p}: {exc}") from None
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(raw)
