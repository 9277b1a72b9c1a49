"""Physical constants and the internal unit system.

All numerics run in units where hbar = m = 1 and lengths are measured in
``reference_length``. This fixes

    time_unit   = m * L**2 / hbar
    energy_unit = hbar / time_unit = hbar**2 / (m * L**2)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

HBAR = 1.054571817e-34  # J s
BOHR_RADIUS = 5.29177211e-11  # m
ELECTRON_VOLT = 1.602176634e-19  # J
MASS_RB87 = 1.44316060e-25  # kg
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg

DIMENSIONS = ("length", "time", "energy", "frequency", "velocity")


@dataclass(frozen=True)
class UnitSystem:
    """Scaling between SI and internal units for one species."""

    reference_length: float = 1e-6
    species_mass: float = MASS_RB87

    def __post_init__(self):
        for name in ("reference_length", "species_mass"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}")

    @property
    def time_unit(self) -> float:
        return self.species_mass * self.reference_length**2 / HBAR

    @property
    def energy_unit(self) -> float:
        return HBAR / self.time_unit

    def scale(self, dimension: str) -> float:
        """SI value of one internal unit of ``dimension``."""
        if dimension == "length":
            return self.reference_length
        if dimension == "time":
            return self.time_unit
        if dimension == "energy":
            return self.energy_unit
        if dimension == "frequency":
            return 1.0 / self.time_unit
        if dimension == "velocity":
            return self.reference_length / self.time_unit
        raise ConfigurationError(
            f"unknown dimension {dimension!r}; expected one of {DIMENSIONS}"
        )

    def to_internal(self, value, dimension: str):
        return value / self.scale(dimension)

    def from_internal(self, value, dimension: str):
        return value * self.scale(dimension)

    def describe(self) -> dict:
        return {
            "reference_length_m": self.reference_length,
            "species_mass_kg": self.species_mass,
            "time_unit_s": self.time_unit,
            "energy_unit_J": self.energy_unit,
            "velocity_unit_m_per_s": self.scale("velocity"),
        }


def make_unit_system(reference_length: float = 1e-6,
                     species_mass: float = MASS_RB87) -> UnitSystem:
    return UnitSystem(reference_length=reference_length, species_mass=species_mass)
