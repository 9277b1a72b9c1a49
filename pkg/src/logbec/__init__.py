"""Condensate expansion under a logarithmic Gross-Pitaevskii equation."""

from .analysis import (DifferenceMap, FarFieldRate, RelativeErrors, difference_map,
                       farfield_rate, magnetic_threshold, rate_error, sigma0_for_chi)
from .dkc import (KickSpec, apply_finite_pulse, apply_thin_lens, collimation_frequency,
                  simulate_with_kick)
from .errors import (ConfigurationError, DomainError, LogBECError, NumericalQualityError,
                     SimulationError, StiffnessError)
from .model import (BECParams, GaussianState, TrapSchedule, TrapSegment, WidthTrajectory,
                    spherical_state)
from .scenario import Scenario, compare_solvers, run_variational
from .units import UnitSystem, make_unit_system
from .variational import (IntegratorSettings, chi, energy_per_particle, gausson_width,
                          integrate, rhs_anisotropic, rhs_spherical, sigma_max)

__version__ = "0.1.0"
