"""Traffic waves for a follow-the-leader model with driver hysteresis.

State is (u, h): u the spacing ahead of a car, h the label of the scanning
curve its velocity relaxes along.  The package provides the curve family and
its validator, exact elementary waves with a viscous-profile oracle, the
two-state jump solver, a wavefront-tracking evolver, an upwind finite-volume
scheme, named scenarios with built-in checks, and a CLI.
"""

from .curves import (BAND_TOL, CurveFamily, DriverMode, HState,
                     ValidationReport, Violation, branch_slope, default_family,
                     family_from_json, from_eulerian, in_band, make_family,
                     mode_of, to_eulerian, validate_family, velocity,
                     velocity_grid)
from .errors import (DegenerateJumpError, DomainError, InadmissibleWaveError,
                     InvalidOverbrakeError, NoRootError, NoSolutionError,
                     OutOfFanError, UnknownScenarioError)
from .fv import (FvResult, GridState, cfl_dt, grid_from_datum, run as fv_run,
                 step, total_variation, update_hysteresis)
from .riemann import (FanReport, RiemannFan, solve_riemann,
                      solve_riemann_overbraking, tangent_on_accel,
                      tangent_on_scanning, validate_fan)
from .scalar_law import ScalarLaw
from .scenarios import list_scenarios, run_scenario
from .tracking import (Event, Front, FrontSet, TrackedSolution, frontset_at,
                       init_fronts, evolve, sample, track)
from .waves import (ProfileReport, RAREFACTION_KINDS, SHOCK_KINDS, Wave,
                    chord_s2a, chord_s2d, make_wave, rarefaction_state,
                    shock_speed, viscous_profile_check, wave_from_json_dict)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
