"""Collective (Dicke-sector) qubit reset: integration, thermodynamics and bounds."""

from .errors import (DickeResetError, DomainError, InconsistencyError, IntegrationError,
                     IntegrityError, UndefinedResetFactor)
from .kernels import BACKEND
from .model import (DickeDistribution, Exponential, Linear, Protocol, Quench, RateSet,
                    SystemParams, Tabulated, build_rates, figure_protocols, initial_state,
                    omega_at, omega_zero_plus, protocol_from_dict)
from .dynamics import IntegratorOptions, Trajectory, integrate, integrate_epsilon_ode, rhs
from .thermo import (ResetSummary, avg_dynamical_activity, error_probability,
                     one_norm_distance, reset_factor, summarize, zeta)
from .bounds import BoundReport, asymptotic_window, landauer_collective, reset_factor_bound

__version__ = "0.1.0"
