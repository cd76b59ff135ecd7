"""Quasi-static flows of linear viscoelastic fluids described by minimal states."""

__version__ = "0.1.0"

from .field import Field, Mesh, divergence, effective_state_source, gradient, helmholtz_decompose
from .kernel import (
    AdmissibilityReport, InadmissibleKernelError, Kernel, XiProfile, check_admissibility,
    cosine_transform, exponential, polynomial, prony, tabulated, total_viscosity,
)
from .state import (
    History, MinimalState, build_state_from_history, evolve_state, extra_stress, states_equivalent,
)
from .spectral import HalfLineSignal, h_mu_norm_freq, h_mu_norm_time, s_mu_norm_freq
from .solver import (
    Forcing, Scenario, VelocityTrace, apriori_bound_check, solve_frequency_domain, solve_time_domain,
    weak_residual,
)
from .analysis import (
    EnergyTrace, alpha_ratio, decay_envelope_check, energy, energy_dissipation_step, energy_trace,
    f_mu_membership, fit_decay,
)

__all__ = [
    "AdmissibilityReport", "EnergyTrace", "Field", "Forcing", "HalfLineSignal", "History",
    "InadmissibleKernelError", "Kernel", "Mesh", "MinimalState", "Scenario", "VelocityTrace",
    "XiProfile", "alpha_ratio", "apriori_bound_check", "build_state_from_history",
    "check_admissibility", "cosine_transform", "decay_envelope_check", "divergence",
    "effective_state_source", "energy", "energy_dissipation_step", "energy_trace",
    "evolve_state", "exponential", "extra_stress", "f_mu_membership", "fit_decay", "gradient",
    "h_mu_norm_freq", "h_mu_norm_time", "helmholtz_decompose", "polynomial", "prony",
    "s_mu_norm_freq", "solve_frequency_domain", "solve_time_domain", "states_equivalent",
    "tabulated", "total_viscosity", "weak_residual",
]
