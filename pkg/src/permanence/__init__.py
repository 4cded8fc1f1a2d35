"""Permanence of competitive Kolmogorov systems via the carrying simplex.

Decide whether a competitive system ``x_i' = x_i f(c_i, (Bx)_i)`` is
permanent by building average-Liapunov weight certificates over the boundary
equilibria of its carrying simplex, and cross-check by direct integration.

>>> from permanence import SystemSpec, analyze
>>> spec = SystemSpec([[1, .5, .5], [.5, 1, .5], [.5, .5, 1]], [1, 1, 1])
>>> analyze(spec).outcome
'Permanent'
"""
from .certificates import (
    IMPERMANENCE,
    PERMANENCE,
    Certificate,
    ConstraintSystem,
    Infeasible,
    Verdict,
    analyze,
    boundary_attractor,
    build_constraints,
    find_certificate,
    rho,
)
from .equilibria import (
    DegenerateSolve,
    DegenerateSystem,
    Equilibrium,
    all_equilibria,
    axial_equilibria,
    boundary_equilibria,
    characteristic_matrix,
    equilibrium_on_support,
)
from .model import (
    BUILTIN_FAMILIES,
    GOMPERTZ,
    LESLIE_GOWER,
    LOTKA_VOLTERRA,
    RICKER,
    DomainError,
    GrowthFamily,
    SpecError,
    SystemSpec,
    family_from_name,
    growth_rate,
    jacobian,
    may_leonard,
    per_capita,
    validate,
    vector_field,
)
from .nullclines import (
    CyclePattern,
    SignConfiguration,
    beta,
    cycle_pattern,
    gamma,
    is_class_29,
    sign_configuration,
)
from .simulate import (
    IntegrationError,
    IntegratorOptions,
    Trajectory,
    average_liapunov_integral,
    empirical_permanence,
    integrate,
    restrict_to_face,
    sample_carrying_simplex,
)

__all__ = [
    "IMPERMANENCE",
    "PERMANENCE",
    "Certificate",
    "ConstraintSystem",
    "Infeasible",
    "Verdict",
    "analyze",
    "boundary_attractor",
    "build_constraints",
    "find_certificate",
    "rho",
    "DegenerateSolve",
    "DegenerateSystem",
    "Equilibrium",
    "all_equilibria",
    "axial_equilibria",
    "boundary_equilibria",
    "characteristic_matrix",
    "equilibrium_on_support",
    "BUILTIN_FAMILIES",
    "GOMPERTZ",
    "LESLIE_GOWER",
    "LOTKA_VOLTERRA",
    "RICKER",
    "DomainError",
    "GrowthFamily",
    "SpecError",
    "SystemSpec",
    "family_from_name",
    "growth_rate",
    "jacobian",
    "may_leonard",
    "per_capita",
    "validate",
    "vector_field",
    "CyclePattern",
    "SignConfiguration",
    "beta",
    "cycle_pattern",
    "gamma",
    "is_class_29",
    "sign_configuration",
    "IntegrationError",
    "IntegratorOptions",
    "Trajectory",
    "average_liapunov_integral",
    "empirical_permanence",
    "integrate",
    "restrict_to_face",
    "sample_carrying_simplex",
]

__version__ = "0.1.0"

