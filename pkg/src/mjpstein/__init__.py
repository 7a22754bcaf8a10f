"""Truncated density dependent jump processes: geometry, exact analysis and simulation."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    DiscreteDistribution,
    SteinSolution,
    SteinSolver,
    TruncatedChain,
    build_chain,
    decay_profile,
    enumerate_ball,
    assemble_generator,
    irreducibility_check,
    shift_tv,
    sigma_moment,
    solve_stein,
    stationary_distribution,
    stein_via_transient,
    transient_distribution,
    tv_distance,
)
from .factorize import WeightedJumpSet, factorize  # noqa: E402
from .process import (  # noqa: E402
    ElementaryProcess,
    ProcessSpec,
    build_elementary,
    check_assumptions,
    constants_ledger,
    drift_field,
    geometry_of,
    jacobian_at_equilibrium,
    local_covariance,
)
from .spectral import GeometrySolution, check_hurwitz, sigma_norm, solve_lyapunov, spectral_summary  # noqa: E402

__all__ = [
    "DiscreteDistribution",
    "ElementaryProcess",
    "GeometrySolution",
    "ProcessSpec",
    "SteinSolution",
    "SteinSolver",
    "TruncatedChain",
    "WeightedJumpSet",
    "assemble_generator",
    "build_chain",
    "build_elementary",
    "check_assumptions",
    "check_hurwitz",
    "constants_ledger",
    "decay_profile",
    "drift_field",
    "enumerate_ball",
    "factorize",
    "geometry_of",
    "irreducibility_check",
    "jacobian_at_equilibrium",
    "local_covariance",
    "shift_tv",
    "sigma_moment",
    "sigma_norm",
    "solve_lyapunov",
    "solve_stein",
    "spectral_summary",
    "stationary_distribution",
    "stein_via_transient",
    "transient_distribution",
    "tv_distance",
]
