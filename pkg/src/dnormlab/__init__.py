"""Numerical laboratory for D-norms and their extreme value processes.

Evaluate norms induced by spectral density families (by quadrature or by
Monte Carlo over generator processes), simulate standard max-stable and
generalized Pareto processes with certified series truncation, and verify
the identities tying everything together.
"""

from .dnorm import (
    MCEstimate,
    dnorm_monte_carlo,
    dnorm_quadrature,
    generator_constant,
    norm_axiom_suite,
)
from .efunc import (
    DEFAULT_RESOLUTION,
    EFunction,
    GridConfig,
    constant_function,
    from_callable,
    make_step_function,
    standard_probes,
    zero_function,
)
from .errors import (
    DnormLabError,
    DuplicateSpikeError,
    GridMismatchError,
    NormalizationError,
    PreconditionError,
    QuadratureNonConvergence,
)
from .generator import (
    ConstantGenerator,
    GeneratorProcess,
    RatioGenerator,
    ScalarLaw,
    SpectralGenerator,
    check_generator,
    generator_from_descriptor,
    generators_equivalent,
    simulation_generator,
)
from .numerics import (
    ALPHA_3SIGMA,
    IntegralResult,
    QuadConfig,
    SeedSpec,
    bonferroni_critical,
    integrate,
)
from .process_sim import (
    GPPEnsemble,
    PathEnsemble,
    TruncationPolicy,
    empirical_fdf,
    max_stability_check,
    simulate_gpp,
    simulate_msp,
    verify_gpp_df,
    verify_msp_df,
)
from .spectral import (
    ChangeOfVariableFamily,
    KernelShiftFamily,
    SpectralFamily,
    UniformWedgeFamily,
    ValidationReport,
    change_of_variable_family,
    envelope_integral,
    family_from_descriptor,
    gaussian_family,
    kernel_shift_family,
    uniform_wedge_family,
    validate_family,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_3SIGMA",
    "ChangeOfVariableFamily",
    "ConstantGenerator",
    "DEFAULT_RESOLUTION",
    "DnormLabError",
    "DuplicateSpikeError",
    "EFunction",
    "GPPEnsemble",
    "GeneratorProcess",
    "GridConfig",
    "GridMismatchError",
    "IntegralResult",
    "KernelShiftFamily",
    "MCEstimate",
    "NormalizationError",
    "PathEnsemble",
    "PreconditionError",
    "QuadConfig",
    "QuadratureNonConvergence",
    "RatioGenerator",
    "ScalarLaw",
    "SeedSpec",
    "SpectralFamily",
    "SpectralGenerator",
    "TruncationPolicy",
    "UniformWedgeFamily",
    "ValidationReport",
    "bonferroni_critical",
    "change_of_variable_family",
    "check_generator",
    "constant_function",
    "dnorm_monte_carlo",
    "dnorm_quadrature",
    "empirical_fdf",
    "envelope_integral",
    "family_from_descriptor",
    "from_callable",
    "gaussian_family",
    "generator_constant",
    "generator_from_descriptor",
    "generators_equivalent",
    "integrate",
    "kernel_shift_family",
    "make_step_function",
    "max_stability_check",
    "norm_axiom_suite",
    "simulate_gpp",
    "simulate_msp",
    "simulation_generator",
    "standard_probes",
    "uniform_wedge_family",
    "validate_family",
    "verify_gpp_df",
    "verify_msp_df",
    "zero_function",
]
