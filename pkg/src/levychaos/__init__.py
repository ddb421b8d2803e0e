"""Products and moments of iterated stochastic integrals of Levy processes.

Three independent engines over the same problem description:

* :mod:`levychaos.chaos` -- combinatorial closed forms (product expansion
  and moment formula over ordered block partitions),
* :mod:`levychaos.recursive` -- depth recursions for the same moments and
  for the driving process itself,
* :mod:`levychaos.montecarlo` -- exact compound-Poisson path simulation.
"""

from .chaos import (
    ChaosExpansion,
    ChaosTerm,
    FactorSpec,
    IntegrabilityReport,
    ProblemSpec,
    check_integrability,
    expand_product,
    moment,
)
from .errors import (
    CapacityError,
    ConfigError,
    IntegrationError,
    LevyChaosError,
    UnsupportedIntegrandError,
)
from .functions import (
    CallableFunction,
    GeneratorFunction,
    IdentifiedIntegrand,
    PiecewiseConstantFunction,
    PolynomialFunction,
    TimeIntegrand,
    dyadic_indicator,
    haar_weighted,
    hermite_weighted,
    identify,
    monomial,
    product,
    restrict_jump,
    table_generator,
    teugels,
)
from .measures import (
    AtomicMeasure,
    DensityMeasure,
    LevyTriplet,
    MomentTableMeasure,
    ZERO_MEASURE,
    check_moment_finiteness,
    mu_integrate,
    nu_integrate,
)
from .montecarlo import (
    MCEstimate,
    PathwiseReport,
    SimulationConfig,
    pathwise_product_check,
    quadratic_variation_estimate,
    simulate_moment,
)
from .partitions import (
    BlockLabeling,
    IdentificationRule,
    enumerate_rules,
    filter_moment,
    filter_product,
    moment_labelings,
)
from .recursive import (
    levy_central_moments,
    levy_raw_moments,
    recursive_product_moment,
    teugels_power_moment,
)
from .simplex import SimplexEstimate, integrate_exact, integrate_numeric

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure",
    "BlockLabeling",
    "CallableFunction",
    "CapacityError",
    "ChaosExpansion",
    "ChaosTerm",
    "ConfigError",
    "DensityMeasure",
    "FactorSpec",
    "GeneratorFunction",
    "IdentifiedIntegrand",
    "IdentificationRule",
    "IntegrabilityReport",
    "IntegrationError",
    "LevyChaosError",
    "LevyTriplet",
    "MCEstimate",
    "MomentTableMeasure",
    "PathwiseReport",
    "PiecewiseConstantFunction",
    "PolynomialFunction",
    "ProblemSpec",
    "SimplexEstimate",
    "SimulationConfig",
    "TimeIntegrand",
    "UnsupportedIntegrandError",
    "ZERO_MEASURE",
    "check_integrability",
    "check_moment_finiteness",
    "dyadic_indicator",
    "enumerate_rules",
    "expand_product",
    "filter_moment",
    "filter_product",
    "haar_weighted",
    "hermite_weighted",
    "identify",
    "integrate_exact",
    "integrate_numeric",
    "levy_central_moments",
    "levy_raw_moments",
    "moment",
    "moment_labelings",
    "monomial",
    "mu_integrate",
    "nu_integrate",
    "pathwise_product_check",
    "product",
    "quadratic_variation_estimate",
    "recursive_product_moment",
    "restrict_jump",
    "simulate_moment",
    "table_generator",
    "teugels",
    "teugels_power_moment",
]
