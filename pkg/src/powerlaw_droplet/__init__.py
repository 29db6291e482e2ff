"""Self-similar spreading of thin drops of power-law (shear-thinning) fluid.

The scaled profile ``H(eta)`` of a drop with zero contact angle is found by
shooting on the central curvature; from it follow the spreading constants,
dimensional front-radius and contact-angle laws, and a direct thin-film
solver that checks the similarity solution is the long-time attractor.
"""

from .dimensional import (
    CapillaryLengthWarning,
    DimensionalSetup,
    FluidParams,
    RadiusSeries,
    apparent_contact_angle,
    fit_spreading_exponent,
    front_radius,
    height_profile,
    make_setup,
)
from .estimators import PowerLawSpreadingRegressor, SelfSimilarDrop, SpreadingLawModel
from .pde import (
    PdeStabilityError,
    PdeState,
    RadialGrid,
    RunStats,
    explicit_dt,
    front_position,
    implicit_step,
    init_drop,
    rescale_and_compare,
    run_until,
    step,
)
from .scaling import (
    PAPER_LAMBDAS,
    PAPER_TABLE,
    ConstantsRow,
    angle_prefactor,
    asymptotic_front_height,
    build_constants_table,
    constants_from_critical,
    dissipation_integral,
    similarity_exponent,
    spreading_prefactor,
)
from .shooting import BracketError, CriticalSolution, find_critical_kappa, solve_drop
from .similarity import (
    PAPER_TABLE_OPTIONS,
    Classification,
    IntegrationError,
    IntegratorOptions,
    OdeParams,
    SimilarityProfile,
    SimilarityState,
    classify,
    integrate_profile,
    ode_rhs,
    series_start,
)

__version__ = "0.1.0"
