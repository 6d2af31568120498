"""Metric modulars: axiom checks, induced metrics, modular sets, contractions and fixed points."""

__version__ = "0.1.0"

from .extreal import INF, ZERO, ExtNonNegReal, add, ext, leq, scale
from .fixedpoint import (
    ContractionParams,
    SelfMap,
    SolveReport,
    check_fund1,
    check_fund2,
    check_palais,
    estimate_min_k,
    solve,
    verify_contraction,
    verify_strong_contraction,
    verify_theorem_conditions,
)
from .metrics import (
    BisectionConfig,
    Infimum,
    check_equivalence_claim,
    check_metric_axioms,
    d_w,
    d_w_star,
    induced_distance,
    infimum_of_threshold,
)
from .modular import (
    PROPERTIES,
    Modular,
    PreconditionError,
    SamplingError,
    check_property,
    evaluate,
    replay_witness,
    scaled_modular,
)
from .reports import CheckReport, Witness
from .sampling import SamplingPlan, default_lambda_grid
from .sets import (
    ConvergenceVerdict,
    PartitionError,
    SequenceSpec,
    check_prop2,
    check_prop3,
    is_w_cauchy,
    is_w_convergent,
    member_star,
    member_zero,
    partition_star,
)
from .spaces import (
    EuclideanSpace,
    FiniteSpace,
    LandmassGrid,
    PointSpace,
    SpaceError,
    build_euclidean,
    build_finite,
    builtin_modular,
    geodesic,
    load_landmass,
    load_landmass_file,
    table_modular,
)
