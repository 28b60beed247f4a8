"""Exact arithmetic for cusps and modular units on curves X_G, with
certified analytic verification and the explicit height bounds of the
Runge method."""

from .errors import (
    BoundViolated,
    DegenerateJ,
    HypothesisFailed,
    Indeterminate,
    ModulusMismatch,
    NonInvertibleGenerator,
    NotDefinedOverQ,
    NotInPlusRegion,
    NotIntegral,
    PrecisionExhausted,
    RankDeficient,
    RungeConditionFailed,
    RungemodError,
    SigmaNotProper,
    UnsupportedModulus,
)
from .cusps import (
    CuspClass,
    CuspOrbit,
    PlaceConstants,
    cusp_containing,
    cusp_width,
    enumerate_cusps,
    galois_orbits,
    place_constants,
    runge_condition,
)
from .units import (
    CuspDivisor,
    DivisorMatrix,
    RungeUnit,
    TorsionIndex,
    bernoulli2,
    divisor_matrix,
    divisor_rank,
    ell,
    ord_u,
    ord_w,
    runge_unit,
    runge_vector,
)
from .modnt import (
    DetImage,
    ResidueMatrix,
    SubgroupG,
    det_image,
    generate_subgroup,
    gl2_order,
    kernel_level_group,
    parse_group_text,
    parse_preset,
    preset_subgroup,
)
from .bounds import (
    KAPPA_SPLIT_CARTAN,
    BoundReport,
    CalR,
    CurveInput,
    GrhCap,
    SerreReport,
    SplitCartanCap,
    ThreePrimeReport,
    WeierstrassTwist,
    bound_tbo,
    bound_th1,
    bound_tspto,
    calR,
    conductor_cap,
    grh_level_cap,
    height_rational,
    is_probable_prime,
    pellarin_degree,
    serre_check,
    split_cartan_level_cap,
    three_prime_check,
    three_prime_threshold,
    twist_equation,
)
from .analytic import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    CheckReport,
    ErrorBall,
    PadicSiegelOrder,
    RealInterval,
    SweepResult,
    UpperHalfPoint,
    eval_j,
    eval_siegel,
    mobius_apply,
    nearest_cusp,
    padic_siegel_order,
    reduce_fundamental,
    run_all_sweeps,
    sweep_cdplus,
    sweep_everysimple,
    sweep_pqj,
    sweep_siegel,
    sweep_smallj,
    verify_everysimple,
    verify_pqj,
    verify_siegel_bounds,
)

__all__ = [
    "BoundReport",
    "BoundViolated",
    "CalR",
    "CheckReport",
    "CurveInput",
    "CuspClass",
    "CuspDivisor",
    "CuspOrbit",
    "DEFAULT_PRECISION",
    "DegenerateJ",
    "DetImage",
    "DivisorMatrix",
    "ErrorBall",
    "GrhCap",
    "HypothesisFailed",
    "Indeterminate",
    "KAPPA_SPLIT_CARTAN",
    "MAX_PRECISION",
    "ModulusMismatch",
    "NonInvertibleGenerator",
    "NotDefinedOverQ",
    "NotInPlusRegion",
    "NotIntegral",
    "PadicSiegelOrder",
    "PlaceConstants",
    "PrecisionExhausted",
    "RankDeficient",
    "RealInterval",
    "ResidueMatrix",
    "RungeConditionFailed",
    "RungeUnit",
    "RungemodError",
    "SerreReport",
    "SigmaNotProper",
    "SplitCartanCap",
    "SubgroupG",
    "SweepResult",
    "ThreePrimeReport",
    "TorsionIndex",
    "UnsupportedModulus",
    "UpperHalfPoint",
    "WeierstrassTwist",
    "bernoulli2",
    "bound_tbo",
    "bound_th1",
    "bound_tspto",
    "calR",
    "conductor_cap",
    "cusp_containing",
    "cusp_width",
    "det_image",
    "divisor_matrix",
    "divisor_rank",
    "ell",
    "enumerate_cusps",
    "eval_j",
    "eval_siegel",
    "galois_orbits",
    "generate_subgroup",
    "gl2_order",
    "grh_level_cap",
    "height_rational",
    "is_probable_prime",
    "kernel_level_group",
    "mobius_apply",
    "nearest_cusp",
    "ord_u",
    "ord_w",
    "padic_siegel_order",
    "parse_group_text",
    "parse_preset",
    "pellarin_degree",
    "place_constants",
    "preset_subgroup",
    "reduce_fundamental",
    "run_all_sweeps",
    "runge_condition",
    "runge_unit",
    "runge_vector",
    "serre_check",
    "split_cartan_level_cap",
    "sweep_cdplus",
    "sweep_everysimple",
    "sweep_pqj",
    "sweep_siegel",
    "sweep_smallj",
    "three_prime_check",
    "three_prime_threshold",
    "twist_equation",
    "verify_everysimple",
    "verify_pqj",
    "verify_siegel_bounds",
]

__version__ = "0.1.0"
