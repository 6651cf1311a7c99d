"""Exact exponential sums over finite fields: evaluation, stratified bound
verification, and Frobenius weight recovery from extension power sums."""

from .applications import (
    DiscrepancySpec,
    SieveSpec,
    discrepancy,
    erdos_turan_rhs,
    sieve_double_sum,
)
from .catalog import CATALOG, CatalogEntry, build_entry
from .cyclo import CycloValue
from .errors import CapExceeded, ChainContainmentError, ParseError, RankTooHigh
from .ffield import FieldCtx, FieldElem, gauss_sum, quadratic_gauss_sum
from .polyring import (
    AffineVariety,
    IntPolynomial,
    coefficient_height,
    homogeneous_closure,
    homogeneous_components,
    parse_poly,
    poly_to_string,
)
from .spectral import (
    PowerSumSequence,
    WeightProfile,
    extension_sums,
    fit_recurrence,
    quasi_orthonormality,
    weight_check,
)
from .strat import (
    KLDatum,
    StratReport,
    VarietyChain,
    dual_variety_membership,
    empirical_exponent_map,
    exponent_histogram,
    verify_kl,
)
from .sumengine import (
    SumGrid,
    SumSpec,
    SumValue,
    complete_grid,
    enumerate_points,
    eval_sum,
    power_sum_identity_check,
    r_F,
    S_F_grid,
)

__version__ = "0.1.0"

__all__ = [
    "AffineVariety", "CATALOG", "CapExceeded", "CatalogEntry",
    "ChainContainmentError", "CycloValue", "DiscrepancySpec", "FieldCtx",
    "FieldElem", "IntPolynomial", "KLDatum", "ParseError",
    "PowerSumSequence", "RankTooHigh", "S_F_grid", "SieveSpec",
    "StratReport", "SumGrid", "SumSpec", "SumValue", "VarietyChain",
    "WeightProfile", "build_entry", "coefficient_height", "complete_grid",
    "discrepancy", "dual_variety_membership", "empirical_exponent_map",
    "enumerate_points", "erdos_turan_rhs", "eval_sum", "exponent_histogram",
    "extension_sums", "fit_recurrence", "gauss_sum", "homogeneous_closure",
    "homogeneous_components", "parse_poly", "poly_to_string",
    "power_sum_identity_check", "quadratic_gauss_sum",
    "quasi_orthonormality", "r_F", "sieve_double_sum", "verify_kl",
    "weight_check",
]
