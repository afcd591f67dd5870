"""Exact nonparametric tests of dynamic random utility on linear budgets."""

from drum.axioms import (AxiomReport, MarginalDemand, Violation, check_intensity_monotonicity, check_monotonicity,
                         check_sarpd, check_stability, slice_period, test_rum_slices, test_rum_static)
from drum.feasibility import (DynamicStochasticDemand, NormalizationError, Verdict, adsrp_multiplicities,
                              certificate_margin, test_drum, verify_certificate, verify_witness)
from drum.geometry import (ABOVE, BELOW, ON, Budget, GeometryError, Patch, PatchSet, build_patches, classify_point,
                           dominates, path_dominates, representative)
from drum.pooling import PooledDemand, PooledPatchSet, build_pooled_patches, pool, test_rum_pooled
from drum.rationality import (ChoicePath, ColumnLimitError, DemandType, ProfileMatrix, build_profile_matrix,
                              enumerate_rational_types, profile_matrix)
from drum.simulation import (Panel, PanelRow, UtilityProcessSpec, brute_force_verdict, simulate_mixture,
                             simulate_panel)

__all__ = [
    "ABOVE", "BELOW", "ON", "AxiomReport", "Budget", "ChoicePath", "ColumnLimitError", "DemandType",
    "DynamicStochasticDemand", "GeometryError", "MarginalDemand", "NormalizationError", "Panel", "PanelRow", "Patch",
    "PatchSet", "PooledDemand", "PooledPatchSet", "ProfileMatrix", "UtilityProcessSpec", "Verdict", "Violation",
    "adsrp_multiplicities", "brute_force_verdict", "build_patches", "build_pooled_patches", "build_profile_matrix",
    "certificate_margin", "check_intensity_monotonicity", "check_monotonicity", "check_sarpd", "check_stability",
    "classify_point", "dominates", "enumerate_rational_types", "path_dominates", "pool", "profile_matrix",
    "representative", "simulate_mixture", "simulate_panel", "slice_period", "test_drum", "test_rum_pooled",
    "test_rum_slices", "test_rum_static", "verify_certificate", "verify_witness",
]
