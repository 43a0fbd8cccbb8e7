"""Kneser hypergraph coloring search, approximate consensus division, and
Z_p-Tucker: executable reductions, desk-scale solvers, and checkers."""

__version__ = "0.1.0"

from .errors import ContractError, SizeCapError, SolverExhausted
from .sets import FamilyDescriptor, Subset, colorability_defect
from .kneser import (Coloring, chromatic_formula, chromatic_number_exact,
                     enumerate_hyperedges, upper_bound_coloring,
                     verify_hyperedge)
from .oracle import (FalseNegative, FalsePositive, KneserSQInstance,
                     check_violation, corrupt_oracle, descend_colored_subset,
                     honest_subset_oracle, violation_from_nested)
from .measure import (MeasurableSet, evaluate_valuation, mass_vector,
                      threshold_value)
from .condiv import (CondivInstance, Division, check_solution, extract_solution,
                     grid_solve, pieces, reduce_kneser_to_condiv)
from .zptucker import (TuckerInstance, alt, chain_solve, check_chain_solution,
                       extract_from_chain, lambda_almost_stable, lambda_general,
                       omega_mul, preceq, reduce_astab_to_tucker,
                       reduce_kneser_to_tucker)

__all__ = [
    "ContractError", "SizeCapError", "SolverExhausted",
    "FamilyDescriptor", "Subset", "colorability_defect",
    "Coloring", "chromatic_formula", "chromatic_number_exact",
    "enumerate_hyperedges", "upper_bound_coloring", "verify_hyperedge",
    "FalseNegative", "FalsePositive", "KneserSQInstance", "check_violation",
    "corrupt_oracle", "descend_colored_subset", "honest_subset_oracle",
    "violation_from_nested",
    "MeasurableSet", "evaluate_valuation", "mass_vector", "threshold_value",
    "CondivInstance", "Division", "check_solution", "extract_solution",
    "grid_solve", "pieces", "reduce_kneser_to_condiv",
    "TuckerInstance", "alt", "chain_solve", "check_chain_solution",
    "extract_from_chain", "lambda_almost_stable", "lambda_general",
    "omega_mul", "preceq", "reduce_astab_to_tucker", "reduce_kneser_to_tucker",
]
