"""
Test helpers package for the ppcalc test suite.

Submodules:
    - oracles: brute-force evaluation, tensors and linear solving by enumeration
    - algebra: validators returning problem lists (normal forms, subgroups, witnesses)
    - utils: log formatting and seeded random generators
    - assertions: pytest-specific assertion helpers
    - constants: corpus sizes and oracle bounds
"""

# Re-export commonly used items for convenience
from tests.helpers.oracles import (
    brute_force_evaluate,
    brute_force_implies_in,
    brute_force_tensor_is_zero,
    brute_force_solve,
    brute_force_element_order,
    feasible,
)

from tests.helpers.algebra import (
    find_hnf_problems,
    find_snf_problems,
    find_subgroup_mismatches,
    find_counterexample_problems,
    subgroup_elements,
)

from tests.helpers.assertions import (
    assert_no_problems,
    assert_invariant_factors,
)

from tests.helpers.utils import (
    print_section_header,
    print_summary_list,
    random_matrix,
    random_formula,
)

__all__ = [
    # oracles
    'brute_force_evaluate',
    'brute_force_implies_in',
    'brute_force_tensor_is_zero',
    'brute_force_solve',
    'brute_force_element_order',
    'feasible',
    # validators
    'find_hnf_problems',
    'find_snf_problems',
    'find_subgroup_mismatches',
    'find_counterexample_problems',
    'subgroup_elements',
    # assertions
    'assert_no_problems',
    'assert_invariant_factors',
    # utils
    'print_section_header',
    'print_summary_list',
    'random_matrix',
    'random_formula',
]
