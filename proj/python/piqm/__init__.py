"""Permutation-invariant joint states: qualitative individuation, reduced
states, canonical two-particle decompositions and Bell correlation analysis.

Amplitude vectors use the lexicographic tensor basis (leftmost factor most
significant); criteria are passed as lists of orthonormal single-system
vectors.
"""

from ._core import (
    __version__,
    annihilate_mode,
    anticorrelation_witness,
    average_state,
    block_support,
    canonical_block,
    check_ccr,
    chsh_optimize,
    chsh_value,
    create_mode,
    decompose,
    expectation_alpha,
    gmw_entangled,
    gmw_measure,
    is_ubiquitous_unique,
    lift_single,
    number_operator,
    parse_state_spec,
    random_state,
    reduced_state_alpha,
    symmetrize_product,
    von_neumann_entropy,
    wedge,
)

__all__ = [
    "__version__",
    "annihilate_mode",
    "anticorrelation_witness",
    "average_state",
    "block_support",
    "canonical_block",
    "check_ccr",
    "chsh_optimize",
    "chsh_value",
    "create_mode",
    "decompose",
    "expectation_alpha",
    "gmw_entangled",
    "gmw_measure",
    "is_ubiquitous_unique",
    "lift_single",
    "number_operator",
    "parse_state_spec",
    "random_state",
    "reduced_state_alpha",
    "symmetrize_product",
    "von_neumann_entropy",
    "wedge",
]
