"""Quasirandom finite groups: bipartite Cayley graph spectra, character
tables, counting bounds for product triples, a greedy solver for product
constraints, and product-free set constructions."""

from .errors import (
    CapExceededError,
    ConvergenceError,
    DescriptorError,
    GroupTableError,
    InadmissibleWordError,
    InputError,
    ModulusSearchError,
    QuasirandomError,
)
from .groups import DEFAULT_CAPS, Caps, FiniteGroup, conjugacy_classes, make_group, subgroup_closure
from .irreps import CharacterTable, character_table, min_nontrivial_irrep_dim, verify_rep_bounds
from .productfree import (
    SearchResult,
    coset_product_free,
    erdos_sum_free,
    is_product_free,
    max_product_free_exact,
    thm_4_6_construct,
)
from .setfun import GroupFunction, Subset, convolve, count_quadruples, count_triples, quasirandomness_constant
from .solver import ConstraintSystem, SolveOutcome, check_density_condition, solve, solve_pairwise
from .spectral import SpectralReport, spectral_report, verify_lemma_3_2
from .theorems import BoundReport, equivalence_report, lemma_5_1_bad_set, verify_triple_bound

__version__ = "0.1.0"
