"""Lemniscate trees: exact enumeration, uniform sampling, and numerical
extraction from polynomials. Thin wrapper over the C++ core."""

from lemtree._core import (
    Tree,
    asymptotic_constants,
    chebyshev_tree_valleys,
    coefficient_rows,
    count_valleys,
    critical_points,
    enumerate_trees,
    exact_moments,
    exact_pgf,
    pairing_fractions,
    perturbed_chebyshev,
    sample_trees,
    singular_components,
    tree_count,
    tree_from_permutation,
    tree_from_zeros,
)

__all__ = [
    "Tree",
    "asymptotic_constants",
    "chebyshev_tree_valleys",
    "coefficient_rows",
    "count_valleys",
    "critical_points",
    "enumerate_trees",
    "exact_moments",
    "exact_pgf",
    "pairing_fractions",
    "perturbed_chebyshev",
    "sample_trees",
    "singular_components",
    "tree_count",
    "tree_from_permutation",
    "tree_from_zeros",
]
