"""Toolkit for projective Coxeter polytopes and their Dehn fillings.

The package covers the pipeline from a Coxeter diagram to geometry:

* ``diagram`` / ``catalogs`` — the text DSL, Gram matrices, and
  classification of irreducible systems;
* ``cartan`` — Cartan matrices in special form, equivalence, type
  decomposition;
* ``polytopes`` — face lattices, labeled polytopes, vertex links,
  Dehn filling, truncation and gluing;
* ``families`` — the example families studied by the toolkit;
* ``deform`` — deformation spaces of labeled polytopes and their limits;
* ``realization`` — projective realizations, vertex geometry, orbits;
* ``relhyp`` — relative hyperbolicity of the underlying Coxeter groups.
"""

from .diagram import (
    INF,
    CoxeterSystem,
    ClassificationLabel,
    DiagramError,
    DiagramSyntaxError,
    UnboundParameterError,
    classify_irreducible,
    catalog_match,
    gram_matrix,
    parse_diagram,
    split_components,
    subsystem,
)
from .cartan import (
    CartanError,
    CartanMatrix,
    build_special_form,
    gram_cartan,
    loop_det_reduce,
    psi_product,
    special_form_layout,
    special_params_of,
    symmetrize,
    type_decompose,
)
from .polytopes import (
    FaceLattice,
    LabeledPolytope,
    PolytopeError,
    collapse_ridge,
    dehn_fill,
    faces_from_cartan,
    label_polytope,
    pyramid,
    simplex,
    simplex_product,
    truncate_labeled,
    vertex_link,
)
from .families import (
    EXAMPLE_SOURCES,
    FamilyError,
    FillingFamily,
    ProductFamily,
    example_polytope,
    family_by_id,
    family_ids,
    filling_family,
    product_family,
    square_pyramid_cartan,
    square_pyramid_polytope,
)
from .deform import (
    DeformError,
    DeformationSpace,
    LimitResult,
    UnsupportedFamilyError,
    circle_space,
    deformation_space,
    limit_family,
    mu_invariant,
    witnesses_at_mu,
)
from .realization import (
    OrbitApproximation,
    Realization,
    RealizeError,
    classify_vertices,
    hilbert_distance,
    is_hyperbolic,
    match_realizations,
    orbit_explore,
    orbit_to_ply,
    realization_from_json,
    realize_cartan,
    reflections_of,
    tits_simplex,
    truncatable,
    truncate_geometric,
)
from .relhyp import (
    PeripheralCollection,
    RelHypError,
    RelHypVerdict,
    affine_subsystems,
    caprace_check,
    default_peripherals,
    perp,
    virtual_abelian_rank,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "CoxeterSystem",
    "ClassificationLabel",
    "DiagramError",
    "DiagramSyntaxError",
    "UnboundParameterError",
    "classify_irreducible",
    "catalog_match",
    "gram_matrix",
    "parse_diagram",
    "split_components",
    "subsystem",
    "CartanError",
    "CartanMatrix",
    "build_special_form",
    "gram_cartan",
    "loop_det_reduce",
    "psi_product",
    "special_form_layout",
    "special_params_of",
    "symmetrize",
    "type_decompose",
    "FaceLattice",
    "LabeledPolytope",
    "PolytopeError",
    "collapse_ridge",
    "dehn_fill",
    "faces_from_cartan",
    "label_polytope",
    "pyramid",
    "simplex",
    "simplex_product",
    "truncate_labeled",
    "vertex_link",
    "EXAMPLE_SOURCES",
    "FamilyError",
    "FillingFamily",
    "ProductFamily",
    "example_polytope",
    "family_by_id",
    "family_ids",
    "filling_family",
    "product_family",
    "square_pyramid_cartan",
    "square_pyramid_polytope",
    "DeformError",
    "DeformationSpace",
    "LimitResult",
    "UnsupportedFamilyError",
    "circle_space",
    "deformation_space",
    "limit_family",
    "mu_invariant",
    "witnesses_at_mu",
    "OrbitApproximation",
    "Realization",
    "RealizeError",
    "classify_vertices",
    "hilbert_distance",
    "is_hyperbolic",
    "match_realizations",
    "orbit_explore",
    "orbit_to_ply",
    "realization_from_json",
    "realize_cartan",
    "reflections_of",
    "tits_simplex",
    "truncatable",
    "truncate_geometric",
    "PeripheralCollection",
    "RelHypError",
    "RelHypVerdict",
    "affine_subsystems",
    "caprace_check",
    "default_peripherals",
    "perp",
    "virtual_abelian_rank",
]
