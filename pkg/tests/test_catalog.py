"""Catalog regression: every canonical diagram classifies to its own name.

The match/build pair must round-trip over the whole catalog, the
parametric families (A_n, B_n, D_n, I_2(p), affine versions) are swept
over ranks and labels, and near-miss diagrams must fall outside.
"""

import math

import pytest

from coxfill import catalogs
from coxfill.diagram import (
    INF,
    DiagramError,
    classify_irreducible,
    gram_matrix,
    parse_diagram,
)

import numpy as np

ALL_NAMES = catalogs.canonical_names()


def test_catalog_is_substantial():
    # fixed entries plus sampled parametric families
    assert len(ALL_NAMES) > 300
    assert len(set(ALL_NAMES)) == len(ALL_NAMES)


@pytest.mark.parametrize("name", ALL_NAMES)
def test_build_match_round_trip(name):
    system = catalogs.build(name)
    assert catalogs.match(system) == name
    label = classify_irreducible(system)
    assert label.kind == catalogs.kind_of(name)
    assert label.catalog_name == name


@pytest.mark.parametrize("name", ALL_NAMES)
def test_catalog_kind_matches_gram_signature(name):
    """Spherical <=> positive definite, Affine <=> singular PSD,
    Lanner <=> exactly one negative eigenvalue."""
    system = catalogs.build(name)
    eig = np.linalg.eigvalsh(gram_matrix(system))
    kind = catalogs.kind_of(name)
    if kind == "Spherical":
        assert eig[0] > 1e-9
    elif kind == "Affine":
        assert abs(eig[0]) <= 1e-9
        assert eig[1] > 1e-9 or len(eig) == 2
    else:
        assert eig[0] < -1e-9
        assert len(eig) == 1 or eig[1] > -1e-9


def test_non_canonical_names_rejected():
    for bad in ("I_2(4)",      # canonical name is B_2
                "I_2(3)",      # canonical name is A_2
                "A_0",
                "D_3",         # canonical name is A_3
                "tilde_B_2",   # canonical name is tilde_C_2
                "nonsense"):
        with pytest.raises(DiagramError):
            catalogs.build(bad)


def test_dihedral_sweep():
    # I_2(p) for large p stays spherical; the catalog name is canonical
    for p in (13, 40, 101):
        W = parse_diagram(f"a-b:{p}")
        label = classify_irreducible(W)
        assert label.kind == "Spherical"
        assert label.catalog_name == f"I_2({p})"


def test_large_rank_paths():
    W = parse_diagram("nodes 1..12; " + "; ".join(f"{i}-{i+1}" for i in range(1, 12)))
    assert classify_irreducible(W).catalog_name == "A_12"
    W = parse_diagram("nodes 1..12; 1-2:4; " + "; ".join(f"{i}-{i+1}" for i in range(2, 12)))
    assert classify_irreducible(W).catalog_name == "B_12"


def test_rank3_lanner_triangle_family():
    # hyperbolic triangle groups: 1/p + 1/q + 1/r < 1
    lab = classify_irreducible(parse_diagram("nodes 1..3; 1-2:7; 2-3; 1-3"))
    assert lab.kind == "Lanner"
    assert lab.catalog_name == "Lanner-2-triangle-7-3-3"
    # the euclidean boundary cases are affine instead
    for src, name in (("nodes 1..3; 1-2; 2-3; 1-3", "tilde_A_2"),
                      ("nodes 1..3; 1-2:4; 2-3:4", "tilde_C_2"),
                      ("nodes 1..3; 1-2:6; 2-3", "tilde_G_2")):
        lab = classify_irreducible(parse_diagram(src))
        assert (lab.kind, lab.catalog_name) == ("Affine", name)


def test_lanner_rank_bound():
    """Compact hyperbolic simplices stop at rank 5: the rank-5 entries
    exist, and no rank-6 diagram in the catalog is Lanner."""
    assert any(catalogs.build(n).rank == 5
               for n in ALL_NAMES if n.startswith("Lanner"))
    assert all(catalogs.build(n).rank <= 5
               for n in ALL_NAMES if n.startswith("Lanner"))


def test_large_examples_are_not_catalogued():
    for src in (
        "nodes 1..3; 1-2:inf; 2-3; 1-3",           # infinite-order triangle
        "nodes 1..5; 1-2:5; 2-3; 3-4:4; 4-5:5",    # contains the Lanner path 5-3-4
        "nodes 1..6; 1-2; 2-3; 1-3; 3-4; 4-5; 5-6:7",
    ):
        lab = classify_irreducible(parse_diagram(src))
        assert lab.kind == "Large"
        assert catalogs.match(parse_diagram(src)) is None
