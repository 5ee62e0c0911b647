import math

import numpy as np
import pytest

from coxfill.diagram import INF, Infinity, classify_irreducible, parse_diagram, split_components
from coxfill.families import (
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
from coxfill.polytopes import is_simplex, simplex_product

ALL_IDS = family_ids()
FILLING_IDS = [i for i in ALL_IDS if isinstance(family_by_id(i), FillingFamily)]
PRODUCT_IDS = [i for i in ALL_IDS if isinstance(family_by_id(i), ProductFamily)]


def test_registry_counts():
    assert len(ALL_IDS) == 39
    assert len(FILLING_IDS) == 29
    assert len(PRODUCT_IDS) == 10
    assert len(set(ALL_IDS)) == 39


def test_lookup_errors():
    with pytest.raises(FamilyError):
        family_by_id("nope")
    with pytest.raises(FamilyError):
        filling_family("ex2-d5-k4")
    with pytest.raises(FamilyError):
        product_family("cox_gp-1")


@pytest.mark.parametrize("fid", FILLING_IDS)
def test_filling_family_shape(fid):
    """Every one-loop-filled member: the symbolic system has one free
    order, the closed member at m is a product of simplices, the open
    member is a pyramid over a prism."""
    fam = filling_family(fid)
    d = fam.dimension
    W = fam.system(None)
    assert W.symbolic_parameters() == ["m"]
    assert W.rank == d + 2

    closed = fam.polytope(7)
    assert closed.lattice == fam.polytope(7).lattice
    assert closed.dimension == d
    assert closed.lattice == _relabeled_product(fam)
    assert closed.label(*sorted(fam.m_pair)) == 7

    open_ = fam.polytope(INF)
    assert open_.dimension == d
    assert len(open_.lattice.vertices()) == 2 * (d - 1) + 1
    assert open_.label(*sorted(fam.m_pair)) is INF
    # "inf" spelled as a string works the same
    assert fam.polytope("inf").lattice == open_.lattice


def _relabeled_product(fam):
    d = fam.dimension
    L = simplex_product(2, d - 2)
    ren = dict(zip(("a1", "a2", "a3"), (str(fam.junction),) + tuple(fam.m_pair)))
    ren.update(zip((f"b{i}" for i in range(1, d)), fam.cycle))
    return L.relabel(ren)


@pytest.mark.parametrize("fid", FILLING_IDS)
def test_filling_ridge_and_filled_vertices(fid):
    """The m-pair spans the filled ridge; it meets d-1 vertices (one per
    vertex of the cycle simplex), while the three facets of the junction
    factor have empty common intersection."""
    fam = filling_family(fid)
    d = fam.dimension
    closed = fam.polytope(11)
    pair = frozenset(fam.m_pair)
    assert closed.lattice.faces[pair] == d - 2
    filled = [v for v in closed.lattice.vertices() if pair <= v]
    assert len(filled) == d - 1
    triple = frozenset((str(fam.junction),) + tuple(fam.m_pair))
    assert triple not in closed.lattice.faces


def test_loops_counts():
    assert filling_family("cox_gp-1").loops == 1
    assert filling_family("cox_gp-3").loops == 2
    assert filling_family("ex1B-p4").loops == 1
    assert filling_family("ex1B-p4-q4").loops == 2


def test_duplicate_sources_across_tables():
    pairs = [("ex1A-k3", "cox_gp-1"), ("ex1A-k3-l3", "cox_gp-3"),
             ("ex1A-j5", "cox_gp-2")]
    for a, b in pairs:
        assert filling_family(a).system(7).edges() == filling_family(b).system(7).edges()
    distinct = {tuple(filling_family(f).system(7).edges())
                for f in FILLING_IDS if filling_family(f).dimension == 4}
    assert len(distinct) == len([f for f in FILLING_IDS
                                 if filling_family(f).dimension == 4]) - 3


def test_cycle_subsystem_is_affine():
    """The cycle generators form tilde_A_{d-2} -- the filled cusp group."""
    for fid in FILLING_IDS:
        fam = filling_family(fid)
        sub = fam.system(7).subsystem(fam.cycle)
        lab = classify_irreducible(sub)
        assert (lab.kind, lab.catalog_name) == ("Affine", f"tilde_A_{fam.dimension - 2}")


def test_m_pair_becomes_affine_at_infinity():
    for fid in ("cox_gp-1", "ex1B-p3", "ex1C", "ex1D"):
        fam = filling_family(fid)
        sub = fam.system(INF).subsystem(fam.m_pair)
        assert classify_irreducible(sub).catalog_name == "tilde_A_1"


@pytest.mark.parametrize("fid", PRODUCT_IDS)
def test_product_family_shape(fid):
    fam = product_family(fid)
    G = fam.polytope()
    na, nb = len(fam.a_part), len(fam.b_part)
    assert G.dimension == na + nb - 2
    assert G.lattice.f_vector()[0] == na * nb
    W = fam.system()
    assert W.rank == na + nb
    # each part is a simplex block: a_part affine, b_part affine or Lanner
    for part in (fam.a_part, fam.b_part):
        lab = classify_irreducible(W.subsystem(part))
        assert lab.kind in ("Affine", "Lanner")


def test_example_sources_give_products_of_triangles():
    for name in ("U", "V"):
        assert name in EXAMPLE_SOURCES
        G = example_polytope(name)
        assert G.dimension == 4
        assert G.lattice.f_vector() == (9, 18, 15, 6)
    U = example_polytope("U")
    assert U.label("1", "2") == 4
    assert U.label("3", "4") == 5
    with pytest.raises(FamilyError):
        example_polytope("W")


def test_square_pyramid_polytope():
    G = square_pyramid_polytope()
    assert G.dimension == 3
    assert not is_simplex(G.lattice)
    assert G.label("2", "3") is INF


def test_square_pyramid_cartan_values():
    A = square_pyramid_cartan(1.5)
    assert A.entry("2", "3") == pytest.approx(-3.0)
    assert A.entry("4", "5") == pytest.approx(-1.5 / 1.25)
    assert A.entry("5", "4") == pytest.approx(3 / 1.5 - 6.0)
    # infinite-pair products stay >= 4 over the whole domain
    for lam in (1.01, 1.5, 3.0):
        B = square_pyramid_cartan(lam)
        assert B.entry("2", "3") * B.entry("3", "2") >= 4 - 1e-12
        assert B.entry("4", "5") * B.entry("5", "4") >= 4 - 1e-12


def test_square_pyramid_cartan_domain():
    for bad in (1.0, 0.5, -2.0):
        with pytest.raises(FamilyError):
            square_pyramid_cartan(bad)


def test_system_rejects_bad_orders():
    fam = filling_family("cox_gp-1")
    with pytest.raises(Exception):
        fam.system(1)
