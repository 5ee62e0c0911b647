"""Face lattices, labelings, and the vertex surgery operations."""

import pytest

from coxfill.diagram import INF, parse_diagram
from coxfill.families import (
    example_polytope,
    filling_family,
    square_pyramid_cartan,
    square_pyramid_polytope,
)
from coxfill.polytopes import (
    DehnFillError,
    FaceLattice,
    PolytopeError,
    collapse_ridge,
    cut_along_seam,
    dehn_fill,
    faces_from_cartan,
    glue_labeled,
    is_prismatic,
    is_simplex,
    label_polytope,
    labeled_from_json,
    labeled_to_json,
    lattice_from_json,
    lattice_to_json,
    link_isomorphisms,
    perfectness_report,
    predicted_vertices,
    pyramid,
    simplex,
    simplex_product,
    truncate_labeled,
    truncation_facet_id,
    vertex_link,
)


def _labeled_simplex():
    L = simplex(3)
    W = parse_diagram("nodes 1..4; 1-2; 2-3; 3-4")
    return label_polytope(L, W, {"s1": "1", "s2": "2", "s3": "3", "s4": "4"})


# ------------------------------------------------------------ constructions

def test_simplex_counts():
    for n in (2, 3, 4):
        L = simplex(n).check()
        assert is_simplex(L)
        assert len(L.facets) == n + 1
        assert len(L.vertices()) == n + 1
        assert L.f_vector()[0] == n + 1


def test_product_of_triangles():
    L = simplex_product(2, 2).check()
    assert L.dimension == 4
    assert L.f_vector() == (9, 18, 15, 6)
    assert not is_simplex(L)


def test_triangular_prism():
    L = simplex_product(1, 2).check()
    assert L.dimension == 3
    assert L.f_vector() == (6, 9, 5)
    # the two triangle ends never meet
    assert is_prismatic(L, ("a1", "a2"))
    assert not is_prismatic(L, ("a1", "b1"))


def test_pyramid_over_prism():
    base = simplex_product(1, 2)
    L = pyramid(base).check()
    assert L.dimension == 4
    assert L.f_vector() == (7, 15, 14, 6)
    # apex sits on every facet except the base
    apex = frozenset(f for f in L.facets if f != "base")
    assert L.faces[apex] == 0


def test_prismatic_needs_known_facets():
    L = simplex_product(1, 2)
    with pytest.raises(PolytopeError):
        is_prismatic(L, ("a1",))
    with pytest.raises(PolytopeError):
        is_prismatic(L, ("a1", "zz"))


# --------------------------------------------------------------- validation

def test_lattice_rejects_duplicate_facets():
    with pytest.raises(PolytopeError, match="duplicate"):
        FaceLattice(2, ["a", "a", "b"], {})


def test_lattice_rejects_foreign_face_record():
    with pytest.raises(PolytopeError):
        FaceLattice(2, ["a", "b", "c"],
                    {frozenset("a"): 1, frozenset("b"): 1, frozenset("c"): 1,
                     frozenset("x"): 0})


def test_lattice_needs_singleton_per_facet():
    with pytest.raises(PolytopeError, match="singleton"):
        FaceLattice(2, ["a", "b", "c"], {frozenset("a"): 1, frozenset("b"): 1})


def test_check_catches_broken_euler():
    L = simplex(3)
    faces = dict(L.faces)
    del faces[sorted(L.vertices(), key=sorted)[0]]
    with pytest.raises(PolytopeError):
        FaceLattice(3, L.facets, faces).check()


def test_equality_ignores_insertion_order():
    L1 = simplex_product(2, 2)
    faces = list(L1.faces.items())
    L2 = FaceLattice(4, tuple(reversed(L1.facets)), dict(reversed(faces)))
    assert L1 == L2
    assert L1 != simplex(4)


# ----------------------------------------------------------------- labeling

def test_label_polytope_requires_bijection():
    L = simplex(2)
    W = parse_diagram("a-b; b-c")
    with pytest.raises(PolytopeError, match="bijection"):
        label_polytope(L, W, {"s1": "a", "s2": "a", "s3": "c"})
    with pytest.raises(PolytopeError, match="keys"):
        label_polytope(L, W, {"s1": "a", "s2": "b"})


def test_label_polytope_rejects_finite_nonadjacent():
    # opposite squares of the prism are non-adjacent: a finite order there
    # would force a ridge that the lattice does not have
    L = simplex_product(1, 2)
    W = parse_diagram("nodes 1..5; 1-2; 1-3; 1-4; 1-5; 2-3; 3-4; 2-4")
    assignment = {"a1": "1", "a2": "2", "b1": "3", "b2": "4", "b3": "5"}
    with pytest.raises(PolytopeError, match="non-adjacent"):
        label_polytope(L, W, assignment)


def test_square_pyramid_infinite_ridges_allowed():
    G = square_pyramid_polytope()
    assert G.dimension == 3
    assert G.lattice.f_vector() == (5, 8, 5)
    assert G.label("2", "3") is INF
    assert G.label("4", "5") is INF
    assert perfectness_report(_labeled_simplex()).perfect


def test_vertex_link_of_apex():
    G = square_pyramid_polytope()
    apex = frozenset(("2", "3", "4", "5"))
    link = vertex_link(G, apex)
    assert link.dimension == 2
    assert len(link.lattice.facets) == 4
    # the link inherits the ambient orders
    assert link.label("2", "3") is INF


# ----------------------------------------------------------------- surgery

def test_dehn_fill_round_trip():
    G = filling_family("cox_gp-1").polytope(INF)
    apex = next(v for v in G.lattice.vertices() if len(v) == 5)
    H = dehn_fill(G, apex, 7)
    assert H.lattice.f_vector() == (9, 18, 15, 6)
    assert H.label("5", "6") == 7
    back = collapse_ridge(H, frozenset(("5", "6")))
    assert back.lattice == G.lattice
    assert back.labels == G.labels


def test_dehn_fill_matches_closed_family_member():
    fam = filling_family("cox_gp-1")
    G = fam.polytope(INF)
    apex = next(v for v in G.lattice.vertices() if len(v) == 5)
    for m in (5, 9):
        H = dehn_fill(G, apex, m)
        F = fam.polytope(m)
        assert H.lattice == F.lattice
        assert H.labels == F.labels


def test_dehn_fill_rejects_wrong_link_type():
    # this vertex link is a simplex with group tilde_C_3, not a prism
    G = example_polytope("V")
    with pytest.raises(DehnFillError, match="tilde_C_3"):
        dehn_fill(G, frozenset(("2", "3", "4", "5")), 7)


def test_dehn_fill_argument_errors():
    G = filling_family("cox_gp-1").polytope(INF)
    apex = next(v for v in G.lattice.vertices() if len(v) == 5)
    with pytest.raises(PolytopeError, match="not a vertex"):
        dehn_fill(G, frozenset(("1", "2")), 7)
    with pytest.raises(PolytopeError, match="finite integer"):
        dehn_fill(G, apex, INF)
    with pytest.raises(PolytopeError, match="finite integer"):
        dehn_fill(G, apex, 1)


def test_truncate_simple_vertex():
    G = _labeled_simplex()
    v = frozenset(("1", "2", "3"))
    T = truncate_labeled(G, [v])
    t = truncation_facet_id(v)
    assert t in T.lattice.facets
    assert T.lattice.f_vector() == (6, 9, 5)
    # perpendicular cut: the new ridges all carry order 2
    for s in v:
        assert T.label(s, t) == 2
    assert T.label("1", "2") == 3


def test_truncate_rejects_nonsimple():
    G = square_pyramid_polytope()
    with pytest.raises(PolytopeError, match="simple"):
        truncate_labeled(G, [frozenset(("2", "3", "4", "5"))])


def test_glue_and_cut_round_trip():
    G = _labeled_simplex()
    v = frozenset(("1", "2", "3"))
    isos = link_isomorphisms(G, v, G, v)
    assert {"1": "1", "2": "2", "3": "3"} in isos
    glued = glue_labeled(G, v, G, v, isos[0])
    glued.lattice.check()
    assert len(glued.lattice.facets) == 8
    assert len(glued.seams) == 1
    left, right = cut_along_seam(glued, glued.seams[0])
    T = truncate_labeled(G, [v])
    assert left.lattice == T.lattice and left.labels == T.labels
    # the right piece is the same shape under the "p" renaming
    assert len(right.lattice.facets) == len(T.lattice.facets)
    assert sorted(right.lattice.f_vector()) == sorted(T.lattice.f_vector())


def test_glue_rejects_bad_iso():
    G = _labeled_simplex()
    v = frozenset(("1", "2", "3"))
    with pytest.raises(PolytopeError, match="link isomorphism"):
        # swapping 1 and 2 breaks the (2,3) vs (1,3) order pattern
        glue_labeled(G, v, G, v, {"1": "2", "2": "1", "3": "3"})


# -------------------------------------------------------- face predictions

def test_faces_from_cartan_square_pyramid():
    A = square_pyramid_cartan(1.1)
    preds = faces_from_cartan(A, 3)
    verts = predicted_vertices(preds)
    assert sorted(sorted(v) for v in verts) == [
        ["1", "2", "4"], ["1", "2", "5"], ["1", "3", "4"], ["1", "3", "5"],
    ]
    # the apex pair subsystems leave the spherical range, so the apex
    # and its infinite ridges are not predicted
    assert frozenset(("2", "3", "4", "5")) not in preds
    assert frozenset(("2", "3")) not in preds
    # every predicted record is a face of the naive pyramid except those
    lattice_faces = set(square_pyramid_polytope().lattice.faces)
    assert set(verts) <= lattice_faces


def test_faces_from_cartan_requires_negative_type():
    from coxfill.cartan import gram_cartan

    with pytest.raises(PolytopeError):
        faces_from_cartan(gram_cartan(parse_diagram("a-b:5; b-c")), 2)
    with pytest.raises(PolytopeError):
        faces_from_cartan(gram_cartan(parse_diagram("nodes 1..3; 1-2; 2-3; 1-3")), 2)
    with pytest.raises(PolytopeError):
        faces_from_cartan(square_pyramid_cartan(1.1), 4)


# ------------------------------------------------------------ serialization

def test_lattice_json_round_trip():
    L = simplex_product(2, 2)
    assert lattice_from_json(lattice_to_json(L)) == L


def test_labeled_json_round_trip():
    G = square_pyramid_polytope()
    H = labeled_from_json(labeled_to_json(G))
    assert H.lattice == G.lattice
    assert H.labels == G.labels
