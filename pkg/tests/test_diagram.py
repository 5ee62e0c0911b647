"""Diagram DSL, Coxeter systems, Gram matrices, classification."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coxfill.diagram import (
    INF,
    ClassificationLabel,
    CoxeterSystem,
    DiagramError,
    DiagramSyntaxError,
    Infinity,
    UnboundParameterError,
    classify_irreducible,
    gram_entry,
    gram_matrix,
    parse_diagram,
    split_components,
    subsystem,
)


# -- parsing ----------------------------------------------------------------


def test_parse_range_and_edges():
    W = parse_diagram("nodes 1..4; 1-2; 2-3:4; 3-4:inf")
    assert W.generators == ("1", "2", "3", "4")
    assert W.order("1", "2") == 3
    assert W.order("2", "3") == 4
    assert isinstance(W.order("3", "4"), Infinity)
    # unlisted pairs default to 2
    assert W.order("1", "3") == 2
    assert W.order("1", "4") == 2


def test_parse_name_list_and_implicit_nodes():
    W = parse_diagram("nodes a, b; a-b:5; b-c")
    # c was declared implicitly by the edge
    assert W.generators == ("a", "b", "c")
    assert W.order("a", "b") == 5
    assert W.order("b", "c") == 3


def test_parse_symbolic_and_bind():
    W = parse_diagram("nodes 1..3; 1-2:m; 2-3")
    assert not W.is_bound
    assert list(W.symbolic_parameters()) == ["m"]
    W7 = W.bind(m=7)
    assert W7.is_bound and W7.order("1", "2") == 7
    Winf = W.bind(m=INF)
    assert isinstance(Winf.order("1", "2"), Infinity)
    assert isinstance(W.bind(m="inf").order("1", "2"), Infinity)


def test_parse_let_binding():
    W = parse_diagram("let k = 7; nodes 1..2; 1-2:k")
    assert W.order("1", "2") == 7
    Winf = parse_diagram("let k = inf; 1-2:k")
    assert isinstance(Winf.order("1", "2"), Infinity)


@pytest.mark.parametrize("src,message", [
    ("", "empty diagram source"),
    ("nodes 1..3; 1-1", "self-edge"),
    ("1-2; 1-2:4", "duplicate edge"),
    ("1-2:1", "order must be >= 2"),
    ("nodes 3..1", "empty range"),
    ("1-2 3-4", "expected ';'"),
])
def test_parse_errors(src, message):
    with pytest.raises(DiagramSyntaxError) as err:
        parse_diagram(src)
    assert message in str(err.value)


def test_syntax_error_carries_position():
    with pytest.raises(DiagramSyntaxError) as err:
        parse_diagram("nodes 1..2;\n1-2:1")
    assert err.value.line == 2


def test_serialize_round_trip():
    src = "nodes 1..5; 1-2; 2-3:4; 3-4:inf; 4-5:m; 1-5:12"
    W = parse_diagram(src)
    W2 = parse_diagram(W.serialize())
    assert W2.generators == W.generators
    assert W2.edges() == W.edges()


# -- the system object ------------------------------------------------------


def test_order_is_symmetric_and_self_is_one():
    W = parse_diagram("a-b:5")
    assert W.order("a", "b") == W.order("b", "a") == 5
    assert W.order("a", "a") == 1


def test_unknown_generator_raises():
    W = parse_diagram("a-b")
    with pytest.raises(DiagramError):
        W.order("a", "z")
    with pytest.raises(DiagramError):
        W.subsystem(["a", "z"])


def test_subsystem_keeps_declaration_order():
    W = parse_diagram("nodes 1..5; 1-2; 2-3; 3-4; 4-5")
    S = W.subsystem({"4", "2", "5"})
    assert S.generators == ("2", "4", "5")
    assert S.order("4", "5") == 3
    assert S.order("2", "4") == 2
    # module-level helper agrees with the method
    assert subsystem(W, {"4", "2", "5"}).generators == S.generators


def test_bind_rejects_bad_orders():
    W = parse_diagram("1-2:m")
    with pytest.raises((DiagramError, ValueError)):
        W.bind(m=1)


# -- Gram matrices ----------------------------------------------------------


def test_gram_entry_values():
    assert gram_entry(2) == pytest.approx(0.0)
    assert gram_entry(3) == pytest.approx(-1.0)
    assert gram_entry(4) == pytest.approx(-math.sqrt(2.0))
    assert gram_entry(INF) == pytest.approx(-2.0)


def test_gram_matrix_of_triangle():
    W = parse_diagram("nodes 1..3; 1-2; 2-3; 1-3")
    G = gram_matrix(W)
    assert np.allclose(np.diag(G), 2.0)
    assert np.allclose(G, G.T)
    off = G[~np.eye(3, dtype=bool)]
    assert np.allclose(off, -1.0)
    # the affine triangle is singular positive semidefinite
    eig = np.linalg.eigvalsh(G)
    assert abs(eig[0]) < 1e-12 and eig[1] > 0


def test_gram_matrix_unbound_raises():
    W = parse_diagram("1-2:m")
    with pytest.raises(UnboundParameterError):
        gram_matrix(W)


# -- components and classification -----------------------------------------


def test_split_components():
    W = parse_diagram("nodes 1..5; 1-2; 3-4:4")
    comps = split_components(W)
    assert [c.generators for c in comps] == [("1", "2"), ("3", "4"), ("5",)]


def test_classify_single_node():
    label = classify_irreducible(parse_diagram("nodes a"))
    assert label == ClassificationLabel("Spherical", "A_1")


@pytest.mark.parametrize("src,kind,name", [
    ("a-b", "Spherical", "A_2"),
    ("a-b:7", "Spherical", "I_2(7)"),
    ("a-b:inf", "Affine", "tilde_A_1"),
    ("nodes 1..3; 1-2; 2-3; 1-3", "Affine", "tilde_A_2"),
    ("nodes 1..4; 1-2; 2-3; 3-4; 1-4", "Affine", "tilde_A_3"),
    ("nodes 1..3; 1-2:5; 2-3", "Spherical", "H_3"),
    ("nodes 1..4; 1-2:5; 2-3; 3-4", "Spherical", "H_4"),
    ("nodes 1..3; 1-2:5; 2-3:5", "Lanner", "Lanner-2-chain-5-5"),
    ("nodes 1..4; 1-2:5; 2-3; 3-4:5", "Lanner", "Lanner-3-535"),
])
def test_classify_small_diagrams(src, kind, name):
    label = classify_irreducible(parse_diagram(src))
    assert label.kind == kind
    assert label.catalog_name == name


def test_classify_large_has_no_catalog_name():
    # the m=7 filling diagram: strictly negative type
    W = parse_diagram("nodes 1..6; 1-2; 2-3; 1-3; 3-4; 4-5; 5-6:7")
    label = classify_irreducible(W)
    assert label.kind == "Large"
    assert label.catalog_name is None


def test_classify_rejects_reducible_and_unbound():
    with pytest.raises(DiagramError):
        classify_irreducible(parse_diagram("nodes 1..4; 1-2; 3-4"))
    with pytest.raises(UnboundParameterError):
        classify_irreducible(parse_diagram("1-2:m"))


# -- property tests ---------------------------------------------------------


@st.composite
def small_systems(draw):
    n = draw(st.integers(2, 5))
    names = [str(i) for i in range(1, n + 1)]
    orders = {}
    for i in range(n):
        for j in range(i + 1, n):
            m = draw(st.sampled_from([2, 2, 2, 3, 3, 4, 5, 6, 7, "inf"]))
            if m != 2:
                orders[(names[i], names[j])] = m
    parts = [f"nodes 1..{n}"]
    for (s, t), m in orders.items():
        parts.append(f"{s}-{t}" + ("" if m == 3 else f":{m}"))
    return parse_diagram("; ".join(parts))


@given(small_systems(), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_classification_invariant_under_relabeling(W, rng):
    """Renaming generators never changes the classification."""
    names = list(W.generators)
    perm = names[:]
    rng.shuffle(perm)
    mapping = dict(zip(names, perm))
    parts = [f"nodes {','.join(sorted(perm, key=lambda s: int(s)))}"]
    for s, t, m in W.edges():
        tok = "inf" if isinstance(m, Infinity) else str(m)
        parts.append(f"{mapping[s]}-{mapping[t]}:{tok}")
    V = parse_diagram("; ".join(parts))

    def labels(system):
        return sorted(
            (lab.kind, lab.catalog_name or "")
            for lab in map(classify_irreducible, split_components(system))
        )

    assert labels(W) == labels(V)


@given(small_systems())
@settings(max_examples=60, deadline=None)
def test_serialize_parse_round_trip_property(W):
    V = parse_diagram(W.serialize())
    assert V.generators == W.generators
    assert V.edges() == W.edges()


@given(small_systems())
@settings(max_examples=40, deadline=None)
def test_gram_symmetry_property(W):
    G = gram_matrix(W)
    assert np.allclose(G, G.T)
    assert np.allclose(np.diag(G), 2.0)
    assert (G[~np.eye(len(G), dtype=bool)] <= 0).all()
