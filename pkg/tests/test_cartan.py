import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coxfill.cartan import (
    CartanError,
    CartanMatrix,
    are_equivalent,
    build_special_form,
    cyclic_products,
    gram_cartan,
    loop_det_reduce,
    loop_matrix,
    matrix_rank,
    psi_product,
    psi_triple,
    special_form_layout,
    special_params_of,
    symmetrize,
    type_decompose,
)
from coxfill.diagram import INF, UnboundParameterError, parse_diagram

LOOP = parse_diagram("nodes 1..4; 1-2:4; 2-3; 3-4; 1-4")


# ---------------------------------------------------------------- validation

def test_gram_cartan_is_symmetric_and_valid():
    W = parse_diagram("a-b:5; b-c")
    A = gram_cartan(W)
    assert np.allclose(A.entries, A.entries.T)
    assert A.entry("a", "b") == pytest.approx(-2 * math.cos(math.pi / 5))
    assert A.entry("a", "c") == 0.0


def test_shape_mismatch():
    W = parse_diagram("a-b")
    with pytest.raises(CartanError, match="shape"):
        CartanMatrix(np.eye(3), W)


def test_diagonal_must_be_two():
    W = parse_diagram("a-b")
    with pytest.raises(CartanError, match="diagonal"):
        CartanMatrix([[1.0, -1.0], [-1.0, 2.0]], W)


def test_positive_off_diagonal_rejected():
    W = parse_diagram("a-b")
    with pytest.raises(CartanError, match="positive off-diagonal"):
        CartanMatrix([[2.0, 1.0], [1.0, 2.0]], W)


def test_zero_pattern_must_be_symmetric():
    W = parse_diagram("a-b; b-c")
    bad = [[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]
    with pytest.raises(CartanError, match="zero pattern"):
        CartanMatrix(bad, W)


def test_pairwise_product_checked_against_order():
    W = parse_diagram("a-b:4")
    # product must be 4cos^2(pi/4) = 2
    CartanMatrix([[2.0, -2.0], [-1.0, 2.0]], W)  # fine: 2
    with pytest.raises(CartanError, match="product"):
        CartanMatrix([[2.0, -1.0], [-1.0, 2.0]], W)


def test_infinite_edge_needs_product_at_least_four():
    W = parse_diagram("a-b:inf")
    CartanMatrix([[2.0, -2.0], [-2.0, 2.0]], W)          # exactly 4
    CartanMatrix([[2.0, -5.0], [-1.0, 2.0]], W)          # 5 > 4
    with pytest.raises(CartanError, match="< 4"):
        CartanMatrix([[2.0, -1.5], [-1.5, 2.0]], W)


def test_unbound_order_rejected():
    W = parse_diagram("a-b:m")
    with pytest.raises(UnboundParameterError):
        CartanMatrix([[2.0, -1.0], [-1.0, 2.0]], W)
    with pytest.raises(UnboundParameterError):
        gram_cartan(W)


# ------------------------------------------------------------- special form

def test_layout_of_single_loop():
    lay = special_form_layout(LOOP)
    assert lay.tree_edges == (("1", "2"), ("2", "3"), ("3", "4"))
    assert lay.cycle_edges == (("1", "4"),)
    assert lay.param_names == ("lambda",)


def test_layout_two_loops_names_lambda_mu():
    W = parse_diagram("nodes 1..6; 1-2; 2-3; 1-3; 3-4; 4-5; 5-6; 4-6")
    lay = special_form_layout(W)
    assert lay.param_names == ("lambda", "mu")
    assert len(lay.cycle_edges) == 2


def test_build_special_form_entries():
    A = build_special_form(LOOP, {"lambda": 1.5})
    c = 2 * math.cos(math.pi / 3)  # closing edge 1-4 has order 3
    assert A.entry("1", "4") == pytest.approx(-c / 1.5)
    assert A.entry("4", "1") == pytest.approx(-c * 1.5)
    assert A.entry("1", "2") == pytest.approx(-math.sqrt(2))
    assert A.params == {"lambda": 1.5}


def test_special_params_recovered():
    for lam in (0.3, 1.0, 2.5):
        A = build_special_form(LOOP, {"lambda": lam})
        got = special_params_of(A)
        assert got["lambda"] == pytest.approx(lam)


def test_pyramid_family_symmetric_matrix():
    """The six-generator member with an infinite edge, all cycle
    parameters 1, has this exact matrix."""
    from coxfill.families import filling_family

    W = filling_family("cox_gp-1").system(INF)
    A = build_special_form(W, {"lambda": 1.0})
    want = np.array([
        [2, -1, -1, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0],
        [-1, -1, 2, -1, 0, 0],
        [0, 0, -1, 2, -1, 0],
        [0, 0, 0, -1, 2, -2],
        [0, 0, 0, 0, -2, 2],
    ], dtype=float)
    assert np.allclose(A.entries, want)


# ------------------------------------------------------- equivalence, types

def test_equivalence_under_diagonal_conjugation():
    A = build_special_form(LOOP, {"lambda": 1.7})
    d = np.array([1.0, 2.0, 0.5, 3.0])
    B = CartanMatrix(d[:, None] * A.entries / d[None, :], LOOP)
    assert are_equivalent(A, B)
    assert not are_equivalent(A, build_special_form(LOOP, {"lambda": 1.2}))


def test_cyclic_product_separates_inequivalent():
    p1 = cyclic_products(build_special_form(LOOP, {"lambda": 1.7}))
    p2 = cyclic_products(build_special_form(LOOP, {"lambda": 1.2}))
    assert set(p1) == set(p2) == {"lambda"}
    assert p1["lambda"] != pytest.approx(p2["lambda"])


def test_symmetrize_tree_always_works():
    W = parse_diagram("a-b")
    A = CartanMatrix([[2.0, -2.0], [-0.5, 2.0]], W)
    d = symmetrize(A)
    assert d is not None
    conj = d[:, None] * A.entries / d[None, :]
    assert np.allclose(conj, conj.T)


def test_symmetrize_loop_iff_unit_parameter():
    assert symmetrize(build_special_form(LOOP, {"lambda": 1.0})) is not None
    assert symmetrize(build_special_form(LOOP, {"lambda": 1.5})) is None


@pytest.mark.parametrize("src,kind", [
    ("a-b:5; b-c", "Positive"),            # H_3
    ("nodes 1..3; 1-2; 2-3; 1-3", "Zero"),  # affine triangle
    ("a-b:7; b-c; a-c", "Negative"),        # hyperbolic triangle
])
def test_type_decompose_irreducible(src, kind):
    td = type_decompose(gram_cartan(parse_diagram(src)))
    assert len(td.components) == 1
    assert td.components[0].kind == kind


def test_type_decompose_reducible():
    W = parse_diagram("a-b:5; b-c; x-y; y-z; x-z")
    td = type_decompose(gram_cartan(W))
    kinds = sorted(c.kind for c in td.components)
    assert kinds == ["Positive", "Zero"]


def test_matrix_rank_of_affine_gram():
    A = gram_cartan(parse_diagram("nodes 1..3; 1-2; 2-3; 1-3"))
    assert matrix_rank(A) == 2
    B = gram_cartan(parse_diagram("a-b:5; b-c"))
    assert matrix_rank(B) == 3


# ---------------------------------------------------------------- identities

@given(st.floats(0.0, math.pi), st.floats(0.0, math.pi), st.floats(0.0, math.pi))
def test_psi_forms_agree(a, b, g):
    assert psi_triple(a, b, g) == pytest.approx(psi_product(a, b, g), abs=1e-9)


def test_psi_vanishes_on_flat_triples():
    assert psi_product(math.pi / 2, math.pi / 3, math.pi / 6) == pytest.approx(0.0, abs=1e-12)
    assert psi_product(1.0, 1.0, math.pi - 2.0) == pytest.approx(0.0, abs=1e-12)


def test_loop_det_reduction_identity():
    rng = np.random.default_rng(7)
    for n in (3, 4, 5):
        cs = rng.uniform(0.2, 1.8, size=n)
        d1, coeff = loop_det_reduce(cs)
        assert coeff == pytest.approx(np.prod(cs))
        for lam in (0.5, 1.0, 1.3, 4.0):
            det = np.linalg.det(loop_matrix(cs, lam))
            assert det == pytest.approx(d1 - coeff * (lam + 1 / lam - 2), abs=1e-10)


def test_loop_matrix_needs_three():
    with pytest.raises(CartanError):
        loop_matrix([0.5, 0.5], 1.0)


# -------------------------------------------------------------- persistence

def test_json_round_trip():
    A = build_special_form(LOOP, {"lambda": 1.5})
    B = CartanMatrix.from_json(A.to_json())
    assert np.allclose(A.entries, B.entries)
    assert B.params == A.params
    assert B.system.edges() == LOOP.edges()


def test_from_json_validates():
    js = build_special_form(LOOP, {"lambda": 1.5}).to_json()
    js["entries"][0] = 3.0  # flat row-major: first diagonal entry
    with pytest.raises(CartanError):
        CartanMatrix.from_json(js)
