"""Deformation spaces: reduced equations, witnesses, and limits.

The frozen constants in here were computed by root-finding on the
special-form determinant directly (scipy brentq on det as a function of
lambda at fixed mu), independently of the corner-fit reduction used by
the module.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from coxfill.cartan import build_special_form, matrix_rank, special_form_layout
from coxfill.deform import (
    DeformError,
    UnsupportedFamilyError,
    circle_space,
    deformation_space,
    limit_family,
    mu_invariant,
    witnesses_at_mu,
)
from coxfill.diagram import INF
from coxfill.families import example_polytope, filling_family
from coxfill.polytopes import predicted_vertices

X0_M7 = 6.57337600928343
LAM_M7 = 6.417553386585777
A_G3 = -1.38404294326018
B_G3 = 1.25368437763392
K_U = 8.0 * math.cos(math.pi / 5.0) ** 2


def _det(fid, **params):
    W = filling_family(fid).system(params.pop("m"))
    return float(np.linalg.det(build_special_form(W, params).entries))


# -------------------------------------------------------------- one loop

def test_linear_family_root_oracle():
    """brentq on the raw determinant reproduces the frozen witness."""
    root = brentq(lambda lam: _det("cox_gp-1", m=7, **{"lambda": lam}),
                  1.5, 50.0, xtol=1e-13)
    assert root == pytest.approx(LAM_M7, rel=1e-10)
    assert root + 1.0 / root == pytest.approx(X0_M7, rel=1e-12)


def test_one_loop_space_at_seven():
    ds = deformation_space(filling_family("cox_gp-1").polytope(7))
    assert ds.kind == "FinitePoints"
    red = ds.reduced_equation
    assert red["form"] == "linear"
    assert red["x0"] == pytest.approx(X0_M7, rel=1e-12)
    lams = sorted(w["lambda"] for w in ds.witnesses)
    assert lams[1] == pytest.approx(LAM_M7, rel=1e-9)
    assert lams[0] * lams[1] == pytest.approx(1.0, abs=1e-9)
    assert ds.checks["witness_max_abs_det"] < 1e-9
    # the witness member drops rank by exactly one
    W = filling_family("cox_gp-1").system(7)
    A = build_special_form(W, {"lambda": lams[1]})
    assert matrix_rank(A) == 5


@pytest.mark.parametrize("fid", ["cox_gp-1", "cox_gp-2"])
def test_one_loop_kind_pattern(fid):
    fam = filling_family(fid)
    for m in (3, 4, 5, 6):
        assert deformation_space(fam.polytope(m)).kind == "Empty"
    for m in (7, 12, 40):
        ds = deformation_space(fam.polytope(m))
        assert ds.kind == "FinitePoints"
        assert len(ds.witnesses) == 2


def test_lambda_decreases_with_filling_order():
    fam = filling_family("cox_gp-1")
    lams = []
    for m in (7, 8, 9, 15, 40):
        ds = deformation_space(fam.polytope(m))
        lams.append(max(w["lambda"] for w in ds.witnesses))
    assert lams[0] == pytest.approx(6.417553386585777, rel=1e-9)
    assert lams[1] == pytest.approx(3.862414967405381, rel=1e-9)
    assert lams[2] == pytest.approx(2.9839518064176493, rel=1e-9)
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert lams[-1] > 1.0


# -------------------------------------------------------------- two loops

def test_two_loop_curve_at_seven():
    ds = deformation_space(filling_family("cox_gp-3").polytope(7))
    assert ds.kind == "Curves"
    assert ds.checks["branches"] == 2
    red = ds.reduced_equation
    assert red["form"] == "offset-product"
    assert red["A"] == pytest.approx(A_G3, rel=1e-10)
    assert red["B"] == pytest.approx(B_G3, rel=1e-10)
    assert len(ds.witnesses) == 64
    for w in ds.witnesses:
        x = w["lambda"] + 1.0 / w["lambda"]
        y = w["mu"] + 1.0 / w["mu"]
        assert (x - 2.0) * (y - red["A"]) == pytest.approx(red["B"], rel=1e-8)
    assert ds.checks["witness_max_abs_det"] < 1e-9


def test_two_loop_four_branches_at_three():
    ds = deformation_space(filling_family("cox_gp-3").polytope(3))
    assert ds.kind == "Curves"
    assert ds.checks["branches"] == 4
    assert ds.reduced_equation["A"] == pytest.approx(2.0, abs=1e-9)


def test_witness_slice_at_fixed_mu():
    G = filling_family("cox_gp-3").polytope(7)
    ws = witnesses_at_mu(G, 2.0)
    assert [w["lambda"] for w in ws] == [
        pytest.approx(1.7520028790841908, rel=1e-12),
        pytest.approx(0.5707753177453232, rel=1e-12),
    ]
    assert ws[0]["lambda"] * ws[1]["lambda"] == pytest.approx(1.0, abs=1e-9)
    # direct determinant root agrees
    root = brentq(lambda lam: _det("cox_gp-3", m=7, **{"lambda": lam, "mu": 2.0}),
                  1.01, 10.0, xtol=1e-13)
    assert root == pytest.approx(ws[0]["lambda"], rel=1e-10)


def test_witness_slice_argument_errors():
    with pytest.raises(DeformError, match="single parameter"):
        witnesses_at_mu(filling_family("cox_gp-1").polytope(7), 2.0)
    with pytest.raises(DeformError, match="positive"):
        witnesses_at_mu(filling_family("cox_gp-3").polytope(7), -1.0)


def test_mu_invariant_round_trip():
    W = filling_family("cox_gp-3").system(7)
    A = build_special_form(W, {"lambda": 1.3, "mu": 0.7})
    assert mu_invariant(A).value == pytest.approx(0.7)
    with pytest.raises(DeformError):
        mu_invariant(build_special_form(filling_family("cox_gp-1").system(7),
                                        {"lambda": 1.3}))


# ----------------------------------------------------------------- circle

def test_circle_space_constant():
    cs = circle_space(example_polytope("U"))
    assert cs.kind == "Circle"
    assert cs.reduced_equation["K"] == pytest.approx(K_U, abs=1e-12)
    assert cs.checks["constant_error"] < 1e-12
    assert cs.checks["identity_violation"] > 1.2
    assert len(cs.witnesses) == 64
    assert cs.checks["witness_max_abs_det"] < 1e-9
    bx = cs.checks["bounds"]["x"]
    assert bx[0] == pytest.approx(2.0) and bx[1] == pytest.approx(K_U / 2.0)
    for w in cs.witnesses:
        x = w["lambda"] + 1.0 / w["lambda"]
        assert 2.0 - 1e-9 <= x <= K_U / 2.0 + 1e-9


def test_circle_space_is_u_only():
    with pytest.raises(UnsupportedFamilyError):
        circle_space(example_polytope("V"))


def test_v_example_is_a_smaller_circle():
    ds = deformation_space(example_polytope("V"))
    assert ds.kind == "Circle"
    assert ds.reduced_equation["K"] == pytest.approx(4.5, abs=1e-9)


# ----------------------------------------------------------------- limits

def test_limit_family_trace_and_matrix():
    res = limit_family("cox_gp-1", sweep=range(7, 41))
    ms = [m for m, _ in res.lam_trace]
    lams = [lam for _, lam in res.lam_trace]
    assert ms == list(range(7, 41))
    assert all(a > b for a, b in zip(lams, lams[1:]))
    assert 1.0 < lams[-1] < 1.25
    exact = build_special_form(filling_family("cox_gp-1").system(INF),
                               {"lambda": 1.0})
    assert np.max(np.abs(res.cartan.entries - exact.entries)) < 1e-7
    assert len(predicted_vertices(res.prediction)) == 7
    assert res.mu is None


def test_limit_family_with_mu():
    res = limit_family("cox_gp-3", mu=1.0, sweep=range(7, 41))
    assert res.mu == 1.0
    exact = build_special_form(filling_family("cox_gp-3").system(INF),
                               {"lambda": 1.0, "mu": 1.0})
    assert np.max(np.abs(res.cartan.entries - exact.entries)) < 1e-7


def test_limit_family_unknown_id():
    from coxfill.families import FamilyError

    with pytest.raises(FamilyError):
        limit_family("ex2-d5-k4")
