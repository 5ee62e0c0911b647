"""Deformation spaces of labeled polytopes with d+2 facets.

A Cartan matrix realizing such a polytope must drop rank by one, so the
deformation space is cut out by det A = 0 on the special-form cycle
parameters.  With the parametrized cycles vertex-disjoint the
determinant is exactly multilinear in x = lambda + 1/lambda and
y = mu + 1/mu, so four evaluations pin it down:

    det = a + b(x-2) + c(y-2) + e(x-2)(y-2).

One cycle gives a linear equation in x; two cycles reduce to the normal
form (x-2)(y-A) = B (our families all have c = 0) or, when the raw x
and y coefficients both vanish, to x*y = K.  The topology of the
solution set in the positive parameters is decided from these
coefficients alone, never from sampled point clouds:

* linear, root x0 > 2   -> two points {lambda0, 1/lambda0}
* linear, root x0 = 2   -> a single point lambda = 1
* linear, root x0 < 2   -> empty
* (x-2)(y-A) = B > 0    -> two curve branches if A < 2, four if A = 2
* (x-2)(y-A) = 0, A < 2 -> the single line lambda = 1
* x*y = K > 4           -> a circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cartan import (
    CartanMatrix,
    build_special_form,
    special_form_layout,
    special_params_of,
)
from .diagram import INF, CoxeterSystem
from .families import example_polytope, filling_family
from .polytopes import LabeledPolytope, faces_from_cartan

_TOL = 1e-9


class DeformError(ValueError):
    """Deformation computation failed or input out of scope."""


class UnsupportedFamilyError(DeformError):
    """The polytope is outside the supported d+2-facet families."""


@dataclass(frozen=True)
class DeformationSpace:
    """Solution set of det A_{lambda,mu} = 0 over positive parameters.

    ``witnesses`` are parameter assignments solving the equation;
    ``reduced_equation`` holds the normal-form coefficients and
    ``checks`` the numeric certificates gathered on the way.
    """

    kind: str  # "Empty" | "FinitePoints" | "Curves" | "Circle"
    witnesses: tuple
    reduced_equation: dict
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "reduced": {k: v for k, v in self.reduced_equation.items()},
            "witnesses": [dict(w) for w in self.witnesses],
            "checks": {k: v for k, v in self.checks.items()},
        }


@dataclass(frozen=True)
class MuInvariant:
    value: float


@dataclass(frozen=True)
class LimitResult:
    """Limit of a filling family as m grows without bound.

    ``cartan`` is the extrapolated limit matrix on the m = inf system,
    ``lam_trace`` the verified monotone (m, lambda(m)) sweep and
    ``prediction`` the face-lattice prediction for the limit matrix.
    """

    cartan: CartanMatrix
    lam_trace: tuple
    prediction: dict
    mu: float | None = None


def _lam_of_x(x: float) -> float:
    """The root lambda >= 1 of lambda + 1/lambda = x."""
    return (x + math.sqrt(max(x * x - 4.0, 0.0))) / 2.0


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DeformError("bisection bracket carries no sign change")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _det_at(system: CoxeterSystem, names, values) -> float:
    A = build_special_form(system, dict(zip(names, values)))
    return float(np.linalg.det(A.entries))


def _check_support(G: LabeledPolytope) -> CoxeterSystem:
    W = G.system()
    if not W.is_bound:
        raise DeformError(
            "polytope labels must be concrete orders, got symbols: "
            + ", ".join(W.symbolic_parameters())
        )
    if len(G.facets) != G.dimension + 2:
        raise UnsupportedFamilyError(
            f"need d+2 facets, got {len(G.facets)} for dimension {G.dimension}"
        )
    return W


def deformation_space(G: LabeledPolytope) -> DeformationSpace:
    """Classify and sample the solution set of det = 0 for G.

    Supported inputs are d-polytopes with d+2 facets whose diagram has
    cycle rank one or two; anything else raises
    :class:`UnsupportedFamilyError`.
    """
    W = _check_support(G)
    layout = special_form_layout(W)
    names = layout.param_names
    if len(names) == 0 or len(names) > 2:
        raise UnsupportedFamilyError(
            f"diagram cycle rank {len(names)} is outside the supported range"
        )
    if len(names) == 1:
        return _one_cycle_space(W, names)
    return _two_cycle_space(W, names)


def _one_cycle_space(W, names) -> DeformationSpace:
    d1 = _det_at(W, names, (1.0,))
    d2 = _det_at(W, names, (2.0,))
    alpha, beta = d1, (d2 - d1) / 0.5
    scale = max(1.0, abs(d1), abs(d2))
    # multilinearity makes the fit exact; verify off the grid anyway
    d3 = _det_at(W, names, (3.0,))
    residual = abs(d3 - (alpha + beta * (10.0 / 3.0 - 2.0))) / scale
    if residual > 1e-8:
        raise DeformError(f"determinant is not linear in x ({residual:.2e})")
    checks = {"fit_residual": residual}
    if abs(beta) <= _TOL * scale:
        if abs(alpha) <= _TOL * scale:
            raise UnsupportedFamilyError(
                "determinant vanishes identically; not a supported family"
            )
        return DeformationSpace(
            "Empty", (),
            {"form": "linear", "slope": beta, "x0": None},
            checks,
        )
    x0 = 2.0 - alpha / beta
    # cross-check the closed-form root by bisection on the fitted line
    reduced = {"form": "linear", "slope": beta, "x0": x0}
    if x0 > 2.0 + _TOL:
        xmax = 2.0 + 2.0 * (abs(alpha / beta) + 1.0)
        xb = _bisect(lambda x: alpha + beta * (x - 2.0), 2.0, xmax)
        checks["bisection_residual"] = abs(xb - x0) / max(1.0, abs(x0))
        lam = _lam_of_x(x0)
        witnesses = ({names[0]: lam}, {names[0]: 1.0 / lam})
        kind = "FinitePoints"
    elif x0 >= 2.0 - _TOL:
        witnesses = ({names[0]: 1.0},)
        kind = "FinitePoints"
    else:
        witnesses = ()
        kind = "Empty"
    checks["witness_max_abs_det"] = _max_witness_det(W, witnesses)
    return DeformationSpace(kind, witnesses, reduced, checks)


def _two_cycle_space(W, names) -> DeformationSpace:
    corners = {
        (lx, ly): _det_at(W, names, (lx, ly))
        for lx in (1.0, 2.0) for ly in (1.0, 2.0)
    }
    d11, d21 = corners[(1.0, 1.0)], corners[(2.0, 1.0)]
    d12, d22 = corners[(1.0, 2.0)], corners[(2.0, 2.0)]
    a = d11
    b = (d21 - d11) / 0.5
    c = (d12 - d11) / 0.5
    e = (d22 - d21 - d12 + d11) / 0.25
    scale = max(1.0, *(abs(v) for v in corners.values()))
    d33 = _det_at(W, names, (3.0, 3.0))
    pred = (a + (b + c) * (10.0 / 3.0 - 2.0)
            + e * (10.0 / 3.0 - 2.0) ** 2)
    residual = abs(d33 - pred) / scale
    if residual > 1e-8:
        raise DeformError(f"determinant is not bilinear in x, y ({residual:.2e})")
    checks = {"fit_residual": residual}
    if abs(e) <= _TOL * scale:
        raise UnsupportedFamilyError("degenerate cross coefficient")

    if abs(b - 2.0 * e) <= _TOL * scale and abs(c - 2.0 * e) <= _TOL * scale:
        # raw x/y coefficients vanish: det = e*x*y + const
        K = -(a - 2.0 * b - 2.0 * c + 4.0 * e) / e
        reduced = {"form": "product-constant", "K": K}
        checks["identity_violation"] = abs(4.0 - K)
        if K < 4.0 - _TOL:
            return DeformationSpace("Empty", (), reduced, checks)
        if K <= 4.0 + _TOL:
            witnesses = ({names[0]: 1.0, names[1]: 1.0},)
            checks["witness_max_abs_det"] = _max_witness_det(W, witnesses)
            return DeformationSpace("FinitePoints", witnesses, reduced, checks)
        witnesses = _circle_witnesses(W, names, K)
        checks["witness_max_abs_det"] = _max_witness_det(W, witnesses)
        checks["bounds"] = {"x": [2.0, K / 2.0], "y": [2.0, K / 2.0]}
        return DeformationSpace("Circle", witnesses, reduced, checks)

    if abs(c) > _TOL * scale:
        raise UnsupportedFamilyError(
            "determinant has a bare y term; diagram is outside the tables"
        )
    # det = e * ((x-2)(y-A) - B)
    A = 2.0 - b / e
    B = -a / e
    reduced = {"form": "offset-product", "A": A, "B": B}
    if abs(B) <= _TOL:
        # the equation degenerates to (x-2)(y-A) = 0; with A < 2 the
        # admissible solutions are the single line lambda = 1
        if not A < 2.0 - _TOL:
            raise UnsupportedFamilyError(
                "degenerate product form with A >= 2 is outside the tables"
            )
        checks["branches"] = 1
        mus = np.geomspace(1e-2, 1e2, 64)
        witnesses = tuple({names[0]: 1.0, names[1]: float(v)} for v in mus)
        checks["witness_max_abs_det"] = _max_witness_det(W, witnesses)
        return DeformationSpace("Curves", witnesses, reduced, checks)
    if B < 0:
        if A < 2.0 + _TOL:
            return DeformationSpace("Empty", (), reduced, checks)
        raise UnsupportedFamilyError(
            "product form with B < 0 < A - 2 is outside the tables"
        )
    branches = 2 if A < 2.0 - _TOL else 4
    checks["branches"] = branches
    witnesses = _curve_witnesses(W, names, A, B)
    checks["witness_max_abs_det"] = _max_witness_det(W, witnesses)
    return DeformationSpace("Curves", witnesses, reduced, checks)


def _x_root_at_mu(W, names, mu):
    """Exact root in x of det(lambda, mu) = 0 for fixed mu (the slice is
    linear in x, so two evaluations solve it to machine precision)."""
    d1 = _det_at(W, names, (1.0, mu))
    d2 = _det_at(W, names, (2.0, mu))
    beta = (d2 - d1) / 0.5
    if beta == 0.0:
        raise DeformError("degenerate slice while sampling the curve")
    return 2.0 - d1 / beta


def _y_root_at_lam(W, names, lam):
    d1 = _det_at(W, names, (lam, 1.0))
    d2 = _det_at(W, names, (lam, 2.0))
    beta = (d2 - d1) / 0.5
    if beta == 0.0:
        raise DeformError("degenerate slice while sampling the curve")
    return 2.0 - d1 / beta


def _curve_witnesses(W, names, A, B, count=64):
    """One witness per y-sample on a log grid, cycling the sign choices
    of lambda and mu so every branch is represented."""
    if B <= 0:
        raise DeformError("curve sampling expects B > 0")
    if abs(A - 2.0) > _TOL:
        xmax = 2.0 + 2.0 * (B / abs(A - 2.0) + abs(A) + 1.0)
    else:
        xmax = 2.0 + 2.0 * (B + abs(A) + 1.0)
    u_min = max(2.0 - A, B / (xmax - 2.0))
    us = np.geomspace(u_min, u_min * 1e4, count)
    witnesses = []
    for k, u in enumerate(us):
        y = A + float(u)
        mu = _lam_of_x(y)
        x_closed = 2.0 + B / float(u)
        xb = _bisect(lambda t: (t - 2.0) * (y - A) - B, 2.0,
                     max(x_closed * 2.0, 4.0))
        if abs(xb - x_closed) > 1e-9 * max(1.0, x_closed):
            raise DeformError("bisection disagrees with the closed form")
        x = _x_root_at_mu(W, names, mu)
        if abs(x - x_closed) > 1e-7 * max(1.0, abs(x_closed)):
            raise DeformError("curve slice disagrees with the normal form")
        lam = _lam_of_x(x)
        if k % 2:
            lam = 1.0 / lam
        if (k // 2) % 2:
            mu = 1.0 / mu
        witnesses.append({names[0]: lam, names[1]: mu})
    return tuple(witnesses)


def _circle_witnesses(W, names, K, base=16):
    witnesses = []
    for k in range(base):
        t = (k + 0.5) / base
        x = 2.0 + (K / 2.0 - 2.0) * t
        lam = _lam_of_x(x)
        y = _y_root_at_lam(W, names, lam)
        if abs(x * y - K) > 1e-7 * max(1.0, K):
            raise DeformError("circle slice disagrees with the constant")
        mu = _lam_of_x(y)
        for sx in (lam, 1.0 / lam):
            for sy in (mu, 1.0 / mu):
                witnesses.append({names[0]: sx, names[1]: sy})
    return tuple(witnesses)


def witnesses_at_mu(G: LabeledPolytope, mu: float) -> tuple:
    """Both lambda-witnesses of a two-parameter member at a fixed mu.

    The mu-slice of the determinant is linear in x = lambda + 1/lambda,
    so the root is exact; an x below 2 means the slice misses the
    admissible region and the result is empty.
    """
    W = _check_support(G)
    names = special_form_layout(W).param_names
    if len(names) != 2:
        raise DeformError("member has a single parameter; mu does not apply")
    if not mu > 0:
        raise DeformError(f"mu must be positive, got {mu}")
    x = _x_root_at_mu(W, names, mu)
    if x < 2.0 - _TOL:
        return ()
    lam = _lam_of_x(max(x, 2.0))
    if lam <= 1.0 + _TOL:
        return ({names[0]: 1.0, names[1]: mu},)
    return ({names[0]: lam, names[1]: mu},
            {names[0]: 1.0 / lam, names[1]: mu})


def _max_witness_det(W, witnesses) -> float:
    worst = 0.0
    for w in witnesses:
        A = build_special_form(W, w)
        worst = max(worst, abs(float(np.linalg.det(A.entries))))
    return worst


# ---------------------------------------------------------------------------
# The bounded two-cycle example
# ---------------------------------------------------------------------------


def circle_space(G: LabeledPolytope) -> DeformationSpace:
    """Deformation space of the U example: the bounded circle case.

    The reduced equation is (lambda+1/lambda)(mu+1/mu) = 8cos^2(pi/5);
    the identity matrix violates it by 8cos^2(pi/5) - 4 > 1.2, and both
    x and y stay in [2, 4cos^2(pi/5)].
    """
    if G != example_polytope("U"):
        raise UnsupportedFamilyError(
            "circle_space applies to the U example polytope only"
        )
    space = deformation_space(G)
    if space.kind != "Circle":
        raise DeformError(f"expected a circle, classified {space.kind}")
    K = space.reduced_equation["K"]
    checks = dict(space.checks)
    checks["constant_error"] = abs(K - 8.0 * math.cos(math.pi / 5.0) ** 2)
    return DeformationSpace(space.kind, space.witnesses,
                            space.reduced_equation, checks)


# ---------------------------------------------------------------------------
# The mu-invariant
# ---------------------------------------------------------------------------


def mu_invariant(A: CartanMatrix) -> MuInvariant:
    """Second special-form cycle parameter of a two-cycle Cartan matrix.

    Positive diagonal conjugation preserves it; transposition inverts it.
    """
    layout = special_form_layout(A.system)
    if len(layout.param_names) != 2:
        raise DeformError(
            f"mu-invariant needs cycle rank 2, got {len(layout.param_names)}"
        )
    params = special_params_of(A)
    return MuInvariant(float(params[layout.param_names[1]]))


# ---------------------------------------------------------------------------
# Limits m -> inf
# ---------------------------------------------------------------------------


def _lam_at(fam, m, mu):
    """lambda(m) on the branch lambda >= 1 for one member of the family."""
    W = fam.system(m)
    layout = special_form_layout(W)
    names = layout.param_names
    if len(names) == 1:
        d1 = _det_at(W, names, (1.0,))
        d2 = _det_at(W, names, (2.0,))
        beta = (d2 - d1) / 0.5
        if beta == 0.0:
            raise DeformError("degenerate member in the m-sweep")
        x = 2.0 - d1 / beta
    else:
        # for fixed mu the determinant is linear in x
        d11 = _det_at(W, names, (1.0, mu))
        d21 = _det_at(W, names, (2.0, mu))
        beta = (d21 - d11) / 0.5
        if beta == 0.0:
            raise DeformError("degenerate member in the m-sweep")
        x = 2.0 - d11 / beta
    if x < 2.0 - _TOL:
        raise DeformError(f"no solution at m={m}")
    return _lam_of_x(max(x, 2.0))


def limit_family(family_id: str, mu: float | None = None,
                 sweep=range(7, 41)) -> LimitResult:
    """Limit Cartan matrix of a filling family as m -> inf.

    Verifies that lambda(m) decreases monotonically to 1 over ``sweep``,
    then Richardson-extrapolates the member matrices at m = 5*10^5 and
    10^6 (the convergence is quadratic in 1/m) and returns the limit on
    the m = inf system together with its face-lattice prediction.
    ``mu`` must be supplied exactly when the family has two cycles.
    """
    fam = filling_family(family_id)
    two_cycle = fam.loops == 2
    if two_cycle and (mu is None or not mu > 0):
        raise DeformError(f"family {family_id} needs a positive mu")
    if not two_cycle and mu is not None:
        raise DeformError(f"family {family_id} has one cycle; mu not allowed")

    trace = []
    prev = math.inf
    for m in sweep:
        lam = _lam_at(fam, m, mu)
        if not lam < prev:
            raise DeformError(
                f"lambda(m) fails to decrease at m={m} for {family_id}"
            )
        trace.append((m, lam))
        prev = lam

    def member_entries(m):
        lam = _lam_at(fam, m, mu)
        W = fam.system(m)
        layout = special_form_layout(W)
        params = {layout.param_names[0]: lam}
        if two_cycle:
            params[layout.param_names[1]] = mu
        return build_special_form(W, params).entries

    m_hi = 10 ** 6
    if not _lam_at(fam, m_hi, mu) < 1.0 + 1e-3:
        raise DeformError(f"lambda(m) fails to approach 1 for {family_id}")
    near = member_entries(m_hi)
    half = member_entries(m_hi // 2)
    limit_entries = 2.0 * near - half

    W_inf = fam.system(INF)
    cartan = CartanMatrix(limit_entries, W_inf,
                          params=dict(mu=mu) if two_cycle else None)
    prediction = faces_from_cartan(cartan, fam.dimension)
    return LimitResult(cartan, tuple(trace), prediction, mu)
