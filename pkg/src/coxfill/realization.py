"""Geometric realizations of Cartan matrices as mirror polytopes.

A Cartan matrix of negative type and rank d+1 factors as A = F·Bᵀ with
F, B of width d+1; the rows of F are the facet covectors α_s and the rows
of B the poles b_s.  The polytope is the projectivized cone
{v : α_s(v) ≤ 0 for all s}; each facet carries the projective reflection
σ_s = Id − b_s·α_s.  This module builds the factorization, certifies an
interior point, enumerates the vertices geometrically, classifies them as
elliptic / parabolic / loxodromic, truncates vertices by their pole
hyperplanes, explores the reflection orbit, and tests for an invariant
Lorentzian form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .cartan import (
    CartanMatrix,
    gram_cartan,
    matrix_rank,
    smallest_real_eigenvalue,
    symmetrize,
    type_decompose,
)
from .diagram import CoxeterSystem, Infinity
from .polytopes import FaceLattice, PolytopeError, truncation_facet_id

_TOL = 1e-9
#: Vertex-incidence threshold for form values at unit kernel vectors.
_TIGHT = 1e-7
#: Barycentric margin for the edge-interior test in truncatability.
_EDGE_EPS = 1e-7


class RealizeError(ValueError):
    """Realization construction or precondition failure."""


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Realization:
    """Mirror data of a projective Coxeter polytope.

    ``forms`` maps each facet to its covector α_s on R^{d+1} and ``poles``
    to its pole b_s, normalized so α_s(b_s) = 2.  ``vertex_points`` maps
    each lattice vertex record to a chart representative with
    Σ_s α_s(p) = −1; ``interior`` is a certified interior point of the
    cone slice on the same chart.  ``cartan`` is the source matrix when
    the realization came from one (geometric truncations have none), and
    ``orders`` keeps the finite ridge orders used for relation checks.
    """

    dimension: int
    names: tuple
    forms: dict
    poles: dict
    cartan: Optional[CartanMatrix]
    lattice: FaceLattice
    vertex_points: dict
    interior: np.ndarray
    orders: dict
    tits_form: Optional[np.ndarray] = None

    def form_matrix(self) -> np.ndarray:
        return np.stack([self.forms[s] for s in self.names])

    def pole_matrix(self) -> np.ndarray:
        return np.stack([self.poles[s] for s in self.names])

    def coupling(self, s, t) -> float:
        """The geometric Cartan entry α_s(b_t)."""
        return float(self.forms[s] @ self.poles[t])

    def coupling_matrix(self) -> np.ndarray:
        return self.form_matrix() @ self.pole_matrix().T

    def chart_point(self, v: np.ndarray) -> np.ndarray:
        """Rescale a cone point onto the chart Σ_s α_s = −1."""
        total = float(self.form_matrix().sum(axis=0) @ v)
        if abs(total) <= _TOL * max(1.0, float(np.abs(v).max())):
            raise RealizeError("point lies on the chart's hyperplane at infinity")
        return v / (-total)

    def to_json(self) -> dict:
        return {
            "dim": self.dimension,
            "alpha": [[float(x) for x in self.forms[s]] for s in self.names],
            "b": [[float(x) for x in self.poles[s]] for s in self.names],
            "cartan": self.cartan.to_json() if self.cartan is not None else None,
        }


def _interior_witness(F: np.ndarray) -> np.ndarray:
    """Chebyshev-style center of the cone slice on the chart Σα = −1."""
    n, k = F.shape
    norms = np.linalg.norm(F, axis=1)
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([F, norms[:, None]])
    a_eq = np.hstack([F.sum(axis=0)[None, :], np.zeros((1, 1))])
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=np.zeros(n),
        A_eq=a_eq,
        b_eq=np.array([-1.0]),
        bounds=[(None, None)] * (k + 1),
        method="highs",
    )
    if not res.success or res.x[-1] <= _TOL:
        raise RealizeError("the form cone has empty interior")
    return res.x[:-1]


def _enumerate_vertices(names, F: np.ndarray, d: int):
    """All cone vertices: kernel points of d independent forms that lie on
    the nonpositive side of every other form.  Returns record -> unit
    representative (not yet chart-normalized)."""
    n = len(names)
    found = {}
    for combo in itertools.combinations(range(n), d):
        sub = F[list(combo)]
        sv = np.linalg.svd(sub, compute_uv=False)
        if sv[-1] <= _TOL * sv[0]:
            continue
        v = np.linalg.svd(sub)[2][-1]
        vals = F @ v
        thresholds = _TIGHT * np.maximum(1.0, np.linalg.norm(F, axis=1))
        if (vals > thresholds).any():
            if (vals < -thresholds).any():
                continue
            v, vals = -v, -vals
        if (vals > thresholds).any():
            continue
        tight = frozenset(names[i] for i in range(n) if abs(vals[i]) <= thresholds[i])
        imax = int(np.argmax(np.abs(v)))
        rep = v if v[imax] > 0 else -v
        key = tuple(np.round(rep, 6))
        if key in found:
            old_tight, _ = found[key]
            found[key] = (old_tight | tight, rep)
        else:
            found[key] = (tight, rep)
    return {tight: rep for tight, rep in found.values()}


def _face_dim(points, rel_tol=_TOL) -> int:
    mat = np.stack(points)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] == 0.0:
        return -1
    return int(np.sum(sv > rel_tol * sv[0])) - 1


def _assemble_lattice(d: int, names, verts) -> FaceLattice:
    """Face lattice from vertex-facet incidence by Galois closure: each
    face is the intersection of the tight sets of the vertices it spans."""
    faces = {}
    tights = list(verts)
    for r in range(1, len(names) + 1):
        for combo in itertools.combinations(names, r):
            T = frozenset(combo)
            members = [t for t in tights if T <= t]
            if not members:
                continue
            closure = frozenset.intersection(*members)
            if closure in faces:
                continue
            dim = _face_dim([verts[t] for t in members])
            if 0 <= dim < d:
                faces[closure] = dim
    try:
        return FaceLattice(d, names, faces).check()
    except PolytopeError as exc:
        raise RealizeError(f"vertex data does not assemble into a polytope: {exc}")


def _finite_orders(system: CoxeterSystem) -> dict:
    out = {}
    for s, t in itertools.combinations(system.generators, 2):
        m = system.order(s, t)
        if not isinstance(m, Infinity):
            out[frozenset((s, t))] = int(m)
    return out


def _build(names, F, B, d, cartan, orders, tits_form=None) -> Realization:
    names = tuple(names)
    couplings = F @ B.T
    scale = max(1.0, float(np.abs(couplings).max()))
    diag = np.diag(couplings).copy()
    if np.max(np.abs(diag - 2.0)) > _TOL * scale:
        raise RealizeError("poles cannot be normalized to α_s(b_s) = 2")
    B = B * (2.0 / diag)[:, None]
    if cartan is not None:
        err = float(np.max(np.abs(F @ B.T - cartan.entries)))
        if err > _TOL * scale:
            raise RealizeError(f"factorization misses the Cartan matrix by {err}")
    interior = _interior_witness(F)
    verts = _enumerate_vertices(names, F, d)
    if not verts:
        raise RealizeError("no vertices found; cone is not pointed over the chart")
    lattice = _assemble_lattice(d, names, verts)
    chart_total = F.sum(axis=0)
    points = {}
    for tight, rep in verts.items():
        total = float(chart_total @ rep)
        points[tight] = rep / (-total)
    return Realization(
        dimension=d,
        names=names,
        forms={s: F[i].copy() for i, s in enumerate(names)},
        poles={s: B[i].copy() for i, s in enumerate(names)},
        cartan=cartan,
        lattice=lattice,
        vertex_points=points,
        interior=interior,
        orders=dict(orders),
        tits_form=tits_form,
    )


def realize_cartan(A: CartanMatrix) -> Realization:
    """Factor A = F·Bᵀ and assemble the mirror polytope.

    The first d+1 linearly independent rows of A become the dual-basis
    form coordinates (pivoted elimination); the poles are read off the
    columns, and any dependent row's form is solved by least squares.
    """
    deco = type_decompose(A)
    if len(deco.components) != 1:
        raise RealizeError("Cartan matrix must be irreducible")
    if deco.components[0].kind != "Negative":
        raise RealizeError(
            f"Cartan matrix must be of negative type, got {deco.components[0].kind}"
        )
    n = A.size
    r = matrix_rank(A)
    if r not in (n, n - 1):
        raise RealizeError(f"rank {r} must be full or one below the size {n}")
    d = r - 1
    pivots = []
    for i in range(n):
        cand = A.entries[pivots + [i]]
        sv = np.linalg.svd(cand, compute_uv=False)
        if sv[-1] > _TOL * sv[0]:
            pivots.append(i)
        if len(pivots) == r:
            break
    if len(pivots) != r:
        raise RealizeError("could not select independent pivot rows")
    B = A.entries[pivots, :].T.copy()
    F = np.zeros((n, r))
    for k, i in enumerate(pivots):
        F[i, k] = 1.0
    rest = [i for i in range(n) if i not in pivots]
    for i in rest:
        F[i] = np.linalg.lstsq(A.entries[pivots, :].T, A.entries[i], rcond=None)[0]
    return _build(A.system.generators, F, B, d, A, _finite_orders(A.system))


def tits_simplex(W: CoxeterSystem) -> Realization:
    """The canonical simplex realization on the dual basis.

    Forms are the standard covectors, poles the Gram columns, so the
    couplings equal Cos(W) and the polytope is the coordinate simplex.
    The symmetric Gram matrix doubles as the invariant bilinear form and
    is returned in ``tits_form``.
    """
    if not W.is_bound:
        raise RealizeError("system has unbound parameters")
    if W.rank < 2:
        raise RealizeError("Tits simplex needs rank >= 2")
    G = gram_cartan(W)
    n = W.rank
    F = np.eye(n)
    B = G.entries.T.copy()
    return _build(
        W.generators, F, B, n - 1, G, _finite_orders(W), tits_form=G.entries.copy()
    )


def realization_from_json(data) -> Realization:
    F = np.array(data["alpha"], dtype=float)
    B = np.array(data["b"], dtype=float)
    cartan = None
    orders = {}
    if data.get("cartan") is not None:
        cartan = CartanMatrix.from_json(data["cartan"])
        names = cartan.system.generators
        orders = _finite_orders(cartan.system)
    else:
        names = tuple(str(i + 1) for i in range(F.shape[0]))
    return _build(names, F, B, int(data["dim"]), cartan, orders)


# ---------------------------------------------------------------------------
# Reflections
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReflectionSet:
    """The facet reflections σ_s = Id − b_s·α_s with their relation report.

    ``relation_errors`` maps each checked finite-order pair to
    ‖(σ_sσ_t)^m − Id‖_∞.
    """

    names: tuple
    matrices: dict
    relation_errors: dict


def reflections_of(R: Realization, check: bool = True) -> ReflectionSet:
    k = R.dimension + 1
    eye = np.eye(k)
    mats = {s: eye - np.outer(R.poles[s], R.forms[s]) for s in R.names}
    for s, m in mats.items():
        if np.max(np.abs(m @ m - eye)) > _TOL * 10:
            raise RealizeError(f"σ_{s}² is not the identity")
        if abs(np.linalg.det(m) + 1.0) > _TOL * 10:
            raise RealizeError(f"det σ_{s} != -1")
    errors = {}
    for pair, m in sorted(R.orders.items(), key=lambda kv: sorted(kv[0])):
        s, t = sorted(pair)
        power = np.linalg.matrix_power(mats[s] @ mats[t], m)
        err = float(np.max(np.abs(power - eye)))
        errors[pair] = err
        if check and err > 1e-7:
            raise RealizeError(
                f"relation (σ_{s}σ_{t})^{m} misses the identity by {err}"
            )
    return ReflectionSet(R.names, mats, errors)


# ---------------------------------------------------------------------------
# Vertex geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VertexGeometry:
    """Per-vertex link matrices and elliptic/parabolic/loxodromic classes."""

    classes: dict
    links: dict
    positions: dict
    perfect: bool
    quasi_perfect: bool
    two_perfect: bool

    def count(self, kind: str) -> int:
        return sum(1 for c in self.classes.values() if c == kind)

    def of_class(self, kind: str):
        return sorted(
            (v for v, c in self.classes.items() if c == kind),
            key=lambda r: sorted(r),
        )


def _submatrix_components(mat: np.ndarray):
    n = mat.shape[0]
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and (abs(mat[i, j]) > _TOL or abs(mat[j, i]) > _TOL):
                    seen[j] = True
                    stack.append(j)
        yield sorted(comp)


def _numeric_rank(mat: np.ndarray, rel_tol=_TOL) -> int:
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def _link_class(link: np.ndarray, d: int, tol: float = 1e-7) -> str:
    kinds = set()
    for comp in _submatrix_components(link):
        ev = smallest_real_eigenvalue(link[np.ix_(comp, comp)])
        kinds.add("pos" if ev > tol else "neg" if ev < -tol else "zero")
    if kinds == {"pos"}:
        return "elliptic"
    if kinds == {"zero"} and _numeric_rank(link) == d - 1:
        return "parabolic"
    return "loxodromic"


def classify_vertices(R: Realization) -> VertexGeometry:
    """Link Cartan matrices and their types for every realized vertex.

    A vertex is elliptic when every component of its link matrix is of
    positive type, parabolic when all components are of zero type and the
    link matrix has rank d−1, loxodromic otherwise.  The polytope is
    perfect when all vertices are elliptic, quasi-perfect when none is
    loxodromic, and 2-perfect when every edge's facet set is spherical
    (equivalently, every vertex link is itself perfect).
    """
    C = R.coupling_matrix()
    idx = {s: i for i, s in enumerate(R.names)}
    classes, links = {}, {}
    for v in R.lattice.vertices():
        rows = [idx[s] for s in sorted(v, key=R.names.index)]
        link = C[np.ix_(rows, rows)]
        links[v] = link
        classes[v] = _link_class(link, R.dimension)
    two_perfect = True
    for rec, dim in R.lattice.faces.items():
        if dim != 1:
            continue
        rows = [idx[s] for s in rec]
        sub = C[np.ix_(rows, rows)]
        for comp in _submatrix_components(sub):
            if smallest_real_eigenvalue(sub[np.ix_(comp, comp)]) <= 1e-7:
                two_perfect = False
    values = set(classes.values())
    return VertexGeometry(
        classes=classes,
        links=links,
        positions=dict(R.vertex_points),
        perfect=values <= {"elliptic"},
        quasi_perfect="loxodromic" not in values,
        two_perfect=two_perfect,
    )


# ---------------------------------------------------------------------------
# Truncation
# ---------------------------------------------------------------------------


def _pole_hyperplane(R: Realization, v):
    rows = np.stack([R.poles[s] for s in sorted(v, key=R.names.index)])
    sv = np.linalg.svd(rows, compute_uv=False)
    span_dim = int(np.sum(sv > _TOL * sv[0]))
    if span_dim != R.dimension:
        return span_dim, None
    omega = np.linalg.svd(rows)[2][-1]
    if float(omega @ R.interior) > 0:
        omega = -omega
    return span_dim, omega


def truncatable(R: Realization, v):
    """Whether the vertex can be cut off by its pole hyperplane Π_v.

    True when span{b_s : s ∈ S_v} is a hyperplane and Π_v crosses every
    closed edge at v in a single interior point.  The certificate records
    the span dimension and the barycentric crossing parameter per edge.
    """
    v = frozenset(v)
    if v not in R.vertex_points:
        raise RealizeError(f"not a realized vertex: {sorted(v)}")
    span_dim, omega = _pole_hyperplane(R, v)
    cert = {"span_dim": span_dim, "edges": {}}
    if omega is None:
        return False, cert
    p_v = R.vertex_points[v]
    ok = True
    for rec, dim in R.lattice.faces.items():
        if dim != 1 or not rec <= v:
            continue
        others = [w for w in R.vertex_points if rec <= w and w != v]
        if len(others) != 1:
            raise RealizeError(f"edge {sorted(rec)} does not have two endpoints")
        p_w = R.vertex_points[others[0]]
        a, b = float(omega @ p_v), float(omega @ p_w)
        if abs(a - b) <= _TOL:
            ok = False
            cert["edges"][rec] = None
            continue
        t = a / (a - b)
        cert["edges"][rec] = t
        if not (_EDGE_EPS < t < 1.0 - _EDGE_EPS):
            ok = False
    return ok, cert


def truncate_geometric(R: Realization, v) -> Realization:
    """Cut the vertex by Π_v; the new facet's pole is the vertex itself.

    The new couplings with the facets through v vanish (orthogonal new
    ridges), the old mirrors are untouched, and the lattice is
    re-enumerated geometrically.
    """
    v = frozenset(v)
    ok, cert = truncatable(R, v)
    if not ok:
        raise RealizeError(f"vertex {sorted(v)} is not truncatable: {cert}")
    _, omega = _pole_hyperplane(R, v)
    p = R.vertex_points[v]
    pole = p * (2.0 / float(omega @ p))
    for s in sorted(v):
        if abs(float(omega @ R.poles[s])) > _TOL * 10 or abs(
            float(R.forms[s] @ pole)
        ) > _TOL * 10:
            raise RealizeError("truncation couplings with the cut facets persist")
    t_id = truncation_facet_id(v)
    if t_id in R.names:
        raise RealizeError(f"facet id {t_id!r} already taken")
    names = R.names + (t_id,)
    F = np.vstack([R.form_matrix(), omega[None, :]])
    B = np.vstack([R.pole_matrix(), pole[None, :]])
    orders = dict(R.orders)
    for s in v:
        orders[frozenset((s, t_id))] = 2
    return _build(names, F, B, R.dimension, None, orders)


# ---------------------------------------------------------------------------
# Orbit exploration
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrbitApproximation:
    """ShortLex word list with canonical matrices and polytope images.

    ``tiles[i]`` stacks the images of the base chart vertices under
    ``matrices[i]`` as cone points; ``hull_samples`` are chart points of
    tile vertices on the boundary of the sampled union.
    """

    words: tuple
    matrices: tuple
    tiles: tuple
    hull_samples: np.ndarray
    overlap_checks: int
    overlap_violations: int

    @property
    def count(self) -> int:
        return len(self.words)


class _MatrixStore:
    """Deduplicating store of group-element matrices.

    Elements are compared entrywise at 1e-9: reflection words that agree
    as group elements agree to machine precision, while distinct elements
    differ at unit scale.  Note ±g are distinct elements on the
    projective sphere (for even dihedral orders the half-turn word equals
    −Id), so no sign normalization is applied.
    """

    def __init__(self, k: int):
        self._data = np.empty((0, k * k))

    def add(self, mat: np.ndarray) -> bool:
        flat = mat.flatten()
        if self._data.shape[0]:
            dist = np.abs(self._data - flat).max(axis=1)
            if float(dist.min()) <= _TOL:
                return False
        self._data = np.vstack([self._data, flat])
        return True


def orbit_explore(R: Realization, L: int, samples: int = 10000, seed: int = 0) -> OrbitApproximation:
    """Words up to length L with deduplicated matrices and tile checks.

    Deduplication compares matrices entrywise at 1e-9.  ``samples``
    random interior points of random tiles are tested for strict
    containment in another tile, which a genuine mirror tiling forbids.
    """
    if L < 0:
        raise RealizeError("word length bound must be >= 0")
    refl = reflections_of(R, check=False)
    k = R.dimension + 1
    eye = np.eye(k)
    store = _MatrixStore(k)
    store.add(eye)
    words = [()]
    mats = [eye]
    frontier = [((), eye)]
    for _ in range(L):
        nxt = []
        for word, mat in frontier:
            for s in R.names:
                if word and word[-1] == s:
                    continue
                cand = mat @ refl.matrices[s]
                if store.add(cand):
                    new_word = word + (s,)
                    words.append(new_word)
                    mats.append(cand)
                    nxt.append((new_word, cand))
        frontier = nxt
    n_gens = len(R.names)
    bound = 1 + sum(
        n_gens * (n_gens - 1) ** (max(0, ell - 1)) for ell in range(1, L + 1)
    )
    if len(words) > bound:
        raise RealizeError("orbit exceeded the free-product growth bound")

    chart_verts = np.stack(
        [R.vertex_points[v] for v in R.lattice.vertices()]
    )
    tiles = tuple(chart_verts @ mat.T for mat in mats)
    F = R.form_matrix()
    inverses = [np.linalg.inv(mat) for mat in mats]
    rng = np.random.default_rng(seed)
    checks = violations = 0
    if len(mats) > 1 and samples > 0:
        for _ in range(samples):
            i, j = rng.choice(len(mats), size=2, replace=False)
            weights = rng.dirichlet(np.ones(chart_verts.shape[0]))
            x = mats[i] @ (weights @ chart_verts)
            y = inverses[j] @ x
            vals = F @ y
            norm = float(np.linalg.norm(y))
            checks += 1
            if norm > 0 and (vals < -1e-7 * norm).all():
                violations += 1

    cloud = np.vstack(tiles)
    chart_total = F.sum(axis=0)
    sums = cloud @ chart_total
    good = np.abs(sums) > _TOL * np.maximum(1.0, np.abs(cloud).max(axis=1))
    chart_cloud = cloud[good] / (-sums[good])[:, None]
    chart_cloud = np.unique(np.round(chart_cloud, 6), axis=0)
    hull = _hull_boundary(chart_cloud, chart_total, R.dimension)
    return OrbitApproximation(
        words=tuple(words),
        matrices=tuple(mats),
        tiles=tiles,
        hull_samples=hull,
        overlap_checks=checks,
        overlap_violations=violations,
    )


def _hull_boundary(chart_cloud: np.ndarray, chart_total: np.ndarray, d: int):
    """Chart points of the cloud that lie on its convex hull boundary."""
    if chart_cloud.shape[0] <= d + 1:
        return chart_cloud
    base = chart_cloud[0]
    basis = np.linalg.svd(chart_total[None, :])[2][1:].T
    coords = (chart_cloud - base) @ basis
    coords = coords[:, :d]
    if d == 1:
        order = np.argsort(coords[:, 0])
        return chart_cloud[[order[0], order[-1]]]
    try:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(coords)
        return chart_cloud[sorted(set(hull.vertices))]
    except Exception:
        return chart_cloud


# ---------------------------------------------------------------------------
# Hyperbolicity and the Hilbert metric
# ---------------------------------------------------------------------------


def is_hyperbolic(R: Realization) -> bool:
    """Whether the reflection group preserves a Lorentzian form.

    True exactly when the Cartan matrix is symmetrizable and the
    symmetrized matrix has signature (d, 1).
    """
    if R.cartan is None:
        raise RealizeError("realization carries no Cartan matrix")
    diag = symmetrize(R.cartan)
    if diag is None:
        return False
    sym = (diag[:, None] * R.cartan.entries) / diag[None, :]
    ev = np.linalg.eigvalsh(sym)
    scale = max(1.0, float(np.abs(ev).max()))
    neg = int(np.sum(ev < -_TOL * scale))
    pos = int(np.sum(ev > _TOL * scale))
    return neg == 1 and pos == R.dimension


def hilbert_distance(contains, x, y, max_doublings: int = 60) -> float:
    """Hilbert distance ½·log[p:x:y:q] inside a convex region.

    ``contains`` is the region's membership test; the chord through x and
    y is traced by doubling then bisection to find the boundary points p
    (behind x) and q (beyond y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not contains(x) or not contains(y):
        raise RealizeError("both points must be interior to the region")
    if np.linalg.norm(y - x) <= 1e-15:
        return 0.0
    direction = y - x

    def boundary(t_in, step):
        t_out = t_in + step
        for _ in range(max_doublings):
            if not contains(x + t_out * direction):
                break
            t_in, t_out = t_out, t_in + (t_out - t_in) * 2
        else:
            raise RealizeError("region is unbounded along the chord")
        for _ in range(200):
            mid = 0.5 * (t_in + t_out)
            if contains(x + mid * direction):
                t_in = mid
            else:
                t_out = mid
        return 0.5 * (t_in + t_out)

    t_q = boundary(1.0, 1.0)
    t_p = boundary(0.0, -1.0)
    ratio = (t_q * (1.0 - t_p)) / ((t_q - 1.0) * (-t_p))
    return 0.5 * math.log(ratio)


# ---------------------------------------------------------------------------
# Equivalence matching and geometry export
# ---------------------------------------------------------------------------


def match_realizations(R1: Realization, R2: Realization):
    """Change of basis g with g·p₁(v) ∝ p₂(v) matched by vertex record.

    Solves the homogeneous system g·p₁(v) − c_v·p₂(v) = 0 by SVD and
    returns (g, residual), the residual being the worst chart distance
    between mapped and target vertices.
    """
    if set(R1.vertex_points) != set(R2.vertex_points):
        raise RealizeError("realizations have different vertex records")
    k = R1.dimension + 1
    records = sorted(R1.vertex_points, key=lambda r: sorted(r))
    rows = []
    for i, rec in enumerate(records):
        p1, p2 = R1.vertex_points[rec], R2.vertex_points[rec]
        for r in range(k):
            row = np.zeros(k * k + len(records))
            row[r * k : (r + 1) * k] = p1
            row[k * k + i] = -p2[r]
            rows.append(row)
    system = np.stack(rows)
    sol = np.linalg.svd(system)[2][-1]
    g = sol[: k * k].reshape(k, k)
    residual = 0.0
    for rec in records:
        image = g @ R1.vertex_points[rec]
        target = R2.vertex_points[rec]
        image = R2.chart_point(image)
        residual = max(residual, float(np.max(np.abs(image - target))))
    return g, residual


def orbit_to_ply(R: Realization, orbit: OrbitApproximation, slice_chart: bool = False) -> str:
    """ASCII PLY triangle soup of the orbit tiles.

    For d = 3 every tile facet is fan-triangulated in chart coordinates;
    for d = 4 pass ``slice_chart=True`` to cut the tiles with the chart
    hyperplane through the interior witness and export the 3-dimensional
    slice hulls.
    """
    if R.dimension == 3 and not slice_chart:
        verts, tris = _ply_tiles_3d(R, orbit)
    elif R.dimension == 4 and slice_chart:
        verts, tris = _ply_slices_4d(R, orbit)
    else:
        raise RealizeError(
            "PLY export supports d = 3 tiles or d = 4 chart slices"
        )
    lines = [
        "ply",
        "format ascii 1.0",
        f"element vertex {len(verts)}",
        "property float x",
        "property float y",
        "property float z",
        f"element face {len(tris)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    for p in verts:
        lines.append(" ".join(f"{c:.6f}" for c in p))
    for tri in tris:
        lines.append("3 " + " ".join(str(i) for i in tri))
    return "\n".join(lines) + "\n"


def _ply_tiles_3d(R: Realization, orbit: OrbitApproximation):
    facet_cycles = []
    vrecs = R.lattice.vertices()
    vindex = {rec: i for i, rec in enumerate(vrecs)}
    for f in R.names:
        on = [vindex[rec] for rec in vrecs if f in rec]
        facet_cycles.append(on)
    verts, tris = [], []
    chart_total = R.form_matrix().sum(axis=0)
    basis = np.linalg.svd(chart_total[None, :])[2][1:].T[:, :3]
    for tile in orbit.tiles:
        sums = tile @ chart_total
        if (np.abs(sums) <= _TOL * np.maximum(1.0, np.abs(tile).max())).any():
            continue
        chart = tile / (-sums)[:, None]
        coords = chart @ basis
        offset = len(verts)
        verts.extend(coords.tolist())
        for cycle in facet_cycles:
            pts = coords[cycle]
            center = pts.mean(axis=0)
            normal_basis = np.linalg.svd(pts - center)[2][:2]
            flat = (pts - center) @ normal_basis.T
            order = np.argsort(np.arctan2(flat[:, 1], flat[:, 0]))
            ring = [cycle[i] for i in order]
            for a, b in zip(ring[1:-1], ring[2:]):
                tris.append((offset + ring[0], offset + a, offset + b))
    return verts, tris


def _ply_slices_4d(R: Realization, orbit: OrbitApproximation):
    from scipy.spatial import ConvexHull

    chart_total = R.form_matrix().sum(axis=0)
    basis = np.linalg.svd(chart_total[None, :])[2][1:].T[:, :4]
    cut = basis[:, 3]
    level = float(R.interior @ cut)
    verts, tris = [], []
    edges = [rec for rec, dim in R.lattice.faces.items() if dim == 1]
    vrecs = R.lattice.vertices()
    pairs = []
    for rec in edges:
        ends = [w for w in vrecs if rec <= w]
        if len(ends) == 2:
            pairs.append(ends)
    base_pts = {rec: R.vertex_points[rec] for rec in vrecs}
    for mat in orbit.matrices:
        cuts = []
        for a, b in pairs:
            pa, pb = mat @ base_pts[a], mat @ base_pts[b]
            try:
                pa, pb = R.chart_point(pa), R.chart_point(pb)
            except RealizeError:
                continue
            fa = float(pa @ cut) - level
            fb = float(pb @ cut) - level
            if fa * fb >= 0:
                continue
            t = fa / (fa - fb)
            cuts.append(pa + t * (pb - pa))
        if len(cuts) < 4:
            continue
        pts3 = (np.stack(cuts) @ basis)[:, :3]
        try:
            hull = ConvexHull(pts3)
        except Exception:
            continue
        offset = len(verts)
        verts.extend(pts3.tolist())
        for simplex in hull.simplices:
            tris.append(tuple(offset + int(i) for i in simplex))
    return verts, tris
