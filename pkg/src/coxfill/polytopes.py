"""Combinatorial polytopes with labeled ridges, and their surgeries.

A face lattice is stored the way reflection-group combinatorics uses it:
every proper face is recorded as the set of facets containing it, together
with its dimension.  On top of that sit ridge labelings (Coxeter orders),
vertex links, the perfect / 2-perfect taxonomy, Dehn filling at prism-link
vertices, truncation of simple vertices, gluing of truncated polytopes,
and face prediction straight from a Cartan matrix.

Non-adjacent facet pairs carry no label; their Coxeter order is infinity
by convention.  A finite order between two facets forces them to span a
ridge, because a spherical pair of reflections always fixes a face.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .diagram import (
    INF,
    CoxeterSystem,
    Infinity,
    UnboundParameterError,
    _natural_key,
    classify_irreducible,
    split_components,
)

_TOL = 1e-9


class PolytopeError(ValueError):
    """Combinatorial precondition failure (bad record, non-simple vertex, ...)."""


class DehnFillError(PolytopeError):
    """The vertex link is not the required prism; carries the link's parts."""

    def __init__(self, message, link_kinds=()):
        super().__init__(message)
        self.link_kinds = tuple(link_kinds)


def _record_key(record):
    return tuple(sorted(_natural_key(f) for f in record))


def _fmt(record):
    return "{" + ", ".join(sorted(record, key=_natural_key)) + "}"


class FaceLattice:
    """Combinatorial d-polytope: facet ids plus facet-subset face records.

    ``faces`` maps each proper face, written as the frozenset of the facets
    containing it, to its dimension.  The dimension is stored rather than
    recomputed because for non-simple vertices (pyramid apices) the size of
    the record no longer determines it.
    """

    __slots__ = ("dimension", "facets", "faces")

    def __init__(self, dimension: int, facets, faces):
        dimension = int(dimension)
        if dimension < 1:
            raise PolytopeError(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self.facets = tuple(str(f) for f in facets)
        facet_set = set(self.facets)
        if len(facet_set) != len(self.facets):
            raise PolytopeError("duplicate facet id")
        cleaned = {}
        for record, dim in dict(faces).items():
            record = frozenset(record)
            if not record or not record <= facet_set:
                raise PolytopeError(f"face record {_fmt(record)} is not a facet subset")
            dim = int(dim)
            if not 0 <= dim < dimension:
                raise PolytopeError(f"face dimension {dim} out of range for d={dimension}")
            cleaned[record] = dim
        self.faces = cleaned
        for f in self.facets:
            if self.faces.get(frozenset((f,))) != dimension - 1:
                raise PolytopeError(f"facet {f!r} is missing its singleton record")

    # -- queries ---------------------------------------------------------

    def has_face(self, record) -> bool:
        return frozenset(record) in self.faces

    def face_dim(self, record) -> int:
        try:
            return self.faces[frozenset(record)]
        except KeyError:
            raise PolytopeError(f"not a face: {_fmt(record)}") from None

    def faces_of_dim(self, k):
        """Records of dimension k, sorted deterministically."""
        return sorted((r for r, d in self.faces.items() if d == k), key=_record_key)

    def vertices(self):
        return self.faces_of_dim(0)

    def ridges(self):
        return self.faces_of_dim(self.dimension - 2) if self.dimension >= 2 else []

    def adjacent(self, s, t) -> bool:
        """Two facets are adjacent exactly when they span a ridge."""
        return frozenset((s, t)) in self.faces

    def non_adjacent_pairs(self):
        out = [
            frozenset(p)
            for p in itertools.combinations(self.facets, 2)
            if frozenset(p) not in self.faces
        ]
        return sorted(out, key=_record_key)

    def f_vector(self):
        """Face counts by dimension 0 .. d-1."""
        counts = [0] * self.dimension
        for dim in self.faces.values():
            counts[dim] += 1
        return tuple(counts)

    def euler_ok(self) -> bool:
        total = sum((-1) ** k * n for k, n in enumerate(self.f_vector()))
        return total == 1 - (-1) ** self.dimension

    def check(self):
        """Validate the structural invariants; returns self."""
        d = self.dimension
        if not self.euler_ok():
            raise PolytopeError(f"Euler check failed: f = {self.f_vector()}")
        for record, dim in self.faces.items():
            if dim == d - 2 and len(record) != 2:
                raise PolytopeError(f"ridge {_fmt(record)} not on exactly 2 facets")
            if dim == 0 and len(record) < d:
                raise PolytopeError(f"vertex {_fmt(record)} on fewer than d facets")
            if dim < d - 1 and not any(
                r < record and k == dim + 1 for r, k in self.faces.items()
            ):
                raise PolytopeError(f"face {_fmt(record)} has no cover face")
            if dim > 0 and not any(
                r > record and k == dim - 1 for r, k in self.faces.items()
            ):
                raise PolytopeError(f"face {_fmt(record)} has no subface")
        return self

    def relabel(self, mapping) -> "FaceLattice":
        """Rename facets via a total mapping (bijective on ids)."""
        return FaceLattice(
            self.dimension,
            [mapping[f] for f in self.facets],
            {frozenset(mapping[f] for f in r): d for r, d in self.faces.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, FaceLattice):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and set(self.facets) == set(other.facets)
            and self.faces == other.faces
        )

    def __hash__(self):
        return hash(
            (self.dimension, frozenset(self.facets), frozenset(self.faces.items()))
        )

    def __repr__(self):
        return (
            f"FaceLattice(dim={self.dimension}, facets={len(self.facets)}, "
            f"faces={len(self.faces)})"
        )


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def simplex(n: int) -> FaceLattice:
    """The n-simplex with facet ids "s1" .. "s{n+1}"."""
    if n < 1:
        raise PolytopeError(f"simplex dimension must be >= 1, got {n}")
    ids = tuple(f"s{i}" for i in range(1, n + 2))
    faces = {}
    for k in range(1, n + 1):
        for rec in itertools.combinations(ids, k):
            faces[frozenset(rec)] = n - k
    return FaceLattice(n, ids, faces)


def simplex_product(e: int, f: int) -> FaceLattice:
    """Face lattice of the product of an e-simplex and an f-simplex.

    Facet ids are "a1".."a{e+1}" and "b1".."b{f+1}"; a face is any pair of
    faces of the factors, recorded as the union of the factor records.
    """
    if e < 1 or f < 1:
        raise PolytopeError("both factors must have dimension >= 1")
    a_ids = tuple("a%d" % i for i in range(1, e + 2))
    b_ids = tuple("b%d" % i for i in range(1, f + 2))
    faces = {}
    for ka in range(e + 1):
        for ta in itertools.combinations(a_ids, ka):
            for kb in range(f + 1):
                if ka == 0 and kb == 0:
                    continue
                for tb in itertools.combinations(b_ids, kb):
                    faces[frozenset(ta + tb)] = (e - ka) + (f - kb)
    return FaceLattice(e + f, a_ids + b_ids, faces)


def pyramid(Q: FaceLattice) -> FaceLattice:
    """Cone over Q: the base keeps Q's combinatorics, the apex joins all sides.

    Each proper face F of Q contributes twice: once inside the base facet
    (same dimension) and once as its own pyramid (dimension + 1).  The apex
    is the vertex lying on every side facet.
    """
    base = "base"
    k = 1
    while base in Q.facets:
        k += 1
        base = f"base{k}"
    d = Q.dimension + 1
    faces = {frozenset((base,)): d - 1}
    for rec, dim in Q.faces.items():
        faces[rec | {base}] = dim
        faces[rec] = dim + 1
    faces[frozenset(Q.facets)] = 0
    return FaceLattice(d, Q.facets + (base,), faces)


# ---------------------------------------------------------------------------
# Labeled polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Seam:
    """Metadata for one gluing interface, enough to cut it open again."""

    pairs: tuple  # ((left facet, matched right facet), ...)
    left_facets: tuple
    right_facets: tuple
    t_left: str  # truncation facet ids consumed by the gluing
    t_right: str


class LabeledPolytope:
    """A face lattice plus a Coxeter order on every ridge.

    Ridge labels live on the size-2 records; pairs of facets with no
    common ridge are non-adjacent and have order infinity implicitly.
    ``seams`` remembers gluing interfaces for :func:`cut_along_seam`.
    """

    __slots__ = ("lattice", "labels", "seams")

    def __init__(self, lattice: FaceLattice, labels, seams=()):
        self.lattice = lattice
        cleaned = {}
        for pair, m in dict(labels).items():
            pair = frozenset(pair)
            if len(pair) != 2 or lattice.faces.get(pair) != lattice.dimension - 2:
                raise PolytopeError(f"label on non-ridge {_fmt(pair)}")
            if not isinstance(m, Infinity):
                m = int(m)
                if m < 2:
                    raise PolytopeError(f"ridge label must be >= 2, got {m}")
            cleaned[pair] = m
        if lattice.dimension >= 2:
            for rec in lattice.ridges():
                if rec not in cleaned:
                    raise PolytopeError(f"unlabeled ridge {_fmt(rec)}")
        self.labels = cleaned
        self.seams = tuple(seams)

    @property
    def dimension(self) -> int:
        return self.lattice.dimension

    @property
    def facets(self):
        return self.lattice.facets

    def vertices(self):
        return self.lattice.vertices()

    def label(self, s, t):
        """Coxeter order between two distinct facets (inf when non-adjacent)."""
        if s == t:
            raise PolytopeError("label needs two distinct facets")
        for x in (s, t):
            if x not in self.lattice.facets:
                raise PolytopeError(f"unknown facet {x!r}")
        return self.labels.get(frozenset((s, t)), INF)

    def system(self) -> CoxeterSystem:
        """The Coxeter system on the facets, with inf on non-adjacent pairs."""
        orders = dict(self.labels)
        for pair in itertools.combinations(self.lattice.facets, 2):
            rec = frozenset(pair)
            if rec not in orders and rec not in self.lattice.faces:
                orders[rec] = INF
        return CoxeterSystem(self.lattice.facets, orders)

    def relabel_facets(self, mapping) -> "LabeledPolytope":
        lattice = self.lattice.relabel(mapping)
        labels = {
            frozenset(mapping[f] for f in rec): m for rec, m in self.labels.items()
        }
        seams = tuple(
            Seam(
                pairs=tuple((mapping[a], mapping[b]) for a, b in s.pairs),
                left_facets=tuple(mapping[f] for f in s.left_facets),
                right_facets=tuple(mapping[f] for f in s.right_facets),
                t_left=mapping[s.t_left],
                t_right=mapping[s.t_right],
            )
            for s in self.seams
        )
        return LabeledPolytope(lattice, labels, seams)

    def __eq__(self, other):
        if not isinstance(other, LabeledPolytope):
            return NotImplemented
        return self.lattice == other.lattice and self.labels == other.labels

    def __hash__(self):
        return hash((self.lattice, frozenset(self.labels.items())))

    def __repr__(self):
        return f"LabeledPolytope({self.lattice!r}, labels={len(self.labels)})"


def label_polytope(lattice: FaceLattice, system: CoxeterSystem, assignment):
    """Transport a Coxeter system onto a face lattice.

    ``assignment`` maps each facet id to a generator; the facets are renamed
    to the generator names and every ridge {s, t} receives the order m_st.
    A finite order between non-adjacent facets is rejected, since a
    spherical pair always spans a ridge.
    """
    if set(assignment) != set(lattice.facets):
        raise PolytopeError("assignment keys must be exactly the facet ids")
    values = [str(assignment[f]) for f in lattice.facets]
    if len(set(values)) != len(values) or set(values) != set(system.generators):
        raise PolytopeError("assignment must be a bijection onto the generators")
    if not system.is_bound:
        raise UnboundParameterError(
            "cannot label with unbound parameters: "
            + ", ".join(system.symbolic_parameters())
        )
    renamed = lattice.relabel({f: str(assignment[f]) for f in lattice.facets})
    labels = {}
    for rec in renamed.ridges():
        s, t = sorted(rec, key=_natural_key)
        labels[rec] = system.order(s, t)
    for s, t in itertools.combinations(renamed.facets, 2):
        if frozenset((s, t)) not in renamed.faces:
            m = system.order(s, t)
            if not isinstance(m, Infinity):
                raise PolytopeError(
                    f"facets {s}, {t} are non-adjacent but m = {m}; "
                    "a finite order forces a ridge"
                )
    return LabeledPolytope(renamed, labels)


def vertex_link(G: LabeledPolytope, v) -> LabeledPolytope:
    """The labeled link of a vertex: the polytope seen from v.

    Link facets are the facets through v; link faces are the faces of G
    through v with dimension shifted down by one; ridge labels restrict.
    """
    v = frozenset(v)
    if G.lattice.faces.get(v) != 0:
        raise PolytopeError(f"not a vertex: {_fmt(v)}")
    sub = [f for f in G.lattice.facets if f in v]
    faces = {rec: dim - 1 for rec, dim in G.lattice.faces.items() if rec < v}
    lattice = FaceLattice(G.dimension - 1, sub, faces)
    labels = {rec: m for rec, m in G.labels.items() if rec < v}
    return LabeledPolytope(lattice, labels)


def is_simplex(L: FaceLattice) -> bool:
    """Whether L is combinatorially the simplex of its dimension."""
    n = L.dimension
    if len(L.facets) != n + 1:
        return False
    want = {}
    for k in range(1, n + 1):
        for rec in itertools.combinations(L.facets, k):
            want[frozenset(rec)] = n - k
    return L.faces == want


def _prism_split(L: FaceLattice):
    """Split a product of a segment and a simplex into (ends, squares).

    Returns the pair of simplex-end facets and the tuple of remaining
    facets, or None when L is not such a prism.  Needs dimension >= 3 so
    that the end pair is the unique non-adjacent one.
    """
    p = L.dimension
    if p < 3 or len(L.facets) != p + 2:
        return None
    non_adj = L.non_adjacent_pairs()
    if len(non_adj) != 1:
        return None
    ends = tuple(sorted(non_adj[0], key=_natural_key))
    squares = tuple(f for f in L.facets if f not in non_adj[0])
    want = {}
    for x in ((), (ends[0],), (ends[1],)):
        for k in range(p):
            for T in itertools.combinations(squares, k):
                rec = frozenset(x + T)
                if rec:
                    want[rec] = (1 - len(x)) + (p - 1 - k)
    if L.faces != want:
        return None
    return ends, squares


# ---------------------------------------------------------------------------
# Perfectness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerfectnessReport:
    """Vertex-by-vertex classification plus the two headline flags.

    Classes are "spherical", "affine", "Lanner" and "large-other"; the
    polytope is perfect when every vertex is spherical and 2-perfect when
    every vertex link is itself perfect.
    """

    vertex_labels: dict
    perfect: bool
    two_perfect: bool

    def vertices_of_class(self, name):
        return sorted(
            (v for v, c in self.vertex_labels.items() if c == name), key=_record_key
        )

    def non_spherical(self):
        return sorted(
            (v for v, c in self.vertex_labels.items() if c != "spherical"),
            key=_record_key,
        )


def _vertex_class(G: LabeledPolytope, v) -> str:
    W_v = G.system().subsystem(v)
    comps = split_components(W_v)
    labels = [classify_irreducible(c) for c in comps]
    if all(lab.kind == "Spherical" for lab in labels):
        return "spherical"
    link = vertex_link(G, v).lattice
    if is_simplex(link):
        if len(labels) == 1 and labels[0].kind == "Lanner":
            return "Lanner"
        if len(labels) == 1 and labels[0].kind == "Affine":
            return "affine"
        return "large-other"
    split = _prism_split(link)
    if split is not None and len(comps) == 2:
        ends, squares = split
        by_set = {frozenset(c.generators): lab for c, lab in zip(comps, labels)}
        d = G.dimension
        end_lab = by_set.get(frozenset(ends))
        sq_lab = by_set.get(frozenset(squares))
        if (
            end_lab is not None
            and sq_lab is not None
            and end_lab.catalog_name == "tilde_A_1"
            and sq_lab.catalog_name == f"tilde_A_{d - 2}"
        ):
            return "affine"
    return "large-other"


def perfectness_report(G: LabeledPolytope) -> PerfectnessReport:
    """Classify every vertex and set the perfect / 2-perfect flags."""
    if G.dimension <= 1:
        return PerfectnessReport({}, True, True)
    vertex_labels = {v: _vertex_class(G, v) for v in G.lattice.vertices()}
    perfect = all(c == "spherical" for c in vertex_labels.values())
    two_perfect = all(
        perfectness_report(vertex_link(G, v)).perfect for v in vertex_labels
    )
    return PerfectnessReport(vertex_labels, perfect, two_perfect)


# ---------------------------------------------------------------------------
# Dehn filling
# ---------------------------------------------------------------------------


def dehn_fill(G: LabeledPolytope, v, m: int) -> LabeledPolytope:
    """Fill a prism-link vertex: replace v by a new ridge labeled m.

    The link of v must be a prism whose simplex ends form an infinite-order
    pair and whose squares carry an all-3 cycle, i.e. the link group is
    tilde_A_1 x tilde_A_{d-2}.  The end facets become adjacent along the
    new ridge; :func:`collapse_ridge` undoes the surgery.
    """
    d = G.dimension
    v = frozenset(v)
    if G.lattice.faces.get(v) != 0:
        raise PolytopeError(f"not a vertex: {_fmt(v)}")
    if isinstance(m, Infinity) or int(m) < 2:
        raise PolytopeError(f"filling order must be a finite integer >= 2, got {m}")
    m = int(m)
    comps = split_components(G.system().subsystem(v))
    names = tuple(
        (lab.catalog_name or lab.kind)
        for lab in (classify_irreducible(c) for c in comps)
    )
    split = _prism_split(vertex_link(G, v).lattice)
    if split is None:
        raise DehnFillError(
            f"link of vertex {_fmt(v)} is not a prism; its Coxeter components "
            "are " + ", ".join(names),
            names,
        )
    ends, squares = split
    by_set = {frozenset(c.generators): n for c, n in zip(comps, names)}
    if not (
        len(comps) == 2
        and by_set.get(frozenset(ends)) == "tilde_A_1"
        and by_set.get(frozenset(squares)) == f"tilde_A_{d - 2}"
    ):
        raise DehnFillError(
            f"link of vertex {_fmt(v)} has Coxeter components "
            + ", ".join(names)
            + f"; filling needs tilde_A_1 x tilde_A_{d - 2}",
            names,
        )
    pair = frozenset(ends)
    faces = dict(G.lattice.faces)
    del faces[v]
    for k in range(len(squares)):
        for T in itertools.combinations(squares, k):
            faces[pair | frozenset(T)] = d - 2 - k
    labels = dict(G.labels)
    labels[pair] = m
    return LabeledPolytope(FaceLattice(d, G.lattice.facets, faces), labels, G.seams)


def collapse_ridge(G: LabeledPolytope, ridge) -> LabeledPolytope:
    """Collapse a ridge to a pyramid apex (the inverse of dehn_fill)."""
    pair = frozenset(ridge)
    if len(pair) != 2 or G.lattice.faces.get(pair) != G.dimension - 2:
        raise PolytopeError(f"not a ridge: {_fmt(pair)}")
    apex = set(pair)
    faces = {}
    for rec, dim in G.lattice.faces.items():
        if rec >= pair:
            apex |= rec
        else:
            faces[rec] = dim
    faces[frozenset(apex)] = 0
    labels = {rec: m for rec, m in G.labels.items() if rec != pair}
    lattice = FaceLattice(G.dimension, G.lattice.facets, faces)
    return LabeledPolytope(lattice, labels, G.seams)


# ---------------------------------------------------------------------------
# Truncation and gluing
# ---------------------------------------------------------------------------


def truncation_facet_id(v) -> str:
    """Deterministic, identifier-safe facet id for the truncation of v."""
    return "t_" + "_".join(sorted(v, key=_natural_key))


def truncate_labeled(G: LabeledPolytope, V) -> LabeledPolytope:
    """Truncate simple vertices: each becomes a facet, new ridges labeled 2.

    Old labels are preserved; each truncated vertex in dimension d adds one
    facet and d new ridges of order 2 (perpendicular cuts).
    """
    verts = sorted({frozenset(v) for v in V}, key=_record_key)
    d = G.dimension
    facets = list(G.lattice.facets)
    faces = dict(G.lattice.faces)
    labels = dict(G.labels)
    for v in verts:
        if faces.get(v) != 0:
            raise PolytopeError(f"not a vertex: {_fmt(v)}")
        if len(v) != d or any(
            frozenset(rec) not in faces
            for k in range(1, d)
            for rec in itertools.combinations(sorted(v, key=_natural_key), k)
        ):
            raise PolytopeError(f"vertex {_fmt(v)} is not simple")
        t = truncation_facet_id(v)
        if t in facets:
            raise PolytopeError(f"facet id {t!r} already taken")
        facets.append(t)
        del faces[v]
        for rec, dim in list(faces.items()):
            if rec < v:
                faces[rec | {t}] = dim - 1
        faces[frozenset((t,))] = d - 1
        for f in v:
            labels[frozenset((f, t))] = 2
    return LabeledPolytope(FaceLattice(d, facets, faces), labels, G.seams)


def _is_link_iso(L1: LabeledPolytope, L2: LabeledPolytope, iso) -> bool:
    if len(L1.lattice.faces) != len(L2.lattice.faces):
        return False
    for rec, dim in L1.lattice.faces.items():
        img = frozenset(iso[f] for f in rec)
        if L2.lattice.faces.get(img) != dim:
            return False
    W1, W2 = L1.system(), L2.system()
    for s, t in itertools.combinations(L1.lattice.facets, 2):
        if W1.order(s, t) != W2.order(iso[s], iso[t]):
            return False
    return True


def link_isomorphisms(G1: LabeledPolytope, v1, G2: LabeledPolytope, v2):
    """All label-preserving lattice isomorphisms link(G1, v1) -> link(G2, v2)."""
    v1, v2 = frozenset(v1), frozenset(v2)
    if len(v1) != len(v2):
        return []
    L1, L2 = vertex_link(G1, v1), vertex_link(G2, v2)
    a = sorted(v1, key=_natural_key)
    out = []
    for perm in itertools.permutations(sorted(v2, key=_natural_key)):
        iso = dict(zip(a, perm))
        if _is_link_iso(L1, L2, iso):
            out.append(iso)
    return out


def glue_labeled(G1: LabeledPolytope, v1, G2: LabeledPolytope, v2, iso):
    """Glue two polytopes truncated at simple vertices v1 and v2.

    Both vertices are truncated, the truncation facets are identified via
    ``iso`` and disappear into the interior, so the result has
    |facets(G1)| + |facets(G2)| facets.  The second polytope's facets get a
    "p" suffix.  Facets that met v1 become adjacent to their iso partners
    along new ridges labeled 2, and a :class:`Seam` records the interface.
    """
    v1, v2 = frozenset(v1), frozenset(v2)
    d = G1.dimension
    if G2.dimension != d:
        raise PolytopeError("cannot glue polytopes of different dimensions")
    iso = {str(k): str(w) for k, w in dict(iso).items()}
    if set(iso) != set(v1) or set(iso.values()) != set(v2):
        raise PolytopeError("iso must map the facets at v1 onto the facets at v2")
    if not _is_link_iso(vertex_link(G1, v1), vertex_link(G2, v2), iso):
        raise PolytopeError("iso is not a label-preserving link isomorphism")
    left = truncate_labeled(G1, [v1])
    t1 = truncation_facet_id(v1)
    ren = {f: f + "p" for f in G2.lattice.facets}
    G2r = G2.relabel_facets(ren)
    v2r = frozenset(ren[f] for f in v2)
    right = truncate_labeled(G2r, [v2r])
    t2 = truncation_facet_id(v2r)
    pair_map = {f: ren[iso[f]] for f in v1}

    faces = {}
    for rec, dim in left.lattice.faces.items():
        if t1 not in rec:
            faces[rec] = dim
    for rec, dim in right.lattice.faces.items():
        if t2 not in rec:
            faces[rec] = dim
    ordered = sorted(v1, key=_natural_key)
    for k in range(1, d):
        for T in itertools.combinations(ordered, k):
            rec = frozenset(T) | frozenset(pair_map[f] for f in T)
            faces[rec] = d - 1 - k
    facets = [f for f in left.lattice.facets if f != t1] + [
        f for f in right.lattice.facets if f != t2
    ]
    labels = {rec: m for rec, m in left.labels.items() if t1 not in rec}
    labels.update({rec: m for rec, m in right.labels.items() if t2 not in rec})
    for f in v1:
        labels[frozenset((f, pair_map[f]))] = 2
    seam = Seam(
        pairs=tuple((f, pair_map[f]) for f in ordered),
        left_facets=tuple(f for f in left.lattice.facets if f != t1),
        right_facets=tuple(f for f in right.lattice.facets if f != t2),
        t_left=t1,
        t_right=t2,
    )
    lattice = FaceLattice(d, facets, faces)
    return LabeledPolytope(lattice, labels, left.seams + right.seams + (seam,))


def cut_along_seam(G: LabeledPolytope, seam: Seam):
    """Undo one gluing: return the two truncated pieces (left, right)."""
    if seam not in G.seams:
        raise PolytopeError("seam does not belong to this polytope")
    d = G.dimension
    left_set, right_set = set(seam.left_facets), set(seam.right_facets)
    pair_of = dict(seam.pairs)
    lfaces, rfaces = {}, {}
    for rec, dim in G.lattice.faces.items():
        lpart = frozenset(f for f in rec if f in left_set)
        rpart = frozenset(f for f in rec if f in right_set)
        if not rpart:
            lfaces[rec] = dim
        elif not lpart:
            rfaces[rec] = dim
        else:
            if frozenset(pair_of.get(f) for f in lpart) != rpart:
                raise PolytopeError(f"record {_fmt(rec)} straddles the seam")
            lfaces[lpart | {seam.t_left}] = dim
            rfaces[rpart | {seam.t_right}] = dim
    lfaces[frozenset((seam.t_left,))] = d - 1
    rfaces[frozenset((seam.t_right,))] = d - 1
    lfacets = [f for f in G.lattice.facets if f in left_set] + [seam.t_left]
    rfacets = [f for f in G.lattice.facets if f in right_set] + [seam.t_right]
    llabels, rlabels = {}, {}
    for rec, m in G.labels.items():
        if rec <= left_set:
            llabels[rec] = m
        elif rec <= right_set:
            rlabels[rec] = m
    for a, b in seam.pairs:
        llabels[frozenset((a, seam.t_left))] = 2
        rlabels[frozenset((b, seam.t_right))] = 2
    lseams = tuple(
        s
        for s in G.seams
        if s != seam and set(s.left_facets) | set(s.right_facets) <= left_set
    )
    rseams = tuple(
        s
        for s in G.seams
        if s != seam and set(s.left_facets) | set(s.right_facets) <= right_set
    )
    return (
        LabeledPolytope(FaceLattice(d, lfacets, lfaces), llabels, lseams),
        LabeledPolytope(FaceLattice(d, rfacets, rfaces), rlabels, rseams),
    )


# ---------------------------------------------------------------------------
# Faces from a Cartan matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FacePrediction:
    """One predicted face record: its dimension (when known) and reasons."""

    dim: Optional[int]
    reasons: tuple


def faces_from_cartan(A, d: int):
    """Predict part of the face set of the d-polytope of a Cartan matrix.

    A spherical subset T spans a face of dimension d - |T|; a zero-type T
    whose perpendicular set has no zero-type part spans a face; a zero-type
    T whose group is virtually Z^{d-1} spans a vertex; and membership is
    closed under passing from the zero-and-negative core of T to T.  The
    result maps each predicted facet subset to a :class:`FacePrediction`.
    It is contained in the true face set but need not exhaust it.
    """
    from .cartan import matrix_rank, type_decompose

    system = A.system
    gens = system.generators
    n = len(gens)
    rank = matrix_rank(A)
    if rank != d + 1:
        raise PolytopeError(f"Cartan matrix rank {rank} != d + 1 = {d + 1}")
    whole = type_decompose(A)
    if len(whole.components) != 1:
        raise PolytopeError("Cartan matrix must be irreducible")
    if whole.components[0].kind != "Negative":
        raise PolytopeError(
            f"Cartan matrix must be of negative type, got {whole.components[0].kind}"
        )

    preds = {}

    def add(T, dim, reason):
        old = preds.get(T)
        if old is None:
            preds[T] = FacePrediction(dim, (reason,))
            return
        new_dim = old.dim if old.dim is not None else dim
        reasons = old.reasons if reason in old.reasons else old.reasons + (reason,)
        preds[T] = FacePrediction(new_dim, reasons)

    cores = {}
    for k in range(1, n):
        for combo in itertools.combinations(gens, k):
            T = frozenset(combo)
            deco = type_decompose(A.submatrix(combo))
            kinds = {c.kind for c in deco.components}
            cores[T] = frozenset(
                g
                for c in deco.components
                if c.kind in ("Zero", "Negative")
                for g in c.generators
            )
            if kinds == {"Positive"}:
                add(T, d - k, "spherical")
            elif kinds == {"Zero"}:
                perp = [
                    s
                    for s in gens
                    if s not in T and all(abs(A.entry(s, t)) <= _TOL for t in T)
                ]
                if not perp or all(
                    c.kind != "Zero"
                    for c in type_decompose(A.submatrix(perp)).components
                ):
                    add(T, None, "zero-type")
                if k - len(deco.components) == d - 1:
                    add(T, 0, "affine-vertex")

    changed = True
    while changed:
        changed = False
        for T, core in cores.items():
            if T in preds or not core or core == T:
                continue
            if core in preds:
                add(T, None, "closure")
                changed = True
    return preds


def predicted_vertices(preds):
    """Records predicted with dimension 0, sorted."""
    return sorted((T for T, p in preds.items() if p.dim == 0), key=_record_key)


# ---------------------------------------------------------------------------
# Prismatic subsets and serialization
# ---------------------------------------------------------------------------


def is_prismatic(L: FaceLattice, subset) -> bool:
    """Whether a facet subset is prismatic.

    True exactly when the whole subset has empty intersection but every
    subset with one facet removed meets in a face of the generic dimension
    d - |subset| + 1.
    """
    fs = frozenset(str(f) for f in subset)
    if len(fs) < 2:
        raise PolytopeError("a prismatic subset needs at least 2 facets")
    for f in fs:
        if f not in L.facets:
            raise PolytopeError(f"unknown facet {f!r}")
    if any(rec >= fs for rec in L.faces):
        return False
    want = L.dimension - len(fs) + 1
    for f in fs:
        rest = fs - {f}
        dims = [dim for rec, dim in L.faces.items() if rec >= rest]
        if not dims or max(dims) != want:
            return False
    return True


def _order_to_json(m):
    return "inf" if isinstance(m, Infinity) else int(m)


def _order_from_json(m):
    return INF if m == "inf" else int(m)


def lattice_to_json(L: FaceLattice) -> dict:
    """Plain-dict dump: {"dim", "facets", "faces": [{"facets", "dim"}]}."""
    records = sorted(L.faces.items(), key=lambda kv: (-kv[1], _record_key(kv[0])))
    return {
        "dim": L.dimension,
        "facets": list(L.facets),
        "faces": [
            {"facets": sorted(rec, key=_natural_key), "dim": dim}
            for rec, dim in records
        ],
    }


def lattice_from_json(data) -> FaceLattice:
    return FaceLattice(
        data["dim"],
        data["facets"],
        {frozenset(item["facets"]): item["dim"] for item in data["faces"]},
    )


def labeled_to_json(G: LabeledPolytope) -> dict:
    """Lattice dump plus {"labels": {"s,t": m}} with "inf" for infinity."""
    out = lattice_to_json(G.lattice)
    labels = {}
    for rec, m in sorted(G.labels.items(), key=lambda kv: _record_key(kv[0])):
        s, t = sorted(rec, key=_natural_key)
        labels[f"{s},{t}"] = _order_to_json(m)
    out["labels"] = labels
    return out


def labeled_from_json(data) -> LabeledPolytope:
    lattice = lattice_from_json(data)
    labels = {
        frozenset(key.split(",")): _order_from_json(m)
        for key, m in data.get("labels", {}).items()
    }
    return LabeledPolytope(lattice, labels)
