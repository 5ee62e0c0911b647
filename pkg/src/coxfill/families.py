"""Built-in diagram families and the labeled polytopes carrying them.

Every worked example in the library follows one of two blueprints.

*Filling families* have one symbolic order ``m`` on the pair
``{d+1, d+2}``, a junction node ``d``, and a cycle through ``1..d-1``.
For finite ``m`` the diagram labels the simplex product
``Delta_2 x Delta_{d-2}`` (triangle factor: junction and the m-pair);
at ``m = inf`` the m-pair degenerates to the parallel ends of a prism
and the diagram labels the pyramid over ``Delta_1 x Delta_{d-2}`` with
the junction as base.  Dehn filling the apex of the pyramid member at a
finite order recovers the finite member.

*Product families* are fully concrete diagrams joining an affine cycle
to a disjoint second part by a single unlabeled edge; they label a
product of two simplices, one facet per node.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .cartan import CartanMatrix
from .diagram import INF, CoxeterSystem, Infinity, parse_diagram
from .polytopes import (
    LabeledPolytope,
    label_polytope,
    pyramid,
    simplex_product,
)


class FamilyError(ValueError):
    """Unknown family id or a parameter outside the family's domain."""


def _cycle_rank(system: CoxeterSystem) -> int:
    g = system.graph()
    return g.number_of_edges() - g.number_of_nodes() + nx.number_connected_components(g)


# ---------------------------------------------------------------------------
# Filling families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FillingFamily:
    """A diagram family with a symbolic order m supporting Dehn filling.

    ``cycle`` lists the nodes 1..d-1 of the cycle, ``junction`` is node d
    and ``m_pair`` is the pair {d+1, d+2} carrying m.
    """

    family_id: str
    dimension: int
    source: str
    cycle: tuple
    junction: str
    m_pair: tuple

    def system(self, m=None) -> CoxeterSystem:
        """The Coxeter system; symbolic when m is None."""
        W = parse_diagram(self.source)
        if m is None:
            return W
        return W.bind(m=m)

    @property
    def loops(self) -> int:
        return _cycle_rank(self.system())

    def polytope(self, m) -> LabeledPolytope:
        """The labeled polytope of the member at order m (int or inf)."""
        if m == "inf":
            m = INF
        W = self.system(m)
        d = self.dimension
        if isinstance(m, Infinity):
            lattice = pyramid(simplex_product(1, d - 2))
            assignment = {"base": self.junction,
                          "a1": self.m_pair[0], "a2": self.m_pair[1]}
        else:
            lattice = simplex_product(2, d - 2)
            assignment = {"a1": self.junction,
                          "a2": self.m_pair[0], "a3": self.m_pair[1]}
        for i, node in enumerate(self.cycle, 1):
            assignment[f"b{i}"] = node
        return label_polytope(lattice, W, assignment)


def _filling(family_id, d, u, v, loop_order=None):
    """Cycle 1..d-1, tail (d-1)-d:u, d-(d+1):v, (d+1)-(d+2):m, and an
    optional second loop edge d-(d+2)."""
    parts = [f"nodes 1..{d + 2}"]
    for i in range(1, d - 1):
        parts.append(f"{i}-{i + 1}")
    parts.append(f"1-{d - 1}")
    parts.append(f"{d - 1}-{d}" + (f":{u}" if u != 3 else ""))
    parts.append(f"{d}-{d + 1}" + (f":{v}" if v != 3 else ""))
    parts.append(f"{d + 1}-{d + 2}:m")
    if loop_order is not None:
        parts.append(f"{d}-{d + 2}" + (f":{loop_order}" if loop_order != 3 else ""))
    return FillingFamily(
        family_id=family_id,
        dimension=d,
        source="; ".join(parts),
        cycle=tuple(str(i) for i in range(1, d)),
        junction=str(d),
        m_pair=(str(d + 1), str(d + 2)),
    )


def _build_filling_families():
    fams = [
        _filling("cox_gp-1", 4, 3, 3),
        _filling("cox_gp-2", 4, 5, 3),
        _filling("cox_gp-3", 4, 3, 3, loop_order=3),
    ]
    # dimension 4: tail orders (3, k, m) with an optional loop of order
    # l <= k, or (j, 3, m) with an optional unlabeled loop
    for k in (3, 4, 5):
        fams.append(_filling(f"ex1A-k{k}", 4, 3, k))
    for k in (3, 4, 5):
        for l in range(3, k + 1):
            fams.append(_filling(f"ex1A-k{k}-l{l}", 4, 3, k, loop_order=l))
    for j in (4, 5):
        fams.append(_filling(f"ex1A-j{j}", 4, j, 3))
    for j in (4, 5):
        fams.append(_filling(f"ex1A-j{j}-l3", 4, j, 3, loop_order=3))
    # dimension 5: tail orders (3, p, m), optional loop q <= p
    for p in (3, 4, 5):
        fams.append(_filling(f"ex1B-p{p}", 5, 3, p))
    for p in (3, 4, 5):
        for q in range(3, p + 1):
            fams.append(_filling(f"ex1B-p{p}-q{q}", 5, 3, p, loop_order=q))
    # dimensions 6 and 7: all tail orders 3, optional unlabeled loop
    fams.append(_filling("ex1C", 6, 3, 3))
    fams.append(_filling("ex1C-q3", 6, 3, 3, loop_order=3))
    fams.append(_filling("ex1D", 7, 3, 3))
    fams.append(_filling("ex1D-q3", 7, 3, 3, loop_order=3))
    return tuple(fams)


FILLING_FAMILIES = _build_filling_families()


def filling_family(family_id: str) -> FillingFamily:
    for fam in FILLING_FAMILIES:
        if fam.family_id == family_id:
            return fam
    raise FamilyError(f"unknown filling family {family_id!r}")


# ---------------------------------------------------------------------------
# Product families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductFamily:
    """A concrete diagram labeling Delta_e x Delta_f.

    ``a_part``/``b_part`` list the nodes assigned to the two simplex
    factors (e + 1 and f + 1 of them).
    """

    family_id: str
    dimension: int
    source: str
    a_part: tuple
    b_part: tuple

    def system(self) -> CoxeterSystem:
        return parse_diagram(self.source)

    @property
    def loops(self) -> int:
        return _cycle_rank(self.system())

    def polytope(self) -> LabeledPolytope:
        e, f = len(self.a_part) - 1, len(self.b_part) - 1
        assignment = {f"a{i}": s for i, s in enumerate(self.a_part, 1)}
        assignment.update({f"b{i}": s for i, s in enumerate(self.b_part, 1)})
        return label_polytope(simplex_product(e, f), self.system(), assignment)


def _product(family_id, d, source, a_part, b_part):
    return ProductFamily(family_id, d, source,
                         tuple(a_part.split()), tuple(b_part.split()))


# An affine triangle or cycle (nodes 1..e+1) joined by the edge 1-(e+2)
# to a compact hyperbolic simplex part on the remaining nodes.
PRODUCT_FAMILIES = (
    _product("ex2-d5-k4", 5,
             "nodes 1..7; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6:4; 6-7; 4-7",
             "1 2 3", "4 5 6 7"),
    _product("ex2-d5-k5", 5,
             "nodes 1..7; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6:5; 6-7; 4-7",
             "1 2 3", "4 5 6 7"),
    _product("ex2-d5-chain", 5,
             "nodes 1..7; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6:5; 6-7",
             "1 2 3", "4 5 6 7"),
    _product("ex2-d5-tripod", 5,
             "nodes 1..7; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6; 5-7:5",
             "1 2 3", "4 5 6 7"),
    _product("ex2-d6-cycle", 6,
             "nodes 1..8; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6; 6-7:4; 7-8; 4-8",
             "1 2 3", "4 5 6 7 8"),
    _product("ex2-d6-chain", 6,
             "nodes 1..8; 1-2; 2-3; 1-3; 1-4; 4-5; 5-6; 6-7; 7-8:5",
             "1 2 3", "4 5 6 7 8"),
    _product("ex2-d7", 7,
             "nodes 1..9; 1-2; 2-3; 3-4; 1-4; 1-5; 5-6; 6-7; 7-8; 8-9:5",
             "1 2 3 4", "5 6 7 8 9"),
    _product("ex2-d8", 8,
             "nodes 1..10; 1-2; 2-3; 3-4; 4-5; 1-5; 1-6; 6-7; 7-8; 8-9; 9-10:5",
             "1 2 3 4 5", "6 7 8 9 10"),
    # two commuting flats: an affine (d-2)-cycle joined to an affine
    # triangle on the last three nodes
    _product("mix-d5", 5,
             "nodes 1..7; 1-2; 2-3; 3-4; 1-4; 1-5; 5-6; 6-7; 5-7",
             "5 6 7", "1 2 3 4"),
    _product("mix-d6", 6,
             "nodes 1..8; 1-2; 2-3; 3-4; 4-5; 1-5; 1-6; 6-7; 7-8; 6-8",
             "6 7 8", "1 2 3 4 5"),
)


def product_family(family_id: str) -> ProductFamily:
    for fam in PRODUCT_FAMILIES:
        if fam.family_id == family_id:
            return fam
    raise FamilyError(f"unknown product family {family_id!r}")


def family_ids():
    """All built-in family ids, filling families first."""
    return tuple(f.family_id for f in FILLING_FAMILIES) + tuple(
        f.family_id for f in PRODUCT_FAMILIES
    )


def family_by_id(family_id: str):
    for fam in FILLING_FAMILIES:
        if fam.family_id == family_id:
            return fam
    for fam in PRODUCT_FAMILIES:
        if fam.family_id == family_id:
            return fam
    raise FamilyError(f"unknown family {family_id!r}")


# ---------------------------------------------------------------------------
# Standalone benchmark polytopes
# ---------------------------------------------------------------------------

#: Two fixed labeled polytopes on Delta_2 x Delta_2 used throughout the
#: test corpus: U is 2-perfect with truncatable vertices, V has a vertex
#: whose link obstructs every Dehn filling.
EXAMPLE_SOURCES = {
    "U": "nodes 1..6; 1-2:4; 2-3; 1-3; 3-4:5; 4-5; 5-6:4; 4-6",
    "V": "nodes 1..6; 1-2; 2-3:4; 1-3; 3-4; 4-5:4; 5-6; 4-6",
}


def example_polytope(name: str) -> LabeledPolytope:
    try:
        source = EXAMPLE_SOURCES[name]
    except KeyError:
        raise FamilyError(f"unknown example polytope {name!r}") from None
    W = parse_diagram(source)
    assignment = {"a1": "4", "a2": "5", "a3": "6",
                  "b1": "1", "b2": "2", "b3": "3"}
    return label_polytope(simplex_product(2, 2), W, assignment)


# ---------------------------------------------------------------------------
# The square-pyramid family
# ---------------------------------------------------------------------------

#: A pentagonal diagram with alternating orders 3, inf labeling the
#: pyramid over a square: base 1, sides 2, 4, 3, 5 in cyclic order.
SQUARE_PYRAMID_SOURCE = "nodes 1..5; 1-2; 2-3:inf; 3-4; 4-5:inf; 1-5"

SQUARE_PYRAMID_ASSIGNMENT = {
    "base": "1", "a1": "2", "a2": "3", "b1": "4", "b2": "5",
}


def square_pyramid_polytope() -> LabeledPolytope:
    """The labeled square pyramid: infinite orders sit exactly on the two
    pairs of opposite sides, every ridge order is 2 or 3."""
    W = parse_diagram(SQUARE_PYRAMID_SOURCE)
    lattice = pyramid(simplex_product(1, 1))
    return label_polytope(lattice, W, SQUARE_PYRAMID_ASSIGNMENT)


def square_pyramid_cartan(lam: float) -> CartanMatrix:
    """The one-parameter Cartan family on the square pyramid, lam > 1.

    The apex of the pyramid is loxodromic for every member; the member is
    symmetrizable only at the root of 4*lam^4 - 8*lam^2 + 3 inside the
    domain, where the poles of the four side facets become coplanar.
    """
    lam = float(lam)
    if not lam > 1.0:
        raise FamilyError("square pyramid family needs lam > 1")
    u = lam * lam - 1.0
    rows = [
        [2.0, -1.0, 0.0, 0.0, -1.0],
        [-1.0, 2.0, -2.0 * lam, 0.0, 0.0],
        [0.0, -2.0 * lam, 2.0, -1.0, 0.0],
        [0.0, 0.0, -1.0, 2.0, -lam / u],
        [-1.0, 0.0, 0.0, 3.0 / lam - 4.0 * lam, 2.0],
    ]
    return CartanMatrix(rows, parse_diagram(SQUARE_PYRAMID_SOURCE))


def square_pyramid_forms(lam: float):
    """Explicit reflection data (alphas, bs) for the family member.

    alpha_s are covectors and b_s pole vectors in R^4 with
    alpha_s(b_t) = A_st entrywise; the span of b_2, .., b_5 drops to a
    hyperplane exactly at lam = sqrt(3/2).
    """
    lam = float(lam)
    if not lam > 1.0:
        raise FamilyError("square pyramid family needs lam > 1")
    u = lam * lam - 1.0
    alphas = [
        (1.0, 0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, 0.0),
        (0.0, 0.0, 1.0, 0.0),
        (0.0, 0.0, 0.0, 1.0),
        (0.0, 1.0, 1.0 / lam, -2.0 * u / lam),
    ]
    bs = [
        (2.0, -1.0, 0.0, 0.0),
        (-1.0, 2.0, -2.0 * lam, 0.0),
        (0.0, -2.0 * lam, 2.0, -1.0),
        (0.0, 0.0, -1.0, 2.0),
        (-1.0, 0.0, 0.0, -lam / u),
    ]
    return alphas, bs
