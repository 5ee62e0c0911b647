"""Cartan matrices realizing a Coxeter system.

A Cartan matrix A for (S, M) has diagonal 2, nonpositive off-diagonal
entries with a symmetric zero pattern, and pairwise products
a_st * a_ts = 4cos^2(pi/m_st) for finite orders (>= 4 for infinite ones).
Two Cartan matrices are equivalent when one is D A D^-1 for a positive
diagonal D; the zero pattern together with pairwise and cyclic products
classifies matrices up to equivalence.

The *special form* concentrates all asymmetry on one designated edge per
independent cycle of the diagram: entries on a spanning tree are the
symmetric values -2cos(pi/m), and the closing edge of cycle i carries the
pair (-c * lambda_i, -c / lambda_i).  The spanning tree is grown
depth-first from the smallest node, visiting neighbors in natural order,
which pins down the designated edges deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .diagram import (
    CoxeterSystem,
    DiagramError,
    Infinity,
    UnboundParameterError,
    gram_entry,
    gram_matrix,
    parse_diagram,
)

_TOL = 1e-9

#: Parameter names assigned to independent cycles, in cycle order.
_PARAM_NAMES = (
    "lambda", "mu", "nu", "xi", "rho", "sigma", "tau", "phi", "chi", "psi",
)


class CartanError(ValueError):
    """Matrix fails the Cartan realization conditions."""


def _natural_key(name):
    return (0, int(name), "") if name.isdigit() else (1, 0, name)


class CartanMatrix:
    """A square matrix realizing a Coxeter system, indexed by generators.

    ``params`` records the cycle parameters when the matrix was built in
    special form; it is carried along for serialization but equality and
    equivalence ignore it.
    """

    __slots__ = ("entries", "system", "params")

    def __init__(self, entries, system: CoxeterSystem, params=None,
                 validate: bool = True):
        entries = np.array(entries, dtype=float)
        n = system.rank
        if entries.shape != (n, n):
            raise CartanError(
                f"matrix shape {entries.shape} does not match rank {n}"
            )
        entries.setflags(write=False)
        self.entries = entries
        self.system = system
        self.params = dict(params or {})
        if validate:
            self._validate()

    def _validate(self):
        a = self.entries
        gens = self.system.generators
        n = len(gens)
        if np.max(np.abs(np.diag(a) - 2.0)) > _TOL:
            raise CartanError("diagonal entries must all be 2")
        for i in range(n):
            for j in range(i + 1, n):
                x, y = a[i, j], a[j, i]
                if x > _TOL or y > _TOL:
                    raise CartanError(
                        f"positive off-diagonal entry at ({gens[i]},{gens[j]})"
                    )
                if (abs(x) <= _TOL) != (abs(y) <= _TOL):
                    raise CartanError(
                        f"zero pattern not symmetric at ({gens[i]},{gens[j]})"
                    )
                m = self.system.order(gens[i], gens[j])
                prod = x * y
                if isinstance(m, Infinity):
                    if prod < 4.0 - _TOL:
                        raise CartanError(
                            f"product {prod} < 4 on infinite edge "
                            f"({gens[i]},{gens[j]})"
                        )
                elif isinstance(m, str):
                    raise UnboundParameterError(f"unbound order {m!r}")
                else:
                    want = 4.0 * math.cos(math.pi / m) ** 2
                    if abs(prod - want) > _TOL:
                        raise CartanError(
                            f"product {prod} != 4cos^2(pi/{m}) at "
                            f"({gens[i]},{gens[j]})"
                        )

    # -- indexing --------------------------------------------------------

    @property
    def size(self) -> int:
        return self.system.rank

    def index(self, s) -> int:
        try:
            return self.system.generators.index(s)
        except ValueError:
            raise DiagramError(f"unknown generator {s!r}") from None

    def entry(self, s, t) -> float:
        return float(self.entries[self.index(s), self.index(t)])

    # -- derived matrices ------------------------------------------------

    def transpose(self) -> "CartanMatrix":
        return CartanMatrix(self.entries.T, self.system, validate=False)

    def conjugate(self, diag) -> "CartanMatrix":
        """D A D^-1 for a positive diagonal given as a vector."""
        d = np.asarray(diag, dtype=float)
        if d.min() <= 0:
            raise CartanError("conjugating diagonal must be positive")
        out = (d[:, None] * self.entries) / d[None, :]
        return CartanMatrix(out, self.system, validate=False)

    def submatrix(self, subset) -> "CartanMatrix":
        sub = self.system.subsystem(subset)
        idx = [self.index(s) for s in sub.generators]
        return CartanMatrix(
            self.entries[np.ix_(idx, idx)], sub, validate=False
        )

    def __eq__(self, other):
        if not isinstance(other, CartanMatrix):
            return NotImplemented
        return self.system == other.system and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return (
            f"CartanMatrix({self.system.serialize()!r}, "
            f"params={self.params!r})"
        )

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        """JSON-ready dict; floats round-trip exactly via repr."""
        return {
            "system": self.system.serialize(),
            "entries": [float(x) for x in self.entries.flatten()],
            "params": {k: float(v) for k, v in sorted(self.params.items())},
        }

    @classmethod
    def from_json(cls, data) -> "CartanMatrix":
        system = parse_diagram(data["system"])
        n = system.rank
        entries = np.array(data["entries"], dtype=float).reshape(n, n)
        return cls(entries, system, params=data.get("params") or {})


def gram_cartan(system: CoxeterSystem) -> CartanMatrix:
    """The symmetric Cartan matrix Cos(W)."""
    return CartanMatrix(gram_matrix(system), system, validate=False)


# ---------------------------------------------------------------------------
# Special form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialFormLayout:
    """Spanning-tree data fixing where cycle asymmetry lives.

    cycle_edges[i] is the designated non-tree edge (s, t) in natural order
    of the cycle named param_names[i]; cycles[i] is its fundamental cycle
    in canonical orientation (starting at the smallest node, toward its
    smaller neighbor).
    """

    tree_edges: tuple
    cycle_edges: tuple
    cycles: tuple
    param_names: tuple


@dataclass(frozen=True)
class SpecialForm:
    """A Cartan matrix in special form with its cycle parameters."""

    base: CartanMatrix
    tree_edges: tuple
    cycle_params: dict


def special_form_layout(system: CoxeterSystem) -> SpecialFormLayout:
    """Spanning forest (DFS from smallest node, neighbors ascending) and
    the fundamental cycle of each non-tree edge."""
    g = system.graph()
    nodes = sorted(g.nodes, key=_natural_key)
    visited = set()
    parent = {}
    tree = set()
    nontree = []
    for root in nodes:
        if root in visited:
            continue
        visited.add(root)
        stack = [root]
        while stack:
            v = stack.pop()
            for u in sorted(g.neighbors(v), key=_natural_key):
                if u not in visited:
                    visited.add(u)
                    parent[u] = v
                    tree.add(frozenset((v, u)))
                    # dive into u first, then come back to v's remaining
                    # neighbors
                    stack.append(v)
                    stack.append(u)
                    break
    for u, v in g.edges:
        if frozenset((u, v)) not in tree:
            nontree.append(tuple(sorted((u, v), key=_natural_key)))

    def tree_path(a, b):
        # path between two nodes using parent pointers toward the root
        up_a, up_b = [a], [b]
        seen = {a: 0}
        x = a
        while x in parent:
            x = parent[x]
            up_a.append(x)
            seen[x] = len(up_a) - 1
        x = b
        while x not in seen:
            x = parent[x]
            up_b.append(x)
        meet = seen[x]
        return up_a[: meet + 1] + list(reversed(up_b[:-1]))

    cycles = []
    for s, t in nontree:
        path = tree_path(s, t)  # s .. t through the tree
        cyc = path  # closing edge t-s completes the cycle
        idx = min(range(len(cyc)), key=lambda i: _natural_key(cyc[i]))
        rot = cyc[idx:] + cyc[:idx]
        if _natural_key(rot[-1]) < _natural_key(rot[1]):
            rot = [rot[0]] + list(reversed(rot[1:]))
        cycles.append(tuple(rot))

    order = sorted(
        range(len(nontree)),
        key=lambda i: (_natural_key(min(cycles[i], key=_natural_key)),
                       tuple(_natural_key(x) for x in nontree[i])),
    )
    nontree = [nontree[i] for i in order]
    cycles = [cycles[i] for i in order]
    if len(nontree) > len(_PARAM_NAMES):
        names = tuple(f"param{i + 1}" for i in range(len(nontree)))
    else:
        names = tuple(_PARAM_NAMES[: len(nontree)])
    tree_sorted = tuple(
        sorted(
            (tuple(sorted(e, key=_natural_key)) for e in tree),
            key=lambda e: (_natural_key(e[0]), _natural_key(e[1])),
        )
    )
    return SpecialFormLayout(tree_sorted, tuple(nontree), tuple(cycles), names)


def build_special_form(system: CoxeterSystem, params=None) -> CartanMatrix:
    """Special-form Cartan matrix for the given cycle parameters.

    ``params`` maps the cycle names of ``special_form_layout`` to positive
    reals; a bare number is accepted when there is exactly one cycle.
    Tree edges get the symmetric entry -2cos(pi/m); the designated edge
    (s, t) of a cycle with parameter v gets entries
    A[t][s] = -2cos(pi/m) * v and A[s][t] = -2cos(pi/m) / v.
    """
    layout = special_form_layout(system)
    if params is None:
        params = {}
    if isinstance(params, (int, float)):
        if len(layout.param_names) != 1:
            raise CartanError(
                f"scalar parameter given but diagram has "
                f"{len(layout.param_names)} cycles"
            )
        params = {layout.param_names[0]: float(params)}
    missing = [n for n in layout.param_names if n not in params]
    if missing:
        raise CartanError(f"missing cycle parameters: {', '.join(missing)}")
    extra = [n for n in params if n not in layout.param_names]
    if extra:
        raise CartanError(f"unknown cycle parameters: {', '.join(extra)}")
    for name in layout.param_names:
        if not params[name] > 0:
            raise CartanError(f"cycle parameter {name} must be positive")

    n = system.rank
    gens = system.generators
    pos = {s: i for i, s in enumerate(gens)}
    a = 2.0 * np.eye(n)
    for s, t, m in system.edges():
        c = gram_entry(m)  # -2cos(pi/m) <= 0
        a[pos[s], pos[t]] = c
        a[pos[t], pos[s]] = c
    for (s, t), name in zip(layout.cycle_edges, layout.param_names):
        m = system.order(s, t)
        c = gram_entry(m)
        v = float(params[name])
        a[pos[t], pos[s]] = c * v
        a[pos[s], pos[t]] = c / v
    return CartanMatrix(a, system, params=dict(params))


def special_params_of(A: CartanMatrix) -> dict:
    """Recover the special-form cycle parameters equivalent to A."""
    layout = special_form_layout(A.system)
    products = cyclic_products(A)
    out = {}
    for (s, t), name, cyc in zip(
        layout.cycle_edges, layout.param_names, layout.cycles
    ):
        sym = 1.0
        k = len(cyc)
        for i in range(k):
            u, v = cyc[i], cyc[(i + 1) % k]
            sym *= gram_entry(A.system.order(u, v))
        ratio = products[name] / sym
        # find how the canonical orientation traverses the designated edge
        forward = None
        for i in range(k):
            u, v = cyc[i], cyc[(i + 1) % k]
            if (u, v) == (s, t):
                forward = True  # hits A[s][t] = -c / param
            elif (u, v) == (t, s):
                forward = False  # hits A[t][s] = -c * param
        out[name] = 1.0 / ratio if forward else ratio
    return out


def as_special_form(A: CartanMatrix) -> SpecialForm:
    """The equivalent special-form matrix together with its parameters."""
    params = special_params_of(A)
    layout = special_form_layout(A.system)
    base = build_special_form(A.system, params)
    return SpecialForm(base, layout.tree_edges, params)


# ---------------------------------------------------------------------------
# Cyclic products and equivalence
# ---------------------------------------------------------------------------


def cyclic_products(A: CartanMatrix) -> dict:
    """Products A_{s1 s2} ... A_{sk s1} over the fundamental cycles.

    Keys are the cycle names of ``special_form_layout``; orientation is
    canonical (smallest node first, toward its smaller neighbor).
    """
    layout = special_form_layout(A.system)
    out = {}
    for name, cyc in zip(layout.param_names, layout.cycles):
        p = 1.0
        k = len(cyc)
        for i in range(k):
            p *= A.entry(cyc[i], cyc[(i + 1) % k])
        out[name] = p
    return out


def _pairwise_products(A):
    n = A.size
    return A.entries * A.entries.T  # symmetric matrix of a_st * a_ts


def are_equivalent(A: CartanMatrix, B: CartanMatrix,
                   tol: float = _TOL) -> bool:
    """Equivalence under positive diagonal conjugation.

    Checks exact zero-pattern agreement plus pairwise and cyclic products
    within tolerance; these invariants are complete for matrices over the
    same system.
    """
    if A.system != B.system:
        raise CartanError("matrices realize different systems")
    za = np.abs(A.entries) <= tol
    zb = np.abs(B.entries) <= tol
    if not np.array_equal(za, zb):
        return False
    if np.max(np.abs(_pairwise_products(A) - _pairwise_products(B))) > tol:
        return False
    pa, pb = cyclic_products(A), cyclic_products(B)
    return all(abs(pa[k] - pb[k]) <= tol for k in pa)


# ---------------------------------------------------------------------------
# Type decomposition, rank, symmetrization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeComponent:
    generators: tuple
    kind: str  # "Positive" | "Zero" | "Negative"
    smallest_eigenvalue: float


@dataclass(frozen=True)
class TypeDecomposition:
    components: tuple

    def kinds(self):
        return tuple(c.kind for c in self.components)

    @property
    def all_positive(self) -> bool:
        return all(c.kind == "Positive" for c in self.components)

    @property
    def all_zero(self) -> bool:
        return all(c.kind == "Zero" for c in self.components)


def _matrix_components(A):
    n = A.size
    adj = np.abs(A.entries) > _TOL
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in range(n):
                if u != v and adj[v, u] and not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def smallest_real_eigenvalue(mat: np.ndarray) -> float:
    """Smallest real eigenvalue of an irreducible Cartan-like block.

    2I - mat is nonnegative and irreducible, so its spectral radius is an
    eigenvalue; 2 minus that radius is the smallest real eigenvalue.
    """
    n = mat.shape[0]
    radius = float(np.max(np.abs(np.linalg.eigvals(2.0 * np.eye(n) - mat))))
    return 2.0 - radius


def type_decompose(A: CartanMatrix, tol: float = _TOL) -> TypeDecomposition:
    """Split into irreducible blocks typed by smallest real eigenvalue.

    Near-zero verdicts are cross-checked against the catalog when the
    block is just the Gram matrix of its subsystem.
    """
    gens = A.system.generators
    comps = []
    for idx in _matrix_components(A):
        sub = A.entries[np.ix_(idx, idx)]
        ev = smallest_real_eigenvalue(sub)
        if ev > tol:
            kind = "Positive"
        elif ev < -tol:
            kind = "Negative"
        else:
            kind = "Zero"
        if abs(ev) <= 10 * tol:
            # borderline: the exact catalog is more trustworthy than the
            # eigenvalue when the block is symmetric and realizes its
            # subsystem's Gram matrix
            subsysm = A.system.subsystem([gens[i] for i in idx])
            if subsysm.is_bound:
                gram = gram_matrix(subsysm)
                if np.max(np.abs(sub - gram)) <= tol:
                    from . import catalogs

                    name = catalogs.match(subsysm)
                    if name is not None:
                        kind = {
                            "Spherical": "Positive",
                            "Affine": "Zero",
                            "Lanner": "Negative",
                        }[catalogs.kind_of(name)]
        comps.append(
            TypeComponent(tuple(gens[i] for i in idx), kind, ev)
        )
    return TypeDecomposition(tuple(comps))


def matrix_rank(A: CartanMatrix, rel_tol: float = _TOL) -> int:
    """Numerical rank: singular values above rel_tol * largest."""
    sv = np.linalg.svd(A.entries, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def symmetrize(A: CartanMatrix, tol: float = _TOL):
    """Positive diagonal D with D A D^-1 symmetric, or None.

    D is built by propagating d_child = d_parent * sqrt(a_pc / a_cp)
    along the special-form spanning tree; the matrix is symmetrizable iff
    the result is symmetric, which happens exactly when every cycle
    product equals its reversal.
    """
    layout = special_form_layout(A.system)
    gens = A.system.generators
    pos = {s: i for i, s in enumerate(gens)}
    d = np.zeros(len(gens))
    adj = {s: [] for s in gens}
    for s, t in layout.tree_edges:
        adj[s].append(t)
        adj[t].append(s)
    for root in gens:
        if d[pos[root]] != 0.0:
            continue
        d[pos[root]] = 1.0
        stack = [root]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if d[pos[u]] == 0.0:
                    avu = A.entry(v, u)
                    auv = A.entry(u, v)
                    d[pos[u]] = d[pos[v]] * math.sqrt(avu / auv)
                    stack.append(u)
    conj = (d[:, None] * A.entries) / d[None, :]
    if np.max(np.abs(conj - conj.T)) > tol:
        return None
    return d


# ---------------------------------------------------------------------------
# Loop determinant reduction
# ---------------------------------------------------------------------------


def loop_matrix(cos_values, lam: float) -> np.ndarray:
    """Cyclic matrix with unit diagonal, couplings -c_i, and the closing
    edge split as (-c_n / lam, -c_n * lam)."""
    cs = [float(c) for c in cos_values]
    n = len(cs)
    if n < 3:
        raise CartanError("loop reduction needs at least 3 couplings")
    m = np.eye(n)
    for i in range(n - 1):
        m[i, i + 1] = m[i + 1, i] = -cs[i]
    m[0, n - 1] = -cs[-1] / lam
    m[n - 1, 0] = -cs[-1] * lam
    return m


def loop_det_reduce(cos_values, symbol: str = "lambda"):
    """Coefficients (D1, c) with det(M_lam) = D1 - c*(lam + 1/lam - 2).

    D1 is the determinant of the symmetric case lam = 1 and c is the
    product of the couplings; ``symbol`` only names the variable of the
    identity.
    """
    cs = [float(c) for c in cos_values]
    if len(cs) < 3:
        raise CartanError("loop reduction needs at least 3 couplings")
    d1 = float(np.linalg.det(loop_matrix(cs, 1.0)))
    coeff = float(np.prod(cs))
    return d1, coeff


# ---------------------------------------------------------------------------
# The triangle quantity Psi
# ---------------------------------------------------------------------------


def psi_product(alpha: float, beta: float, gamma: float) -> float:
    """Product form -4 * prod of cos((±alpha ± beta ± gamma)/2) over the
    four sign patterns with an even number of minuses."""
    return -4.0 * (
        math.cos((alpha + beta + gamma) / 2)
        * math.cos((-alpha + beta + gamma) / 2)
        * math.cos((alpha - beta + gamma) / 2)
        * math.cos((alpha + beta - gamma) / 2)
    )


def psi_triple(alpha: float, beta: float, gamma: float) -> float:
    """1 - cos^2(a) - cos^2(b) - cos^2(c) - 2cos(a)cos(b)cos(c).

    Vanishes exactly when a+b+c = pi (mod the symmetry group of the
    expression); negative when the triangle inequality-style sum drops
    below pi.  Cross-checked in place against the factored form.
    """
    ca, cb, cc = math.cos(alpha), math.cos(beta), math.cos(gamma)
    value = 1.0 - ca * ca - cb * cb - cc * cc - 2.0 * ca * cb * cc
    assert abs(value - psi_product(alpha, beta, gamma)) < 1e-9
    return value
