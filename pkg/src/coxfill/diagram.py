"""Coxeter systems, the diagram DSL, and Gram matrices.

A Coxeter system is a pair (S, M) of a finite generator set S and a
symmetric matrix of orders m_st with m_ss = 1 and off-diagonal entries in
{2, 3, ...} or infinity.  The diagram graph has an edge between s and t
exactly when m_st != 2.

Systems are described in a small text DSL::

    nodes 1..6; 1-2; 2-3; 1-3; 3-4; 4-5; 5-6:7

Statements are separated by ";".  An edge without a label has order 3,
pairs never mentioned have order 2, the token ``inf`` denotes an infinite
order, and a name such as ``m`` leaves the order symbolic until bound with
:meth:`CoxeterSystem.bind` or a ``let`` statement.  ``#`` starts a comment.

>>> W = parse_diagram("nodes 1..3; 1-2:4; 2-3:4; 1-3:4")
>>> W.rank
3
>>> W.order("1", "3")
4
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import networkx as nx
import numpy as np


class Infinity:
    """Singleton marker for the order value "infinity".

    Kept distinct from ``float("inf")`` so that orders stay exact: the Gram
    entry for an infinite order is -2 by the convention cos(pi/inf) = 1.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()

#: An order is a bound integer, the infinity marker, or the name of a
#: symbolic parameter that has not been bound yet.
Order = "int | Infinity | str"


class DiagramError(ValueError):
    """Semantic error in a diagram (duplicate edge, self edge, bad order)."""


class DiagramSyntaxError(DiagramError):
    """Syntax error in DSL source, carrying a 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class UnboundParameterError(DiagramError):
    """A numeric operation hit a symbolic order with no bound value."""


def _natural_key(name: str):
    """Sort key placing purely numeric names first, in numeric order."""
    return (0, int(name), "") if name.isdigit() else (1, 0, name)


def order_sort_key(order):
    """Sort key for order values: integers, then inf, then symbols."""
    if isinstance(order, Infinity):
        return (1, 0, "")
    if isinstance(order, str):
        return (2, 0, order)
    return (0, order, "")


class CoxeterSystem:
    """Immutable Coxeter system (S, M).

    Parameters
    ----------
    generators : iterable of str
        Node identifiers in declaration order.
    orders : mapping
        Map from unordered pair ``frozenset({s, t})`` to the order m_st.
        Pairs that are missing default to 2.
    """

    def __init__(self, generators: Iterable[str], orders=None):
        gens = tuple(str(g) for g in generators)
        if len(set(gens)) != len(gens):
            raise DiagramError(f"duplicate generator in {gens}")
        self._generators = gens
        self._index = {g: i for i, g in enumerate(gens)}
        cleaned = {}
        for pair, m in (orders or {}).items():
            s, t = sorted(pair, key=_natural_key)
            if s == t:
                raise DiagramError(f"self-edge on node {s!r}")
            if s not in self._index or t not in self._index:
                missing = s if s not in self._index else t
                raise DiagramError(f"unknown generator {missing!r}")
            m = _check_order(m)
            if m != 2:
                cleaned[frozenset((s, t))] = m
        self._orders = cleaned

    # -- basic accessors -------------------------------------------------

    @property
    def generators(self) -> tuple:
        return self._generators

    @property
    def rank(self) -> int:
        return len(self._generators)

    def order(self, s, t):
        """The Coxeter order m_st (1 on the diagonal, default 2)."""
        if s == t:
            if s not in self._index:
                raise DiagramError(f"unknown generator {s!r}")
            return 1
        for g in (s, t):
            if g not in self._index:
                raise DiagramError(f"unknown generator {g!r}")
        return self._orders.get(frozenset((s, t)), 2)

    def edges(self):
        """Diagram edges (m != 2) as a sorted list of (s, t, m)."""
        out = []
        for pair, m in self._orders.items():
            s, t = sorted(pair, key=_natural_key)
            out.append((s, t, m))
        out.sort(key=lambda e: (_natural_key(e[0]), _natural_key(e[1])))
        return out

    def symbolic_parameters(self):
        """Names of unbound symbolic orders, sorted."""
        return sorted({m for m in self._orders.values() if isinstance(m, str)})

    @property
    def is_bound(self) -> bool:
        return not self.symbolic_parameters()

    def graph(self) -> nx.Graph:
        """The diagram as a networkx graph with edge attribute ``m``."""
        g = nx.Graph()
        g.add_nodes_from(self._generators)
        for s, t, m in self.edges():
            g.add_edge(s, t, m=m)
        return g

    # -- construction helpers --------------------------------------------

    def bind(self, **params) -> "CoxeterSystem":
        """Substitute values for symbolic parameters.

        ``bind(m=7)`` replaces each order recorded as the symbol ``m`` by 7.
        Values may be integers >= 2 or the string ``"inf"`` / :data:`INF`.
        """
        table = {}
        for name, value in params.items():
            if value == "inf" or isinstance(value, Infinity):
                table[name] = INF
            else:
                table[name] = _check_order(int(value))
        new_orders = {}
        for pair, m in self._orders.items():
            if isinstance(m, str) and m in table:
                m = table[m]
            new_orders[pair] = m
        return CoxeterSystem(self._generators, new_orders)

    def subsystem(self, subset) -> "CoxeterSystem":
        """Restriction of (S, M) to a subset of S, preserving order."""
        subset = set(subset)
        for g in subset:
            if g not in self._index:
                raise DiagramError(f"unknown generator {g!r}")
        gens = [g for g in self._generators if g in subset]
        orders = {p: m for p, m in self._orders.items() if p <= subset}
        return CoxeterSystem(gens, orders)

    def relabel(self, mapping) -> "CoxeterSystem":
        """Rename generators via a bijective mapping."""
        gens = [mapping[g] for g in self._generators]
        orders = {
            frozenset(mapping[g] for g in pair): m
            for pair, m in self._orders.items()
        }
        return CoxeterSystem(gens, orders)

    # -- serialization ---------------------------------------------------

    def serialize(self) -> str:
        """Canonical DSL text; ``parse_diagram`` round-trips it exactly."""
        parts = ["nodes " + ",".join(self._generators)]
        for s, t, m in self.edges():
            if m == 3:
                parts.append(f"{s}-{t}")
            elif isinstance(m, Infinity):
                parts.append(f"{s}-{t}:inf")
            else:
                parts.append(f"{s}-{t}:{m}")
        return "; ".join(parts)

    def __eq__(self, other):
        if not isinstance(other, CoxeterSystem):
            return NotImplemented
        return (
            self._generators == other._generators
            and self._orders == other._orders
        )

    def __hash__(self):
        return hash((self._generators, frozenset(self._orders.items())))

    def __repr__(self):
        return f"CoxeterSystem({self.serialize()!r})"


def _check_order(m):
    if isinstance(m, (Infinity, str)):
        return m
    if isinstance(m, bool) or not isinstance(m, int):
        raise DiagramError(f"order must be an integer, 'inf' or a symbol: {m!r}")
    if m < 2:
        raise DiagramError(f"off-diagonal order must be >= 2, got {m}")
    return m


# ---------------------------------------------------------------------------
# DSL parser
# ---------------------------------------------------------------------------

_SYMBOLS = ("..", ";", "-", ":", ",", "=")


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("..", i):
            tokens.append(("..", "..", line, col))
            i += 2
            col += 2
            continue
        if ch in ";-:,=":
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "NUMBER" if word.isdigit() else "NAME"
            tokens.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        raise DiagramSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok[0] != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise DiagramSyntaxError(
                f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3]
            )
        return self.advance()

    def fail(self, message):
        tok = self.peek()
        raise DiagramSyntaxError(message, tok[2], tok[3])


def parse_diagram(text: str) -> CoxeterSystem:
    """Parse DSL source into a :class:`CoxeterSystem`.

    Unlisted pairs default to order 2 and unlabeled edges to order 3.
    ``let name = value`` statements bind symbolic orders in the same file.
    Nodes mentioned only in edges are declared implicitly, in order of
    first mention.
    """
    p = _Parser(text)
    generators: list = []
    seen = set()
    orders = {}
    lets = {}

    def declare(name):
        if name not in seen:
            seen.add(name)
            generators.append(name)

    parsed_any = False
    while True:
        tok = p.peek()
        if tok[0] == "EOF":
            break
        if tok[0] == ";":
            p.advance()
            continue
        parsed_any = True
        if tok[0] == "NAME" and tok[1] == "nodes":
            p.advance()
            first = p.peek()
            if first[0] not in ("NAME", "NUMBER"):
                p.fail("expected a node name or range after 'nodes'")
            p.advance()
            if p.peek()[0] == "..":
                if first[0] != "NUMBER":
                    raise DiagramSyntaxError(
                        "range endpoints must be integers", first[2], first[3]
                    )
                p.advance()
                last = p.expect("NUMBER")
                lo, hi = int(first[1]), int(last[1])
                if hi < lo:
                    raise DiagramSyntaxError(
                        f"empty range {lo}..{hi}", first[2], first[3]
                    )
                for k in range(lo, hi + 1):
                    declare(str(k))
            else:
                declare(first[1])
                while p.peek()[0] == ",":
                    p.advance()
                    nxt = p.peek()
                    if nxt[0] not in ("NAME", "NUMBER"):
                        p.fail("expected a node name after ','")
                    p.advance()
                    declare(nxt[1])
        elif tok[0] == "NAME" and tok[1] == "let":
            p.advance()
            name = p.expect("NAME")[1]
            p.expect("=")
            val = p.peek()
            if val[0] == "NUMBER":
                p.advance()
                lets[name] = int(val[1])
            elif val[0] == "NAME" and val[1] == "inf":
                p.advance()
                lets[name] = INF
            else:
                p.fail("expected an integer or 'inf' after '='")
        elif tok[0] in ("NAME", "NUMBER"):
            p.advance()
            s = tok[1]
            p.expect("-")
            ttok = p.peek()
            if ttok[0] not in ("NAME", "NUMBER"):
                p.fail("expected a node name after '-'")
            p.advance()
            t = ttok[1]
            if s == t:
                raise DiagramSyntaxError(f"self-edge {s}-{t}", tok[2], tok[3])
            m = 3
            if p.peek()[0] == ":":
                p.advance()
                otok = p.peek()
                if otok[0] == "NUMBER":
                    p.advance()
                    m = int(otok[1])
                    if m < 2:
                        raise DiagramSyntaxError(
                            f"order must be >= 2, got {m}", otok[2], otok[3]
                        )
                elif otok[0] == "NAME":
                    p.advance()
                    m = INF if otok[1] == "inf" else otok[1]
                else:
                    p.fail("expected an order after ':'")
            declare(s)
            declare(t)
            pair = frozenset((s, t))
            if pair in orders:
                raise DiagramSyntaxError(
                    f"duplicate edge {s}-{t}", tok[2], tok[3]
                )
            orders[pair] = m
        else:
            p.fail(f"unexpected token {tok[1]!r}")
        nxt = p.peek()
        if nxt[0] == ";":
            p.advance()
        elif nxt[0] != "EOF":
            raise DiagramSyntaxError(
                f"expected ';' before {nxt[1]!r}", nxt[2], nxt[3]
            )
    if not parsed_any:
        tok = p.peek()
        raise DiagramSyntaxError("empty diagram source", tok[2], tok[3])

    if lets:
        orders = {
            pair: lets.get(m, m) if isinstance(m, str) else m
            for pair, m in orders.items()
        }
    return CoxeterSystem(generators, orders)


# ---------------------------------------------------------------------------
# Gram matrix
# ---------------------------------------------------------------------------


def gram_entry(m) -> float:
    """Off-diagonal Gram value -2 cos(pi/m), with cos(pi/inf) := 1."""
    if isinstance(m, Infinity):
        return -2.0
    if isinstance(m, str):
        raise UnboundParameterError(f"unbound parameter {m!r}")
    return -2.0 * math.cos(math.pi / m)


def gram_matrix(system: CoxeterSystem) -> np.ndarray:
    """Gram matrix Cos(W): diagonal 2, entries -2cos(pi/m_st)."""
    if not system.is_bound:
        raise UnboundParameterError(
            "unbound parameters: " + ", ".join(system.symbolic_parameters())
        )
    n = system.rank
    gens = system.generators
    out = 2.0 * np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            m = system.order(gens[i], gens[j])
            if m != 2:
                out[i, j] = out[j, i] = gram_entry(m)
    return out


def split_components(system: CoxeterSystem):
    """Connected components of the diagram graph, as sub-systems.

    Components are returned in order of their earliest generator, and each
    component preserves the input generator order.
    """
    comps = list(nx.connected_components(system.graph()))
    pos = {g: i for i, g in enumerate(system.generators)}
    comps.sort(key=lambda c: min(pos[g] for g in c))
    return [system.subsystem(c) for c in comps]


def subsystem(system: CoxeterSystem, subset) -> CoxeterSystem:
    """Standard subsystem (restriction of M to T x T)."""
    return system.subsystem(subset)


# ---------------------------------------------------------------------------
# Classification against the catalog of irreducible diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationLabel:
    """Result of classifying an irreducible system.

    kind is one of "Spherical", "Affine", "Lanner", "Large"; catalog_name
    is set for every spherical or affine diagram and for the simplex
    hyperbolic (Lanner) groups of ranks 3-5.
    """

    kind: str
    catalog_name: Optional[str] = None


def _require_irreducible(system):
    if system.rank == 0:
        raise DiagramError("empty system is not irreducible")
    if not nx.is_connected(system.graph()):
        raise DiagramError("system is reducible")


def classify_irreducible(system: CoxeterSystem) -> ClassificationLabel:
    """Classify an irreducible system as Spherical/Affine/Lanner/Large.

    Exact catalog isomorphism decides the spherical and affine cases (and
    names Lanner simplex groups); a numeric eigenvalue fallback covers
    anything outside the catalogs.  Raises on reducible input.
    """
    _require_irreducible(system)
    from . import catalogs

    name = catalogs.match(system)
    if name is not None:
        return ClassificationLabel(catalogs.kind_of(name), name)
    if not system.is_bound:
        raise UnboundParameterError(
            "cannot classify with unbound parameters: "
            + ", ".join(system.symbolic_parameters())
        )
    # Numeric fallback.  All catalog diagrams were already matched, so a
    # positive (semi)definite outcome here would signal a catalog gap.
    tol = 1e-9
    cos = gram_matrix(system)
    n = system.rank
    minors_pd = all(
        np.linalg.eigvalsh(np.delete(np.delete(cos, i, 0), i, 1)).min() > tol
        for i in range(n)
    )
    if minors_pd:
        det = float(np.linalg.det(cos))
        if det > tol:
            return ClassificationLabel("Spherical", None)
        if det < -tol:
            # simplex hyperbolic; named only when the catalog knows it
            return ClassificationLabel("Lanner", None)
        return ClassificationLabel("Affine", None)
    return ClassificationLabel("Large", None)


def catalog_match(system: CoxeterSystem) -> Optional[str]:
    """Catalog name of an irreducible diagram, or None if unlisted."""
    _require_irreducible(system)
    from . import catalogs

    return catalogs.match(system)
