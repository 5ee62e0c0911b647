"""Catalogs of irreducible spherical, affine and simplex-hyperbolic diagrams.

Recognition is structural: the connected diagram's shape (path, cycle,
tripod, forked tree) plus its edge labels determine membership in the
classical lists.  Every catalog name is concrete ("B_4", "tilde_E_7",
"Lanner-3-cycle-5343"), and :func:`build` reconstructs a diagram from its
name, so match/build round-trip.

Simplex-hyperbolic (Lanner) names use the simplex dimension rank-1:

* paths of ranks 4-5: "Lanner-3-535", "Lanner-4-5335" (labels read from
  the end making the sequence lexicographically largest);
* cycles: "Lanner-3-cycle-5343" (largest dihedral rotation);
* the two sporadic trees: "Lanner-3-tripod", "Lanner-4-fork";
* rank 3, where labels are unbounded: "Lanner-2-triangle-7-3-3" and
  "Lanner-2-chain-7-3" with labels sorted descending.
"""

from __future__ import annotations

from typing import Optional

from .diagram import (
    INF,
    CoxeterSystem,
    DiagramError,
    Infinity,
    UnboundParameterError,
)

#: Canonical strings for the rank-4 and rank-5 simplex-hyperbolic entries.
_LANNER_PATHS_4 = {"535", "534", "353"}
_LANNER_PATHS_5 = {"5333", "5334", "5335"}
_LANNER_CYCLES_4 = {"4333", "5333", "4343", "5343", "5353"}
_LANNER_CYCLES_5 = {"43333"}


def kind_of(name: str) -> str:
    """Category of a catalog name: Spherical, Affine or Lanner."""
    if name.startswith("tilde_"):
        return "Affine"
    if name.startswith("Lanner-"):
        return "Lanner"
    return "Spherical"


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def match(system: CoxeterSystem) -> Optional[str]:
    """Catalog name of a connected diagram, or None if not listed."""
    if not system.is_bound:
        raise UnboundParameterError(
            "cannot match with unbound parameters: "
            + ", ".join(system.symbolic_parameters())
        )
    n = system.rank
    if n == 1:
        return "A_1"
    g = system.graph()
    import networkx as nx

    if not nx.is_connected(g):
        raise DiagramError("system is reducible")

    labels = [m for _, _, m in system.edges()]
    if any(isinstance(m, Infinity) for m in labels):
        # The only listed diagram with an infinite label is the rank-2
        # affine one.
        if n == 2:
            return "tilde_A_1"
        return None
    if n == 2:
        (m,) = labels
        if m == 3:
            return "A_2"
        if m == 4:
            return "B_2"
        return f"I_2({m})"

    num_edges = g.number_of_edges()
    if num_edges == n - 1:
        return _match_tree(system, g)
    if num_edges == n and all(d == 2 for _, d in g.degree()):
        return _match_cycle(system, g)
    return None


def _path_sequence(system, g):
    """Edge labels along a path graph, canonical direction (max lex)."""
    ends = [v for v, d in g.degree() if d == 1]
    start = ends[0]
    seq = []
    prev, cur = None, start
    while True:
        nbrs = [u for u in g.neighbors(cur) if u != prev]
        if not nbrs:
            break
        nxt = nbrs[0]
        seq.append(system.order(cur, nxt))
        prev, cur = cur, nxt
    return max(tuple(seq), tuple(reversed(seq)))


def _match_tree(system, g):
    degrees = dict(g.degree())
    max_deg = max(degrees.values())
    if max_deg == 2:
        return _match_path(system, g)
    if max_deg == 4:
        # star on 5 nodes, all labels 3
        if (
            system.rank == 5
            and sorted(degrees.values()) == [1, 1, 1, 1, 4]
            and all(m == 3 for _, _, m in system.edges())
        ):
            return "tilde_D_4"
        return None
    if max_deg != 3:
        return None
    forks = [v for v, d in degrees.items() if d == 3]
    if len(forks) == 2:
        # forks at both ends of a path, all labels 3
        if any(m != 3 for _, _, m in system.edges()):
            return None
        leaves = [v for v, d in degrees.items() if d == 1]
        if len(leaves) != 4:
            return None
        if any(
            sum(1 for u in g.neighbors(f) if degrees[u] == 1) != 2
            for f in forks
        ):
            return None
        return f"tilde_D_{system.rank - 1}"
    if len(forks) != 1:
        return None
    return _match_tripod(system, g, forks[0])


def _match_tripod(system, g, center):
    """Trees with a single degree-3 node: D/E series and two sporadics."""
    branches = []  # (length, [labels from center outward])
    for first in g.neighbors(center):
        labels = []
        prev, cur = center, first
        while True:
            labels.append(system.order(prev, cur))
            nbrs = [u for u in g.neighbors(cur) if u != prev]
            if not nbrs:
                break
            if len(nbrs) > 1 or g.degree(cur) > 2:
                return None  # second branching point elsewhere
            prev, cur = cur, nbrs[0]
        branches.append(labels)
    branches.sort(key=lambda b: (len(b), b))
    lengths = tuple(len(b) for b in branches)
    non3 = [m for b in branches for m in b if m != 3]
    if not non3:
        a, b, c = lengths
        if (a, b) == (1, 1):
            return f"D_{c + 3}"
        return {
            (1, 2, 2): "E_6",
            (1, 2, 3): "E_7",
            (1, 2, 4): "E_8",
            (2, 2, 2): "tilde_E_6",
            (1, 3, 3): "tilde_E_7",
            (1, 2, 5): "tilde_E_8",
        }.get(lengths)
    if len(non3) != 1:
        return None
    label = non3[0]
    if lengths[:2] != (1, 1):
        return None
    long = branches[2]
    if label == 4 and long[-1] == 4 and all(m == 3 for m in long[:-1]):
        # 4 sits on the outermost edge opposite the fork
        return f"tilde_B_{lengths[2] + 2}"
    if label == 5:
        if lengths == (1, 1, 1):
            return "Lanner-3-tripod"
        if lengths == (1, 1, 2) and long == [3, 5]:
            return "Lanner-4-fork"
    return None


def _match_path(system, g):
    n = system.rank
    seq = _path_sequence(system, g)
    if all(m == 3 for m in seq):
        return f"A_{n}"
    if n == 3:
        p, q = seq
        if q > p:
            p, q = q, p
        table = {(4, 3): "B_3", (5, 3): "H_3", (6, 3): "tilde_G_2",
                 (4, 4): "tilde_C_2"}
        if (p, q) in table:
            return table[(p, q)]
        # remaining rank-3 paths: hyperbolic iff 1/p + 1/q < 1/2,
        # and all leftovers satisfy that
        return f"Lanner-2-chain-{p}-{q}"
    non3 = [(i, m) for i, m in enumerate(seq) if m != 3]
    if len(non3) == 1:
        i, m = non3[0]
        last = len(seq) - 1
        if m == 4:
            if i == 0:
                return f"B_{n}"
            if n == 4 and i == 1:
                return "F_4"
            if n == 5 and seq == (3, 4, 3, 3):
                return "tilde_F_4"
            return None
        if m == 5 and i == 0:
            if n == 4:
                return "H_4"
            if n == 5:
                return "Lanner-4-5333"
            return None
        if m == 5 and n == 4 and i == 1:
            return "Lanner-3-353"
        return None
    if len(non3) == 2:
        first, second = seq[0], seq[-1]
        if (
            first == 4
            and second == 4
            and all(m == 3 for m in seq[1:-1])
        ):
            return f"tilde_C_{n - 1}"
        code = "".join(str(m) for m in seq)
        if n == 4 and code in _LANNER_PATHS_4:
            return f"Lanner-3-{code}"
        if n == 5 and code in _LANNER_PATHS_5:
            return f"Lanner-4-{code}"
    return None


def _cycle_sequence(system, g):
    """Edge labels in cyclic order around a cycle graph."""
    start = next(iter(g.nodes))
    seq = []
    prev, cur = None, start
    while True:
        nbrs = [u for u in g.neighbors(cur) if u != prev]
        nxt = nbrs[0] if nbrs else prev
        seq.append(system.order(cur, nxt))
        prev, cur = cur, nxt
        if cur == start:
            break
    return seq


def _dihedral_max(seq):
    """Largest rotation of seq or its reversal, as a digit string."""
    best = None
    for s in (seq, list(reversed(seq))):
        for k in range(len(s)):
            rot = tuple(s[k:] + s[:k])
            if best is None or rot > best:
                best = rot
    return "".join(str(m) for m in best)


def _match_cycle(system, g):
    n = system.rank
    seq = _cycle_sequence(system, g)
    if all(m == 3 for m in seq):
        return f"tilde_A_{n - 1}"
    if n == 3:
        p, q, r = sorted(seq, reverse=True)
        # with all labels >= 3, the angle sum is below pi unless all are 3
        return f"Lanner-2-triangle-{p}-{q}-{r}"
    code = _dihedral_max(seq)
    if n == 4 and code in _LANNER_CYCLES_4:
        return f"Lanner-3-cycle-{code}"
    if n == 5 and code in _LANNER_CYCLES_5:
        return f"Lanner-4-cycle-{code}"
    return None


# ---------------------------------------------------------------------------
# Building diagrams from names
# ---------------------------------------------------------------------------


def _path_system(labels):
    n = len(labels) + 1
    gens = [str(i) for i in range(1, n + 1)]
    orders = {
        frozenset((str(i), str(i + 1))): m
        for i, m in enumerate(labels, start=1)
    }
    return CoxeterSystem(gens, orders)


def _cycle_system(labels):
    n = len(labels)
    gens = [str(i) for i in range(1, n + 1)]
    orders = {}
    for i, m in enumerate(labels, start=1):
        j = i + 1 if i < n else 1
        orders[frozenset((str(i), str(j)))] = m
    return CoxeterSystem(gens, orders)


def build(name: str) -> CoxeterSystem:
    """Reconstruct a diagram from its catalog name.

    Nodes are numbered "1".."rank".  Raises DiagramError on names outside
    the catalog (including parameter values violating the defining
    inequality, e.g. "I_2(4)" which is listed as "B_2").
    """
    sys_ = _build(name)
    if match(sys_) != name:
        raise DiagramError(f"not a canonical catalog name: {name!r}")
    return sys_


def _build(name):
    import re

    m = re.fullmatch(r"A_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise DiagramError(f"bad rank in {name!r}")
        return _path_system([3] * (n - 1))
    m = re.fullmatch(r"B_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise DiagramError(f"bad rank in {name!r}")
        return _path_system([4] + [3] * (n - 2))
    m = re.fullmatch(r"D_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 4:
            raise DiagramError(f"bad rank in {name!r}")
        orders = {frozenset((str(i), str(i + 1))): 3 for i in range(1, n - 2)}
        orders[frozenset((str(n - 2), str(n - 1)))] = 3
        orders[frozenset((str(n - 2), str(n)))] = 3
        return CoxeterSystem([str(i) for i in range(1, n + 1)], orders)
    m = re.fullmatch(r"I_2\((\d+)\)", name)
    if m:
        p = int(m.group(1))
        if p < 3:
            raise DiagramError(f"bad order in {name!r}")
        return _path_system([p])
    if name == "H_3":
        return _path_system([5, 3])
    if name == "H_4":
        return _path_system([5, 3, 3])
    if name == "F_4":
        return _path_system([3, 4, 3])
    m = re.fullmatch(r"E_([678])", name)
    if m:
        n = int(m.group(1))
        orders = {
            frozenset((str(i), str(i + 1))): 3 for i in range(1, n - 1)
        }
        orders[frozenset(("3", str(n)))] = 3
        return CoxeterSystem([str(i) for i in range(1, n + 1)], orders)

    if name == "tilde_A_1":
        return _path_system([INF])
    m = re.fullmatch(r"tilde_A_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise DiagramError(f"bad rank in {name!r}")
        return _cycle_system([3] * (n + 1))
    m = re.fullmatch(r"tilde_B_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 3:
            raise DiagramError(f"bad rank in {name!r}")
        orders = {frozenset(("1", "2")): 4}
        for i in range(2, n):
            orders[frozenset((str(i), str(i + 1)))] = 3
        orders[frozenset((str(n - 1), str(n + 1)))] = 3
        return CoxeterSystem([str(i) for i in range(1, n + 2)], orders)
    m = re.fullmatch(r"tilde_C_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise DiagramError(f"bad rank in {name!r}")
        return _path_system([4] + [3] * (n - 2) + [4])
    m = re.fullmatch(r"tilde_D_(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 4:
            raise DiagramError(f"bad rank in {name!r}")
        orders = {
            frozenset(("1", "3")): 3,
            frozenset(("2", "3")): 3,
            frozenset((str(n - 1), str(n))): 3,
            frozenset((str(n - 1), str(n + 1))): 3,
        }
        for i in range(3, n - 1):
            orders[frozenset((str(i), str(i + 1)))] = 3
        return CoxeterSystem([str(i) for i in range(1, n + 2)], orders)
    if name == "tilde_G_2":
        return _path_system([6, 3])
    if name == "tilde_F_4":
        return _path_system([3, 4, 3, 3])
    if name == "tilde_E_6":
        orders = {
            frozenset(("1", "2")): 3,
            frozenset(("2", "3")): 3,
            frozenset(("3", "4")): 3,
            frozenset(("4", "5")): 3,
            frozenset(("3", "6")): 3,
            frozenset(("6", "7")): 3,
        }
        return CoxeterSystem([str(i) for i in range(1, 8)], orders)
    if name == "tilde_E_7":
        orders = {frozenset((str(i), str(i + 1))): 3 for i in range(1, 7)}
        orders[frozenset(("4", "8"))] = 3
        return CoxeterSystem([str(i) for i in range(1, 9)], orders)
    if name == "tilde_E_8":
        orders = {frozenset((str(i), str(i + 1))): 3 for i in range(1, 8)}
        orders[frozenset(("3", "9"))] = 3
        return CoxeterSystem([str(i) for i in range(1, 10)], orders)

    m = re.fullmatch(r"Lanner-2-triangle-(\d+)-(\d+)-(\d+)", name)
    if m:
        p, q, r = (int(x) for x in m.groups())
        return _cycle_system([p, q, r])
    m = re.fullmatch(r"Lanner-2-chain-(\d+)-(\d+)", name)
    if m:
        p, q = (int(x) for x in m.groups())
        return _path_system([p, q])
    m = re.fullmatch(r"Lanner-([34])-cycle-(\d+)", name)
    if m:
        return _cycle_system([int(c) for c in m.group(2)])
    if name == "Lanner-3-tripod":
        orders = {
            frozenset(("1", "2")): 5,
            frozenset(("1", "3")): 3,
            frozenset(("1", "4")): 3,
        }
        return CoxeterSystem(["1", "2", "3", "4"], orders)
    if name == "Lanner-4-fork":
        orders = {
            frozenset(("1", "2")): 5,
            frozenset(("2", "3")): 3,
            frozenset(("3", "4")): 3,
            frozenset(("3", "5")): 3,
        }
        return CoxeterSystem(["1", "2", "3", "4", "5"], orders)
    m = re.fullmatch(r"Lanner-([34])-(\d+)", name)
    if m:
        return _path_system([int(c) for c in m.group(2)])
    raise DiagramError(f"unknown catalog name: {name!r}")


def canonical_names(p_max: int = 12, rank_max: int = 10):
    """All catalog names with rank <= rank_max and labels <= p_max.

    Covers every fixed entry and samples the parametric families; used by
    the regression tests that classify the whole catalog.
    """
    names = []
    for n in range(1, rank_max + 1):
        names.append(f"A_{n}")
        if n >= 2:
            names.append(f"B_{n}")
        if n >= 4:
            names.append(f"D_{n}")
    names += [f"I_2({p})" for p in range(5, p_max + 1)]
    names += ["H_3", "H_4", "F_4", "E_6", "E_7", "E_8"]
    names += [f"tilde_A_{n}" for n in range(1, rank_max)]
    names += [f"tilde_B_{n}" for n in range(3, rank_max)]
    names += [f"tilde_C_{n}" for n in range(2, rank_max)]
    names += [f"tilde_D_{n}" for n in range(4, rank_max)]
    names += ["tilde_G_2", "tilde_F_4", "tilde_E_6", "tilde_E_7", "tilde_E_8"]
    for p in range(3, p_max + 1):
        for q in range(3, p + 1):
            for r in range(3, q + 1):
                if 1 / p + 1 / q + 1 / r < 1:
                    names.append(f"Lanner-2-triangle-{p}-{q}-{r}")
            if 1 / p + 1 / q < 0.5:
                names.append(f"Lanner-2-chain-{p}-{q}")
    names += [f"Lanner-3-{c}" for c in sorted(_LANNER_PATHS_4)]
    names += [f"Lanner-3-cycle-{c}" for c in sorted(_LANNER_CYCLES_4)]
    names += ["Lanner-3-tripod"]
    names += [f"Lanner-4-{c}" for c in sorted(_LANNER_PATHS_5)]
    names += [f"Lanner-4-cycle-{c}" for c in sorted(_LANNER_CYCLES_5)]
    names += ["Lanner-4-fork"]
    return names
