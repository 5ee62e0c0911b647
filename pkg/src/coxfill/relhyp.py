"""Relative Gromov-hyperbolicity of Coxeter groups.

W_S is Gromov-hyperbolic relative to the standard subgroups {W_T} exactly
when four combinatorial conditions hold: every affine subsystem of rank
at least 3 sits inside a peripheral, every perpendicular pair of
irreducible non-spherical subsystems sits jointly inside a peripheral,
distinct peripherals intersect spherically, and each peripheral absorbs
the perpendicular of every irreducible non-spherical subsystem it
contains.  Everything is decided by exhaustive subset enumeration, which
is cheap at the ranks that occur here (|S| <= 12).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .diagram import CoxeterSystem, classify_irreducible


class RelHypError(ValueError):
    """Invalid peripheral data or undecidable (unbound) system."""


@dataclass(frozen=True)
class PeripheralCollection:
    """A collection of candidate peripheral subsets of the generators."""

    subsets: tuple

    def __init__(self, subsets):
        cleaned = []
        for T in subsets:
            T = frozenset(T)
            if not T:
                raise RelHypError("peripheral subsets must be nonempty")
            if T in cleaned:
                raise RelHypError(f"duplicate peripheral subset {sorted(T)}")
            cleaned.append(T)
        object.__setattr__(self, "subsets", tuple(cleaned))

    def __iter__(self):
        return iter(self.subsets)

    def __len__(self):
        return len(self.subsets)

    def to_json(self):
        return [sorted(T) for T in self.subsets]


@dataclass(frozen=True)
class RelHypVerdict:
    """Outcome of the four-condition check.

    ``violations`` holds one first-found witness per violated condition,
    as (condition index, tuple of witness subsets).
    """

    holds: bool
    violations: tuple

    def to_json(self):
        return {
            "holds": self.holds,
            "violations": [
                {"condition": idx, "witnesses": [sorted(w) for w in wits]}
                for idx, wits in self.violations
            ],
        }


class _Analysis:
    """Bitmask subset calculus over one bound Coxeter system."""

    def __init__(self, W: CoxeterSystem):
        if not W.is_bound:
            raise RelHypError(
                "system has unbound parameters: "
                + ", ".join(W.symbolic_parameters())
            )
        self.W = W
        self.gens = W.generators
        self.n = len(self.gens)
        self.full = (1 << self.n) - 1
        self.perp_masks = []
        self.adj_masks = []
        for i, s in enumerate(self.gens):
            pm = am = 0
            for j, t in enumerate(self.gens):
                if i == j:
                    continue
                if W.order(s, t) == 2:
                    pm |= 1 << j
                else:
                    am |= 1 << j
            self.perp_masks.append(pm)
            self.adj_masks.append(am)
        self._kind_cache = {}

    def mask(self, subset) -> int:
        out = 0
        for s in subset:
            try:
                out |= 1 << self.gens.index(s)
            except ValueError:
                raise RelHypError(f"unknown generator {s!r}") from None
        return out

    def subset(self, mask: int) -> frozenset:
        return frozenset(self.gens[i] for i in range(self.n) if mask >> i & 1)

    def components(self, mask: int):
        out = []
        rest = mask
        while rest:
            seed = rest & -rest
            comp = 0
            frontier = seed
            while frontier:
                comp |= frontier
                grown = 0
                f = frontier
                while f:
                    i = (f & -f).bit_length() - 1
                    grown |= self.adj_masks[i] & mask
                    f &= f - 1
                frontier = grown & ~comp
            out.append(comp)
            rest &= ~comp
        return out

    def _component_kind(self, comp: int) -> str:
        kind = self._kind_cache.get(comp)
        if kind is None:
            sub = self.W.subsystem(sorted(self.subset(comp), key=self.gens.index))
            kind = classify_irreducible(sub).kind
            self._kind_cache[comp] = kind
        return kind

    def kinds(self, mask: int):
        return tuple(self._component_kind(c) for c in self.components(mask))

    def spherical(self, mask: int) -> bool:
        return all(k == "Spherical" for k in self.kinds(mask))

    def all_affine(self, mask: int) -> bool:
        ks = self.kinds(mask)
        return bool(ks) and all(k == "Affine" for k in ks)

    def irreducible_nonspherical(self, mask: int) -> bool:
        comps = self.components(mask)
        return len(comps) == 1 and self._component_kind(comps[0]) != "Spherical"

    def perp_of(self, mask: int) -> int:
        out = self.full
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            out &= self.perp_masks[i]
            m &= m - 1
        return out & ~mask

    def ins_masks(self):
        """All irreducible non-spherical subsets, ascending."""
        out = []
        for mask in range(1, self.full + 1):
            if self.irreducible_nonspherical(mask):
                out.append(mask)
        return out


def affine_subsystems(W: CoxeterSystem, min_rank: int = 1):
    """Subsets whose components are all irreducible affine, of size >= min_rank."""
    if min_rank < 1:
        raise RelHypError("min_rank must be >= 1")
    an = _Analysis(W)
    out = []
    for mask in range(1, an.full + 1):
        if mask.bit_count() < min_rank:
            continue
        if an.all_affine(mask):
            out.append(an.subset(mask))
    return sorted(out, key=lambda T: (len(T), sorted(T)))


def perp(W: CoxeterSystem, T) -> frozenset:
    """All generators outside T commuting with every element of T."""
    an = _Analysis(W)
    return an.subset(an.perp_of(an.mask(T)))


def caprace_check(W: CoxeterSystem, T_coll) -> RelHypVerdict:
    """Evaluate the four conditions against a peripheral collection.

    One first-found witness is reported per violated condition:
    condition 1 reports the uncovered affine subsystem, condition 2 the
    perpendicular pair, condition 3 the offending peripheral pair, and
    condition 4 the peripheral, the subsystem, and its perpendicular.
    """
    if not isinstance(T_coll, PeripheralCollection):
        T_coll = PeripheralCollection(T_coll)
    an = _Analysis(W)
    members = [an.mask(T) for T in T_coll]
    violations = []

    for mask in range(1, an.full + 1):
        if mask.bit_count() < 3 or not an.all_affine(mask):
            continue
        if not any(mask & ~T == 0 for T in members):
            violations.append((1, (an.subset(mask),)))
            break

    ins = an.ins_masks()
    done = False
    for s1 in ins:
        pmask = an.perp_of(s1)
        for s2 in ins:
            if s2 <= s1 or s2 & ~pmask:
                continue
            union = s1 | s2
            if not any(union & ~T == 0 for T in members):
                violations.append((2, (an.subset(s1), an.subset(s2))))
                done = True
                break
        if done:
            break

    for a, b in itertools.combinations(members, 2):
        if not an.spherical(a & b):
            violations.append((3, (an.subset(a), an.subset(b))))
            break

    done = False
    for T in members:
        for u in ins:
            if u & ~T:
                continue
            p = an.perp_of(u)
            if p & ~T:
                violations.append((4, (an.subset(T), an.subset(u), an.subset(p))))
                done = True
                break
        if done:
            break

    return RelHypVerdict(holds=not violations, violations=tuple(violations))


def default_peripherals(W: CoxeterSystem) -> PeripheralCollection:
    """Closure heuristic: maximal rank->=3 affine subsystems, then absorb
    perpendiculars (condition 4) and perpendicular-pair unions
    (condition 2) until stable."""
    an = _Analysis(W)
    affine = [
        m
        for m in range(1, an.full + 1)
        if m.bit_count() >= 3 and an.all_affine(m)
    ]
    members = [m for m in affine if not any(m != o and m & ~o == 0 for o in affine)]
    ins = an.ins_masks()
    pairs = []
    for s1 in ins:
        pmask = an.perp_of(s1)
        for s2 in ins:
            if s2 > s1 and not s2 & ~pmask:
                pairs.append((s1, s2))

    changed = True
    while changed:
        changed = False
        for i, T in enumerate(members):
            for u in ins:
                if u & ~T:
                    continue
                p = an.perp_of(u)
                if p & ~T:
                    members[i] = T | p
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        for s1, s2 in pairs:
            union = s1 | s2
            if any(union & ~T == 0 for T in members):
                continue
            for i, T in enumerate(members):
                if not s1 & ~T or not s2 & ~T:
                    members[i] = T | union
                    break
            else:
                members.append(union)
            changed = True
            break
        if changed:
            continue
        pruned = [
            m
            for i, m in enumerate(members)
            if not any(
                (m & ~o == 0) and (m != o or i > j)
                for j, o in enumerate(members)
                if j != i
            )
        ]
        if pruned != members:
            members = pruned
            changed = True

    subsets = sorted(
        (an.subset(m) for m in members), key=lambda T: (len(T), sorted(T))
    )
    return PeripheralCollection(subsets)


def affine_components(W: CoxeterSystem, T):
    """The affine components of a subset with their catalog names."""
    an = _Analysis(W)
    out = []
    for comp in an.components(an.mask(T)):
        sub = W.subsystem(sorted(an.subset(comp), key=an.gens.index))
        label = classify_irreducible(sub)
        if label.kind == "Affine":
            out.append((sub.generators, label.catalog_name))
    return out


def virtual_abelian_rank(W: CoxeterSystem, T) -> int:
    """Sum of (rank - 1) over irreducible affine components of T;
    spherical components contribute 0."""
    return sum(len(gens) - 1 for gens, _ in affine_components(W, T))
