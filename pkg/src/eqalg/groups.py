"""Finite groups by multiplication table, and their subgroup lattices."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, prod
from typing import Sequence

from .linalg import QMatrix

DEFAULT_MAX_ORDER = 48


class GroupSpecError(ValueError):
    """Malformed group name."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownGroupError(ValueError):
    pass


class GroupOrderError(ValueError):
    """Group order exceeds the configured bound."""


class NotAGroupError(ValueError):
    pass


class NotContainedError(ValueError):
    pass


class DomainError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class FiniteGroup:
    """A finite group given by its multiplication table on indices ``0..n-1``.

    Construction verifies associativity, identity and inverses.
    """

    def __init__(self, table: Sequence[Sequence[int]], name: str = "G",
                 labels: Sequence[str] | None = None,
                 cyclic_factors: Sequence[int] | None = None,
                 check: bool = True):
        self.table = tuple(tuple(r) for r in table)
        self.order = len(self.table)
        self.name = name
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.order))
        self.cyclic_factors = tuple(cyclic_factors) if cyclic_factors is not None else None
        n = self.order
        if n == 0 or any(len(r) != n for r in self.table):
            raise NotAGroupError("multiplication table must be square and nonempty")
        ident = [e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))]
        if not ident:
            raise NotAGroupError("no identity element")
        self.identity = ident[0]
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if self.table[x][y] == self.identity]
            if len(ys) != 1 or self.table[ys[0]][x] != self.identity:
                raise NotAGroupError(f"element {x} has no two-sided inverse")
            inv.append(ys[0])
        self.inverse = tuple(inv)
        if check:
            t = self.table
            for a in range(n):
                ta = t[a]
                for b in range(n):
                    tab = t[ta[b]]
                    tb = t[b]
                    for c in range(n):
                        if tab[c] != ta[tb[c]]:
                            raise NotAGroupError(f"not associative at ({a},{b},{c})")
        self.abelian = all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a))
        if self.cyclic_factors is not None and not self.abelian:
            raise NotAGroupError("cyclic factor description given for a nonabelian table")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.table[self.table[g][x]][self.inverse[g]]

    def power(self, x: int, k: int) -> int:
        if k < 0:
            x, k = self.inverse[x], -k
        r = self.identity
        for _ in range(k):
            r = self.table[r][x]
        return r

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    def closure(self, gens: Sequence[int]) -> frozenset[int]:
        elems = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in elems:
                        elems.add(y)
                        new.append(y)
            frontier = new
        return frozenset(elems)


# ---------------------------------------------------------------------------
# built-in groups and the group-name grammar


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], name=f"C{n}",
                       cyclic_factors=[n], check=False)


def _perm_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    # composition (p*q)(x) = p(q(x))
    table = [[index[tuple(p[q[x]] for x in range(len(q)))] for q in perms] for p in perms]
    return FiniteGroup(table, name=name, labels=["".join(map(str, p)) for p in perms])


def _close_perms(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    n = len(gens[0])
    ident = tuple(range(n))
    seen = [ident]
    known = {ident}
    i = 0
    while i < len(seen):
        p = seen[i]
        for g in gens:
            r = tuple(p[g[x]] for x in range(n))
            if r not in known:
                known.add(r)
                seen.append(r)
        i += 1
    return [ident] + sorted(p for p in seen if p != ident)


def symmetric3() -> FiniteGroup:
    return _perm_group(_close_perms([(1, 0, 2), (1, 2, 0)]), "S3")


def dihedral8() -> FiniteGroup:
    # symmetries of a square with vertices 0..3
    return _perm_group(_close_perms([(1, 2, 3, 0), (3, 2, 1, 0)]), "D4")


def quaternion8() -> FiniteGroup:
    # elements: sign * unit, unit in (1, i, j, k)
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]
    index = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, u1 in elems:
        row = []
        for s2, u2 in elems:
            s, u = units[(u1, u2)]
            row.append(index[(s1 * s2 * s, u)])
        table.append(row)
    labels = [("" if s > 0 else "-") + u for s, u in elems]
    return FiniteGroup(table, name="Q8", labels=labels)


_NAMED = {"S3": (6, symmetric3), "D4": (8, dihedral8), "Q8": (8, quaternion8)}


def direct_product(groups: Sequence[FiniteGroup], name: str | None = None) -> FiniteGroup:
    """Direct product; element index is mixed radix with the first factor most significant."""
    sizes = [g.order for g in groups]
    elems = list(itertools.product(*(range(s) for s in sizes)))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple(g.table[x][y] for g, x, y in zip(groups, a, b))] for b in elems] for a in elems]
    factors = None
    if all(g.cyclic_factors is not None for g in groups):
        factors = [f for g in groups for f in g.cyclic_factors]
    labels = ["(" + ",".join(g.labels[x] for g, x in zip(groups, e)) + ")" for e in elems]
    if len(groups) == 1:
        labels = list(groups[0].labels)
    return FiniteGroup(table, name=name or "x".join(g.name for g in groups), labels=labels,
                       cyclic_factors=factors, check=False)


_ATOM = re.compile(r"C(\d+)|S3|D4|Q8")


def parse_group_spec(text: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Parse ``atom ("x" atom)*`` with atoms ``C<n>``, ``S3``, ``D4``, ``Q8``.

    The order is checked against ``max_order`` before any table is built.
    """
    s = text.upper()
    pos = 0
    atoms: list[tuple[str, int]] = []
    while True:
        m = _ATOM.match(s, pos)
        if m is None:
            if pos < len(s) and s[pos] not in "CX" and s[pos].isalpha():
                raise UnknownGroupError(f"unknown group name starting at position {pos} in {text!r}")
            raise GroupSpecError(f"expected a group atom in {text!r}", pos)
        if m.group(1) is not None:
            n = int(m.group(1))
            if n < 1:
                raise GroupSpecError("cyclic order must be positive", pos)
            atoms.append(("C", n))
        else:
            atoms.append((m.group(0), _NAMED[m.group(0)][0]))
        pos = m.end()
        if pos == len(s):
            break
        if s[pos] != "X":
            raise GroupSpecError(f"expected 'x' in {text!r}", pos)
        pos += 1
    order = prod(n for _, n in atoms)
    if order > max_order:
        raise GroupOrderError(f"group {text} has order {order} > bound {max_order}")
    factors = [cyclic_group(n) if kind == "C" else _NAMED[kind][1]() for kind, n in atoms]
    name = "x".join(f.name for f in factors)
    if len(factors) == 1:
        return factors[0]
    return direct_product(factors, name=name)


# ---------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True)
class Subgroup:
    index: int
    elements: frozenset[int]
    generator: int | None  # smallest-index generator when cyclic

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def cyclic(self) -> bool:
        return self.generator is not None

    def __le__(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def __lt__(self, other: "Subgroup") -> bool:
        return self.elements < other.elements


@dataclass(frozen=True)
class WeylGroup:
    """``N_G H / H`` with a multiplication table on cosets.

    ``cosets[i]`` lists the G-elements of coset ``i``; ``reps[i]`` is its
    smallest element; ``quotient`` maps N_G H elements to coset indices.
    """

    group: FiniteGroup
    cosets: tuple[frozenset[int], ...]
    reps: tuple[int, ...]
    quotient: dict[int, int] = field(hash=False, compare=False)


@dataclass(frozen=True)
class WeylAction:
    """Matrices of a finite group acting on Q^dim, one per group element."""

    group: FiniteGroup
    matrices: tuple[QMatrix, ...]
    dim: int

    def __post_init__(self):
        g = self.group
        if len(self.matrices) != g.order:
            raise ValueError("one matrix per group element required")
        if self.matrices[g.identity] != QMatrix.identity(self.dim):
            raise ValueError("identity element must act as the identity matrix")
        for a in range(g.order):
            for b in range(g.order):
                if self.matrices[a] @ self.matrices[b] != self.matrices[g.mul(a, b)]:
                    raise ValueError(f"group law fails for elements {a}, {b}")

    def is_trivial(self) -> bool:
        one = QMatrix.identity(self.dim)
        return all(m == one for m in self.matrices)

    def character(self) -> tuple:
        return tuple(m.trace() for m in self.matrices)


class SubgroupLattice:
    """All subgroups of ``g`` with inclusion, conjugacy, normalisers, Weyl
    groups and the Möbius function.

    Subgroups are sorted by ``(order, sorted elements)``; conjugacy classes by
    the index of their first member, which becomes the class representative.
    """

    def __init__(self, g: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER):
        if g.order > max_order:
            raise GroupOrderError(f"group order {g.order} exceeds bound {max_order}")
        self.group = g
        sets = _all_subgroups(g)
        sets.sort(key=lambda s: (len(s), sorted(s)))
        self.subgroups: tuple[Subgroup, ...] = tuple(
            Subgroup(i, s, _smallest_generator(g, s)) for i, s in enumerate(sets)
        )
        self._by_set = {s.elements: s.index for s in self.subgroups}
        n = len(self.subgroups)
        self.class_of: list[int] = [-1] * n
        self.classes: list[tuple[int, ...]] = []
        for h in self.subgroups:
            if self.class_of[h.index] != -1:
                continue
            members = sorted({self._by_set[frozenset(g.conj(x, e) for e in h.elements)] for x in range(g.order)})
            for m in members:
                self.class_of[m] = h.index
            self.classes.append(tuple(members))
        self.class_reps: tuple[Subgroup, ...] = tuple(self.subgroups[c[0]] for c in self.classes)
        self._mobius: dict[tuple[int, int], int] = {}

    def __repr__(self) -> str:
        return f"SubgroupLattice({self.group.name}: {len(self.subgroups)} subgroups, {len(self.classes)} classes)"

    @property
    def top(self) -> Subgroup:
        return self.subgroups[-1]

    @property
    def trivial(self) -> Subgroup:
        return self.subgroups[0]

    def subgroup(self, elements) -> Subgroup:
        return self.subgroups[self._by_set[frozenset(elements)]]

    def rep(self, h: Subgroup) -> Subgroup:
        return self.subgroups[self.class_of[h.index]]

    def class_members(self, h: Subgroup) -> list[Subgroup]:
        rep = self.class_of[h.index]
        return [self.subgroups[i] for i in self.classes[[c[0] for c in self.classes].index(rep)]]

    def conjugate(self, g: int, h: Subgroup) -> Subgroup:
        """``g H g^-1``."""
        return self.subgroups[self._by_set[frozenset(self.group.conj(g, x) for x in h.elements)]]

    def name(self, h: Subgroup) -> str:
        """Readable name: ``e``, ``<x>`` for cyclic, otherwise a generating set."""
        g = self.group
        if h.order == 1:
            return "e"
        if h.cyclic:
            return f"<{g.labels[h.generator]}>"
        gens: list[int] = []
        span = frozenset([g.identity])
        for x in sorted(h.elements):
            if x not in span:
                gens.append(x)
                span = g.closure(gens)
        return "<" + ",".join(g.labels[x] for x in gens) + ">"

    def subgroups_of(self, h: Subgroup) -> list[Subgroup]:
        return [k for k in self.subgroups if k.elements <= h.elements]

    def intersect(self, a: Subgroup, b: Subgroup) -> Subgroup:
        return self.subgroups[self._by_set[a.elements & b.elements]]

    def normalizer(self, h: Subgroup, within: Subgroup | None = None) -> frozenset[int]:
        amb = range(self.group.order) if within is None else sorted(within.elements)
        return frozenset(x for x in amb if self.conjugate(x, h).index == h.index)

    def relative_classes(self, k: Subgroup) -> list[Subgroup]:
        """Representatives of K-conjugacy classes of subgroups of K."""
        reps = []
        seen: set[int] = set()
        for j in self.subgroups_of(k):
            if j.index in seen:
                continue
            orbit = {self.conjugate(x, j).index for x in k.elements}
            seen |= orbit
            reps.append(j)
        return reps

    def relative_rep(self, k: Subgroup, j: Subgroup) -> Subgroup:
        """Representative (as in :meth:`relative_classes`) of the K-class of ``j``."""
        return self.subgroups[min(self.conjugate(x, j).index for x in k.elements)]

    def weyl(self, h: Subgroup, within: Subgroup | None = None) -> WeylGroup:
        key = (h.index, None if within is None else within.index)
        cache = self.__dict__.setdefault("_weyl_cache", {})
        if key in cache:
            return cache[key]
        g = self.group
        norm = sorted(self.normalizer(h, within))
        cosets: list[frozenset[int]] = []
        quot: dict[int, int] = {}
        for x in norm:
            if x in quot:
                continue
            c = frozenset(g.mul(x, e) for e in h.elements)
            for y in c:
                quot[y] = len(cosets)
            cosets.append(c)
        reps = tuple(min(c) for c in cosets)
        table = [[quot[g.mul(a, b)] for b in reps] for a in reps]
        labels = [g.labels[r] + "H" for r in reps]
        w = WeylGroup(FiniteGroup(table, name=f"W({h.index})", labels=labels), tuple(cosets), reps, quot)
        cache[key] = w
        return w

    def mobius(self, k: Subgroup, h: Subgroup) -> int:
        """μ(K, H) by memoised recursion ``μ(K,K)=1``, ``Σ_{K≤L≤H} μ(K,L) = 0``."""
        if not k.elements <= h.elements:
            raise NotContainedError(f"subgroup {k.index} is not contained in {h.index}")
        key = (k.index, h.index)
        if key in self._mobius:
            return self._mobius[key]
        if k.index == h.index:
            val = 1
        else:
            val = -sum(self.mobius(k, l) for l in self.subgroups
                       if k.elements <= l.elements < h.elements)
        self._mobius[key] = val
        return val


def _smallest_generator(g: FiniteGroup, s: frozenset[int]) -> int | None:
    n = len(s)
    for x in sorted(s):
        if g.element_order(x) == n:
            return x
    return None


def _all_subgroups(g: FiniteGroup) -> list[frozenset[int]]:
    cyclic = {g.closure([x]) for x in range(g.order)}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for h in frontier:
            for c in cyclic:
                if c <= h:
                    continue
                j = g.closure(sorted(h | c))
                if j not in found:
                    found.add(j)
                    new.add(j)
        frontier = new
    return list(found)


def enumerate_subgroups(g: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> SubgroupLattice:
    return SubgroupLattice(g, max_order=max_order)


def mobius(lattice: SubgroupLattice, k: Subgroup, h: Subgroup) -> int:
    return lattice.mobius(k, h)


def m_h(g: FiniteGroup, h: Subgroup, a: int) -> int:
    """The exponent ``m`` in ``{1..n}`` with ``a^-1 x a = x^m`` for the chosen generator ``x`` of cyclic ``h``."""
    if not h.cyclic:
        raise ShapeError(f"subgroup {h.index} is not cyclic")
    gen = h.generator
    y = g.conj(g.inverse[a], gen)
    if y not in h.elements:
        raise DomainError(f"element {a} does not normalise subgroup {h.index}")
    n = h.order
    x = gen
    for m in range(1, n + 1):
        if x == y:
            return m
        x = g.mul(x, gen)
    raise AssertionError("unreachable: generator powers exhaust the cyclic subgroup")


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)
