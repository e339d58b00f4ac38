"""The rational Burnside ring A(K) of a subgroup K of G, via marks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .groups import Subgroup, SubgroupLattice
from .linalg import QMatrix, fmt_q, q


class LatticeMismatchError(ValueError):
    pass


class BurnsideRing:
    """A(K) ⊗ Q with orbit basis ``[K/J]``, J running over K-conjugacy class
    representatives of subgroups of K (sorted by order, then lattice index)."""

    def __init__(self, lattice: SubgroupLattice, ambient: Subgroup | None = None):
        self.lattice = lattice
        self.ambient = ambient if ambient is not None else lattice.top
        self.classes: tuple[Subgroup, ...] = tuple(lattice.relative_classes(self.ambient))
        self.position = {h.index: i for i, h in enumerate(self.classes)}

    def __repr__(self) -> str:
        return f"BurnsideRing(K={self.ambient.index} in {self.lattice.group.name}, rank {len(self.classes)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BurnsideRing) and other.lattice is self.lattice \
            and other.ambient.index == self.ambient.index

    def __hash__(self) -> int:
        return hash((id(self.lattice), self.ambient.index))

    @classmethod
    def of(cls, lattice: SubgroupLattice, ambient: Subgroup | None = None) -> "BurnsideRing":
        """Cached ring for ``ambient`` (default: the whole group)."""
        cache = lattice.__dict__.setdefault("_burnside_rings", {})
        key = lattice.top.index if ambient is None else ambient.index
        if key not in cache:
            cache[key] = cls(lattice, ambient)
        return cache[key]

    @property
    def rank(self) -> int:
        return len(self.classes)

    def class_position(self, j: Subgroup) -> int:
        """Position of the K-class containing ``j``."""
        return self.position[self.lattice.relative_rep(self.ambient, j).index]

    def orbit(self, j: Subgroup) -> "BurnsideElement":
        """The basis element ``[K/J]``."""
        c = [Fraction(0)] * self.rank
        c[self.class_position(j)] = Fraction(1)
        return BurnsideElement(self, tuple(c))

    def one(self) -> "BurnsideElement":
        return self.orbit(self.ambient)

    def zero(self) -> "BurnsideElement":
        return BurnsideElement(self, (Fraction(0),) * self.rank)

    def element(self, coeffs: Mapping[Subgroup, object]) -> "BurnsideElement":
        c = [Fraction(0)] * self.rank
        for j, a in coeffs.items():
            c[self.class_position(j)] += q(a)
        return BurnsideElement(self, tuple(c))

    def mark(self, h: Subgroup, l: Subgroup) -> int:
        """``|(K/H)^L|``: cosets kH with ``L kH = kH``, i.e. ``k^-1 L k ⊆ H``."""
        g = self.lattice.group
        hits = sum(1 for k in self.ambient.elements
                   if all(g.conj(g.inverse[k], x) in h.elements for x in l.elements))
        assert hits % h.order == 0
        return hits // h.order

    @cached_property
    def mark_matrix(self) -> QMatrix:
        """Row ``i`` is the mark vector of ``[K/H_i]``; lower triangular."""
        return QMatrix([[self.mark(h, l) for l in self.classes] for h in self.classes])

    @cached_property
    def mark_matrix_inverse(self) -> QMatrix:
        m = self.mark_matrix
        for i in range(m.nrows):
            for j in range(i + 1, m.ncols):
                if m[i, j]:
                    raise AssertionError("mark matrix is not lower triangular; class ordering is broken")
        return m.inverse()

    def from_marks(self, marks) -> "BurnsideElement":
        """Φ⁻¹ of a mark vector."""
        row = QMatrix([list(marks)], self.rank)
        return BurnsideElement(self, (row @ self.mark_matrix_inverse).rows[0])

    def gluck_idempotent(self, h: Subgroup) -> "BurnsideElement":
        """``e_H = Σ_{J ≤ H} |J|/|N_K H| μ(J,H) [K/J]``, summed over subgroups then collected."""
        lat = self.lattice
        h = lat.relative_rep(self.ambient, h)
        n_order = len(lat.normalizer(h, within=self.ambient))
        c = [Fraction(0)] * self.rank
        for j in lat.subgroups_of(h):
            mu = lat.mobius(j, h)
            if mu:
                c[self.class_position(j)] += Fraction(j.order * mu, n_order)
        return BurnsideElement(self, tuple(c))

    def idempotents(self) -> list["BurnsideElement"]:
        return [self.gluck_idempotent(h) for h in self.classes]


@dataclass(frozen=True)
class BurnsideElement:
    ring: BurnsideRing
    coeffs: tuple[Fraction, ...]

    @property
    def coefficients(self) -> dict[Subgroup, Fraction]:
        return {h: a for h, a in zip(self.ring.classes, self.coeffs) if a}

    def coefficient(self, h: Subgroup) -> Fraction:
        return self.coeffs[self.ring.class_position(h)]

    def _check(self, other: "BurnsideElement") -> None:
        if self.ring != other.ring:
            raise LatticeMismatchError("elements live in different Burnside rings")

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        self._check(other)
        return BurnsideElement(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BurnsideElement") -> "BurnsideElement":
        self._check(other)
        return BurnsideElement(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "BurnsideElement":
        return BurnsideElement(self.ring, tuple(-a for a in self.coeffs))

    def scale(self, c) -> "BurnsideElement":
        c = q(c)
        return BurnsideElement(self.ring, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "BurnsideElement") -> "BurnsideElement":
        return multiply(self, other)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def marks(self) -> tuple[Fraction, ...]:
        return marks(self)

    def __str__(self) -> str:
        terms = [f"{fmt_q(a)}[K/{h.index}]" for h, a in zip(self.ring.classes, self.coeffs) if a]
        return " + ".join(terms) if terms else "0"


def marks(x: BurnsideElement) -> tuple[Fraction, ...]:
    row = QMatrix([list(x.coeffs)], x.ring.rank)
    return (row @ x.ring.mark_matrix).rows[0]


def mark_matrix_inverse(ring: BurnsideRing) -> QMatrix:
    return ring.mark_matrix_inverse


def multiply(x: BurnsideElement, y: BurnsideElement) -> BurnsideElement:
    """Product computed as Φ⁻¹(Φ(x)·Φ(y)) pointwise."""
    x._check(y)
    return x.ring.from_marks(tuple(a * b for a, b in zip(marks(x), marks(y))))


def gluck_idempotent(ring: BurnsideRing, h: Subgroup) -> BurnsideElement:
    return ring.gluck_idempotent(h)


def restrict(x: BurnsideElement, k: Subgroup) -> BurnsideElement:
    """Restrict along ``k ≤ ambient``: each orbit ``[K/H]`` splits into
    L-orbits of cosets, the orbit of ``gH`` contributing ``[L/(L ∩ gHg^-1)]``."""
    ring = x.ring
    lat = ring.lattice
    if not k.elements <= ring.ambient.elements:
        raise LatticeMismatchError(f"subgroup {k.index} does not lie in the ambient group")
    target = BurnsideRing.of(lat, k)
    out = [Fraction(0)] * target.rank
    for h, a in zip(ring.classes, x.coeffs):
        if not a:
            continue
        for piece in _orbit_decomposition(lat, ring.ambient, h, k):
            out[target.class_position(piece)] += a
    return BurnsideElement(target, tuple(out))


def _orbit_decomposition(lat: SubgroupLattice, amb: Subgroup, h: Subgroup, k: Subgroup) -> list[Subgroup]:
    """Stabilisers (in k) of one point per k-orbit of ``amb/h``."""
    g = lat.group
    cosets = {}
    for x in sorted(amb.elements):
        c = frozenset(g.mul(x, e) for e in h.elements)
        cosets.setdefault(c, x)
    seen: set[frozenset[int]] = set()
    out = []
    for c, x in cosets.items():
        if c in seen:
            continue
        for y in k.elements:
            seen.add(frozenset(g.mul(y, e) for e in c))
        out.append(lat.intersect(k, lat.conjugate(x, h)))
    return out
