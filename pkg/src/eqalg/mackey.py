"""Rational Mackey functors as finite linear data, and their idempotent splitting.

A functor stores a value M(G/H) for every subgroup H together with
restrictions, transfers and conjugations.  Matrices act on column vectors:
``res(h, k)`` is ``M(H) -> M(K)`` for ``K ≤ H``, ``tr(k, h)`` is
``M(K) -> M(H)``, and ``conj(g, h)`` is ``M(H) -> M(gHg^-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .burnside import BurnsideElement, BurnsideRing, restrict
from .groups import Subgroup, SubgroupLattice, WeylAction
from .linalg import QMatrix, Subspace, fmt_q, image, quotient, rref


class MackeyError(ValueError):
    pass


class InconsistentSplittingError(AssertionError):
    """The Burnside idempotent does not act idempotently: the structure is broken."""


class WindowError(KeyError):
    """A degree outside the declared window was requested."""


class MackeyFunctor:
    def __init__(self, lattice: SubgroupLattice, name: str,
                 dims: Mapping[int, int],
                 res: Callable[[Subgroup, Subgroup], QMatrix],
                 tr: Callable[[Subgroup, Subgroup], QMatrix],
                 conj: Callable[[int, Subgroup], QMatrix] | None = None,
                 labels: Mapping[int, list[str]] | None = None):
        self.lattice = lattice
        self.name = name
        self.dims = dict(dims)
        self.labels = {h: list(labels[h]) for h in labels} if labels else \
            {h: [f"b{i}" for i in range(d)] for h, d in self.dims.items()}
        self._res_fn, self._tr_fn, self._conj_fn = res, tr, conj
        self._cache: dict[tuple, QMatrix] = {}

    def __repr__(self) -> str:
        return f"MackeyFunctor({self.name} on {self.lattice.group.name})"

    def dim(self, h: Subgroup) -> int:
        return self.dims[h.index]

    def res(self, h: Subgroup, k: Subgroup) -> QMatrix:
        if not k.elements <= h.elements:
            raise MackeyError(f"res: {k.index} is not a subgroup of {h.index}")
        key = ("res", h.index, k.index)
        if key not in self._cache:
            self._cache[key] = QMatrix.identity(self.dim(h)) if h.index == k.index else self._res_fn(h, k)
        return self._cache[key]

    def tr(self, k: Subgroup, h: Subgroup) -> QMatrix:
        if not k.elements <= h.elements:
            raise MackeyError(f"tr: {k.index} is not a subgroup of {h.index}")
        key = ("tr", k.index, h.index)
        if key not in self._cache:
            self._cache[key] = QMatrix.identity(self.dim(h)) if h.index == k.index else self._tr_fn(k, h)
        return self._cache[key]

    def conj(self, g: int, h: Subgroup) -> QMatrix:
        key = ("conj", g, h.index)
        if key not in self._cache:
            if self._conj_fn is None:
                if self.lattice.conjugate(g, h).index != h.index:
                    raise MackeyError("no conjugation data for a non-normal subgroup")
                self._cache[key] = QMatrix.identity(self.dim(h))
            else:
                self._cache[key] = self._conj_fn(g, h)
        return self._cache[key]

    def with_override(self, kind: str, a, b: Subgroup, matrix: QMatrix) -> "MackeyFunctor":
        """Copy with one structure map replaced (used for negative controls).
        For ``kind="conj"`` the first argument is a group element."""
        out = MackeyFunctor(self.lattice, self.name + "*", self.dims, self._res_fn, self._tr_fn,
                            self._conj_fn, self.labels)
        out._cache = dict(self._cache)
        out._cache[(kind, a if kind == "conj" else a.index, b.index)] = matrix
        return out

    def weyl_matrices(self, h: Subgroup) -> tuple[QMatrix, ...]:
        w = self.lattice.weyl(h)
        return tuple(self.conj(r, h) for r in w.reps)


# ---------------------------------------------------------------------------
# axioms


def _double_coset_reps(lat: SubgroupLattice, k: Subgroup, l: Subgroup, h: Subgroup) -> list[int]:
    g = lat.group
    seen: set[int] = set()
    reps = []
    for x in sorted(l.elements):
        if x in seen:
            continue
        reps.append(x)
        for a in k.elements:
            ax = g.mul(a, x)
            for b in h.elements:
                seen.add(g.mul(ax, b))
    return reps


def axioms_check(m: MackeyFunctor, double_coset: bool = True) -> list[str]:
    """All violated Mackey axioms as readable strings; empty means the functor passes."""
    lat = m.lattice
    g = lat.group
    subs = lat.subgroups
    bad: list[str] = []
    name = lat.name
    for h in subs:
        for k in lat.subgroups_of(h):
            for j in lat.subgroups_of(k):
                if m.res(k, j) @ m.res(h, k) != m.res(h, j):
                    bad.append(f"restriction not transitive along {name(j)} <= {name(k)} <= {name(h)}")
                if m.tr(k, h) @ m.tr(j, k) != m.tr(j, h):
                    bad.append(f"transfer not transitive along {name(j)} <= {name(k)} <= {name(h)}")
    for h in subs:
        one = QMatrix.identity(m.dim(h))
        for x in h.elements:
            if m.conj(x, h) != one:
                bad.append(f"conjugation by {g.labels[x]} in {name(h)} is not the identity on M({name(h)})")
        for x in range(g.order):
            gh = lat.conjugate(x, h)
            cx = m.conj(x, h)
            for y in range(g.order):
                if m.conj(y, gh) @ cx != m.conj(g.mul(y, x), h):
                    bad.append(f"conjugation not multiplicative for {g.labels[y]}*{g.labels[x]} on {name(h)}")
            for k in lat.subgroups_of(h):
                gk = lat.conjugate(x, k)
                if m.conj(x, k) @ m.res(h, k) != m.res(gh, gk) @ cx:
                    bad.append(f"conjugation by {g.labels[x]} does not commute with res {name(h)}->{name(k)}")
                if cx @ m.tr(k, h) != m.tr(gk, gh) @ m.conj(x, k):
                    bad.append(f"conjugation by {g.labels[x]} does not commute with tr {name(k)}->{name(h)}")
    if double_coset:
        for l in subs:
            inner = lat.subgroups_of(l)
            for k in inner:
                for h in inner:
                    lhs = m.res(l, k) @ m.tr(h, l)
                    rhs = QMatrix.zeros(m.dim(k), m.dim(h))
                    for x in _double_coset_reps(lat, k, l, h):
                        xhx = lat.conjugate(x, h)
                        left = lat.intersect(k, xhx)
                        right = lat.intersect(lat.conjugate(g.inverse[x], k), h)
                        rhs = rhs + m.tr(left, k) @ m.conj(x, right) @ m.res(h, right)
                    if lhs != rhs:
                        bad.append(f"double coset formula fails for K={name(k)}, H={name(h)} in L={name(l)}")
    return bad


# ---------------------------------------------------------------------------
# Burnside action and the two descriptions of V_H


def burnside_action(m: MackeyFunctor, k: Subgroup, a: BurnsideElement) -> QMatrix:
    """Matrix of ``a ∈ A(G)`` acting on M(G/K): restrict ``a`` to A(K) and let
    each orbit ``[K/J]`` act as ``tr^K_J ∘ res^K_J``."""
    ra = restrict(a, k)
    out = QMatrix.zeros(m.dim(k), m.dim(k))
    for j, c in zip(ra.ring.classes, ra.coeffs):
        if c:
            out = out + (m.tr(j, k) @ m.res(k, j)).scale(c)
    return out


@dataclass(frozen=True)
class VModule:
    """A ``Q[W_G H]``-module carved out of M(G/H).

    ``projection`` maps M(G/H) onto the module's coordinates and ``section``
    maps coordinates back into M(G/H); ``projection @ section`` is the identity.
    """

    subgroup: Subgroup
    dim: int
    action: WeylAction
    projection: QMatrix
    section: QMatrix
    labels: tuple[str, ...] = field(default=())

    def character(self) -> tuple[Fraction, ...]:
        return self.action.character()


def _labels(m: MackeyFunctor, h: Subgroup, section: QMatrix) -> tuple[str, ...]:
    names = m.labels[h.index]
    out = []
    for col in section.columns():
        terms = [(names[i], c) for i, c in enumerate(col) if c]
        if len(terms) == 1 and terms[0][1] == 1:
            out.append(terms[0][0])
        else:
            out.append(" + ".join(f"{fmt_q(c)}*{n}" for n, c in terms))
    return tuple(out)


def _weyl_action(m: MackeyFunctor, h: Subgroup, proj: QMatrix, sect: QMatrix) -> WeylAction:
    w = m.lattice.weyl(h)
    mats = tuple(proj @ c @ sect for c in m.weyl_matrices(h))
    return WeylAction(w.group, mats, proj.nrows)


def idempotent_piece(m: MackeyFunctor, h: Subgroup) -> VModule:
    """``e_H M(G/H)`` as the image of the Gluck idempotent's action."""
    lat = m.lattice
    h = lat.rep(h)
    e = BurnsideRing.of(lat).gluck_idempotent(h)
    p = burnside_action(m, h, e)
    if p @ p != p:
        raise InconsistentSplittingError(f"e_H does not act idempotently on M({lat.name(h)})")
    img = image(p)
    _, piv = rref(img.basis) if img.dim else (None, [])
    n = m.dim(h)
    section = QMatrix.from_columns(img.vectors(), n) if img.dim else QMatrix.zeros(n, 0)
    proj = QMatrix([p.row(i) for i in piv], n) if piv else QMatrix.zeros(0, n)
    assert proj @ section == QMatrix.identity(img.dim)
    return VModule(h, img.dim, _weyl_action(m, h, proj, section), proj, section, _labels(m, h, section))


def transfer_subspace(m: MackeyFunctor, h: Subgroup) -> Subspace:
    """``t_H M``: the span of images of transfers from proper subgroups of H."""
    lat = m.lattice
    n = m.dim(h)
    vecs = []
    for k in lat.subgroups_of(h):
        if k.index != h.index:
            vecs.extend(m.tr(k, h).columns())
    return Subspace.span(vecs, n)


def quotient_by_transfers(m: MackeyFunctor, h: Subgroup) -> VModule:
    """``M(G/H) / t_H M`` with the descended Weyl action."""
    h = m.lattice.rep(h)
    n = m.dim(h)
    quo = quotient(Subspace.full(n), transfer_subspace(m, h))
    return VModule(h, quo.dim, _weyl_action(m, h, quo.projection, quo.section),
                   quo.projection, quo.section, _labels(m, h, quo.section))


@dataclass(frozen=True)
class SplitReport:
    subgroup: Subgroup
    idempotent_dim: int
    quotient_dim: int
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems


def crosscheck_split(m: MackeyFunctor, h: Subgroup) -> SplitReport:
    """Compare ``e_H M(G/H)`` with ``M(G/H)/t_H M``: the quotient map restricted
    to the idempotent image must be an isomorphism intertwining the Weyl actions."""
    vi = idempotent_piece(m, h)
    vq = quotient_by_transfers(m, h)
    problems = []
    if vi.dim != vq.dim:
        problems.append(f"dimension mismatch: idempotent piece {vi.dim}, quotient {vq.dim}")
    else:
        f = vq.projection @ vi.section
        if vi.dim and f.rank() != vi.dim:
            problems.append("quotient map restricted to e_H M(G/H) is not injective")
        for i, (a, b) in enumerate(zip(vi.action.matrices, vq.action.matrices)):
            if f @ a != b @ f:
                problems.append(f"Weyl element {i} not intertwined: {f @ a} vs {b @ f}")
        if vi.character() != vq.character():
            problems.append(f"Weyl characters differ: {vi.character()} vs {vq.character()}")
    return SplitReport(vi.subgroup, vi.dim, vq.dim, tuple(problems))


# ---------------------------------------------------------------------------
# built-in functors


def constant_green(lat: SubgroupLattice) -> MackeyFunctor:
    """Constant functor Q: restrictions and conjugations are identities,
    ``tr^H_K`` is multiplication by the index ``[H:K]``."""
    dims = {h.index: 1 for h in lat.subgroups}
    one = QMatrix.identity(1)
    return MackeyFunctor(
        lat, "constant", dims,
        res=lambda h, k: one,
        tr=lambda k, h: QMatrix([[h.order // k.order]]),
        conj=lambda g, h: one,
        labels={h.index: ["1"] for h in lat.subgroups},
    )


def burnside_mackey(lat: SubgroupLattice) -> MackeyFunctor:
    """``H ↦ A(H)`` with restriction by orbit decomposition, transfer
    ``[K/J] ↦ [H/J]`` and conjugation by relabelling."""
    rings = {h.index: BurnsideRing.of(lat, h) for h in lat.subgroups}
    dims = {i: r.rank for i, r in rings.items()}
    labels = {i: [f"[{lat.name(r.ambient)}/{lat.name(j)}]" for j in r.classes] for i, r in rings.items()}

    def res(h, k):
        src = rings[h.index]
        cols = [restrict(src.orbit(j), k).coeffs for j in src.classes]
        return QMatrix.from_columns(cols, rings[k.index].rank)

    def tr(k, h):
        src, dst = rings[k.index], rings[h.index]
        cols = [dst.orbit(j).coeffs for j in src.classes]
        return QMatrix.from_columns(cols, dst.rank)

    def conj(x, h):
        src = rings[h.index]
        dst = rings[lat.conjugate(x, h).index]
        cols = [dst.orbit(lat.conjugate(x, j)).coeffs for j in src.classes]
        return QMatrix.from_columns(cols, dst.rank)

    return MackeyFunctor(lat, "burnside", dims, res, tr, conj, labels)


# ---------------------------------------------------------------------------
# graded functors


@dataclass(frozen=True)
class GradedMackeyFunctor:
    """Mackey functors in each degree of ``[lo, hi]``.  ``period`` declares a
    periodicity whose shift isomorphisms are listed in ``shifts``: a map from
    degree k to the matrices M_k(G/H) -> M_{k+period}(G/H)."""

    lattice: SubgroupLattice
    window: tuple[int, int]
    degrees: Mapping[int, MackeyFunctor]
    period: int | None = None
    shifts: Mapping[int, Mapping[int, QMatrix]] = field(default_factory=dict)

    def __getitem__(self, k: int) -> MackeyFunctor:
        if k not in self.degrees:
            raise WindowError(f"degree {k} lies outside the window {self.window}")
        return self.degrees[k]

    def __contains__(self, k: int) -> bool:
        return k in self.degrees

    def defined_degrees(self) -> list[int]:
        return sorted(self.degrees)


def zero_functor(lat: SubgroupLattice) -> MackeyFunctor:
    dims = {h.index: 0 for h in lat.subgroups}
    return MackeyFunctor(lat, "zero", dims,
                         res=lambda h, k: QMatrix.zeros(0, 0),
                         tr=lambda k, h: QMatrix.zeros(0, 0),
                         conj=lambda g, h: QMatrix.zeros(0, 0),
                         labels={h.index: [] for h in lat.subgroups})
