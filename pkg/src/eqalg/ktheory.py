"""Graded Mackey functors of rational equivariant periodic and connective K-theory.

Even degrees carry ``RU(H) ⊗ Q`` (times a power of the Bott class), odd
degrees are zero.  Connective K-theory is zero in negative degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groups import ShapeError, Subgroup, SubgroupLattice
from .linalg import QMatrix
from .mackey import GradedMackeyFunctor, MackeyFunctor, VModule, quotient_by_transfers, zero_functor
from .repring import (FieldCertificate, RepRingElement, UnsupportedGroupError, character_group,
                      identify_cyclotomic_field, induction_matrix, repring_mackey)


def check_window(window: tuple[int, int], connective: bool = False) -> tuple[int, int]:
    lo, hi = window
    if lo > hi:
        raise ShapeError(f"empty window [{lo}, {hi}]")
    if lo % 2 or hi % 2:
        raise ShapeError(f"window endpoints must be even, got [{lo}, {hi}]")
    if not connective and not lo <= 0 <= hi:
        raise ShapeError(f"periodic window must contain degree 0, got [{lo}, {hi}]")
    return lo, hi


def ku_graded_mackey(lat: SubgroupLattice, window: tuple[int, int] = (-6, 6),
                     connective: bool = False) -> GradedMackeyFunctor:
    """Degreewise ``π_k`` of KU (or ku): the representation-ring functor in
    even degrees, zero in odd degrees and, for ku, in negative degrees.
    Multiplication by the Bott class is recorded as the period-2 shift."""
    if not lat.group.abelian:
        raise UnsupportedGroupError(f"{lat.group.name} is not abelian")
    lo, hi = check_window(window, connective)
    ru = repring_mackey(lat)
    zero = zero_functor(lat)
    degrees: dict[int, MackeyFunctor] = {}
    for k in range(lo, hi + 1):
        live = k % 2 == 0 and (k >= 0 or not connective)
        degrees[k] = ru if live else zero
    shifts = {}
    for k in range(lo, hi - 1):
        if degrees[k] is ru and degrees[k + 2] is ru:
            shifts[k] = {h.index: QMatrix.identity(ru.dim(h)) for h in lat.subgroups}
    return GradedMackeyFunctor(lat, (lo, hi), degrees, period=2, shifts=shifts)


def periodicity_violations(gm: GradedMackeyFunctor) -> list[str]:
    """The Bott shift must commute with restriction, transfer and conjugation."""
    lat = gm.lattice
    bad = []
    for k, shift in gm.shifts.items():
        src, dst = gm[k], gm[k + 2]
        for h in lat.subgroups:
            for j in lat.subgroups_of(h):
                if shift[j.index] @ src.res(h, j) != dst.res(h, j) @ shift[h.index]:
                    bad.append(f"shift {k}->{k + 2} does not commute with res {lat.name(h)}->{lat.name(j)}")
                if shift[h.index] @ src.tr(j, h) != dst.tr(j, h) @ shift[j.index]:
                    bad.append(f"shift {k}->{k + 2} does not commute with tr {lat.name(j)}->{lat.name(h)}")
            for x in range(lat.group.order):
                gh = lat.conjugate(x, h)
                if shift[gh.index] @ src.conj(x, h) != dst.conj(x, h) @ shift[h.index]:
                    bad.append(f"shift {k}->{k + 2} does not commute with conjugation on {lat.name(h)}")
    return bad


@dataclass(frozen=True)
class GradedV:
    """``V_H`` degree by degree, with the degree-0 field certificate (cyclic H)
    and the Bott shift between consecutive even degrees."""

    subgroup: Subgroup
    window: tuple[int, int]
    connective: bool
    pieces: dict
    field: FieldCertificate | None
    bott: dict

    def dims(self) -> dict[int, int]:
        return {k: v.dim for k, v in sorted(self.pieces.items())}

    def is_zero(self) -> bool:
        return all(v.dim == 0 for v in self.pieces.values())


def graded_V(lat: SubgroupLattice, h: Subgroup, window: tuple[int, int] = (-6, 6),
             connective: bool = False) -> GradedV:
    gm = ku_graded_mackey(lat, window, connective)
    h = lat.rep(h)
    pieces: dict[int, VModule] = {}
    for k in gm.defined_degrees():
        pieces[k] = quotient_by_transfers(gm[k], h)
    field = None
    if h.cyclic and 0 in gm and pieces[0].dim:
        field = identify_cyclotomic_field(gm[0], pieces[0])
    bott = {}
    for k, shift in gm.shifts.items():
        a, b = pieces[k], pieces[k + 2]
        bott[k] = b.projection @ shift[h.index] @ a.section
    return GradedV(h, gm.window, connective, pieces, field, bott)


@dataclass(frozen=True)
class FieldCheck:
    is_field: bool
    witness: str


def graded_field_check(v: GradedV) -> FieldCheck:
    """A graded ring is a graded field when every nonzero homogeneous element
    is invertible: the degree-0 part is a field and the Bott class is a unit.
    The zero ring is not a graded field."""
    if v.is_zero():
        return FieldCheck(False, "zero ring")
    if v.field is None or not v.field.ok:
        return FieldCheck(False, "degree-0 part is not certified as a field")
    lo, hi = v.window
    for k, m in v.bott.items():
        if m.nrows != m.ncols or m.rank() != m.nrows:
            return FieldCheck(False, f"beta: degree {k} -> {k + 2} is not invertible")
    if v.connective:
        return FieldCheck(False, "beta (no element of degree -2 inverts it)")
    if -2 not in v.pieces or v.pieces[-2].dim == 0:
        return FieldCheck(False, "beta (window has no degree -2 part)")
    inv = v.bott[-2].inverse()
    return FieldCheck(True, f"beta^-1 in degree -2 acts by {inv.to_strings()} on degree 0")


@dataclass(frozen=True)
class UnitTransfer:
    """``tr_K^H(1)`` in RU(H) next to the scalar ``|W_H K|`` that would arise if
    transfers of units were numbers."""

    small: Subgroup
    big: Subgroup
    character: str
    augmentation: Fraction
    weyl_scalar: int
    is_scalar: bool


def unit_transfers(lat: SubgroupLattice) -> list[UnitTransfer]:
    if not lat.group.abelian:
        raise UnsupportedGroupError(f"{lat.group.name} is not abelian")
    out = []
    for h in lat.subgroups:
        for k in lat.subgroups_of(h):
            if k.index == h.index:
                continue
            ck, ch = character_group(lat, k), character_group(lat, h)
            coeffs = induction_matrix(ck, ch).apply(RepRingElement.one(ck).coeffs)
            elt = RepRingElement(ch, coeffs)
            w = h.order // k.order
            scalar = all(c == 0 for c in coeffs[1:])
            out.append(UnitTransfer(k, h, str(elt), sum(coeffs), w, scalar))
    return out
