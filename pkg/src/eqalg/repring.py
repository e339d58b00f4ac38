"""Rational representation rings of abelian groups, cyclotomic polynomials and
the CRT picture of ``RU(C_n) ⊗ Q = Q[x]/(x^n - 1)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

from .groups import FiniteGroup, Subgroup, SubgroupLattice, cyclic_group, euler_phi, m_h
from .linalg import Echelon, QMatrix, Subspace, q
from .mackey import MackeyFunctor, VModule, transfer_subspace


class UnsupportedGroupError(ValueError):
    pass


class CertificationError(AssertionError):
    pass


# ---------------------------------------------------------------------------
# dense univariate polynomials, coefficients listed from the constant term up


def trim(p: Sequence) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def poly_divmod(a: Sequence, b: Sequence) -> tuple[tuple, tuple]:
    """Division by a polynomial with unit leading coefficient stays integral;
    otherwise the quotient is rational."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(a))
    lead = b[-1]
    if len(r) < len(b):
        return (), tuple(r)
    quo = [0] * (len(r) - len(b) + 1)
    for k in range(len(quo) - 1, -1, -1):
        c = r[k + len(b) - 1]
        if c:
            c = c // lead if lead in (1, -1) and isinstance(c, int) else q(c) / lead
            quo[k] = c
            for i, y in enumerate(b):
                r[k + i] -= c * y
    return trim(quo), trim(r[: len(b) - 1])


def poly_str(p: Sequence, var: str = "x") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        mag = abs(c)
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        coef = str(mag) if (k == 0 or mag != 1) else ""
        body = coef + ("*" if coef and mono else "") + mono
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, body in terms[1:]:
        out += f" {s} {body}"
    return out


@dataclass(frozen=True)
class CyclotomicPoly:
    n: int
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self) -> str:
        return poly_str(self.coeffs)


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> CyclotomicPoly:
    """``Φ_n = (x^n - 1) / Π_{d|n, d<n} Φ_d``, by exact integer division."""
    if n < 1:
        raise ValueError("cyclotomic polynomials are indexed by n >= 1")
    num = (-1,) + (0,) * (n - 1) + (1,)
    for d in range(1, n):
        if n % d == 0:
            num, rem = poly_divmod(num, cyclotomic(d).coeffs)
            assert not rem, f"Φ_{d} does not divide x^{n} - 1"
    assert num[-1] == 1 and len(num) - 1 == euler_phi(n)
    return CyclotomicPoly(n, tuple(int(c) for c in num))


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# ---------------------------------------------------------------------------
# Chinese remainder split of Q[x]/(x^n - 1)


@dataclass(frozen=True)
class CRTDecomposition:
    """``projections[j]`` reduces ``Σ c_i x^i`` modulo Φ_j (coordinates
    ``1, x, ..., x^{φ(j)-1}``); ``inverse`` maps the stacked coordinates back."""

    n: int
    factors: tuple[int, ...]
    projections: dict
    inverse: QMatrix

    def offsets(self) -> dict[int, int]:
        out, pos = {}, 0
        for j in self.factors:
            out[j] = pos
            pos += euler_phi(j)
        return out

    def stacked(self) -> QMatrix:
        m = self.projections[self.factors[0]]
        for j in self.factors[1:]:
            m = m.vstack(self.projections[j])
        return m

    def coordinates(self, v: Sequence) -> dict[int, tuple[Fraction, ...]]:
        return {j: self.projections[j].apply(v) for j in self.factors}


def _reduction_matrix(n: int, mod: Sequence[int]) -> QMatrix:
    deg = len(mod) - 1
    cols = []
    for i in range(n):
        mono = (0,) * i + (1,)
        _, r = poly_divmod(mono, mod)
        cols.append(tuple(r) + (0,) * (deg - len(r)))
    return QMatrix.from_columns(cols, deg)


@lru_cache(maxsize=None)
def crt_split(n: int) -> CRTDecomposition:
    factors = tuple(divisors(n))
    proj = {j: _reduction_matrix(n, cyclotomic(j).coeffs) for j in factors}
    stacked = proj[factors[0]]
    for j in factors[1:]:
        stacked = stacked.vstack(proj[j])
    inv = stacked.inverse()
    assert inv @ stacked == QMatrix.identity(n)
    return CRTDecomposition(n, factors, proj, inv)


# ---------------------------------------------------------------------------
# characters


def _require_abelian(g: FiniteGroup) -> None:
    if not g.abelian:
        raise UnsupportedGroupError(f"{g.name} is not abelian; representation rings are only built for abelian groups")


def _cyclic_basis(g: FiniteGroup, h: Subgroup) -> list[int]:
    """Elements ``g_1..g_r`` of ``h`` with ``h = <g_1> × ... × <g_r>``; a cyclic
    ``h`` uses its fixed generator."""
    if h.order == 1:
        return []
    if h.cyclic:
        return [h.generator]
    cands = sorted(h.elements - {g.identity}, key=lambda x: (-g.element_order(x), x))

    def search(chosen: list[int], span: frozenset[int]) -> list[int] | None:
        if len(span) == h.order:
            return chosen
        for x in cands:
            if x in span:
                continue
            bigger = g.closure(chosen + [x])
            if len(bigger) == len(span) * g.element_order(x):
                found = search(chosen + [x], bigger)
                if found is not None:
                    return found
        return None

    basis = search([], frozenset([g.identity]))
    assert basis is not None
    return basis


class CharacterGroup:
    """Dual group of an abelian subgroup ``h``.  The character with label
    ``(a_1..a_r)`` sends ``Π g_i^{c_i}`` to ``ζ^{Σ a_i c_i M/n_i}`` where ``ζ``
    is a primitive ``M``-th root of unity and ``M`` is the exponent of the
    ambient group; ``values[k][x]`` stores that exponent modulo ``M``."""

    def __init__(self, g: FiniteGroup, h: Subgroup, modulus: int | None = None):
        _require_abelian(g)
        self.group, self.subgroup = g, h
        self.modulus = modulus or lcm(*(g.element_order(x) for x in range(g.order)))
        self.basis = _cyclic_basis(g, h)
        self.orders = [g.element_order(x) for x in self.basis]
        coords: dict[int, tuple[int, ...]] = {g.identity: (0,) * len(self.basis)}
        for i, (b, n) in enumerate(zip(self.basis, self.orders)):
            new = {}
            for x, c in coords.items():
                y = x
                for k in range(n):
                    new[y] = c[:i] + (k,) + c[i + 1:]
                    y = g.mul(y, b)
            coords = new
        assert len(coords) == h.order
        self.coords = coords
        self.labels: list[tuple[int, ...]] = [()]
        for n in self.orders:
            self.labels = [lab + (a,) for lab in self.labels for a in range(n)]
        self.elements = sorted(h.elements)
        self.values = [self._values(lab) for lab in self.labels]
        self.lookup = {v: i for i, v in enumerate(self.values)}
        assert len(self.lookup) == len(self.labels)

    def _values(self, label: tuple[int, ...]) -> tuple[int, ...]:
        m = self.modulus
        out = []
        for x in self.elements:
            c = self.coords[x]
            out.append(sum(a * ci * (m // n) for a, ci, n in zip(label, c, self.orders)) % m)
        return tuple(out)

    def __len__(self) -> int:
        return len(self.labels)

    def index_of_values(self, values: tuple[int, ...]) -> int:
        return self.lookup[values]

    def product(self, i: int, j: int) -> int:
        m = self.modulus
        return self.lookup[tuple((a + b) % m for a, b in zip(self.values[i], self.values[j]))]

    def label_string(self, i: int) -> str:
        lab = self.labels[i]
        if len(lab) == 1:
            a = lab[0]
            return "1" if a == 0 else "x" if a == 1 else f"x^{a}"
        return "chi(" + ",".join(map(str, lab)) + ")"

    def restrict_index(self, i: int, sub: "CharacterGroup") -> int:
        pos = {x: k for k, x in enumerate(self.elements)}
        vals = tuple(self.values[i][pos[x]] for x in sub.elements)
        return sub.index_of_values(vals)


def character_group(lat: SubgroupLattice, h: Subgroup) -> CharacterGroup:
    cache = lat.__dict__.setdefault("_character_groups", {})
    if h.index not in cache:
        cache[h.index] = CharacterGroup(lat.group, h)
    return cache[h.index]


@dataclass(frozen=True)
class RepRingElement:
    chars: CharacterGroup
    coeffs: tuple[Fraction, ...]

    @classmethod
    def basis(cls, chars: CharacterGroup, i: int) -> "RepRingElement":
        c = [Fraction(0)] * len(chars)
        c[i] = Fraction(1)
        return cls(chars, tuple(c))

    @classmethod
    def one(cls, chars: CharacterGroup) -> "RepRingElement":
        return cls.basis(chars, 0)

    def __add__(self, other: "RepRingElement") -> "RepRingElement":
        return RepRingElement(self.chars, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> "RepRingElement":
        c = q(c)
        return RepRingElement(self.chars, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: "RepRingElement") -> "RepRingElement":
        out = [Fraction(0)] * len(self.chars)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[self.chars.product(i, j)] += a * b
        return RepRingElement(self.chars, tuple(out))

    def __str__(self) -> str:
        terms = [(a, self.chars.label_string(i)) for i, a in enumerate(self.coeffs) if a]
        if not terms:
            return "0"
        return " + ".join(lab if a == 1 else f"{a}*{lab}" for a, lab in terms)


def restriction_matrix(big: CharacterGroup, small: CharacterGroup) -> QMatrix:
    if not small.subgroup.elements <= big.subgroup.elements:
        raise ValueError("restriction needs a subgroup")
    cols = []
    for i in range(len(big)):
        c = [0] * len(small)
        c[big.restrict_index(i, small)] = 1
        cols.append(c)
    return QMatrix.from_columns(cols, len(small))


def induction_matrix(small: CharacterGroup, big: CharacterGroup) -> QMatrix:
    """``ind(χ) = Σ_{ψ|_small = χ} ψ``: the transpose of restriction."""
    return restriction_matrix(big, small).transpose()


def restriction(e: RepRingElement, small: CharacterGroup) -> RepRingElement:
    return RepRingElement(small, restriction_matrix(e.chars, small).apply(e.coeffs))


def induction(e: RepRingElement, big: CharacterGroup) -> RepRingElement:
    return RepRingElement(big, induction_matrix(e.chars, big).apply(e.coeffs))


def repring_mackey(lat: SubgroupLattice) -> MackeyFunctor:
    """``H ↦ RU(H) ⊗ Q`` on the character basis, res/tr by restriction and induction."""
    g = lat.group
    _require_abelian(g)
    chars = {h.index: character_group(lat, h) for h in lat.subgroups}
    dims = {i: len(c) for i, c in chars.items()}
    labels = {i: [c.label_string(k) for k in range(len(c))] for i, c in chars.items()}
    return MackeyFunctor(
        lat, "repring", dims,
        res=lambda h, k: restriction_matrix(chars[h.index], chars[k.index]),
        tr=lambda k, h: induction_matrix(chars[k.index], chars[h.index]),
        conj=lambda x, h: QMatrix.identity(dims[h.index]),
        labels=labels,
    )


# ---------------------------------------------------------------------------
# transfers in Q[x]/(x^n - 1)


@dataclass(frozen=True)
class TransferImage:
    """Image of induction from the order-``d`` subgroup of ``C_n``.

    ``unit_transfer`` is ``tr(1)`` as a polynomial in ``x``; ``scalars[j]`` is
    its CRT coordinate at factor ``j`` when that coordinate is a constant.
    ``alternative_scalar`` is the closed form ``n - d + 1`` which is sometimes
    quoted for the same coordinate; ``scalar_discrepancy`` says whether it
    disagrees with the character computation."""

    n: int
    d: int
    unit_transfer: tuple[Fraction, ...]
    crt_coordinates: dict
    image: Subspace
    scalars: dict
    alternative_scalar: int
    scalar_discrepancy: bool
    factorization_holds: bool
    vanishes_off_divisors: bool


def transfer_image(n: int, d: int) -> TransferImage:
    if d < 1 or n % d:
        raise ArithmeticError(f"{d} does not divide {n}")
    if d == n:
        raise ArithmeticError("transfer images are taken from proper subgroups")
    lat = SubgroupLattice(cyclic_group(n), max_order=max(n, 1))
    top = lat.top
    sub = next(h for h in lat.subgroups if h.order == d)
    big, small = character_group(lat, top), character_group(lat, sub)
    assert big.labels == [(a,) for a in range(n)]
    ind = induction_matrix(small, big)
    crt = crt_split(n)
    unit = ind.apply(RepRingElement.one(small).coeffs)
    coords = crt.coordinates(unit)
    image = Subspace.span([crt.stacked().apply(col) for col in ind.columns()], n)
    expected = (1,)
    for j in divisors(n):
        if d % j:
            expected = poly_mul(expected, cyclotomic(j).coeffs)
    expected = tuple(Fraction(c) for c in expected) + (Fraction(0),) * (n - len(expected))
    scalars = {}
    for j, c in coords.items():
        if all(x == 0 for x in c[1:]):
            scalars[j] = c[0]
    vanish = all((not any(coords[j])) == (d % j != 0) for j in crt.factors)
    alt = n - d + 1
    disc = any(scalars.get(j) != alt for j in crt.factors if d % j == 0)
    return TransferImage(n, d, unit, coords, image, scalars, alt, disc, unit == expected, vanish)


# ---------------------------------------------------------------------------
# V_H as a cyclotomic field


def minimal_polynomial(a: QMatrix) -> tuple[Fraction, ...]:
    """Monic minimal polynomial: the first linear dependency among ``I, A, A², ...``."""
    n = a.nrows
    if n == 0:
        return (Fraction(1),)
    ech = Echelon(key=lambda ij: ij, track=True)
    power = QMatrix.identity(n)
    k = 0
    while True:
        flat = {(i, j): x for i, row in enumerate(power.rows) for j, x in enumerate(row) if x}
        dep = ech.add(flat, k)
        if dep is not None:
            top = dep[k]
            return tuple(dep.get(i, Fraction(0)) / top for i in range(k + 1))
        power = power @ a
        k += 1


@dataclass(frozen=True)
class FieldCertificate:
    n: int
    dim: int
    xbar: QMatrix
    minimal_polynomial: tuple[Fraction, ...]
    weyl_exponents: tuple[int, ...]
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems

    def describe(self) -> str:
        return "Q" if self.n == 1 else f"Q(zeta_{self.n})"


def multiplication_by_generator(lat: SubgroupLattice, h: Subgroup) -> QMatrix:
    """Multiplication by the character ``x`` (value ``ζ_n`` on the fixed generator) on RU(H)."""
    chars = character_group(lat, h)
    k = len(chars)
    if not h.cyclic:
        raise ValueError("multiplication by x needs a cyclic subgroup")
    gen = 1 if k > 1 else 0
    cols = []
    for i in range(k):
        c = [0] * k
        c[chars.product(gen, i)] = 1
        cols.append(c)
    return QMatrix.from_columns(cols, k)


def identify_cyclotomic_field(m: MackeyFunctor, v: VModule) -> FieldCertificate:
    """Certify ``v = RU(H)/t_H ≅ Q(ζ_n)`` for cyclic H of order n: the class
    of ``x`` has minimal polynomial Φ_n and Weyl elements act by ``ζ ↦ ζ^{m_H(a)}``."""
    lat = m.lattice
    h = v.subgroup
    if not h.cyclic:
        raise ValueError(f"subgroup {lat.name(h)} is not cyclic")
    n = h.order
    problems = []
    x = multiplication_by_generator(lat, h)
    t = transfer_subspace(m, h)
    if not all(t.contains_vector(x.apply(w)) for w in t.vectors()):
        problems.append("transfer subspace is not stable under multiplication by x")
    xbar = v.projection @ x @ v.section
    if v.dim != euler_phi(n):
        problems.append(f"dimension {v.dim} differs from phi({n}) = {euler_phi(n)}")
    mp = minimal_polynomial(xbar)
    if mp != tuple(q(c) for c in cyclotomic(n).coeffs):
        problems.append(f"minimal polynomial {poly_str(mp)} is not Phi_{n} = {cyclotomic(n)}")
    w = lat.weyl(h)
    exps = tuple(m_h(lat.group, h, r) for r in w.reps)
    unit = v.projection.apply(RepRingElement.one(character_group(lat, h)).coeffs)
    for e, mat in zip(exps, v.action.matrices):
        if mat.apply(unit) != unit:
            problems.append("Weyl action does not fix the unit")
        power = QMatrix.identity(v.dim)
        for _ in range(e):
            power = power @ xbar
        if mat @ xbar != power @ mat:
            problems.append(f"Weyl element does not act by zeta -> zeta^{e}")
    return FieldCertificate(n, v.dim, xbar, mp, exps, tuple(problems))
