"""Formality zig-zags ``A ← D → H(A)`` for free models with homology
``R``, ``R[β]`` or ``R[β^{±1}]``, built from fixed representatives.

``D`` is the Koszul model of ``R`` (tensored with ``Q[γ]`` or with the Laurent
model ``Q[γ, γ̄] ⊗ E(y)``); ``φ: D → A`` sends generators to fixed cycles and
fixed bounding elements, ``ψ: D → H`` sends ``t_i ↦ x_i``, ``γ ↦ β``,
``γ̄ ↦ β⁻¹`` and the odd generators to 0.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

from .cdga import (FreeAlgebra, FreeCDGAPresentation, GradedAlgebraPresentation, Generator, Homology, Poly,
                   TargetAlgebra, TruncatedComplex, TruncationError, TruncationPolicy, homology, koszul,
                   laurent_model, polynomial_beta_model, realize, tensor)
from .groups import WeylAction, cyclic_group, euler_phi
from .linalg import QMatrix, q, solve
from .repring import poly_str

TRUNCATION_NOTE = ("identities are exact in the free algebras; homology statements refer to the "
                   "weight-truncated complexes on the interior window")


class FormalityError(ValueError):
    pass


class PreconditionError(FormalityError):
    pass


class UnsupportedHypothesisError(FormalityError):
    pass


class ObstructionError(FormalityError):
    pass


class NotABoundaryError(FormalityError):
    pass


# ---------------------------------------------------------------------------
# averaging


def average(action, x):
    """``(1/|W|) Σ g·x``.  ``action`` is a :class:`WeylAction` (``x`` a vector)
    or a presentation (``x`` a polynomial)."""
    if isinstance(action, WeylAction):
        n = action.group.order
        acc = [Fraction(0)] * action.dim
        for m in action.matrices:
            for i, v in enumerate(m.apply(x)):
                acc[i] += v
        return tuple(a / n for a in acc)
    pres: FreeCDGAPresentation = action
    n = pres.group.order
    if n == 1:
        return dict(x)
    acc: Poly = {}
    for g in range(n):
        acc = pres.alg.add(acc, pres.act(g, x))
    return pres.alg.scale(acc, mpq(1, n))


def is_fixed(pres: FreeCDGAPresentation, x: Poly) -> bool:
    return all(pres.act(g, x) == x for g in range(pres.group.order))


def find_representative(hom: Homology, k: int, coords: Sequence) -> Poly:
    """A fixed cycle in the class with the given homology coordinates."""
    pres = hom.complex.presentation
    h = hom[k]
    if len(coords) != h.dim:
        raise ValueError(f"expected {h.dim} coordinates in degree {k}")
    rep: Poly = {}
    for i, c in enumerate(coords):
        if c:
            rep = pres.alg.add(rep, hom.representative(k, i), c)
    for g in range(pres.group.order):
        if hom.coordinates(k, pres.act(g, rep)) != tuple(q(c) for c in coords):
            raise ObstructionError(f"class in degree {k} is not fixed by {pres.group.labels[g]}")
    out = average(pres, rep)
    assert hom.coordinates(k, out) == tuple(q(c) for c in coords)
    return out


def find_bounding(hom: Homology, k: int, b: Poly) -> Poly:
    """A fixed ``y`` of degree ``k+1`` with ``d y = b`` for a fixed boundary ``b``."""
    pres = hom.complex.presentation
    if not b:
        return {}
    if not is_fixed(pres, b):
        raise ObstructionError("the element to bound is not fixed by the group")
    y = hom.preimage(k, b)
    if y is None:
        raise NotABoundaryError(f"{pres.alg.format(b)} is not a boundary in the truncation")
    y = average(pres, y)
    assert pres.d(y) == b
    return y


# ---------------------------------------------------------------------------
# scrambling: acyclic pairs plus a triangular change of generators


@dataclass(frozen=True)
class ScrambleRecipe:
    """``pairs`` acyclic pairs ``(v, u)`` with ``d v = u`` are attached, ``v`` of
    degree ``degrees[i]`` (drawn from {0, 1, 2} by the seed if not given).  With
    ``mix`` a random triangular automorphism ``x ↦ x + p(earlier generators)`` is
    applied; the group ``C2`` acts by ``-1`` on every pair when the base has no
    group of its own."""

    seed: int
    pairs: int = 2
    degrees: tuple[int, ...] | None = None
    mix: bool = True

    def pair_degrees(self) -> tuple[int, ...]:
        if self.degrees is not None:
            if len(self.degrees) != self.pairs:
                raise ValueError("one degree per pair required")
            return tuple(self.degrees)
        rng = random.Random(self.seed)
        return tuple(rng.choice((0, 1, 2)) for _ in range(self.pairs))


def _pairs_presentation(degrees: Sequence[int], taken: set[str], signed: bool) -> FreeCDGAPresentation:
    gens = []
    d = {}
    for i, dv in enumerate(degrees):
        v, u = f"v{i}", f"u{i}"
        while v in taken or u in taken:
            v, u = v + "_", u + "_"
        gens += [Generator(v, dv, dv % 2 == 1, 2), Generator(u, dv - 1, (dv - 1) % 2 == 1, 2)]
    alg = FreeAlgebra(gens)
    for i in range(0, len(gens), 2):
        d[gens[i].name] = alg.gen(gens[i + 1].name)
    if signed and gens:
        ident = [alg.gen(n) for n in alg.names]
        neg = [alg.scale(alg.gen(n), -1) for n in alg.names]
        return FreeCDGAPresentation(gens, d, cyclic_group(2), [ident, neg], name="pairs")
    return FreeCDGAPresentation(gens, d, name="pairs")


def _subset_monomials(alg: FreeAlgebra, earlier: Sequence[int], degree: int, weight: int) -> list[tuple]:
    out = []
    for mask in range(1, 1 << len(earlier)):
        m = [0] * alg.n
        for b, i in enumerate(earlier):
            if mask >> b & 1:
                m[i] = 1
        m = tuple(m)
        if alg.degree(m) == degree and alg.weight(m) <= weight:
            out.append(m)
    return out


def _triangular(alg: FreeAlgebra, order: Sequence[int], rng: random.Random) -> tuple[list, list]:
    """``x ↦ c x + (up to two ±1, ±2 multiples of squarefree monomials in
    earlier generators of the same degree and no larger weight)`` with
    ``c ∈ {1, -1, 2}``, and its inverse."""
    theta: list[Poly] = [alg.gen(nm) for nm in alg.names]
    scale = [1] * alg.n
    for pos, i in enumerate(order):
        g = alg.gens[i]
        cands = _subset_monomials(alg, order[:pos], g.degree, g.weight)
        rng.shuffle(cands)
        extra = {m: rng.choice((-2, -1, 1, 2)) for m in cands[:2]}
        scale[i] = rng.choice((1, 1, -1, 2))
        theta[i] = alg.add(alg.scale(theta[i], scale[i]), extra)
    inverse: list[Poly] = [alg.gen(nm) for nm in alg.names]
    for i in order:
        x = alg.gen(alg.names[i])
        extra = alg.add(theta[i], x, -scale[i])
        inverse[i] = alg.scale(alg.add(x, alg.substitute(inverse, extra), -1), mpq(1, scale[i]))
    return theta, inverse


def scramble_presentation(p: FreeCDGAPresentation, r: ScrambleRecipe) -> FreeCDGAPresentation:
    degrees = r.pair_degrees()
    if r.pairs == 0 and not r.mix:
        return p
    pairs = _pairs_presentation(degrees, set(p.alg.names), signed=p.group.order == 1)
    big = tensor(p, pairs, name=f"scrambled({p.name}, seed {r.seed})") if r.pairs else p
    alg = big.alg
    if not r.mix:
        return big
    rng = random.Random(r.seed * 7919 + 17)
    pair_ix, core_ix = list(range(p.alg.n, alg.n)), list(range(p.alg.n))
    # core generators absorb pair monomials, then pair generators absorb core ones
    t1, i1 = _triangular(alg, pair_ix + core_ix, rng)
    t2, i2 = _triangular(alg, core_ix + pair_ix, rng)
    theta = [alg.substitute(t1, x) for x in t2]
    inverse = [alg.substitute(i2, x) for x in i1]
    cache_inv: dict = {}
    back = lambda x: alg.substitute(inverse, x, cache_inv)
    assert all(back(alg.substitute(theta, alg.gen(nm))) == alg.gen(nm) for nm in alg.names)
    d = {nm: back(big.d(theta[i])) for i, nm in enumerate(alg.names)}
    action = [[back(big.act(gi, theta[i])) for i in range(alg.n)] for gi in range(big.group.order)]
    marks = {k: back(v) for k, v in big.marks.items()}
    return FreeCDGAPresentation(alg.gens, d, big.group, action, marks, name=big.name)


def scramble(p: FreeCDGAPresentation, r: ScrambleRecipe, policy: TruncationPolicy,
             check: bool = True) -> TruncatedComplex:
    """Realize the scrambled presentation; with ``check`` its interior homology
    dimensions are compared with those of ``p``."""
    c = realize(scramble_presentation(p, r), policy, check=False)
    if check:
        before = homology(realize(p, policy, check=False)).dims()
        after = homology(c).dims()
        if before != after:
            raise AssertionError(f"scrambling changed homology: {before} -> {after}")
    return c


# ---------------------------------------------------------------------------
# the zig-zag


@dataclass
class ZigzagCertificate:
    target: GradedAlgebraPresentation
    policy: TruncationPolicy
    complex: TruncatedComplex = field(repr=False)
    model: FreeCDGAPresentation = field(repr=False)
    phi: dict
    psi: dict
    chain_phi: list = field(default_factory=list)
    chain_psi: list = field(default_factory=list)
    equivariance: list = field(default_factory=list)
    multiplicativity: list = field(default_factory=list)
    dims_A: dict = field(default_factory=dict)
    dims_D: dict = field(default_factory=dict)
    dims_H: dict = field(default_factory=dict)
    rank_phi: dict = field(default_factory=dict)
    rank_psi: dict = field(default_factory=dict)
    checked_monomials: int = 0
    note: str = TRUNCATION_NOTE

    @property
    def residuals_zero(self) -> bool:
        return not (self.chain_phi or self.chain_psi or self.equivariance or self.multiplicativity)

    @property
    def quasi_isomorphic(self) -> bool:
        ks = self.policy.interior_degrees()
        return all(self.dims_A.get(k) == self.dims_D.get(k) == self.dims_H.get(k)
                   == self.rank_phi.get(k) == self.rank_psi.get(k) for k in ks)

    @property
    def valid(self) -> bool:
        return self.residuals_zero and self.quasi_isomorphic

    def problems(self) -> list[str]:
        out = self.chain_phi + self.chain_psi + self.equivariance + self.multiplicativity
        for k in self.policy.interior_degrees():
            row = (self.dims_A.get(k), self.dims_D.get(k), self.dims_H.get(k),
                   self.rank_phi.get(k), self.rank_psi.get(k))
            if len(set(row)) != 1:
                out.append(f"degree {k}: dims A/D/H {row[:3]}, ranks phi/psi {row[3:]}")
        return out

    def revalidate(self) -> "ZigzagCertificate":
        """Recompute every check from scratch (fresh truncations and homology)."""
        pres = self.complex.presentation
        fresh = realize(pres, self.policy, check=True)
        model = model_for.__wrapped__(self.target)
        return _verify(fresh, self.target, model, dict(self.phi), dict(self.psi), self.policy)

    def phi_strings(self) -> dict[str, str]:
        alg = self.complex.alg
        return {k: alg.format(v) for k, v in self.phi.items()}

    def psi_strings(self) -> dict[str, str]:
        ta = TargetAlgebra(self.target)
        return {k: ta.format(v) for k, v in self.psi.items()}

    def to_dict(self) -> dict:
        ks = list(self.policy.interior_degrees())
        return {
            "valid": self.valid,
            "target": self.target.describe(),
            "window": list(self.policy.window),
            "interior": list(self.policy.interior),
            "cap": self.policy.cap,
            "model_generators": [f"{g.name}:{g.degree}" for g in self.model.generators],
            "model_differential": {g.name: self.model.alg.format(dx)
                                   for g, dx in zip(self.model.generators, self.model.d_gens) if dx},
            "phi": self.phi_strings(),
            "psi": self.psi_strings(),
            "residuals": {"chain_phi": list(self.chain_phi), "chain_psi": list(self.chain_psi),
                          "equivariance": list(self.equivariance),
                          "multiplicativity": list(self.multiplicativity)},
            "homology_dims": {"A": {str(k): self.dims_A[k] for k in ks},
                              "D": {str(k): self.dims_D[k] for k in ks},
                              "H": {str(k): self.dims_H[k] for k in ks}},
            "ranks": {"phi": {str(k): self.rank_phi[k] for k in ks},
                      "psi": {str(k): self.rank_psi[k] for k in ks}},
            "checked_monomials": self.checked_monomials,
            "note": self.note,
        }


def _eval_univariate(alg: FreeAlgebra, coeffs: Sequence[int], x: Poly) -> Poly:
    out: Poly = {}
    for c in reversed(coeffs):
        out = alg.add(alg.mul(out, x), alg.const(c))
    return out


@lru_cache(maxsize=64)
def model_for(target: GradedAlgebraPresentation) -> FreeCDGAPresentation:
    """The free model ``D`` of a target algebra (shared between calls)."""
    rels = [poly_str(f, v) for v, f in zip(target.variables, target.relations)]
    odd = ["z"] if len(rels) == 1 else [f"z{i + 1}" for i in range(len(rels))]
    base = koszul(list(target.variables), rels, name="D", odd_names=odd)
    if target.beta == "laurent":
        return tensor(base, laurent_model(), name="D")
    if target.beta == "polynomial":
        return polynomial_beta_model(base)
    return base


def _mult_matrix(hom: Homology, a: Poly, src: int, dst: int) -> QMatrix:
    alg = hom.complex.alg
    cols = [hom.coordinates(dst, alg.mul(a, hom.representative(src, i))) for i in range(hom[src].dim)]
    return QMatrix.from_columns(cols, hom[dst].dim)


def build_zigzag(a: TruncatedComplex, target: GradedAlgebraPresentation) -> ZigzagCertificate:
    pres = a.presentation
    alg = pres.alg
    policy = a.policy
    ks = list(policy.interior_degrees())
    if 0 not in ks:
        raise PreconditionError(f"degree 0 must be interior, window {policy.window}")
    if target.beta is not None and 2 not in ks:
        raise PreconditionError(f"degree 2 must be interior for a target with beta, window {policy.window}")
    if target.beta == "laurent" and -2 not in ks:
        raise PreconditionError(f"degree -2 must be interior for a Laurent target, window {policy.window}")
    hom = homology(a)
    dims = hom.dims()
    want = target.dims(ks)
    if dims != want:
        raise PreconditionError(f"homology dims {dims} do not match the target {want}")
    for g in range(pres.group.order):
        for k in ks:
            if hom[k].dim and hom.action_matrix(g, k) != QMatrix.identity(hom[k].dim):
                raise UnsupportedHypothesisError(
                    f"{pres.group.labels[g]} acts nontrivially on homology in degree {k}")

    phi: dict[str, Poly] = {}
    reps = []
    for v in target.variables:
        mark = pres.marks.get(v)
        if mark is None:
            raise PreconditionError(f"no marked cycle for target generator {v!r}")
        rep = find_representative(hom, 0, hom.coordinates(0, mark))
        reps.append(rep)
        phi[v] = rep
    odd = ["z"] if len(target.variables) == 1 else [f"z{i + 1}" for i in range(len(target.variables))]
    for name, f, rep in zip(odd, target.relations, reps):
        phi[name] = find_bounding(hom, 0, _eval_univariate(alg, f, rep))
    if target.beta is not None:
        alpha = None
        if "beta" in pres.marks:
            alpha = find_representative(hom, 2, hom.coordinates(2, pres.marks["beta"]))
        else:
            for i in range(hom[2].dim):
                cand = find_representative(hom, 2, [int(j == i) for j in range(hom[2].dim)])
                if _mult_matrix(hom, cand, 0, 2).rank() == hom[2].dim:
                    alpha = cand
                    break
        if alpha is None or _mult_matrix(hom, alpha, 0, 2).rank() != hom[2].dim:
            raise ObstructionError("no class in degree 2 multiplies degree 0 isomorphically")
        phi["gamma"] = alpha
        if target.beta == "laurent":
            m = _mult_matrix(hom, alpha, -2, 0)
            sol = solve(m, hom.coordinates(0, alg.const(1)))
            if sol is None:
                raise ObstructionError("the beta class is not invertible in homology")
            abar = find_representative(hom, -2, sol)
            phi["gammabar"] = abar
            phi["y"] = find_bounding(hom, 0, alg.add(alg.const(1), alg.mul(alpha, abar), -1))

    model = model_for(target)
    ta = TargetAlgebra(target)
    psi: dict[str, dict] = {}
    for i, v in enumerate(target.variables):
        psi[v] = ta.var(i)
    for name in odd:
        psi[name] = {}
    if target.beta is not None:
        psi["gamma"] = ta.beta(1)
    if target.beta == "laurent":
        psi["gammabar"] = ta.beta(-1)
        psi["y"] = {}
    return _verify(a, target, model, phi, psi, policy)


def _psi_monomial(model: FreeCDGAPresentation, ta: TargetAlgebra, images: list, m: tuple, cache: dict) -> dict:
    if m in cache:
        return cache[m]
    last = max((i for i, e in enumerate(m) if e), default=None)
    if last is None:
        res = ta.one()
    else:
        rest = list(m)
        rest[last] -= 1
        res = ta.mul(_psi_monomial(model, ta, images, tuple(rest), cache), images[last])
    cache[m] = res
    return res


def _psi(model, ta, images, p: Poly, cache: dict) -> dict:
    out: dict = {}
    for m, c in p.items():
        out = ta.add(out, _psi_monomial(model, ta, images, m, cache), c)
    return out


def _realized_model(model: FreeCDGAPresentation, policy: TruncationPolicy) -> TruncatedComplex:
    cache = model.__dict__.setdefault("_realized", {})
    if policy not in cache:
        cache[policy] = realize(model, policy, check=True)
    return cache[policy]


def _verify(a: TruncatedComplex, target: GradedAlgebraPresentation, model: FreeCDGAPresentation,
            phi: dict, psi: dict, policy: TruncationPolicy) -> ZigzagCertificate:
    pres = a.presentation
    alg = pres.alg
    dalg = model.alg
    ta = TargetAlgebra(target)
    cert = ZigzagCertificate(target, policy, a, model, phi, psi)
    missing = [n for n in dalg.names if n not in phi or n not in psi]
    if missing:
        raise FormalityError(f"generator images missing for {missing}")
    phi_imgs = [phi[n] for n in dalg.names]
    psi_imgs = [psi[n] for n in dalg.names]
    phi_cache: dict = {}
    psi_cache: dict = {}
    phi_of = lambda p: dalg.substitute(phi_imgs, p, phi_cache, target=alg)

    # chain maps and equivariance on generators
    for n, dx in zip(dalg.names, model.d_gens):
        x = phi[n]
        if x and alg.poly_degree(x) != dalg.degree(dalg.gen(n).popitem()[0]):
            cert.chain_phi.append(f"phi({n}) has the wrong degree")
        r = alg.add(pres.d(x), phi_of(dx), -1)
        if r:
            cert.chain_phi.append(f"d(phi({n})) - phi(d({n})) = {alg.format(r)}")
        s = _psi(model, ta, psi_imgs, dx, psi_cache)
        if s:
            cert.chain_psi.append(f"psi(d({n})) = {ta.format(s)}")
        for g in range(pres.group.order):
            if pres.act(g, x) != x:
                cert.equivariance.append(f"phi({n}) is not fixed by {pres.group.labels[g]}")

    # the same identities on every basis element of the truncated model
    dmodel = _realized_model(model, policy)
    lo, hi = policy.window
    count = 0
    for k in range(lo, hi + 1):
        for m in dmodel.bases[k]:
            count += 1
            pm = phi_of({m: 1})
            r = alg.add(pres.d(pm), phi_of(model.d_monomial(m)), -1)
            if r:
                cert.chain_phi.append(f"chain map fails on {dalg.format({m: 1})}")
            if _psi(model, ta, psi_imgs, model.d_monomial(m), psi_cache):
                cert.chain_psi.append(f"psi(d({dalg.format({m: 1})})) != 0")
    cert.checked_monomials = count
    # multiplicativity on products of generators, in A and in H
    for i, n1 in enumerate(dalg.names):
        for n2 in dalg.names[i:]:
            prod = dalg.mul(dalg.gen(n1), dalg.gen(n2))
            if alg.add(phi_of(prod), alg.mul(phi[n1], phi[n2]), -1):
                cert.multiplicativity.append(f"phi({n1}*{n2}) != phi({n1})*phi({n2})")
            if ta.add(_psi(model, ta, psi_imgs, prod, psi_cache), ta.mul(psi[n1], psi[n2]), -1):
                cert.multiplicativity.append(f"psi({n1}*{n2}) != psi({n1})*psi({n2})")

    # induced maps on interior homology
    ha = homology(a)
    hd = homology(dmodel)
    for k in policy.interior_degrees():
        cert.dims_A[k] = ha[k].dim
        cert.dims_D[k] = hd[k].dim
        cert.dims_H[k] = target.dim(k)
        phi_cols, psi_cols = [], []
        for i in range(hd[k].dim):
            rep = hd.representative(k, i)
            try:
                phi_cols.append(ha.coordinates(k, phi_of(rep)))
            except TruncationError as exc:
                cert.chain_phi.append(f"phi of a degree-{k} class leaves the truncation: {exc}")
                phi_cols.append((Fraction(0),) * ha[k].dim)
            psi_cols.append(ta.coordinates(k, _psi(model, ta, psi_imgs, rep, psi_cache)))
        cert.rank_phi[k] = QMatrix.from_columns(phi_cols, ha[k].dim).rank() if phi_cols else 0
        cert.rank_psi[k] = QMatrix.from_columns(psi_cols, target.dim(k)).rank() if psi_cols else 0
    return cert


# ---------------------------------------------------------------------------
# named targets


TARGET_KINDS = ("zeta-n", "zeta-n-poly", "zeta-n-laurent", "laurent")


def target_spec(kind: str, n: int = 1) -> tuple[GradedAlgebraPresentation, FreeCDGAPresentation]:
    """Target algebra and an unscrambled free model with that homology."""
    from .cdga import koszul_cyclotomic, periodic_model, zeta_target
    if kind == "laurent":
        n = 1
        kind = "zeta-n-laurent"
    base = koszul_cyclotomic(n)
    if kind == "zeta-n":
        return zeta_target(n), base
    if kind == "zeta-n-poly":
        return zeta_target(n, "polynomial"), polynomial_beta_model(base)
    if kind == "zeta-n-laurent":
        return zeta_target(n, "laurent"), periodic_model(base)
    raise ValueError(f"unknown target kind {kind!r}; expected one of {TARGET_KINDS}")


def default_policy(kind: str, n: int = 1) -> TruncationPolicy:
    """Smallest windows whose interior holds the degrees the zig-zag needs
    (0, plus 2 for β and -2 for β⁻¹); cap φ(n) + 2, two above the weight of
    the cyclotomic relation."""
    window = {"zeta-n": (-2, 2), "zeta-n-poly": (-1, 3), "zeta-n-laurent": (-3, 3), "laurent": (-3, 3)}[kind]
    return TruncationPolicy(window, euler_phi(n) + 2)
