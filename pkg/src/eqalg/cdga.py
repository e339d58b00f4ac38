"""Free graded-commutative DGAs over Q, their truncations and homology.

Elements of a free algebra are sparse dicts ``exponent tuple -> coefficient``.
Even generators are polynomial, odd generators exterior; the sign of a product
comes from reordering odd factors into generator order.

Truncation uses generator weights: a monomial's weight is ``Σ e_i w_i`` and
the truncated complex keeps the monomials of weight ``≤ N`` inside a degree
window.  Weights are chosen so the differential never raises weight, hence
the truncation is a genuine subcomplex.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .groups import FiniteGroup, cyclic_group, direct_product
from .linalg import Echelon, QMatrix, q, sparse_kernel
from .repring import cyclotomic, poly_str

Poly = dict  # exponent tuple -> int | Fraction


class PresentationError(ValueError):
    pass


class PolynomialSyntaxError(PresentationError):
    pass


class TruncationError(ValueError):
    """An element needed by a computation does not fit in the truncation."""


class NotACycleError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    odd: bool
    weight: int = 1


# ---------------------------------------------------------------------------
# free algebra arithmetic


class FreeAlgebra:
    def __init__(self, gens: Sequence[Generator]):
        self.gens = tuple(gens)
        self.n = len(self.gens)
        self.names = [g.name for g in self.gens]
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        if len(self.index) != self.n:
            raise PresentationError("generator names must be distinct")
        self.odd = tuple(i for i, g in enumerate(self.gens) if g.odd)
        self.degrees = tuple(g.degree for g in self.gens)
        self.weights = tuple(g.weight for g in self.gens)
        self.unit = (0,) * self.n

    # monomials
    def degree(self, m: tuple) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def weight(self, m: tuple) -> int:
        return sum(e * w for e, w in zip(m, self.weights))

    def key(self, m: tuple):
        """Weight first, then degrevlex by generator index."""
        return (self.weight(m), sum(m), tuple(-e for e in reversed(m)))

    def gen(self, name: str) -> Poly:
        m = [0] * self.n
        m[self.index[name]] = 1
        return {tuple(m): 1}

    def const(self, c) -> Poly:
        return {self.unit: c} if c else {}

    def mono_mul(self, a: tuple, b: tuple) -> tuple[int, tuple] | None:
        """``a * b`` as ``(sign, monomial)``; None if an odd generator repeats.
        The sign counts pairs of odd factors ``i`` in ``a``, ``j`` in ``b`` with ``i > j``."""
        inv = 0
        seen_b = 0
        for i in self.odd:
            if a[i]:
                if b[i]:
                    return None
                inv += seen_b
            elif b[i]:
                seen_b += 1
        return (-1 if inv & 1 else 1), tuple(x + y for x, y in zip(a, b))

    def mul(self, p: Poly, q: Poly) -> Poly:
        out: Poly = {}
        for a, x in p.items():
            for b, y in q.items():
                r = self.mono_mul(a, b)
                if r is None:
                    continue
                s, m = r
                v = out.get(m, 0) + s * x * y
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def add(self, p: Poly, q: Poly, c=1) -> Poly:
        out = dict(p)
        for m, y in q.items():
            v = out.get(m, 0) + c * y
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def scale(self, p: Poly, c) -> Poly:
        return {m: c * x for m, x in p.items()} if c else {}

    def power(self, p: Poly, k: int) -> Poly:
        out = self.const(1)
        for _ in range(k):
            out = self.mul(out, p)
        return out

    def is_homogeneous(self, p: Poly) -> bool:
        return len({self.degree(m) for m in p}) <= 1

    def poly_degree(self, p: Poly) -> int | None:
        degs = {self.degree(m) for m in p}
        if len(degs) > 1:
            raise PresentationError(f"{self.format(p)} is not homogeneous")
        return degs.pop() if degs else None

    def poly_weight(self, p: Poly) -> int:
        return max((self.weight(m) for m in p), default=0)

    # algebra maps
    def substitute(self, images: Sequence[Poly], p: Poly, cache: dict | None = None,
                   target: "FreeAlgebra | None" = None) -> Poly:
        """Apply the algebra map sending generator ``i`` to ``images[i]`` (elements of
        ``target``, by default this algebra)."""
        dst = target or self
        out: Poly = {}
        for m, c in p.items():
            out = dst.add(out, self.map_monomial(images, m, cache, dst), c)
        return out

    def map_monomial(self, images: Sequence[Poly], m: tuple, cache: dict | None = None,
                     target: "FreeAlgebra | None" = None) -> Poly:
        if cache is not None and m in cache:
            return cache[m]
        dst = target or self
        # peel the last generator factor off the right end and recurse
        last = max((i for i, e in enumerate(m) if e), default=None)
        if last is None:
            res = dst.const(1)
        else:
            rest = list(m)
            rest[last] -= 1
            res = dst.mul(self.map_monomial(images, tuple(rest), cache, dst), images[last])
        if cache is not None:
            cache[m] = res
        return res

    def format(self, p: Poly) -> str:
        if not p:
            return "0"
        terms = []
        for m in sorted(p, key=self.key, reverse=True):
            c = p[m]
            factors = []
            for i, e in enumerate(m):
                if e:
                    factors.append(self.names[i] if e == 1 else f"{self.names[i]}^{e}")
            mono = "*".join(factors)
            c = q(c)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            terms.append(("-" if c < 0 else "+", body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    # parsing
    def parse(self, text: str) -> Poly:
        """Polynomial syntax: integers and ``p/q``, ``+ - * ^``, parentheses, generator names."""
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise PolynomialSyntaxError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
        return self._eval(tree.body, text)

    def _eval(self, node, text: str) -> Poly:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return self.const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.index:
                raise PolynomialSyntaxError(f"unknown generator {node.id!r} in {text!r}")
            return self.gen(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval(node.operand, text)
            return self.scale(v, -1) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and node.right.value >= 0):
                    raise PolynomialSyntaxError(f"exponents must be nonnegative integers in {text!r}")
                return self.power(self._eval(node.left, text), node.right.value)
            a = self._eval(node.left, text)
            if isinstance(node.op, ast.Div):
                b = self._eval(node.right, text)
                if set(b) - {self.unit}:
                    raise PolynomialSyntaxError(f"division only by constants in {text!r}")
                if not b:
                    raise PolynomialSyntaxError(f"division by zero in {text!r}")
                return self.scale(a, Fraction(1) / Fraction(b[self.unit]))
            b = self._eval(node.right, text)
            if isinstance(node.op, ast.Add):
                return self.add(a, b)
            if isinstance(node.op, ast.Sub):
                return self.add(a, b, -1)
            if isinstance(node.op, ast.Mult):
                return self.mul(a, b)
        raise PolynomialSyntaxError(f"unsupported syntax in {text!r}")


# ---------------------------------------------------------------------------
# presentations


class FreeCDGAPresentation:
    """Generators, the differential on generators and a finite group acting
    through degree-preserving algebra automorphisms.

    ``action[g][i]`` is the image of generator ``i`` under group element ``g``.
    ``marks`` names cycles representing chosen homology classes, keyed by the
    names of target algebra generators (used by the formality builder).
    """

    def __init__(self, gens: Sequence[Generator], differential: Mapping[str, Poly] | None = None,
                 group: FiniteGroup | None = None, action: Sequence[Sequence[Poly]] | None = None,
                 marks: Mapping[str, Poly] | None = None, name: str = "A"):
        self.alg = FreeAlgebra(gens)
        alg = self.alg
        self.name = name
        differential = differential or {}
        unknown = set(differential) - set(alg.names)
        if unknown:
            raise PresentationError(f"differential given for unknown generators {sorted(unknown)}")
        self.d_gens: tuple[Poly, ...] = tuple(dict(differential.get(n, {})) for n in alg.names)
        self.group = group or cyclic_group(1)
        if action is None:
            action = [[alg.gen(n) for n in alg.names] for _ in range(self.group.order)]
        self.action = tuple(tuple(dict(p) for p in row) for row in action)
        self.marks = {k: dict(v) for k, v in (marks or {}).items()}
        self._d_cache: dict[tuple, Poly] = {}
        self._act_cache: list[dict] = [{} for _ in range(self.group.order)]
        self.validate()

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self.alg.gens

    def __repr__(self) -> str:
        return f"FreeCDGAPresentation({self.name}: {', '.join(self.alg.names)})"

    def validate(self) -> None:
        alg = self.alg
        for g in alg.gens:
            if g.odd != (g.degree % 2 == 1):
                raise PresentationError(f"generator {g.name}: parity must match degree {g.degree}")
            if g.weight < 0:
                raise PresentationError(f"generator {g.name}: negative weight")
        for g, dx in zip(alg.gens, self.d_gens):
            for m in dx:
                if alg.degree(m) != g.degree - 1:
                    raise PresentationError(f"d({g.name}) = {alg.format(dx)} is not of degree {g.degree - 1}")
            if alg.poly_weight(dx) > g.weight:
                raise PresentationError(f"d({g.name}) raises weight; give {g.name} weight >= {alg.poly_weight(dx)}")
        for g, dx in zip(alg.gens, self.d_gens):
            dd = self.d(dx)
            if dd:
                raise PresentationError(f"d(d({g.name})) = {alg.format(dd)} is not zero")
        grp = self.group
        if len(self.action) != grp.order:
            raise PresentationError("one action row per group element required")
        for row in self.action:
            if len(row) != alg.n:
                raise PresentationError("each action row needs one image per generator")
            for g, img in zip(alg.gens, row):
                for m in img:
                    if alg.degree(m) != g.degree:
                        raise PresentationError(f"action does not preserve the degree of {g.name}")
                if alg.poly_weight(img) > g.weight:
                    raise PresentationError(f"action raises the weight of {g.name}")
        ident = [alg.gen(n) for n in alg.names]
        if list(self.action[grp.identity]) != ident:
            raise PresentationError("the identity element must act trivially")
        for a in range(grp.order):
            for b in range(grp.order):
                ab = grp.mul(a, b)
                for i in range(alg.n):
                    if self.act(a, self.action[b][i]) != self.action[ab][i]:
                        raise PresentationError(f"action is not a group action on {alg.names[i]}")
            for i in range(alg.n):
                if self.act(a, self.d_gens[i]) != self.d(self.action[a][i]):
                    raise PresentationError(f"action of {grp.labels[a]} does not commute with d on {alg.names[i]}")

    def d_monomial(self, m: tuple) -> Poly:
        cached = self._d_cache.get(m)
        if cached is not None:
            return cached
        alg = self.alg
        out: Poly = {}
        parity = 0  # number of odd generators in the prefix
        for i, e in enumerate(m):
            if not e:
                continue
            dx = self.d_gens[i]
            if dx:
                left = list(m)
                left[i] -= 1
                # m = prefix * x_i^e * suffix and d(x_i^e) = e x_i^(e-1) d(x_i) for even x_i
                prefix = tuple(left[:i + 1]) + (0,) * (alg.n - i - 1)
                suffix = (0,) * (i + 1) + tuple(left[i + 1:])
                term = alg.mul(alg.mul({prefix: (-1) ** parity * e}, dx), {suffix: 1})
                out = alg.add(out, term)
            if alg.gens[i].odd:
                parity ^= e & 1
        self._d_cache[m] = out
        return out

    def d(self, p: Poly) -> Poly:
        out: Poly = {}
        for m, c in p.items():
            out = self.alg.add(out, self.d_monomial(m), c)
        return out

    def act(self, g: int, p: Poly) -> Poly:
        return self.alg.substitute(self.action[g], p, self._act_cache[g])

    def is_trivial_action(self) -> bool:
        return self.group.order == 1


def default_weights(gens: Sequence[tuple[str, int]], differential: Mapping[str, str]) -> list[Generator]:
    """Weights making d non-increasing: start at 1 and raise a generator's
    weight to that of its differential until stable."""
    base = [Generator(n, deg, deg % 2 == 1, 1) for n, deg in gens]
    for _ in range(len(base) + 1):
        alg = FreeAlgebra(base)
        changed = False
        new = []
        for g in base:
            w = g.weight
            if g.name in differential:
                w = max(w, alg.poly_weight(alg.parse(differential[g.name])))
            changed |= w != g.weight
            new.append(Generator(g.name, g.degree, g.odd, w))
        base = new
        if not changed:
            return base
    raise PresentationError("generator weights do not stabilise; give weights explicitly")


def presentation_from_strings(gens: Sequence[Generator], differential: Mapping[str, str],
                              name: str = "A", marks: Mapping[str, str] | None = None) -> FreeCDGAPresentation:
    alg = FreeAlgebra(gens)
    d = {k: alg.parse(v) for k, v in differential.items()}
    mk = {k: alg.parse(v) for k, v in (marks or {}).items()}
    return FreeCDGAPresentation(gens, d, marks=mk, name=name)


def _rename(names: Iterable[str], taken: set[str]) -> dict[str, str]:
    out = {}
    for n in names:
        m = n
        while m in taken:
            m += "_"
        out[n] = m
        taken.add(m)
    return out


def _transport(src: FreeAlgebra, dst: FreeAlgebra, p: Poly, offset: int) -> Poly:
    out = {}
    for m, c in p.items():
        full = [0] * dst.n
        full[offset:offset + src.n] = m
        out[tuple(full)] = c
    return out


def tensor(p: FreeCDGAPresentation, q: FreeCDGAPresentation, name: str | None = None) -> FreeCDGAPresentation:
    """``p ⊗ q``; colliding names from ``q`` get a trailing underscore.  The group
    is the product of the two groups (a trivial factor is dropped)."""
    ren = _rename(q.alg.names, set(p.alg.names))
    gens = list(p.alg.gens) + [Generator(ren[g.name], g.degree, g.odd, g.weight) for g in q.alg.gens]
    alg = FreeAlgebra(gens)
    np_ = p.alg.n
    d = {}
    for g, dx in zip(p.alg.gens, p.d_gens):
        d[g.name] = _transport(p.alg, alg, dx, 0)
    for g, dx in zip(q.alg.gens, q.d_gens):
        d[ren[g.name]] = _transport(q.alg, alg, dx, np_)
    if p.group.order == 1:
        group, pairs = q.group, [(0, b) for b in range(q.group.order)]
    elif q.group.order == 1:
        group, pairs = p.group, [(a, 0) for a in range(p.group.order)]
    else:
        group = direct_product([p.group, q.group])
        pairs = [(a, b) for a in range(p.group.order) for b in range(q.group.order)]
    action = []
    for a, b in pairs:
        row = [_transport(p.alg, alg, img, 0) for img in p.action[a]]
        row += [_transport(q.alg, alg, img, np_) for img in q.action[b]]
        action.append(row)
    marks = {k: _transport(p.alg, alg, v, 0) for k, v in p.marks.items()}
    for k, v in q.marks.items():
        marks.setdefault(k, _transport(q.alg, alg, v, np_))
    return FreeCDGAPresentation(gens, d, group, action, marks, name or f"{p.name}*{q.name}")


# ---------------------------------------------------------------------------
# model builders


def koszul(variables: Sequence[str], relations: Sequence[str], name: str = "koszul",
           odd_names: Sequence[str] | None = None) -> FreeCDGAPresentation:
    """``Q[vars] ⊗ E(z_1..z_r)`` with ``d z_i = f_i``; each z_i has the weight of f_i."""
    vars_ = [Generator(v, 0, False, 1) for v in variables]
    alg = FreeAlgebra(vars_)
    polys = [alg.parse(f) for f in relations]
    if odd_names is None:
        odd_names = ["z"] if len(relations) == 1 else [f"z{i + 1}" for i in range(len(relations))]
    zs = [Generator(z, 1, True, max(1, alg.poly_weight(f))) for z, f in zip(odd_names, polys)]
    full = FreeAlgebra(vars_ + zs)
    d = {z.name: _transport(alg, full, f, 0) for z, f in zip(zs, polys)}
    marks = {v: full.gen(v) for v in variables}
    return FreeCDGAPresentation(vars_ + zs, d, marks=marks, name=name)


def laurent_model(name: str = "laurent") -> FreeCDGAPresentation:
    """``Q[γ, γ̄] ⊗ E(y)`` with ``d y = 1 - γ γ̄``: homology ``Q[β^{±1}]``."""
    gens = [Generator("gamma", 2, False, 1), Generator("gammabar", -2, False, 1), Generator("y", 1, True, 2)]
    return presentation_from_strings(gens, {"y": "1 - gamma*gammabar"}, name=name,
                                     marks={"beta": "gamma", "betainv": "gammabar"})


def periodic_model(base: FreeCDGAPresentation) -> FreeCDGAPresentation:
    return tensor(base, laurent_model(), name=f"{base.name}[beta^{{±1}}]")


def polynomial_beta_model(base: FreeCDGAPresentation) -> FreeCDGAPresentation:
    """``base ⊗ Q[γ]`` with ``|γ| = 2`` and zero differential: homology ``H(base)[β]``."""
    beta = FreeCDGAPresentation([Generator("gamma", 2, False, 1)], marks={"beta": {(1,): 1}}, name="poly")
    return tensor(base, beta, name=f"{base.name}[beta]")


def cyclotomic_string(n: int, var: str = "t") -> str:
    return poly_str(cyclotomic(n).coeffs, var)


def koszul_cyclotomic(n: int) -> FreeCDGAPresentation:
    """``Q[t] ⊗ E(z)`` with ``d z = Φ_n(t)``: homology ``Q(ζ_n)``."""
    return koszul(["t"], [cyclotomic_string(n)], name=f"koszul(Phi_{n})")


# ---------------------------------------------------------------------------
# truncation


@dataclass(frozen=True)
class TruncationPolicy:
    window: tuple[int, int]
    cap: int

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise ValueError(f"empty window [{lo}, {hi}]")
        if self.cap < 0:
            raise ValueError("cap must be nonnegative")

    @property
    def interior(self) -> tuple[int, int]:
        lo, hi = self.window
        return lo + 1, hi - 1

    def interior_degrees(self) -> range:
        a, b = self.interior
        return range(a, b + 1)


def enumerate_monomials(alg: FreeAlgebra, lo: int, hi: int, cap: int) -> dict[int, list[tuple]]:
    """Monomials of weight ``≤ cap`` and degree in ``[lo, hi]``, grouped by degree."""
    n = alg.n
    gens = alg.gens
    if any(g.weight == 0 and not g.odd and g.degree != 0 for g in gens):
        raise TruncationError("even generators of weight 0 make the truncation infinite")
    # degree reachable per unit of weight from generators i.. (bounds for pruning)
    up = [0.0] * (n + 1)
    down = [0.0] * (n + 1)
    fixed_up = [0] * (n + 1)
    fixed_down = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        g = gens[i]
        r = g.degree / g.weight if g.weight else 0.0
        up[i] = max(up[i + 1], r)
        down[i] = min(down[i + 1], r)
        extra = g.degree if g.weight == 0 else 0
        fixed_up[i] = fixed_up[i + 1] + max(0, extra)
        fixed_down[i] = fixed_down[i + 1] + min(0, extra)
    out: dict[int, list[tuple]] = {k: [] for k in range(lo, hi + 1)}
    cur = [0] * n

    def rec(i: int, deg: int, budget: int) -> None:
        if deg + budget * up[i] + fixed_up[i] < lo or deg + budget * down[i] + fixed_down[i] > hi:
            return
        if i == n:
            out[deg].append(tuple(cur))
            return
        g = gens[i]
        top = 1 if g.odd else (budget // g.weight if g.weight else 0)
        for e in range(top + 1):
            if e * g.weight > budget:
                break
            cur[i] = e
            rec(i + 1, deg + e * g.degree, budget - e * g.weight)
        cur[i] = 0

    rec(0, 0, cap)
    for k in out:
        out[k].sort(key=alg.key)
    return out


class TruncatedComplex:
    """Monomial bases per degree of the weight-``≤ N`` part in the window, with
    sparse differentials (columns ``index -> {index: coeff}``) and action
    matrices in the same format."""

    def __init__(self, pres: FreeCDGAPresentation, policy: TruncationPolicy):
        self.presentation = pres
        self.policy = policy
        self.alg = pres.alg
        lo, hi = policy.window
        self.bases = enumerate_monomials(self.alg, lo, hi, policy.cap)
        self.index = {k: {m: i for i, m in enumerate(b)} for k, b in self.bases.items()}
        self._diff: dict[int, list[dict]] = {}
        self._act: dict[tuple[int, int], list[dict]] = {}

    def __repr__(self) -> str:
        return f"TruncatedComplex({self.presentation.name}, window {self.policy.window}, cap {self.policy.cap})"

    def dims(self) -> dict[int, int]:
        return {k: len(b) for k, b in self.bases.items()}

    def contains(self, p: Poly) -> bool:
        return all(self.alg.degree(m) in self.index and m in self.index[self.alg.degree(m)] for m in p)

    def vector(self, k: int, p: Poly) -> dict[int, Fraction]:
        idx = self.index.get(k)
        if idx is None:
            raise TruncationError(f"degree {k} lies outside the window {self.policy.window}")
        out = {}
        for m, c in p.items():
            j = idx.get(m)
            if j is None:
                raise TruncationError(f"monomial {self.alg.format({m: 1})} of weight {self.alg.weight(m)} "
                                      f"is outside the truncation (cap {self.policy.cap})")
            out[j] = c
        return out

    def element(self, k: int, v: Mapping[int, Fraction]) -> Poly:
        b = self.bases[k]
        return {b[i]: c for i, c in v.items() if c}

    def differential(self, k: int) -> list[dict]:
        """Columns of ``d: C_k -> C_{k-1}`` (defined for ``lo < k <= hi``)."""
        if k not in self._diff:
            lo, hi = self.policy.window
            if not lo < k <= hi:
                raise TruncationError(f"d_{k} is not available in window {self.policy.window}")
            self._diff[k] = [self.vector(k - 1, self.presentation.d_monomial(m)) for m in self.bases[k]]
        return self._diff[k]

    def differential_matrix(self, k: int) -> QMatrix:
        cols = self.differential(k)
        rows = len(self.bases[k - 1])
        return QMatrix.from_columns([[c.get(i, 0) for i in range(rows)] for c in cols], rows)

    def action(self, g: int, k: int) -> list[dict]:
        key = (g, k)
        if key not in self._act:
            pres = self.presentation
            self._act[key] = [self.vector(k, pres.act(g, {m: 1})) for m in self.bases[k]]
        return self._act[key]

    def check_d_squared(self) -> list[str]:
        lo, hi = self.policy.window
        bad = []
        for k in range(lo + 2, hi + 1):
            for m in self.bases[k]:
                dd = self.presentation.d(self.presentation.d_monomial(m))
                if dd:
                    bad.append(f"d^2({self.alg.format({m: 1})}) = {self.alg.format(dd)}")
        return bad

    def check_equivariance(self) -> list[str]:
        lo, hi = self.policy.window
        pres = self.presentation
        bad = []
        for g in range(pres.group.order):
            for k in range(lo + 1, hi + 1):
                for m in self.bases[k]:
                    lhs = pres.act(g, pres.d_monomial(m))
                    rhs = pres.d(pres.act(g, {m: 1}))
                    if lhs != rhs:
                        bad.append(f"g={pres.group.labels[g]} does not commute with d on {self.alg.format({m: 1})}")
        return bad


def realize(pres: FreeCDGAPresentation, policy: TruncationPolicy, check: bool = True) -> TruncatedComplex:
    c = TruncatedComplex(pres, policy)
    lo, hi = policy.window
    for k in range(lo + 1, hi + 1):
        c.differential(k)
    if check:
        bad = c.check_d_squared()
        if bad:
            raise PresentationError("d^2 != 0: " + bad[0])
    return c


# ---------------------------------------------------------------------------
# homology


@dataclass
class DegreeHomology:
    degree: int
    cycles_dim: int
    boundaries: Echelon
    classes: Echelon
    representatives: list[dict]

    @property
    def dim(self) -> int:
        return len(self.representatives)


class Homology:
    """Truncated homology ``Z_k / B_k`` on the interior degrees.

    Boundaries are kept in an echelon form whose pivots are the heaviest
    monomials, so representatives reduced against it have low weight.
    """

    def __init__(self, c: TruncatedComplex, degrees: Iterable[int] | None = None):
        self.complex = c
        self.degrees = list(degrees) if degrees is not None else list(c.policy.interior_degrees())
        self.data: dict[int, DegreeHomology] = {}
        for k in self.degrees:
            self.data[k] = self._compute(k)

    def _compute(self, k: int) -> DegreeHomology:
        c = self.complex
        key = lambda i: i
        lo, hi = c.policy.window
        if lo < k:
            cycles = sparse_kernel(c.differential(k), key)
        else:
            raise TruncationError(f"degree {k} is not interior")
        bnd = Echelon(key, track=True)
        for j, col in enumerate(c.differential(k + 1)):
            bnd.add(col, j)
        classes = Echelon(key, track=True)
        reps = []
        for z in cycles:
            r = bnd.reduce(z)
            if r and classes.add(r, len(reps)) is None:
                reps.append(r)
        return DegreeHomology(k, len(cycles), bnd, classes, reps)

    def dims(self) -> dict[int, int]:
        return {k: h.dim for k, h in self.data.items()}

    def __getitem__(self, k: int) -> DegreeHomology:
        if k not in self.data:
            raise TruncationError(f"homology in degree {k} was not computed (interior {self.degrees})")
        return self.data[k]

    def representative(self, k: int, i: int) -> Poly:
        return self.complex.element(k, self[k].representatives[i])

    def is_cycle(self, k: int, p: Poly) -> bool:
        return not self.complex.presentation.d(p)

    def coordinates(self, k: int, p: Poly) -> tuple[Fraction, ...]:
        """Coordinates of the class of the cycle ``p`` in the representative basis."""
        if p and self.complex.presentation.d(p):
            raise NotACycleError(f"{self.complex.alg.format(p)} is not a cycle")
        h = self[k]
        v = self.complex.vector(k, p)
        r = h.boundaries.reduce(v)
        coeffs = h.classes.express(r)
        if coeffs is None:
            raise AssertionError("cycle not in the span of cycles: homology data is inconsistent")
        return tuple(q(coeffs.get(i, 0)) for i in range(h.dim))

    def is_boundary(self, k: int, p: Poly) -> bool:
        return not any(self.coordinates(k, p))

    def preimage(self, k: int, p: Poly) -> Poly | None:
        """Some ``y`` in degree ``k+1`` with ``d y = p``, or None."""
        h = self[k]
        coeffs = h.boundaries.express(self.complex.vector(k, p))
        if coeffs is None:
            return None
        return self.complex.element(k + 1, coeffs)

    def action_matrix(self, g: int, k: int) -> QMatrix:
        pres = self.complex.presentation
        cols = [self.coordinates(k, pres.act(g, self.representative(k, i))) for i in range(self[k].dim)]
        return QMatrix.from_columns(cols, self[k].dim)


def homology(c: TruncatedComplex) -> Homology:
    """Interior homology of ``c``, computed once and cached on the complex."""
    h = c.__dict__.get("_homology")
    if h is None:
        h = c.__dict__["_homology"] = Homology(c)
    return h


# ---------------------------------------------------------------------------
# plain-text presentations


def parse_presentation(text: str, name: str = "custom") -> FreeCDGAPresentation:
    """Lines ``name degree parity [weight]``, then ``d name = <poly>``, then
    ``act <element> name = <poly>``.  ``parity`` is ``even`` or ``odd``.
    The group is generated by the listed automorphisms; generators not mentioned
    in an ``act`` block are fixed.  ``#`` starts a comment."""
    gens: list[tuple[str, int, bool, int | None]] = []
    diffs: dict[str, str] = {}
    acts: dict[str, dict[str, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "d":
            if len(words) < 4 or words[2] != "=":
                raise PresentationError(f"line {lineno}: expected 'd name = polynomial'")
            diffs[words[1]] = line.split("=", 1)[1].strip()
        elif words[0] == "act":
            if len(words) < 5 or words[3] != "=":
                raise PresentationError(f"line {lineno}: expected 'act element name = polynomial'")
            acts.setdefault(words[1], {})[words[2]] = line.split("=", 1)[1].strip()
        else:
            if len(words) not in (3, 4):
                raise PresentationError(f"line {lineno}: expected 'name degree parity [weight]'")
            try:
                deg = int(words[1])
                weight = int(words[3]) if len(words) == 4 else None
            except ValueError:
                raise PresentationError(f"line {lineno}: degree and weight must be integers") from None
            if words[2] not in ("even", "odd"):
                raise PresentationError(f"line {lineno}: parity must be 'even' or 'odd'")
            if (deg % 2 == 1) != (words[2] == "odd"):
                raise PresentationError(f"line {lineno}: parity {words[2]} does not match degree {deg}")
            if any(g[0] == words[0] for g in gens):
                raise PresentationError(f"line {lineno}: duplicate generator {words[0]}")
            gens.append((words[0], deg, words[2] == "odd", weight))
    if not gens:
        raise PresentationError("no generators declared")
    auto = {g.name: g.weight for g in default_weights([(n, d) for n, d, _, _ in gens], diffs)}
    full = [Generator(n, d, o, w if w is not None else auto[n]) for n, d, o, w in gens]
    alg = FreeAlgebra(full)
    d = {k: alg.parse(v) for k, v in diffs.items()}
    autos = []
    for label in sorted(acts):
        autos.append([alg.parse(acts[label][n]) if n in acts[label] else alg.gen(n) for n in alg.names])
    group, action = _close_automorphisms(alg, autos)
    return FreeCDGAPresentation(full, d, group, action, name=name)


def _close_automorphisms(alg: FreeAlgebra, autos: list[list[Poly]], bound: int = 48):
    ident = tuple(tuple(sorted(alg.gen(n).items())) for n in alg.names)
    freeze = lambda row: tuple(tuple(sorted(p.items())) for p in row)
    elems = [[alg.gen(n) for n in alg.names]]
    seen = {ident: 0}
    i = 0
    while i < len(elems):
        for a in autos:
            # (a after e)(x) = a(e(x))
            row = [alg.substitute(a, img) for img in elems[i]]
            key = freeze(row)
            if key not in seen:
                if len(elems) >= bound:
                    raise PresentationError(f"the listed automorphisms generate more than {bound} elements")
                seen[key] = len(elems)
                elems.append(row)
        i += 1
    table = []
    for e in elems:
        r = []
        for f in elems:
            comp = [alg.substitute(e, img) for img in f]
            key = freeze(comp)
            if key not in seen:
                raise PresentationError("automorphisms do not close up into a group")
            r.append(seen[key])
        table.append(r)
    return FiniteGroup(table, name=f"W{len(elems)}"), elems


# ---------------------------------------------------------------------------
# target algebras  R[β^{±1}], R[β] or R  with R = ⊗ Q[x_i]/(f_i)


@dataclass(frozen=True)
class GradedAlgebraPresentation:
    """A commutative graded algebra ``R``, ``R[β]`` or ``R[β^{±1}]`` with
    ``|β| = 2`` and ``R = Q[x_1..x_m]/(f_1(x_1), ..., f_m(x_m))`` for monic
    integer polynomials ``f_i`` (coefficients listed from the constant term)."""

    variables: tuple[str, ...]
    relations: tuple[tuple[int, ...], ...]
    beta: str | None = None  # None, "polynomial" or "laurent"
    label: str = ""

    def __post_init__(self):
        if len(self.variables) != len(self.relations):
            raise ValueError("one relation per variable")
        for f in self.relations:
            if len(f) < 2 or f[-1] != 1:
                raise ValueError("relations must be monic of positive degree")
        if self.beta not in (None, "polynomial", "laurent"):
            raise ValueError(f"unknown beta kind {self.beta!r}")

    @property
    def base_dim(self) -> int:
        out = 1
        for f in self.relations:
            out *= len(f) - 1
        return out

    def dim(self, k: int) -> int:
        if k % 2:
            return 0
        if self.beta is None:
            return self.base_dim if k == 0 else 0
        if self.beta == "polynomial" and k < 0:
            return 0
        return self.base_dim

    def dims(self, degrees: Iterable[int]) -> dict[int, int]:
        return {k: self.dim(k) for k in degrees}

    def describe(self) -> str:
        base = self.label or "R"
        if self.beta == "laurent":
            return f"{base}[beta^{{±1}}]"
        if self.beta == "polynomial":
            return f"{base}[beta]"
        return base

    def relation_strings(self) -> list[str]:
        return [poly_str(f, v) for v, f in zip(self.variables, self.relations)]

    def basis(self, k: int) -> list[tuple[int, tuple[int, ...]]]:
        """Basis ``β^{k/2} x^e`` of degree ``k`` with ``e_i < deg f_i``."""
        if not self.dim(k):
            return []
        exps = [()]
        for f in self.relations:
            exps = [e + (a,) for e in exps for a in range(len(f) - 1)]
        return [(k // 2, e) for e in exps]


def zeta_target(n: int, beta: str | None = None, var: str = "t") -> GradedAlgebraPresentation:
    label = "Q" if n == 1 else f"Q(zeta_{n})"
    return GradedAlgebraPresentation((var,), (cyclotomic(n).coeffs,), beta, label)


class TargetAlgebra:
    """Arithmetic in a :class:`GradedAlgebraPresentation`; elements are dicts
    ``(beta power, exponent tuple) -> coefficient`` in normal form."""

    def __init__(self, t: GradedAlgebraPresentation):
        self.t = t

    def reduce(self, p: Mapping) -> dict:
        out: dict = {}
        work = dict(p)
        while work:
            (b, e), c = work.popitem()
            if not c:
                continue
            if self.t.beta is None and b != 0 or self.t.beta == "polynomial" and b < 0:
                raise ValueError("beta power not available in the target")
            for i, f in enumerate(self.t.relations):
                deg = len(f) - 1
                if e[i] >= deg:
                    # x^e = x^(e-deg) * x^deg and x^deg = -(f_0 + ... + f_{deg-1} x^{deg-1})
                    for j in range(deg):
                        if f[j]:
                            e2 = list(e)
                            e2[i] = e[i] - deg + j
                            key = (b, tuple(e2))
                            work[key] = work.get(key, 0) - c * f[j]
                    break
            else:
                v = out.get((b, e), 0) + c
                if v:
                    out[(b, e)] = v
                else:
                    out.pop((b, e), None)
        return out

    def one(self) -> dict:
        return {(0, (0,) * len(self.t.variables)): 1}

    def var(self, i: int) -> dict:
        e = [0] * len(self.t.variables)
        e[i] = 1
        return self.reduce({(0, tuple(e)): 1})

    def beta(self, k: int = 1) -> dict:
        return self.reduce({(k, (0,) * len(self.t.variables)): 1})

    def mul(self, p: Mapping, q: Mapping) -> dict:
        out: dict = {}
        for (b1, e1), x in p.items():
            for (b2, e2), y in q.items():
                key = (b1 + b2, tuple(a + c for a, c in zip(e1, e2)))
                out[key] = out.get(key, 0) + x * y
        return self.reduce(out)

    def add(self, p: Mapping, q: Mapping, c=1) -> dict:
        out = dict(p)
        for k, v in q.items():
            s = out.get(k, 0) + c * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return out

    def coordinates(self, k: int, p: Mapping) -> tuple[Fraction, ...]:
        basis = self.t.basis(k)
        pos = {b: i for i, b in enumerate(basis)}
        out = [Fraction(0)] * len(basis)
        for key, c in p.items():
            if key not in pos:
                raise ValueError(f"element has a component outside degree {k}")
            out[pos[key]] = q(c)
        return tuple(out)

    def format(self, p: Mapping) -> str:
        if not p:
            return "0"
        terms = []
        for (b, e), c in sorted(p.items()):
            parts = [str(c)] if c != 1 or (not b and not any(e)) else []
            parts += [v if a == 1 else f"{v}^{a}" for v, a in zip(self.t.variables, e) if a]
            if b:
                parts.append("beta" if b == 1 else f"beta^{b}")
            terms.append("*".join(parts))
        return " + ".join(terms)
