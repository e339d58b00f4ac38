from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from eqalg.cdga import (FreeAlgebra, FreeCDGAPresentation, Generator, GradedAlgebraPresentation, NotACycleError,
                        PolynomialSyntaxError, PresentationError, TargetAlgebra, TruncationError,
                        TruncationPolicy, homology, koszul, koszul_cyclotomic, laurent_model, parse_presentation,
                        periodic_model, polynomial_beta_model, realize, tensor, zeta_target)
from eqalg.repring import cyclotomic

SIGNED = """
t 0 even
z 1 odd
d z = t^2 - 1
act s t = -t
"""

MIXED = """
a 2 even
b 5 odd
c 1 odd
u 4 even 2
d b = a^2
"""


def quotient_dim_oracle(variables, relations):
    """dim Q[vars]/(relations) by linear algebra in the space of polynomials of
    total degree <= D, growing D until the count stabilises."""
    xs = sympy.symbols(variables)
    fs = [sympy.Poly(sympy.sympify(r), *xs) for r in relations]
    prev = None
    for top in range(2, 30):
        monos = [e for e in product(range(top + 1), repeat=len(xs)) if sum(e) <= top]
        pos = {m: i for i, m in enumerate(monos)}
        rows = []
        for f in fs:
            for e in monos:
                if sum(e) + f.total_degree() > top:
                    continue
                row = [0] * len(monos)
                for mono, c in f.terms():
                    row[pos[tuple(a + b for a, b in zip(mono, e))]] += c
                rows.append(row)
        rank = sympy.Matrix(rows).rank() if rows else 0
        dim = len(monos) - rank
        if dim == prev:
            return dim
        prev = dim
    raise AssertionError("quotient dimension did not stabilise")


def groebner_dim(variables, relations):
    xs = sympy.symbols(variables)
    gb = sympy.groebner([sympy.sympify(r) for r in relations], *xs, order="grevlex")
    leads = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in gb.exprs]
    bound = max(max(m) for m in leads) + 1
    return sum(1 for e in product(range(bound), repeat=len(xs))
               if not any(all(a >= b for a, b in zip(e, lead)) for lead in leads))


def cyclo(n):
    return str(sympy.cyclotomic_poly(n, sympy.Symbol("t"))).replace("**", "^")


KOSZUL_CASES = [(["t"], [cyclo(n)]) for n in range(1, 13)] + [
    (["t1", "t2"], ["t1^2 - 1", "t2^3 - 1"]),
    (["t"], ["t^2"]),
    (["u", "v"], ["u^2 - v", "v^2 - 2"]),
]


@pytest.mark.parametrize("variables,relations", KOSZUL_CASES)
def test_koszul_oracle(variables, relations):
    expected = quotient_dim_oracle(variables, relations)
    assert expected == groebner_dim(variables, relations)
    pres = koszul(variables, relations)
    r = len(relations)
    top = max(sympy.Poly(sympy.sympify(f)).total_degree() for f in relations)
    cap = 2 * r * top + 4
    dims = homology(realize(pres, TruncationPolicy((-1, r + 1), cap))).dims()
    assert dims[0] == expected
    assert all(d == 0 for k, d in dims.items() if k != 0), dims


def test_phi4_example():
    c = realize(koszul_cyclotomic(4), TruncationPolicy((-1, 2), 12))
    assert homology(c).dims() == {0: 2, 1: 0}


def test_koszul_cyclotomic_relation():
    pres = koszul_cyclotomic(6)
    t = pres.alg.gen("t")
    assert pres.alg.format(pres.d(pres.alg.gen("z"))) == "t^2 - t + 1"
    assert pres.marks["t"] == t


STABILITY = [
    ("koszul6", lambda: koszul_cyclotomic(6), (-1, 2)),
    ("laurent", laurent_model, (-3, 3)),
    ("periodic5", lambda: periodic_model(koszul_cyclotomic(5)), (-3, 3)),
    ("poly3", lambda: polynomial_beta_model(koszul_cyclotomic(3)), (-1, 3)),
    ("mixed", lambda: parse_presentation(MIXED), (-1, 6)),
]


@pytest.mark.parametrize("name,build,window", STABILITY)
def test_truncation_stability(name, build, window):
    pres = build()
    caps = [6, 8, 10, 12]
    seen = [homology(realize(pres, TruncationPolicy(window, n))).dims() for n in caps]
    # once the cap is large enough, raising it by two changes nothing
    assert seen[-1] == seen[-2] == seen[-3]


def test_laurent_homology():
    dims = homology(realize(laurent_model(), TruncationPolicy((-5, 5), 12))).dims()
    assert dims == {k: (1 if k % 2 == 0 else 0) for k in range(-4, 5)}


# ---------------------------------------------------------------------------
# algebraic identities on random elements


PRESENTATIONS = {
    "signed": lambda: parse_presentation(SIGNED),
    "mixed": lambda: parse_presentation(MIXED),
    "periodic3": lambda: periodic_model(koszul_cyclotomic(3)),
    "two": lambda: koszul(["t1", "t2"], ["t1^2 - 1", "t2^3 - 1"]),
}
BUILT = {}


def built(name):
    if name not in BUILT:
        pres = PRESENTATIONS[name]()
        BUILT[name] = (pres, realize(pres, TruncationPolicy((-4, 6), 6), check=False))
    return BUILT[name]


@st.composite
def homogeneous(draw, name):
    pres, c = built(name)
    k = draw(st.sampled_from([k for k, b in c.bases.items() if b]))
    basis = c.bases[k]
    picks = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=4))
    p = {}
    for m in picks:
        p[m] = p.get(m, 0) + Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 3)))
    return k, {m: v for m, v in p.items() if v}


@pytest.mark.parametrize("name", sorted(PRESENTATIONS))
@given(data=st.data())
def test_d_squared_zero(name, data):
    pres, _ = built(name)
    _, p = data.draw(homogeneous(name))
    assert pres.d(pres.d(p)) == {}


@pytest.mark.parametrize("name", sorted(PRESENTATIONS))
@given(data=st.data())
def test_leibniz(name, data):
    pres, _ = built(name)
    alg = pres.alg
    ka, a = data.draw(homogeneous(name))
    _, b = data.draw(homogeneous(name))
    lhs = pres.d(alg.mul(a, b))
    rhs = alg.add(alg.mul(pres.d(a), b), alg.mul(a, pres.d(b)), (-1) ** (ka % 2))
    assert lhs == rhs


@pytest.mark.parametrize("name", sorted(PRESENTATIONS))
@given(data=st.data())
def test_graded_commutativity(name, data):
    alg = built(name)[0].alg
    ka, a = data.draw(homogeneous(name))
    kb, b = data.draw(homogeneous(name))
    assert alg.mul(a, b) == alg.scale(alg.mul(b, a), (-1) ** (ka * kb % 2))


@given(data=st.data())
def test_equivariance(data):
    pres, _ = built("signed")
    _, p = data.draw(homogeneous("signed"))
    for g in range(pres.group.order):
        assert pres.act(g, pres.d(p)) == pres.d(pres.act(g, p))
        assert pres.act(g, pres.alg.mul(p, p)) == pres.alg.mul(pres.act(g, p), pres.act(g, p))


def test_odd_square_vanishes():
    alg = parse_presentation(MIXED).alg
    c = alg.gen("c")
    assert alg.mul(c, c) == {}


def test_realized_checks_pass():
    _, c = built("signed")
    assert c.check_d_squared() == [] and c.check_equivariance() == []


def test_signed_action_on_homology():
    c = realize(parse_presentation(SIGNED), TruncationPolicy((-1, 2), 8))
    h = homology(c)
    assert h.dims() == {0: 2, 1: 0}
    m = h.action_matrix(1, 0)
    # t -> -t on Q[t]/(t^2 - 1) has eigenvalues 1 and -1
    assert m.trace() == 0 and (m @ m).trace() == 2


# ---------------------------------------------------------------------------
# parsing and validation


def test_parse_errors():
    with pytest.raises(PresentationError):
        parse_presentation("t 1 even")
    with pytest.raises(PresentationError):
        parse_presentation("t 0 even\nt 0 even")
    with pytest.raises(PresentationError):
        parse_presentation("")
    with pytest.raises(PresentationError):
        parse_presentation("t 0 even\nz 1 odd\nd z = t*z")
    with pytest.raises(PolynomialSyntaxError):
        parse_presentation("t 0 even\nz 1 odd\nd z = t^(1/2)")
    with pytest.raises(PolynomialSyntaxError):
        parse_presentation("t 0 even\nz 1 odd\nd z = w")


def test_d_squared_violation_rejected():
    gens = [Generator("t", 0, False), Generator("b", 1, True), Generator("c", 2, False, 2)]
    alg = FreeAlgebra(gens)
    # d(d c) = d(t*b) = t^2
    with pytest.raises(PresentationError):
        FreeCDGAPresentation(gens, {"b": alg.parse("t"), "c": alg.parse("t*b")})


def test_parse_fractions_and_weights():
    pres = parse_presentation("t 0 even\nz 1 odd\nd z = 1/2*t^3 - 3/2  # comment")
    assert pres.alg.format(pres.d(pres.alg.gen("z"))) == "1/2*t^3 - 3/2"
    assert pres.alg.gens[1].weight == 3


def test_weight_zero_even_generator_rejected():
    pres = FreeCDGAPresentation([Generator("g", 2, False, 0)])
    with pytest.raises(TruncationError):
        realize(pres, TruncationPolicy((-2, 2), 4))


def test_not_a_cycle():
    pres = koszul_cyclotomic(3)
    h = homology(realize(pres, TruncationPolicy((-1, 2), 6)))
    with pytest.raises(NotACycleError):
        h.coordinates(1, pres.alg.gen("z"))
    with pytest.raises(TruncationError):
        h[5]


def test_tensor_renames_collisions():
    p = tensor(koszul_cyclotomic(2), koszul_cyclotomic(3))
    assert p.alg.names == ["t", "z", "t_", "z_"]
    assert p.alg.format(p.d(p.alg.gen("z_"))) == "t_^2 + t_ + 1"


def test_target_algebra_arithmetic():
    t = zeta_target(3, "laurent")
    alg = TargetAlgebra(t)
    x = alg.var(0)
    # t^3 = 1 in Q(zeta_3)
    assert alg.mul(alg.mul(x, x), x) == alg.one()
    assert alg.mul(alg.beta(1), alg.beta(-1)) == alg.one()
    assert t.dims(range(-2, 3)) == {-2: 2, -1: 0, 0: 2, 1: 0, 2: 2}
    assert t.describe() == "Q(zeta_3)[beta^{±1}]"
    assert zeta_target(4, "polynomial").dim(-2) == 0
    with pytest.raises(ValueError):
        GradedAlgebraPresentation(("t",), ((1, 2),))


def test_target_cyclotomic_coefficients():
    assert zeta_target(12).relations == (cyclotomic(12).coeffs,)
