"""Acceptance checks, one per criterion.  Each prints a ``[PASS]``/``[FAIL]``
line; run with ``pytest -s tests/test_acceptance.py`` or as a script."""

import contextlib
import io
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy

sys.path.insert(0, str(Path(__file__).parent))

from catalog import NONABELIAN_16, abelian_specs, lattice  # noqa: E402
from eqalg.burnside import BurnsideRing, restrict  # noqa: E402
from eqalg.cdga import (TruncationPolicy, homology, koszul, laurent_model, parse_presentation,  # noqa: E402
                        periodic_model, realize)
from eqalg.cli import main as cli_main  # noqa: E402
from eqalg.formality import ScrambleRecipe, build_zigzag, default_policy, scramble, target_spec  # noqa: E402
from eqalg.groups import SubgroupLattice, euler_phi  # noqa: E402
from eqalg.ktheory import graded_V  # noqa: E402
from eqalg.mackey import axioms_check, burnside_mackey, constant_green, crosscheck_split  # noqa: E402
from eqalg.repring import (RepRingElement, character_group, cyclotomic, identify_cyclotomic_field,  # noqa: E402
                           induction, repring_mackey, restriction, transfer_image)
from eqalg.mackey import quotient_by_transfers  # noqa: E402
from eqalg.theta import compute_theta  # noqa: E402

x = sympy.Symbol("x")
RESULTS: list[str] = []


def report(n: int, title: str, check) -> None:
    start = time.perf_counter()
    try:
        detail = check()
        ok = True
    except AssertionError as exc:
        ok, detail = False, str(exc) or "assertion failed"
    took = time.perf_counter() - start
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail}; {took:.2f} s)"
    RESULTS.append(line)
    print(line)
    assert ok, detail


# 1 -------------------------------------------------------------------------

IDEMPOTENT_GROUPS = ["C2", "C3", "C4", "C6", "C8", "C12", "C2xC2", "C2xC4", "C2xC2xC3", "S3", "D4"]


def check_idempotents():
    start = time.perf_counter()
    count = 0
    for spec in IDEMPOTENT_GROUPS:
        ring = BurnsideRing(SubgroupLattice(lattice(spec).group))
        es = ring.idempotents()
        total = ring.zero()
        for i in range(ring.rank):
            delta = [int(i == j) for j in range(ring.rank)]
            assert es[i] == ring.from_marks(delta), f"{spec}: e_H differs from the inverse mark image"
            assert es[i] * es[i] == es[i], f"{spec}: e_H is not idempotent"
            for j in range(i + 1, ring.rank):
                assert (es[i] * es[j]).is_zero(), f"{spec}: e_H e_K != 0"
            total = total + es[i]
            count += 1
        assert total == ring.one(), f"{spec}: idempotents do not sum to 1"
    took = time.perf_counter() - start
    assert took < 2, f"took {took:.2f} s"
    return f"{count} idempotents over {len(IDEMPOTENT_GROUPS)} groups"


def test_criterion_1():
    report(1, "Gluck idempotents", check_idempotents)


# 2 -------------------------------------------------------------------------


def check_examples():
    specs = ["C1", "C2", "C3", "C6", "C2xC2", "S3", "D4", "Q8"]
    for spec in specs:
        hq = compute_theta(lattice(spec), "hq")
        sq = compute_theta(lattice(spec), "sphere")
        assert hq.valid and sq.valid, spec
        for c in hq.classes:
            assert c.degrees == {0: int(c.order == 1)}, f"{spec}: theta(HQ) at {c.name}"
            assert c.weyl_trivial
        for c in sq.classes:
            assert c.degrees == {0: 1} and c.weyl_trivial, f"{spec}: theta(S_Q) at {c.name}"
    return f"{len(specs)} groups"


def test_criterion_2():
    report(2, "theta(HQ) and theta(S_Q)", check_examples)


# 3 -------------------------------------------------------------------------


def check_repring_quotients():
    start = time.perf_counter()
    specs = abelian_specs(24)
    classes = 0
    for spec in specs:
        lat = SubgroupLattice(lattice(spec).group)
        m = repring_mackey(lat)
        for h in lat.class_reps:
            classes += 1
            v = quotient_by_transfers(m, h)
            if not h.cyclic:
                assert v.dim == 0, f"{spec}: noncyclic V_H nonzero"
                continue
            assert v.dim == euler_phi(h.order), f"{spec}: dim V_H"
            cert = identify_cyclotomic_field(m, v)
            assert cert.ok, f"{spec}: {cert.problems}"
            assert cert.minimal_polynomial == tuple(Fraction(c) for c in cyclotomic(h.order).coeffs)
            assert v.action.is_trivial(), f"{spec}: Weyl action"
    took = time.perf_counter() - start
    assert took < 10, f"took {took:.2f} s"
    return f"{len(specs)} groups, {classes} classes"


def test_criterion_3():
    report(3, "representation ring modulo transfers", check_repring_quotients)


# 4 -------------------------------------------------------------------------


def check_transfers():
    cases = differing = 0
    for n in range(2, 25):
        for d in sympy.divisors(n)[:-1]:
            cases += 1
            t = transfer_image(n, d)
            expected = sympy.Poly(sympy.prod([sympy.cyclotomic_poly(j, x) for j in sympy.divisors(n) if d % j]), x)
            got = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator)
                                            for c in t.unit_transfer])), x)
            assert got == expected, f"n={n}, d={d}: induced character"
            assert t.factorization_holds and t.vanishes_off_divisors, f"n={n}, d={d}"
            for j in sympy.divisors(n):
                if d % j:
                    assert not any(t.crt_coordinates[j]), f"n={n}, d={d}, j={j}: nonzero"
                else:
                    assert t.scalars[j] == Fraction(n, d), f"n={n}, d={d}, j={j}: scalar"
            differing += t.scalar_discrepancy
    return f"{cases} pairs; scalar n/d, closed form n-d+1 disagrees in {differing}"


def test_criterion_4():
    report(4, "transfer factorisation", check_transfers)


# 5 -------------------------------------------------------------------------


def check_crosscheck():
    specs = abelian_specs(16) + NONABELIAN_16
    checks = 0
    for spec in specs:
        lat = lattice(spec)
        functors = [constant_green(lat), burnside_mackey(lat)]
        if lat.group.abelian:
            functors.append(repring_mackey(lat))
        for m in functors:
            for h in lat.class_reps:
                r = crosscheck_split(m, h)
                assert r.ok, f"{spec} {m.name} at {lat.name(h)}: {r.problems}"
                checks += 1
    return f"{checks} splittings over {len(specs)} groups"


def test_criterion_5():
    report(5, "idempotent piece vs quotient by transfers", check_crosscheck)


# 6 -------------------------------------------------------------------------


def check_ku_dims():
    specs = abelian_specs(12)
    for spec in specs:
        lat = lattice(spec)
        for h in lat.class_reps:
            phi = euler_phi(h.order) if h.cyclic else 0
            per = graded_V(lat, h, (-6, 6)).dims()
            assert per == {k: (phi if k % 2 == 0 else 0) for k in range(-6, 7)}, f"{spec} KU at {lat.name(h)}"
            con = graded_V(lat, h, (-6, 6), connective=True).dims()
            assert con == {k: (phi if k % 2 == 0 and k >= 0 else 0) for k in range(-6, 7)}, \
                f"{spec} ku at {lat.name(h)}"
    return f"{len(specs)} groups, window [-6, 6]"


def test_criterion_6():
    report(6, "KU/ku graded dimensions", check_ku_dims)


# 7 -------------------------------------------------------------------------


def check_formality():
    start = time.perf_counter()
    count = 0
    for n in range(1, 13):
        for kind in ("zeta-n", "zeta-n-poly", "zeta-n-laurent"):
            target, base = target_spec(kind, n)
            policy = default_policy(kind, n)
            for seed in range(20):
                cert = build_zigzag(scramble(base, ScrambleRecipe(seed), policy, check=False), target)
                assert cert.residuals_zero, f"n={n} {kind} seed {seed}: {cert.problems()[:2]}"
                assert cert.quasi_isomorphic, f"n={n} {kind} seed {seed}: {cert.problems()[:2]}"
                count += 1
    took = time.perf_counter() - start
    assert took < 60, f"took {took:.2f} s"
    return f"{count} certificates"


def test_criterion_7():
    report(7, "formality certificates", check_formality)


# 8 -------------------------------------------------------------------------


def brute_quotient_dim(variables, relations, top):
    """Dimension of Q[vars]/(relations) from the spanning set of multiples of
    the relations inside polynomials of total degree <= top."""
    xs = sympy.symbols(variables)
    fs = [sympy.Poly(sympy.sympify(r.replace("^", "**")), *xs) for r in relations]
    from itertools import product
    monos = [e for e in product(range(top + 1), repeat=len(xs)) if sum(e) <= top]
    pos = {m: i for i, m in enumerate(monos)}
    rows = []
    for f in fs:
        for e in monos:
            if sum(e) + f.total_degree() <= top:
                row = [0] * len(monos)
                for mono, c in f.terms():
                    row[pos[tuple(a + b for a, b in zip(mono, e))]] += c
                rows.append(row)
    return len(monos) - sympy.Matrix(rows).rank()


def check_koszul():
    cases = [(["t"], [str(sympy.cyclotomic_poly(n, sympy.Symbol("t"))).replace("**", "^")]) for n in range(1, 13)]
    cases.append((["t1", "t2"], ["t1^2 - 1", "t2^3 - 1"]))
    for variables, relations in cases:
        top = max(sympy.Poly(sympy.sympify(r.replace("^", "**"))).total_degree() for r in relations)
        expected = brute_quotient_dim(variables, relations, 2 * top + 2)
        assert expected == brute_quotient_dim(variables, relations, 2 * top + 4), "oracle not stable"
        r = len(relations)
        dims = homology(realize(koszul(variables, relations), TruncationPolicy((-1, r + 1), 2 * r * top + 4))).dims()
        assert dims[0] == expected, f"{relations}: H0 {dims[0]} vs {expected}"
        assert all(d == 0 for k, d in dims.items() if k), f"{relations}: {dims}"
    return f"{len(cases)} presentations"


def test_criterion_8():
    report(8, "Koszul homology vs quotient ring", check_koszul)


# 9 -------------------------------------------------------------------------

SIGNED = "t 0 even\nz 1 odd\nd z = t^2 - 1\nact s t = -t\n"


def random_poly(rng, c, k):
    basis = c.bases[k]
    return {m: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for m in rng.sample(basis, min(3, len(basis)))}


def check_structure():
    rng = random.Random(20240601)
    counts = dict.fromkeys(("d^2", "Leibniz", "equivariance", "Mackey", "Mobius", "Frobenius", "stability"), 0)
    models = [periodic_model(koszul(["t"], ["t^2 + t + 1"])), parse_presentation(SIGNED), laurent_model()]
    for pres in models:
        c = realize(pres, TruncationPolicy((-4, 4), 6), check=False)
        degrees = [k for k, b in c.bases.items() if b]
        alg = pres.alg
        for _ in range(40):
            ka, kb = rng.choice(degrees), rng.choice(degrees)
            a, b = random_poly(rng, c, ka), random_poly(rng, c, kb)
            assert pres.d(pres.d(a)) == {}, "d^2"
            counts["d^2"] += 1
            lhs = pres.d(alg.mul(a, b))
            rhs = alg.add(alg.mul(pres.d(a), b), alg.mul(a, pres.d(b)), (-1) ** (ka % 2))
            assert lhs == rhs, "Leibniz"
            counts["Leibniz"] += 1
            for g in range(pres.group.order):
                assert pres.act(g, pres.d(a)) == pres.d(pres.act(g, a)), "equivariance"
                counts["equivariance"] += 1
    for spec in ["C4", "C2xC2", "S3", "D4", "Q8", "C2xC4"]:
        lat = lattice(spec)
        functors = [constant_green(lat), burnside_mackey(lat)]
        if lat.group.abelian:
            functors.append(repring_mackey(lat))
        for m in functors:
            assert axioms_check(m) == [], f"Mackey axioms for {m.name} on {spec}"
            counts["Mackey"] += 1
        for k in lat.subgroups:
            for h in lat.subgroups:
                if k.elements <= h.elements:
                    s = sum(lat.mobius(k, j) for j in lat.subgroups if k.elements <= j.elements <= h.elements)
                    assert s == (k.index == h.index), f"Mobius recursion on {spec}"
                    counts["Mobius"] += 1
        ring = BurnsideRing.of(lat)
        for _ in range(5):
            a = ring.element({h: rng.randint(-3, 3) for h in ring.classes})
            b = ring.element({h: rng.randint(-3, 3) for h in ring.classes})
            k = rng.choice(lat.subgroups)
            assert restrict(a * b, k) == restrict(a, k) * restrict(b, k), "restriction is multiplicative"
        if lat.group.abelian:
            for _ in range(20):
                big_h = rng.choice(lat.subgroups)
                small_h = rng.choice(lat.subgroups_of(big_h))
                small, big = character_group(lat, small_h), character_group(lat, big_h)
                xs = RepRingElement(small, tuple(Fraction(rng.randint(-2, 2)) for _ in range(len(small))))
                ys = RepRingElement(big, tuple(Fraction(rng.randint(-2, 2)) for _ in range(len(big))))
                assert induction(restriction(ys, small) * xs, big) == ys * induction(xs, big), "Frobenius"
                counts["Frobenius"] += 1
    for pres, window in [(koszul(["t"], ["t^4 + 1"]), (-1, 2)), (laurent_model(), (-3, 3)),
                         (periodic_model(koszul(["t"], ["t + 1"])), (-3, 3))]:
        for cap in (8, 10):
            a = homology(realize(pres, TruncationPolicy(window, cap))).dims()
            b = homology(realize(pres, TruncationPolicy(window, cap + 2))).dims()
            assert a == b, f"truncation stability for {pres.name} at cap {cap}"
            counts["stability"] += 1
    return ", ".join(f"{k} {v}" for k, v in counts.items())


def test_criterion_9():
    report(9, "structural identities", check_structure)


# 10 ------------------------------------------------------------------------


def run_cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(list(argv))
    return code, buf.getvalue()


def check_theta_c2xc4():
    code, out = run_cli("theta", "C2xC4", "KU", "--window", "-6", "6")
    assert code == 0, f"KU exit {code}"
    model = compute_theta(lattice("C2xC4"), "KU", (-6, 6))
    for c in model.classes:
        if c.cyclic:
            label = ("Q" if c.order == 1 else f"Q(zeta_{c.order})") + "[beta^{±1}]"
            assert f"({c.name}) order {c.order}, cyclic: V = {label}" in out, f"KU line for {c.name}"
            assert c.certificate is not None and c.certificate.valid, f"KU certificate for {c.name}"
        else:
            assert f"({c.name}) order {c.order}, non-cyclic: V = 0" in out, f"KU zero at {c.name}"
    assert "all certificates valid" in out
    code, out = run_cli("theta", "C2xC4", "ku")
    assert code == 0, f"ku exit {code}"
    for c in compute_theta(lattice("C2xC4"), "ku").classes:
        if c.cyclic:
            label = ("Q" if c.order == 1 else f"Q(zeta_{c.order})") + "[beta]"
            assert f"({c.name}) order {c.order}, cyclic: V = {label}" in out, f"ku line for {c.name}"
            assert c.certificate.valid
        else:
            assert "non-cyclic: V = 0" in out
    return "theta C2xC4 KU and ku, exit 0"


def test_criterion_10():
    report(10, "periodic and connective K-theory over C2xC4", check_theta_c2xc4)


if __name__ == "__main__":
    failed = 0
    for name in sorted((n for n in dir() if n.startswith("test_criterion_")), key=lambda s: int(s.rsplit("_", 1)[1])):
        try:
            globals()[name]()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
