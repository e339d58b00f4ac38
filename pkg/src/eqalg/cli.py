"""Command-line interface.

Exit codes: 0 on success with every certificate valid, 1 when a verification
fails, 2 on usage errors (bad arguments, unknown or oversized groups,
unsupported group/spectrum combinations).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import SCHEMA_VERSION
from .burnside import BurnsideRing
from .cdga import (PresentationError, TruncationError, TruncationPolicy, homology, koszul_cyclotomic,
                   parse_presentation, periodic_model, realize)
from .formality import (TARGET_KINDS, FormalityError, ScrambleRecipe, build_zigzag, default_policy, scramble,
                        target_spec)
from .groups import DEFAULT_MAX_ORDER, GroupOrderError, GroupSpecError, SubgroupLattice, UnknownGroupError, parse_group_spec
from .linalg import fmt_q
from .mackey import burnside_mackey, constant_green, crosscheck_split
from .repring import UnsupportedGroupError, cyclotomic, identify_cyclotomic_field, repring_mackey, transfer_image
from .theta import DescriptorError, SpectrumDescriptor, compute_theta, module_splitting_report, render, to_dict

EPILOG = f"JSON output follows schema version {SCHEMA_VERSION}."


class UsageError(Exception):
    pass


def _emit(doc: dict, text: list[str], fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, **doc}, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("\n".join(text) + "\n")


def _lattice(spec: str) -> SubgroupLattice:
    return SubgroupLattice(parse_group_spec(spec))


def _window(args, default: tuple[int, int]) -> tuple[int, int]:
    if args.window is None:
        return default
    lo, hi = args.window
    if lo > hi:
        raise UsageError(f"empty window [{lo}, {hi}]")
    return lo, hi


# ---------------------------------------------------------------------------
# subcommands


def cmd_burnside(args) -> int:
    lat = _lattice(args.group)
    ring = BurnsideRing.of(lat)
    names = [lat.name(h) for h in ring.classes]
    marks = ring.mark_matrix
    idem = [ring.gluck_idempotent(h) for h in ring.classes]
    total = ring.zero()
    problems = []
    for i, e in enumerate(idem):
        total = total + e
        if e * e != e:
            problems.append(f"e_{names[i]} is not idempotent")
        for j in range(i + 1, len(idem)):
            if not (e * idem[j]).is_zero():
                problems.append(f"e_{names[i]} e_{names[j]} != 0")
    if total != ring.one():
        problems.append("idempotents do not sum to 1")
    doc = {
        "group": lat.group.name,
        "classes": [{"subgroup": n, "order": h.order} for n, h in zip(names, ring.classes)],
        "marks": marks.to_strings(),
        "idempotents": {n: {names[j]: fmt_q(c) for j, c in enumerate(e.coeffs) if c} for n, e in zip(names, idem)},
        "problems": problems,
    }
    text = [f"Burnside ring of {lat.group.name}: {len(names)} classes", "marks |(G/H)^K| (rows H, columns K):"]
    width = max(len(n) for n in names)
    for n, row in zip(names, marks.to_strings()):
        text.append(f"  {n:>{width}}  " + " ".join(f"{x:>3}" for x in row))
    text.append("idempotents:")
    for n, e in zip(names, idem):
        terms = " + ".join(f"{fmt_q(c)}[G/{names[j]}]" for j, c in enumerate(e.coeffs) if c)
        text.append(f"  e_{n} = {terms}")
    text += [f"problem: {p}" for p in problems] or ["idempotents are orthogonal and sum to 1"]
    _emit(doc, text, args.format)
    return 1 if problems else 0


FUNCTORS = {"constant": constant_green, "burnside": burnside_mackey, "repring": repring_mackey}


def cmd_split(args) -> int:
    lat = _lattice(args.group)
    m = FUNCTORS[args.functor](lat)
    rows, text, bad = [], [f"V_H of the {args.functor} functor on {lat.group.name}, computed two ways"], False
    for h in lat.class_reps:
        r = crosscheck_split(m, h)
        bad |= not r.ok
        rows.append({"subgroup": lat.name(h), "order": h.order, "idempotent_dim": r.idempotent_dim,
                     "quotient_dim": r.quotient_dim, "agree": r.ok, "problems": list(r.problems)})
        status = "agree" if r.ok else "DISAGREE: " + "; ".join(r.problems)
        text.append(f"  ({lat.name(h)}) e_H M(G/H): {r.idempotent_dim}, M(G/H)/transfers: {r.quotient_dim}  {status}")
    _emit({"group": lat.group.name, "functor": args.functor, "classes": rows}, text, args.format)
    return 1 if bad else 0


def cmd_repring(args) -> int:
    lat = _lattice(args.group)
    if not lat.group.abelian:
        raise UnsupportedGroupError(f"{lat.group.name} is not abelian")
    m = repring_mackey(lat)
    rows, text, bad = [], [f"RU(H)/transfers for {lat.group.name}"], False
    from .mackey import quotient_by_transfers
    for h in lat.class_reps:
        v = quotient_by_transfers(m, h)
        row = {"subgroup": lat.name(h), "order": h.order, "cyclic": h.cyclic, "dim": v.dim,
               "weyl_trivial": v.action.is_trivial()}
        line = f"  ({lat.name(h)}) dim {v.dim}"
        if h.cyclic and v.dim:
            cert = identify_cyclotomic_field(m, v)
            bad |= not cert.ok
            row["field"] = cert.describe()
            row["minimal_polynomial"] = str(cyclotomic(h.order)) if cert.ok else None
            row["problems"] = list(cert.problems)
            line += f" = {cert.describe()}" + ("" if cert.ok else " FAILED: " + "; ".join(cert.problems))
        text.append(line)
        rows.append(row)
    transfers = []
    if args.transfers:
        text.append("transfers of the unit inside cyclic subgroups (C_d < C_n):")
        for h in lat.class_reps:
            n = h.order
            if not h.cyclic or n == 1:
                continue
            for d in range(1, n):
                if n % d:
                    continue
                t = transfer_image(n, d)
                bad |= not (t.factorization_holds and t.vanishes_off_divisors)
                scal = {str(j): fmt_q(c) for j, c in sorted(t.scalars.items()) if c}
                transfers.append({"n": n, "d": d, "factorization_holds": t.factorization_holds,
                                  "vanishes_off_divisors": t.vanishes_off_divisors, "scalars": scal,
                                  "alternative_scalar": t.alternative_scalar,
                                  "scalar_discrepancy": t.scalar_discrepancy})
                note = f" (closed form n-d+1 = {t.alternative_scalar} disagrees)" if t.scalar_discrepancy else ""
                text.append(f"  n={n} d={d}: factorization {'ok' if t.factorization_holds else 'FAILS'}, "
                            f"scalars {scal}{note}")
    _emit({"group": lat.group.name, "classes": rows, "transfers": transfers}, text, args.format)
    return 1 if bad else 0


def cmd_homology(args) -> int:
    if args.model == "custom-file":
        if not args.file:
            raise UsageError("--model custom-file needs --file")
        with open(args.file, encoding="utf-8") as fh:
            pres = parse_presentation(fh.read(), name=args.file)
        n = 1
    else:
        n = args.n
        pres = koszul_cyclotomic(n) if args.model == "koszul-phi" else periodic_model(koszul_cyclotomic(n))
    window = _window(args, (-1, 2) if args.model == "koszul-phi" else (-7, 7))
    cap = args.cap if args.cap is not None else 2 * n + 4
    c = realize(pres, TruncationPolicy(window, cap))
    dims = homology(c).dims()
    doc = {"model": pres.name, "window": list(window), "cap": cap,
           "interior": list(c.policy.interior), "chain_dims": {str(k): v for k, v in c.dims().items()},
           "homology_dims": {str(k): v for k, v in dims.items()}}
    text = [f"{pres.name}: window [{window[0]}, {window[1]}], cap {cap}",
            "homology on the interior: " + " ".join(f"{k}:{v}" for k, v in dims.items())]
    _emit(doc, text, args.format)
    return 0


def cmd_formality(args) -> int:
    target, base = target_spec(args.target, args.n)
    policy = default_policy(args.target, args.n)
    if args.window is not None or args.cap is not None:
        policy = TruncationPolicy(_window(args, policy.window), args.cap if args.cap is not None else policy.cap)
    if args.scramble_seed is None:
        a = realize(base, policy)
    else:
        a = scramble(base, ScrambleRecipe(args.scramble_seed, pairs=args.pairs), policy)
    cert = build_zigzag(a, target)
    doc = {"target": target.describe(), "model": a.presentation.name, "certificate": cert.to_dict()}
    text = [f"target {target.describe()}, model {a.presentation.name}",
            f"window [{policy.window[0]}, {policy.window[1]}], interior [{policy.interior[0]}, {policy.interior[1]}], "
            f"cap {policy.cap}"]
    text += [f"  phi({k}) = {v}" for k, v in cert.phi_strings().items()]
    text += [f"  psi({k}) = {v}" for k, v in cert.psi_strings().items()]
    text.append(f"  {cert.checked_monomials} model monomials checked")
    text.append("certificate valid" if cert.valid else "certificate INVALID")
    text += [f"  problem: {p}" for p in cert.problems()]
    _emit(doc, text, args.format)
    return 0 if cert.valid else 1


def cmd_theta(args) -> int:
    d = SpectrumDescriptor.parse(args.spectrum)
    window = tuple(args.window) if args.window is not None else None
    model = compute_theta(_lattice(args.group), d, window, args.cap)
    if not args.modules:
        sys.stdout.write(render(model, args.format))
        return 0 if model.valid else 1
    report = module_splitting_report(_lattice(args.group))
    if args.format == "json":
        doc = to_dict(model)
        doc["module_splitting"] = report.to_dict()
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(render(model, "text") + "\n".join(report.text_lines()) + "\n")
    return 0 if model.valid else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eqalg", description="Rational equivariant algebra for finite groups.", epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    group_help = f"group such as C6, C2xC4, S3, D4, Q8 (order at most {DEFAULT_MAX_ORDER})"

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text, epilog=EPILOG)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        return sp

    sp = add("burnside", cmd_burnside, "table of marks and idempotents of the rational Burnside ring")
    sp.add_argument("group", help=group_help)

    sp = add("split-mackey", cmd_split, "V_H of a Mackey functor via idempotents and via transfers")
    sp.add_argument("group", help=group_help)
    sp.add_argument("--functor", choices=sorted(FUNCTORS), default="burnside")

    sp = add("repring", cmd_repring, "RU(H) modulo transfers, identified as cyclotomic fields (abelian groups)")
    sp.add_argument("group", help=group_help)
    sp.add_argument("--transfers", action="store_true", help="also factor the transfer of the unit")

    sp = add("homology", cmd_homology, "homology of a truncated free CDGA model")
    sp.add_argument("--model", choices=("koszul-phi", "periodic", "custom-file"), default="koszul-phi")
    sp.add_argument("--n", type=int, default=1, help="cyclotomic order for the built-in models")
    sp.add_argument("--file", help="presentation file for --model custom-file")
    sp.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--cap", type=int, help="weight cap (default 2n + 4)")

    sp = add("formality-check", cmd_formality, "build and verify a zig-zag A <- D -> H(A)")
    sp.add_argument("--target", choices=TARGET_KINDS, default="zeta-n")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--scramble-seed", type=int)
    sp.add_argument("--pairs", type=int, default=2)
    sp.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))
    sp.add_argument("--cap", type=int)

    sp = add("theta", cmd_theta, "the graded algebras V_H of a spectrum, one per subgroup class")
    sp.add_argument("group", help=group_help)
    sp.add_argument("spectrum", help="sphere, hq, hru, KU or ku")
    sp.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"),
                    help="degree window, even endpoints (default -6 6 for KU, 0 6 for ku)")
    sp.add_argument("--cap", type=int, help="weight cap for the certified models (default 2n + 4)")
    sp.add_argument("--modules", action="store_true", help="append the module splitting report (KU, abelian)")
    return p


USAGE_ERRORS = (UsageError, GroupSpecError, UnknownGroupError, GroupOrderError, UnsupportedGroupError,
                DescriptorError, PresentationError, TruncationError, ArithmeticError, OSError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "n", 1) < 1:
        print("error: --n must be positive", file=sys.stderr)
        return 2
    if getattr(args, "pairs", 0) < 0:
        print("error: --pairs must be nonnegative", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormalityError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
