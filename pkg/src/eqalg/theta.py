"""Group + spectrum descriptor → the graded Weyl-equivariant algebras ``V_H``,
one per conjugacy class of subgroups, with field and formality certificates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from . import SCHEMA_VERSION
from .cdga import GradedAlgebraPresentation, TruncationPolicy, realize, zeta_target
from .formality import FormalityError, ZigzagCertificate, build_zigzag, model_for
from .groups import FiniteGroup, Subgroup, SubgroupLattice, WeylAction
from .ktheory import check_window, graded_V, graded_field_check
from .linalg import fmt_q
from .mackey import burnside_mackey, constant_green, crosscheck_split, quotient_by_transfers
from .repring import FieldCertificate, UnsupportedGroupError, identify_cyclotomic_field, poly_str, repring_mackey

DEGREE_ZERO_NOTE = "concentrated in degree 0, hence formal"


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumDescriptor:
    """``sphere`` (Burnside Green functor), ``hq`` (constant Q), ``hru``
    (representation ring), ``KU`` (periodic K-theory) or ``ku`` (connective)."""

    kind: str

    KINDS = ("sphere", "hq", "hru", "KU", "ku")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DescriptorError(f"unknown spectrum {self.kind!r}; expected one of {', '.join(self.KINDS)}")

    @classmethod
    def parse(cls, text: str) -> "SpectrumDescriptor":
        if text in ("KU", "ku"):
            return cls(text)
        low = text.lower()
        aliases = {"s": "sphere", "sq": "sphere", "sphere": "sphere", "hq": "hq", "hru": "hru"}
        if low not in aliases:
            raise DescriptorError(f"unknown spectrum {text!r}; expected one of {', '.join(cls.KINDS)}")
        return cls(aliases[low])

    @property
    def graded(self) -> bool:
        return self.kind in ("KU", "ku")

    @property
    def connective(self) -> bool:
        return self.kind == "ku"

    @property
    def needs_abelian(self) -> bool:
        return self.kind in ("hru", "KU", "ku")

    def default_window(self) -> tuple[int, int]:
        if not self.graded:
            return (0, 0)
        return (0, 6) if self.connective else (-6, 6)


@dataclass
class ClassEntry:
    subgroup: Subgroup
    name: str
    degrees: dict[int, int]
    presentation: dict
    weyl: WeylAction | None
    weyl_trivial: bool
    field: FieldCertificate | None = None
    certificate: ZigzagCertificate | None = None
    note: str = ""
    problems: list[str] = dc_field(default_factory=list)

    @property
    def order(self) -> int:
        return self.subgroup.order

    @property
    def cyclic(self) -> bool:
        return self.subgroup.cyclic

    @property
    def is_zero(self) -> bool:
        return not any(self.degrees.values())

    @property
    def valid(self) -> bool:
        if self.problems:
            return False
        if self.field is not None and not self.field.ok:
            return False
        return self.certificate is None or self.certificate.valid


@dataclass
class ThetaModel:
    group: FiniteGroup
    descriptor: SpectrumDescriptor
    window: tuple[int, int]
    classes: list[ClassEntry]

    @property
    def valid(self) -> bool:
        return all(c.valid for c in self.classes)

    def entry(self, name: str) -> ClassEntry:
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)


def _presentation(label: str, target: GradedAlgebraPresentation | None = None) -> dict:
    out = {"label": label, "generators": [], "relations": [], "invertibles": []}
    if target is None:
        return out
    out["label"] = target.describe()
    if target.base_dim > 1 or target.relation_strings() != [poly_str((-1, 1), v) for v in target.variables]:
        out["generators"] += [{"name": v, "degree": 0} for v in target.variables]
        out["relations"] += target.relation_strings()
    if target.beta is not None:
        out["generators"].append({"name": "beta", "degree": 2})
    if target.beta == "laurent":
        out["invertibles"].append("beta")
    return out


def _ungraded(lat: SubgroupLattice, d: SpectrumDescriptor) -> list[ClassEntry]:
    if d.kind == "sphere":
        m = burnside_mackey(lat)
    elif d.kind == "hq":
        m = constant_green(lat)
    else:
        m = repring_mackey(lat)
    out = []
    for h in lat.class_reps:
        v = quotient_by_transfers(m, h)
        problems = list(crosscheck_split(m, h).problems)
        field_cert = None
        if v.dim == 0:
            pres = _presentation("0")
        elif d.kind == "hru":
            field_cert = identify_cyclotomic_field(m, v)
            pres = _presentation(field_cert.describe(), zeta_target(h.order))
        else:
            pres = _presentation("Q")
            if v.dim != 1:
                problems.append(f"expected a one-dimensional piece, found {v.dim}")
        out.append(ClassEntry(h, lat.name(h), {0: v.dim}, pres, v.action, v.action.is_trivial(),
                              field_cert, None, DEGREE_ZERO_NOTE if v.dim else "", problems))
    return out


def theta_cap(n: int) -> int:
    return 2 * n + 4


def _graded(lat: SubgroupLattice, d: SpectrumDescriptor, window: tuple[int, int],
            cap: int | None) -> list[ClassEntry]:
    out = []
    lo, hi = window
    for h in lat.class_reps:
        gv = graded_V(lat, h, window, d.connective)
        dims = gv.dims()
        problems = []
        trivial = all(p.action.is_trivial() for p in gv.pieces.values())
        weyl = gv.pieces[0].action if 0 in gv.pieces else None
        if gv.is_zero():
            out.append(ClassEntry(h, lat.name(h), dims, _presentation("0"), weyl, trivial, problems=problems))
            continue
        n = h.order
        target = zeta_target(n, "polynomial" if d.connective else "laurent")
        for k, dim in dims.items():
            if dim != target.dim(k):
                problems.append(f"degree {k}: V has dimension {dim}, the presentation {target.dim(k)}")
        cert = None
        policy = TruncationPolicy((lo - 1, hi + 1), cap if cap is not None else theta_cap(n))
        try:
            cert = build_zigzag(realize(model_for(target), policy), target)
        except FormalityError as exc:
            problems.append(f"no formality certificate: {exc}")
        else:
            if {k: v for k, v in cert.dims_A.items() if k in dims} != dims:
                problems.append(f"certified homology {cert.dims_A} differs from V {dims}")
        out.append(ClassEntry(h, lat.name(h), dims, _presentation("", target), weyl, trivial,
                              gv.field, cert, "", problems))
    return out


def compute_theta(g: FiniteGroup | SubgroupLattice, d: SpectrumDescriptor | str,
                  window: tuple[int, int] | None = None, cap: int | None = None) -> ThetaModel:
    lat = g if isinstance(g, SubgroupLattice) else SubgroupLattice(g)
    if isinstance(d, str):
        d = SpectrumDescriptor.parse(d)
    if d.needs_abelian and not lat.group.abelian:
        raise UnsupportedGroupError(f"{d.kind} needs an abelian group, {lat.group.name} is not")
    if d.graded:
        window = check_window(window or d.default_window(), d.connective)
        if d.connective and window[0] < 0:
            raise DescriptorError("the connective window must start at degree 0 or above")
        classes = _graded(lat, d, window, cap)
    else:
        window = (0, 0)
        classes = _ungraded(lat, d)
    return ThetaModel(lat.group, d, window, classes)


# ---------------------------------------------------------------------------
# module categories over the pieces of periodic K-theory


@dataclass(frozen=True)
class SplittingLine:
    subgroup: str
    order: int
    periodic_field: bool
    periodic_witness: str
    connective_field: bool
    connective_witness: str

    @property
    def statement(self) -> str:
        if self.periodic_witness == "zero ring":
            return "zero ring: the module category is trivial"
        if self.periodic_field:
            return "graded field of period 2: every module is free on generators in degrees 0 and 1"
        return "not a graded field: no splitting claimed"


@dataclass(frozen=True)
class SplittingReport:
    group: str
    window: tuple[int, int]
    lines: tuple[SplittingLine, ...]
    scope: str = "checked for abelian groups only, where the graded pieces are computed"

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "group": self.group, "window": list(self.window),
                "scope": self.scope,
                "classes": [{"subgroup": x.subgroup, "order": x.order,
                             "KU": {"graded_field": x.periodic_field, "witness": x.periodic_witness},
                             "ku": {"graded_field": x.connective_field, "witness": x.connective_witness},
                             "statement": x.statement} for x in self.lines]}


    def text_lines(self) -> list[str]:
        out = [f"module splitting over {self.group} ({self.scope})"]
        yes = lambda b: "graded field" if b else "not a graded field"
        for x in self.lines:
            out.append(f"({x.subgroup}) order {x.order}: KU {yes(x.periodic_field)} ({x.periodic_witness}); "
                       f"ku {yes(x.connective_field)} ({x.connective_witness})")
            out.append(f"  {x.statement}")
        return out


def module_splitting_report(g: FiniteGroup | SubgroupLattice, window: tuple[int, int] = (-6, 6)) -> SplittingReport:
    lat = g if isinstance(g, SubgroupLattice) else SubgroupLattice(g)
    if not lat.group.abelian:
        raise UnsupportedGroupError(f"{lat.group.name} is not abelian")
    window = check_window(window)
    conn_window = (0, window[1])
    lines = []
    for h in lat.class_reps:
        per = graded_field_check(graded_V(lat, h, window))
        con = graded_field_check(graded_V(lat, h, conn_window, connective=True))
        lines.append(SplittingLine(lat.name(h), h.order, per.is_field, per.witness, con.is_field, con.witness))
    return SplittingReport(lat.group.name, window, tuple(lines))


# ---------------------------------------------------------------------------
# rendering


def _weyl_dict(c: ClassEntry) -> dict:
    if c.weyl is None:
        return {"order": None, "trivial": c.weyl_trivial, "character": []}
    return {"order": c.weyl.group.order, "trivial": c.weyl_trivial,
            "character": [fmt_q(x) for x in c.weyl.character()]}


def _certificate_dict(c: ClassEntry) -> dict | None:
    if c.certificate is not None:
        return {"kind": "zigzag", **c.certificate.to_dict()}
    if c.note:
        return {"kind": "degree-0", "valid": True, "note": c.note}
    return None


def _field_dict(f: FieldCertificate | None) -> dict | None:
    if f is None:
        return None
    return {"field": f.describe(), "ok": f.ok,
            "minimal_polynomial": poly_str(f.minimal_polynomial, "x"),
            "problems": list(f.problems)}


def to_dict(model: ThetaModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "group": model.group.name,
        "descriptor": model.descriptor.kind,
        "window": list(model.window),
        "valid": model.valid,
        "classes": [{
            "subgroup": c.name,
            "order": c.order,
            "cyclic": c.cyclic,
            "degrees": {str(k): v for k, v in sorted(c.degrees.items())},
            "presentation": c.presentation,
            "weyl_action": _weyl_dict(c),
            "field": _field_dict(c.field),
            "certificate": _certificate_dict(c),
            "problems": list(c.problems),
        } for c in model.classes],
    }


def _text(model: ThetaModel) -> str:
    lines = [f"theta({model.descriptor.kind}) over {model.group.name}"
             + (f", window [{model.window[0]}, {model.window[1]}]" if model.descriptor.graded else "")]
    for c in model.classes:
        head = f"({c.name}) order {c.order}, {'cyclic' if c.cyclic else 'non-cyclic'}: "
        if c.is_zero:
            lines.append(head + "V = 0")
            continue
        label = c.presentation["label"]
        if model.descriptor.graded:
            lines.append(head + f"V = {label}")
            lines.append("  dims: " + " ".join(f"{k}:{v}" for k, v in sorted(c.degrees.items())))
        else:
            lines.append(head + f"V = {label}, degree 0")
        if c.presentation["relations"]:
            lines.append("  relations: " + ", ".join(c.presentation["relations"]))
        w = _weyl_dict(c)
        lines.append(f"  weyl action: {'trivial' if w['trivial'] else 'nontrivial'} (|W| = {w['order']})")
        if c.field is not None:
            status = "certified" if c.field.ok else "FAILED: " + "; ".join(c.field.problems)
            lines.append(f"  degree 0 is {c.field.describe()}: {status}")
        if c.certificate is not None:
            cert = c.certificate
            status = "valid" if cert.valid else "INVALID"
            lines.append(f"  formality: zig-zag certificate {status} on degrees "
                         f"[{cert.policy.interior[0]}, {cert.policy.interior[1]}], "
                         f"{cert.checked_monomials} model monomials checked")
            if cert.valid:
                lines.append("  structure: determined up to equivalence by its homology")
        elif c.note:
            lines.append(f"  formality: {c.note}")
        for p in c.problems:
            lines.append(f"  problem: {p}")
    lines.append("all certificates valid" if model.valid else "SOME CERTIFICATES FAILED")
    return "\n".join(lines) + "\n"


def render(model: ThetaModel, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_dict(model), indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        return _text(model)
    raise ValueError(f"unknown format {fmt!r}")
