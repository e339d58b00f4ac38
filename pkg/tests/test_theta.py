import json

import jsonschema
import pytest

from catalog import lattice
from eqalg.groups import euler_phi
from eqalg.repring import UnsupportedGroupError
from eqalg.theta import (DescriptorError, SpectrumDescriptor, compute_theta, module_splitting_report, render,
                         to_dict)

THETA_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "group", "descriptor", "window", "valid", "classes"],
    "properties": {
        "schema_version": {"const": "1.0"},
        "group": {"type": "string"},
        "descriptor": {"enum": ["sphere", "hq", "hru", "KU", "ku"]},
        "window": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "valid": {"type": "boolean"},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["subgroup", "order", "cyclic", "degrees", "presentation", "weyl_action",
                             "certificate"],
                "properties": {
                    "subgroup": {"type": "string"},
                    "order": {"type": "integer", "minimum": 1},
                    "cyclic": {"type": "boolean"},
                    "degrees": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
                    "presentation": {"type": "object", "required": ["label", "generators", "relations"]},
                    "weyl_action": {"type": "object", "required": ["trivial"]},
                    "certificate": {"type": ["object", "null"]},
                },
            },
        },
    },
}


def test_sphere_is_constant_q():
    model = compute_theta(lattice("C2"), "sphere")
    assert model.valid
    for c in model.classes:
        assert c.degrees == {0: 1} and c.weyl_trivial
    assert render(model).count("V = Q, degree 0") == 2


@pytest.mark.parametrize("spec", ["C6", "S3", "D4", "Q8"])
def test_sphere_all_classes(spec):
    model = compute_theta(lattice(spec), "sphere")
    assert model.valid
    assert all(c.degrees == {0: 1} and c.weyl_trivial for c in model.classes)


@pytest.mark.parametrize("spec", ["C2", "C4", "S3", "C2xC2"])
def test_hq_only_at_trivial_subgroup(spec):
    model = compute_theta(lattice(spec), "hq")
    assert model.valid
    for c in model.classes:
        assert c.degrees == {0: 1 if c.order == 1 else 0}
    assert render(model).count("V = Q, degree 0") == 1


def test_hru_fields():
    model = compute_theta(lattice("C2xC4"), "hru")
    assert model.valid
    for c in model.classes:
        assert c.degrees[0] == (euler_phi(c.order) if c.cyclic else 0)
        if c.cyclic:
            assert c.field is not None and c.field.ok


def test_periodic_pieces_are_laurent_cyclotomic():
    model = compute_theta(lattice("C2xC4"), "KU", (-6, 6))
    assert model.valid
    for c in model.classes:
        if not c.cyclic:
            assert c.is_zero and c.presentation["label"] == "0"
            continue
        n = c.order
        assert c.certificate is not None and c.certificate.valid
        label = "Q" if n == 1 else f"Q(zeta_{n})"
        assert c.presentation["label"] == label + "[beta^{±1}]"
        assert c.degrees == {k: (euler_phi(n) if k % 2 == 0 else 0) for k in range(-6, 7)}


def test_connective_pieces_are_polynomial():
    model = compute_theta(lattice("C4"), "ku")
    assert model.valid and model.window == (0, 6)
    for c in model.classes:
        assert c.presentation["label"].endswith("[beta]")
        assert c.presentation["invertibles"] == []


def test_render_deterministic():
    a = render(compute_theta(lattice("C2xC2"), "KU", (-2, 2)), "json")
    b = render(compute_theta(lattice("C2xC2"), "KU", (-2, 2)), "json")
    assert a == b


@pytest.mark.parametrize("spec,kind", [("C2", "sphere"), ("S3", "hq"), ("C6", "hru"), ("C2xC2", "KU"),
                                       ("C3", "ku")])
def test_json_schema_round_trip(spec, kind):
    doc = to_dict(compute_theta(lattice(spec), kind))
    text = render(compute_theta(lattice(spec), kind), "json")
    back = json.loads(text)
    jsonschema.validate(back, THETA_SCHEMA)
    assert back == json.loads(json.dumps(doc))


def test_descriptor_parsing():
    assert SpectrumDescriptor.parse("S").kind == "sphere"
    assert SpectrumDescriptor.parse("HQ").kind == "hq"
    assert SpectrumDescriptor.parse("ku").connective
    with pytest.raises(DescriptorError):
        SpectrumDescriptor.parse("Ku")
    with pytest.raises(DescriptorError):
        SpectrumDescriptor("tmf")


def test_unsupported_inputs():
    with pytest.raises(UnsupportedGroupError):
        compute_theta(lattice("S3"), "KU")
    with pytest.raises(DescriptorError):
        compute_theta(lattice("C2"), "ku", (-2, 4))


def test_module_splitting():
    rep = module_splitting_report(lattice("C6"))
    assert all(line.periodic_field and not line.connective_field for line in rep.lines)
    rep = module_splitting_report(lattice("C2xC2"))
    top = rep.lines[-1]
    assert top.order == 4 and not top.periodic_field and top.periodic_witness == "zero ring"
    assert rep.to_dict()["classes"][0]["KU"]["graded_field"] is True
    with pytest.raises(UnsupportedGroupError):
        module_splitting_report(lattice("S3"))
