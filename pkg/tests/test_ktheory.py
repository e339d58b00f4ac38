import pytest

from catalog import abelian_specs, lattice
from eqalg.groups import ShapeError, euler_phi
from eqalg.ktheory import (check_window, graded_field_check, graded_V, ku_graded_mackey, periodicity_violations,
                           unit_transfers)
from eqalg.mackey import WindowError, axioms_check
from eqalg.repring import UnsupportedGroupError

ABELIAN_12 = abelian_specs(12)


@pytest.mark.parametrize("spec", ABELIAN_12)
def test_periodic_dims(spec):
    lat = lattice(spec)
    for h in lat.class_reps:
        dims = graded_V(lat, h, (-6, 6)).dims()
        for k, d in dims.items():
            expected = euler_phi(h.order) if h.cyclic and k % 2 == 0 else 0
            assert d == expected, (lat.name(h), k)


@pytest.mark.parametrize("spec", ABELIAN_12)
def test_connective_dims(spec):
    lat = lattice(spec)
    for h in lat.class_reps:
        dims = graded_V(lat, h, (0, 6), connective=True).dims()
        assert set(dims) == set(range(0, 7))
        for k, d in dims.items():
            assert d == (euler_phi(h.order) if h.cyclic and k % 2 == 0 else 0)
    below = graded_V(lat, lat.top, (-4, 4), connective=True).dims()
    assert all(below[k] == 0 for k in range(-4, 0))


@pytest.mark.parametrize("spec", ["C2", "C6", "C2xC2", "C2xC4"])
def test_graded_axioms_and_periodicity(spec):
    lat = lattice(spec)
    gm = ku_graded_mackey(lat, (-4, 4))
    assert periodicity_violations(gm) == []
    for k in gm.defined_degrees():
        assert axioms_check(gm[k]) == []
    assert sorted(gm.shifts) == [-4, -2, 0, 2]


def test_window_validation():
    assert check_window((-6, 6)) == (-6, 6)
    with pytest.raises(ShapeError):
        check_window((-5, 6))
    with pytest.raises(ShapeError):
        check_window((2, 6))
    assert check_window((2, 6), connective=True) == (2, 6)
    with pytest.raises(WindowError):
        ku_graded_mackey(lattice("C2"), (-2, 2))[4]


def test_nonabelian_rejected():
    with pytest.raises(UnsupportedGroupError):
        ku_graded_mackey(lattice("S3"))


def test_field_checks():
    lat = lattice("C2xC4")
    c4 = next(h for h in lat.class_reps if h.order == 4 and h.cyclic)
    assert graded_field_check(graded_V(lat, c4)).is_field
    conn = graded_field_check(graded_V(lat, c4, (0, 6), connective=True))
    assert not conn.is_field and "beta" in conn.witness
    zero = graded_field_check(graded_V(lat, lat.top))
    assert not zero.is_field and zero.witness == "zero ring"


def test_bott_is_invertible_between_even_degrees():
    lat = lattice("C6")
    v = graded_V(lat, lat.top)
    for k, m in v.bott.items():
        assert m.rank() == euler_phi(6) == m.nrows


def test_unit_transfers_are_not_scalars():
    lat = lattice("C2")
    (t,) = unit_transfers(lat)
    assert t.character == "1 + x"
    assert t.augmentation == 2 == t.weyl_scalar
    assert not t.is_scalar
