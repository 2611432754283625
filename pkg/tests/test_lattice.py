import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwillmore.errors import InvalidLatticeError
from cwillmore.lattice import (
    Lattice,
    TeichmullerPoint,
    lattice_for_class,
    modulus_from_lattice,
    reduce_modulus,
)

S2PI = math.sqrt(2) * math.pi


def close(p, a, b, tol=1e-12):
    return abs(p.a - a) <= tol and abs(p.b - b) <= tol


def test_square_lattice_maps_to_i():
    assert close(modulus_from_lattice(Lattice(S2PI, S2PI * 1j)), 0, 1)


def test_shear_is_removed():
    assert close(modulus_from_lattice(Lattice(1, 3 + 1j)), 0, 1)


def test_reduced_generators_unchanged():
    s = 2 * math.pi * 0.64
    assert close(modulus_from_lattice(Lattice(s, s * (0.03 + 1.05j))), 0.03, 1.05)


def test_lattice_for_class_examples():
    assert lattice_for_class(TeichmullerPoint(0, 1), S2PI) == Lattice(S2PI, S2PI * 1j)
    lat = lattice_for_class(TeichmullerPoint(0.1, 1.05), 2 * math.pi)
    assert lat.gen1 == 2 * math.pi and abs(lat.gen2 - 2 * math.pi * (0.1 + 1.05j)) < 1e-15
    assert lattice_for_class(TeichmullerPoint(0, 1.2), 1) == Lattice(1, 1.2j)


def test_collinear_generators_rejected():
    with pytest.raises(InvalidLatticeError):
        Lattice(1, 2)
    with pytest.raises(InvalidLatticeError):
        Lattice(0, 1j)


def test_nonpositive_b_rejected():
    with pytest.raises(ValueError):
        TeichmullerPoint(0.1, 0.0)
    with pytest.raises(ValueError):
        lattice_for_class(TeichmullerPoint(0, 1), -1.0)


def test_orientation_reflection():
    # a mirror-image lattice has the same class after a -> |a|
    assert close(modulus_from_lattice(Lattice(1, -0.2 + 1.1j)), 0.2, 1.1)
    assert close(modulus_from_lattice(Lattice(1, 0.2 - 1.1j)), 0.2, 1.1)


def test_lower_half_plane_rejected_by_reduction():
    with pytest.raises(InvalidLatticeError):
        reduce_modulus(0.3 - 1j)


def test_boundary_ties_are_deterministic():
    p = modulus_from_lattice(Lattice(1, 0.5 + 1j))
    q = modulus_from_lattice(Lattice(1, -0.5 + 1j))
    assert p == q and p.a == 0.5
    # |tau| = 1 arc: tau and -1/tau are identified
    t = complex(math.cos(1.3), math.sin(1.3))
    assert close(modulus_from_lattice(Lattice(1, t)), modulus_from_lattice(Lattice(1, -1 / t)).a, t.imag)


classes = st.tuples(st.floats(0, 0.3), st.floats(0.8, 1.25))


@settings(max_examples=200, deadline=None)
@given(classes, st.floats(1e-3, 1e3))
def test_round_trip(ab, scale):
    a, b = ab
    p = modulus_from_lattice(lattice_for_class(TeichmullerPoint(a, b), scale))
    if a * a + b * b >= 1:
        assert close(p, a, b)
    else:
        # below the unit circle the class is represented by -1/tau
        w = -1 / complex(a, b)
        assert close(p, abs(w.real), w.imag)


@settings(max_examples=200, deadline=None)
@given(classes, st.integers(-20, 20), st.floats(0.1, 10), st.floats(-math.pi, math.pi))
def test_modular_and_scale_invariance(ab, n, mag, angle):
    a, b = ab
    lat = lattice_for_class(TeichmullerPoint(a, b), 1.0)
    g1, g2 = lat.gen1, lat.gen2
    lam = mag * complex(math.cos(angle), math.sin(angle))
    for other in (
        Lattice(g1, g2 + n * g1),
        Lattice(g2, g1),
        Lattice(-g1, g2),
        Lattice(lam * g1, lam * g2),
    ):
        q = modulus_from_lattice(lat)
        assert close(modulus_from_lattice(other), q.a, q.b, 1e-11)


def test_area_and_orientation():
    lat = Lattice(2, 1 + 3j)
    assert lat.area == 6 and lat.is_positively_oriented
    assert not Lattice(2, 1 - 3j).is_positively_oriented
