import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwillmore import (
    FourierMode,
    MetricGrid,
    NumericalFailure,
    d2Pi1_clifford,
    equivariant_12_torus,
    exp_normal,
    homogeneous_torus,
    mode_normal_field,
    pi_coordinates,
    project_conformal_class,
)
from cwillmore.conformal import dPi_directional, harmonic_gram_matrix
from cwillmore.functionals import evaluate_perturbations
from cwillmore.immersion import constant_normal_field
from cwillmore.lattice import Lattice, TeichmullerPoint, lattice_for_class, modulus_from_lattice

PHI1 = FourierMode(1, 2, 1.0, 1.0, 0.0, 0.0)


def test_flat_example():
    p = project_conformal_class(MetricGrid.flat(Lattice(2 * np.pi, 2 * np.pi * (0.1 + 1.05j)), 32))
    assert abs(p.a - 0.1) < 1e-10 and abs(p.b - 1.05) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.6, 2.0), st.floats(0.2, 5.0), st.floats(-3, 3))
def test_flat_exactness(a, b, scale, angle):
    rot = scale * complex(np.cos(angle), np.sin(angle))
    lat = Lattice(rot, rot * complex(a, b))
    p = project_conformal_class(MetricGrid.flat(lat, 16))
    q = modulus_from_lattice(lat)
    assert abs(p.a - q.a) < 1e-10 and abs(p.b - q.b) < 1e-10


@pytest.mark.parametrize("b", [0.9, 1.0, 1.1])
def test_homogeneous_is_rectangular(b):
    a_, b_ = pi_coordinates(homogeneous_torus(b), 64)
    assert abs(a_) < 1e-6 and abs(b_ - b) < 1e-6
    p = project_conformal_class(MetricGrid.of(homogeneous_torus(b), 32))
    assert p.a < 1e-6 and abs(p.b - max(b, 1 / b)) < 1e-6


def test_equivariant_class():
    a_, b_ = pi_coordinates(equivariant_12_torus(1.05), 32)
    assert abs(a_) < 1e-9 and abs(b_ - 1.05) < 1e-9


def test_conformal_and_translation_invariance():
    f = exp_normal(homogeneous_torus(1.0), mode_normal_field(PHI1, homogeneous_torus(1.0), 32), 0.1)
    m = MetricGrid.of(f, 32)
    ref = project_conformal_class(m)
    u, v = m.grid.uv
    factor = np.exp(0.3 * np.sin(2 * np.pi * u) * np.cos(2 * np.pi * v) + 0.1 * np.cos(2 * np.pi * v))
    p = project_conformal_class(m.scaled(factor))
    assert abs(p.a - ref.a) < 1e-8 and abs(p.b - ref.b) < 1e-8
    shifted = MetricGrid(*(np.roll(np.roll(c, 5, 0), 3, 1) for c in (m.E, m.F, m.G)), m.lattice)
    p = project_conformal_class(shifted)
    assert abs(p.a - ref.a) < 1e-8 and abs(p.b - ref.b) < 1e-8


def test_gram_matrix_of_flat_lattice():
    tau = 0.2 + 1.3j
    M = harmonic_gram_matrix(MetricGrid.flat(Lattice(1, tau), 16))
    expect = np.array([[abs(tau) ** 2, -tau.real], [-tau.real, 1]]) / tau.imag
    assert np.allclose(M, expect, atol=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0)


def test_solver_failure_carries_residual():
    f = exp_normal(homogeneous_torus(1.0), mode_normal_field(PHI1, homogeneous_torus(1.0), 32), 0.2)
    with pytest.raises(NumericalFailure) as err:
        harmonic_gram_matrix(MetricGrid.of(f, 32), tol=1e-14, maxiter=1)
    assert err.value.residual is not None and err.value.residual > 0


def test_metric_csv_round_trip():
    m = MetricGrid.of(homogeneous_torus(1.1), 16)
    back = MetricGrid.from_csv(m.to_csv())
    assert back.lattice == m.lattice
    assert np.allclose(back.E, m.E, rtol=1e-15) and np.allclose(back.G, m.G, rtol=1e-15)


def test_quadratic_response():
    f = homogeneous_torus(1.0)
    phi = mode_normal_field(PHI1, f, 64).phi
    ts = np.linspace(0.01, 0.08, 8)
    pi1 = evaluate_perturbations(f, ts[:, None, None] * phi[None]).pi1
    c = np.dot(pi1, ts**2) / np.dot(ts**2, ts**2)
    assert np.max(np.abs(pi1 - c * ts**2) / np.abs(pi1)) < 0.02
    assert c == pytest.approx(0.5 * d2Pi1_clifford(PHI1), rel=0.02)
    # spec example at t = 0.05: Pi^1 ~ 1.2 t^2 <phi,phi>/pi^2 with <phi,phi> = pi^2
    t = 0.05
    p1, _ = pi_coordinates(exp_normal(f, mode_normal_field(PHI1, f, 64), t), 64)
    assert p1 == pytest.approx(1.2 * t * t, rel=0.02)


def test_directional_derivative_examples():
    f = homogeneous_torus(1.1)
    d1, _ = dPi_directional(f, mode_normal_field(FourierMode(2, 3, 0.4, -1, 0.3, 0.2), f, 32))
    assert abs(d1) < 1e-6
    c = homogeneous_torus(1.0)
    d1, d2 = dPi_directional(c, constant_normal_field(c, 1.0, 32))
    assert abs(d1) < 1e-6
    assert d2 == pytest.approx(2.0, rel=1e-6)  # b(c) = (cos c + sin c)/(cos c - sin c)
    g = exp_normal(c, mode_normal_field(PHI1, c, 32), 0.1)
    d1, _ = dPi_directional(g, mode_normal_field(PHI1, c, 32))
    assert d1 > 0


def test_signed_chart_is_smooth_through_zero():
    f = homogeneous_torus(1.0)
    m = FourierMode(1, 2, 1.0, -1.0, 0.0, 0.0)  # "-" pattern: Pi^1 decreases
    phi = mode_normal_field(m, f, 32).phi
    pi1 = evaluate_perturbations(f, np.array([0.05, -0.05])[:, None, None] * phi).pi1
    assert np.all(pi1 < 0)


def test_lattice_for_class_flat_round_trip():
    lat = lattice_for_class(TeichmullerPoint(0.2, 1.1), 3.0)
    p = project_conformal_class(MetricGrid.flat(lat, 16))
    assert abs(p.a - 0.2) < 1e-10 and abs(p.b - 1.1) < 1e-10
