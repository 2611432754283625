import numpy as np
import pytest

from cwillmore import (
    DegenerateImmersionError,
    FourierMode,
    GridImmersion,
    UnsupportedImmersionError,
    equivariant_12_torus,
    exp_normal,
    fundamental_forms,
    homogeneous_torus,
    mode_normal_field,
    willmore_energy,
)
from cwillmore.immersion import constant_normal_field, dot, radii, sample_immersion
from cwillmore.lattice import Lattice

PHI1 = FourierMode(1, 2, 1.0, 1.0, 0.0, 0.0)


def test_radii():
    r, s = radii(1.2)
    assert r == pytest.approx(0.640184, abs=1e-6) and s == pytest.approx(0.768221, abs=1e-6)
    assert radii(1.0) == pytest.approx((2**-0.5, 2**-0.5))
    with pytest.raises(ValueError):
        homogeneous_torus(0.0)
    with pytest.raises(ValueError):
        equivariant_12_torus(-1.0)


@pytest.mark.parametrize("b", [0.8, 1.0, 1.05, 1.25])
@pytest.mark.parametrize("make", [homogeneous_torus, equivariant_12_torus])
def test_sphere_periodicity_normal(make, b):
    f = make(b)
    geo = fundamental_forms(f, 32)
    jet = f.jet(32)
    assert np.max(np.abs(dot(jet.f, jet.f) - 1)) < 1e-12
    n = geo.unit_normal
    assert np.max(np.abs(dot(n, jet.f))) < 1e-10
    assert np.max(np.abs(dot(n, jet.fx))) < 1e-10 and np.max(np.abs(dot(n, jet.fy))) < 1e-10
    assert np.max(np.abs(dot(n, n) - 1)) < 1e-10
    assert np.all(geo.E * geo.G - geo.F**2 > 0)
    # double periodicity: evaluating at x + gen1, x + gen2 returns the same point
    x, y = 0.3, -0.7
    p = f.evaluate(x, y)
    for g in (f.lattice.gen1, f.lattice.gen2):
        assert np.allclose(f.evaluate(x + g.real, y + g.imag), p, atol=1e-12)


@pytest.mark.parametrize("b", [0.8, 0.95, 1.0, 1.1, 1.25])
def test_homogeneous_mean_curvature(b):
    r, s = radii(b)
    geo = fundamental_forms(homogeneous_torus(b), 32)
    assert np.var(geo.H) < 1e-10
    assert np.max(np.abs(np.abs(geo.H) - abs(s * s - r * r) / (2 * r * s))) < 1e-9
    if b == 1.0:
        assert np.max(np.abs(geo.H)) < 1e-10
        assert np.allclose(geo.E, 1.0) and np.allclose(geo.G, 1.0) and np.allclose(geo.F, 0.0)


def test_mean_curvature_sympy_oracle():
    sp = pytest.importorskip("sympy")
    x, y, b = sp.symbols("x y b", positive=True)
    r = 1 / sp.sqrt(1 + b**2)
    s = b * r
    f = sp.Matrix([r * sp.cos(x / r), r * sp.sin(x / r), s * sp.cos(y / s), s * sp.sin(y / s)])
    n = sp.Matrix([-s * sp.cos(x / r), -s * sp.sin(x / r), r * sp.cos(y / s), r * sp.sin(y / s)])
    fx, fy = f.diff(x), f.diff(y)
    E, F, G = fx.dot(fx), fx.dot(fy), fy.dot(fy)
    L, M, N = f.diff(x, 2).dot(n), f.diff(x, y).dot(n), f.diff(y, 2).dot(n)
    H = sp.simplify((E * N - 2 * F * M + G * L) / (2 * (E * G - F**2)))
    for bv in (0.9, 1.2):
        geo = fundamental_forms(homogeneous_torus(bv), 16)
        assert np.allclose(geo.H, float(H.subs(b, bv)), atol=1e-12)


def test_energy_examples():
    assert abs(willmore_energy(homogeneous_torus(1.0), 128) - 2 * np.pi**2) < 1e-8
    assert willmore_energy(homogeneous_torus(1.2), 128) == pytest.approx(20.0682, abs=1e-4)
    assert abs(willmore_energy(equivariant_12_torus(1.2), 128) - willmore_energy(homogeneous_torus(1.2), 128)) < 1e-8


@pytest.mark.parametrize("b", [0.8, 0.9, 1.0, 1.05, 1.2, 1.25])
def test_homogeneous_energy_formula(b):
    rs = b / (1 + b * b)
    assert abs(willmore_energy(homogeneous_torus(b), 64) - np.pi**2 / rs) < 1e-8
    if b in (1.0, 1.05, 1.2):
        assert abs(willmore_energy(equivariant_12_torus(b), 64) - np.pi**2 / rs) < 1e-8


def test_quadrature_convergence():
    errs = [abs(willmore_energy(homogeneous_torus(1.0), n) - 2 * np.pi**2) for n in (32, 64, 128)]
    assert errs[-1] < 1e-8
    assert errs[0] >= errs[1] - 1e-14 and errs[1] >= errs[2] - 1e-14


def test_equivariant_image_is_clifford():
    f = equivariant_12_torus(1.0)
    pts = f.jet(64).f
    r = 2**-0.5
    assert np.max(np.abs(np.hypot(pts[..., 0], pts[..., 1]) - r)) < 1e-10
    assert np.max(np.abs(np.hypot(pts[..., 2], pts[..., 3]) - r)) < 1e-10


def test_equivariant_chart_is_conformal():
    b = 1.1
    r, s = radii(b)
    geo = fundamental_forms(equivariant_12_torus(b), 32)
    assert np.allclose(geo.E, r * r + 4 * s * s) and np.allclose(geo.G, geo.E) and np.allclose(geo.F, 0)


def test_exp_normal_zero_and_sphere(clifford):
    v = mode_normal_field(PHI1, clifford, 64)
    assert exp_normal(clifford, v, 0.0) is clifford
    g = exp_normal(clifford, v, 0.05)
    p = g.jet(64).f
    assert np.max(np.abs(dot(p, p) - 1)) < 1e-12


def test_exp_normal_constant_field_gives_product_torus(clifford):
    g = exp_normal(clifford, constant_normal_field(clifford, 1.0, 32), 0.2)
    p = g.jet(32).f
    z1 = np.hypot(p[..., 0], p[..., 1])
    z2 = np.hypot(p[..., 2], p[..., 3])
    assert np.ptp(z1) < 1e-12 and np.ptp(z2) < 1e-12
    geo = fundamental_forms(g, 32)
    assert np.var(geo.H) < 1e-10


def test_exp_normal_first_order(clifford):
    v = mode_normal_field(PHI1, clifford, 32)
    jet = clifford.jet(32)
    target = v.phi[..., None] * jet.n
    central, onesided = [], []
    for t in (1e-2, 1e-3):
        plus = exp_normal(clifford, v, t).jet(32).f
        minus = exp_normal(clifford, v, -t).jet(32).f
        central.append(np.max(np.abs((plus - minus) / (2 * t) - target)))
        onesided.append(np.max(np.abs((plus - jet.f) / t - target)))
    assert central[1] < central[0] / 50  # O(t^2)
    assert onesided[1] < onesided[0] / 5  # O(t)


def test_mode_normal_field_examples():
    f1 = homogeneous_torus(1.0)
    x, y = f1.grid(32).xy
    v = mode_normal_field(PHI1, f1, 32)
    assert np.allclose(v.phi, np.sin(np.sqrt(2) * (x + 2 * y)), atol=1e-13)
    b = 1.1
    r, s = radii(b)
    fb = homogeneous_torus(b)
    x, y = fb.grid(32).xy
    assert np.allclose(mode_normal_field(PHI1, fb, 32).phi, np.sin(x / r + 2 * y / s), atol=1e-13)
    assert not np.any(mode_normal_field(FourierMode(1, 2), f1, 16).phi)


def test_mode_field_on_grid_surface_unsupported(clifford):
    g = sample_immersion(clifford, 32)
    with pytest.raises(UnsupportedImmersionError):
        mode_normal_field(PHI1, g, 32)


def test_grid_immersion_matches_analytic(clifford):
    g = sample_immersion(homogeneous_torus(1.1), 32)
    assert willmore_energy(g, 32) == pytest.approx(willmore_energy(homogeneous_torus(1.1), 32), abs=1e-9)


def test_duplicated_columns_degenerate():
    f = homogeneous_torus(1.0)
    pts = f.jet(32).f.copy()
    pts[:, :, :] = pts[:, :1, :]  # constant along the second direction
    with pytest.raises(DegenerateImmersionError):
        fundamental_forms(GridImmersion(pts, f.lattice), 32)


def test_grid_size_validated(clifford):
    with pytest.raises(ValueError):
        fundamental_forms(clifford, 8)


def test_csv_and_binary_round_trip(tmp_path, clifford):
    g = sample_immersion(exp_normal(clifford, mode_normal_field(PHI1, clifford, 16), 0.05), 16)
    back = GridImmersion.from_csv(g.to_csv())
    assert back.lattice == g.lattice and np.array_equal(back.samples, g.samples)
    path = tmp_path / "surface.npz"
    g.save_binary(path)
    back = GridImmersion.load_binary(path)
    assert back.lattice == g.lattice and np.array_equal(back.samples, g.samples)
    with pytest.raises(ValueError):
        GridImmersion.from_csv("x,y\n")


def test_grid_immersion_shape_checked():
    with pytest.raises(ValueError):
        GridImmersion(np.zeros((4, 5, 4)), Lattice(1, 1j))
