import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwillmore.modes import FourierMode, basis_mean_squares, combine_phases, evaluate_mode, mode_norm_sq


def test_constant_mode_rejected():
    with pytest.raises(ValueError):
        FourierMode(0, 0, 1.0)
    with pytest.raises(ValueError):
        FourierMode(-1, 2)


def test_patterns():
    assert FourierMode.from_pattern(1, 2, "+").coeffs.tolist() == [1, 1, 0, 0]
    assert FourierMode.from_pattern(1, 2, "-").coeffs.tolist() == [1, -1, 0, 0]
    assert FourierMode.from_pattern(1, 2, "+", "cos").coeffs.tolist() == [0, 0, 1, -1]
    t1, t2 = np.meshgrid(np.linspace(0, 6, 13), np.linspace(0, 6, 11), indexing="ij")
    for p, s in (("+", 1), ("-", -1)):
        for phase, fn in (("sin", np.sin), ("cos", np.cos)):
            m = FourierMode.from_pattern(2, 3, p, phase)
            assert np.allclose(evaluate_mode(m, t1, t2), fn(2 * t1 + s * 3 * t2), atol=1e-14)


def test_boundary_norms():
    m = FourierMode(2, 0, 1.0, 0.0, 1.0, 0.0)
    # sin(2 t1) and cos(2 t1) each have mean square 1/2
    assert mode_norm_sq(m, 4.0) == pytest.approx(4.0)
    assert FourierMode(0, 2, 1.0, 0, 0, 0).is_zero()  # sin(0)cos(2 t2) = 0
    assert mode_norm_sq(FourierMode(1, 2, 1, 1, 0, 0), 2 * np.pi**2) == pytest.approx(np.pi**2)


def test_basis_mean_squares_axis():
    # (k, 0): sc = sin(k t1), cc = cos(k t1); cs, ss vanish
    assert basis_mean_squares(3, 0).tolist() == [0.5, 0.0, 0.5, 0.0]
    assert basis_mean_squares(0, 3).tolist() == [0.0, 0.5, 0.5, 0.0]
    assert basis_mean_squares(2, 2).tolist() == [0.25] * 4


def test_norm_matches_quadrature():
    m = FourierMode(2, 3, 0.3, -1.2, 0.7, 0.4)
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    area = 5.0
    q = np.mean(evaluate_mode(m, t1, t2) ** 2) * area
    assert mode_norm_sq(m, area) == pytest.approx(q, rel=1e-12)


def test_combine_phases_examples():
    assert combine_phases(1, 0) == (1.0, 0.0)
    d1, d2 = combine_phases(0, 1)
    assert d1 == 1.0 and d2 == pytest.approx(np.pi / 2)
    d1, d2 = combine_phases(3, 4)
    assert d1 == 5.0 and d2 == np.arctan2(4, 3)
    with pytest.raises(ValueError):
        combine_phases(0, 0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_combine_phases_identity(c1, c2):
    if np.hypot(c1, c2) < 1e-6:
        return
    d1, d2 = combine_phases(c1, c2)
    th = np.linspace(-7, 7, 301)
    assert np.max(np.abs(c1 * np.sin(th) + c2 * np.cos(th) - d1 * np.sin(th + d2))) <= 1e-12 * max(1, d1)
