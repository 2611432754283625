"""Trigonometric modes ``A_{k,l}`` on the product torus.

A mode is a combination of the four products

    sin(k t1) cos(l t2),  cos(k t1) sin(l t2),  cos(k t1) cos(l t2),  sin(k t1) sin(l t2)

where ``t1, t2`` are the two circle angles of the product torus. On the
Clifford chart ``t1 = sqrt(2) x`` and ``t2 = sqrt(2) y``; on the chart of the
homogeneous torus ``f^b`` they are ``x / r`` and ``y / s``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Pattern labels used by the stability scans. "+" is sin(k t1 + l t2), the
# equality case of the Pi^1 bound; "-" is sin(k t1 - l t2).
PATTERNS = ("+", "-")


@dataclass(frozen=True)
class FourierMode:
    k: int
    l: int
    c_sc: float = 0.0
    c_cs: float = 0.0
    c_cc: float = 0.0
    c_ss: float = 0.0

    def __post_init__(self) -> None:
        if self.k < 0 or self.l < 0:
            raise ValueError("mode indices must be nonnegative")
        if (self.k, self.l) == (0, 0):
            raise ValueError("(0, 0) is the constant mode, not an element of A_{k,l}")

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c_sc, self.c_cs, self.c_cc, self.c_ss], dtype=float)

    @property
    def n(self) -> int:
        return self.k * self.k + self.l * self.l

    def active_coeffs(self) -> np.ndarray:
        """Coefficients with those of identically vanishing basis functions zeroed."""
        return self.coeffs * basis_mean_squares(self.k, self.l).astype(bool)

    def is_zero(self) -> bool:
        return not np.any(self.active_coeffs())

    def scaled(self, factor: float) -> "FourierMode":
        c = factor * self.coeffs
        return FourierMode(self.k, self.l, *c)

    @classmethod
    def from_pattern(cls, k: int, l: int, pattern: str, phase: str = "sin") -> "FourierMode":
        """Unit mode ``sin/cos(k t1 +- l t2)`` written in the product basis."""
        if pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {pattern!r}")
        sign = 1.0 if pattern == "+" else -1.0
        if phase == "sin":
            # sin(A + sB) = sinA cosB + s cosA sinB
            return cls(k, l, 1.0, sign, 0.0, 0.0)
        if phase == "cos":
            # cos(A + sB) = cosA cosB - s sinA sinB
            return cls(k, l, 0.0, 0.0, 1.0, -sign)
        raise ValueError(f"unknown phase {phase!r}")


def basis_mean_squares(k: int, l: int) -> np.ndarray:
    """Mean over the torus of each squared basis function (sc, cs, cc, ss)."""
    mx = (0.5 if k else 0.0, 0.5 if k else 1.0)  # sin(k.)^2, cos(k.)^2
    my = (0.5 if l else 0.0, 0.5 if l else 1.0)
    return np.array([mx[0] * my[1], mx[1] * my[0], mx[1] * my[1], mx[0] * my[0]])


def mode_norm_sq(m: FourierMode, area: float) -> float:
    """L2 norm squared of the mode on a torus of the given area."""
    return float(area * np.dot(m.coeffs**2, basis_mean_squares(m.k, m.l)))


def evaluate_mode(m: FourierMode, t1, t2):
    """Evaluate the mode at circle angles ``t1, t2`` (arrays broadcast)."""
    a, b = m.k * np.asarray(t1), m.l * np.asarray(t2)
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
    return m.c_sc * sa * cb + m.c_cs * ca * sb + m.c_cc * ca * cb + m.c_ss * sa * sb


def combine_phases(c1: float, c2: float) -> tuple[float, float]:
    """Write ``c1 sin(t) + c2 cos(t)`` as ``d1 sin(t + d2)`` with ``d1 > 0``."""
    d1 = float(np.hypot(c1, c2))
    if d1 == 0.0:
        raise ValueError("zero amplitude: (c1, c2) = (0, 0) has no phase")
    return d1, float(np.arctan2(c2, c1))
