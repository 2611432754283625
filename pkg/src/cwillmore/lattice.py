"""Flat-torus lattices and their Teichmüller coordinates.

A torus ``C / (Z*gen1 + Z*gen2)`` is recorded by its two generators. Its
conformal class is the modulus ``tau = gen2 / gen1`` reduced by the modular
group into the fundamental domain ``|Re tau| <= 1/2, |tau| >= 1`` and then
reflected so that ``Re tau >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidLatticeError

_REDUCE_MAX_STEPS = 10_000
_BOUNDARY_EPS = 1e-13


@dataclass(frozen=True)
class Lattice:
    gen1: complex
    gen2: complex

    def __post_init__(self) -> None:
        g1, g2 = complex(self.gen1), complex(self.gen2)
        object.__setattr__(self, "gen1", g1)
        object.__setattr__(self, "gen2", g2)
        if g1 == 0 or not math.isfinite(abs(g1)) or not math.isfinite(abs(g2)):
            raise InvalidLatticeError(f"degenerate generators {g1!r}, {g2!r}")
        ratio = g2 / g1
        if abs(ratio.imag) <= 1e-14 * max(1.0, abs(ratio)):
            raise InvalidLatticeError(f"collinear generators {g1!r}, {g2!r}")

    @property
    def matrix(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Columns are the generators as real 2-vectors."""
        return (
            (self.gen1.real, self.gen2.real),
            (self.gen1.imag, self.gen2.imag),
        )

    @property
    def oriented_area(self) -> float:
        return self.gen1.real * self.gen2.imag - self.gen1.imag * self.gen2.real

    @property
    def area(self) -> float:
        return abs(self.oriented_area)

    @property
    def is_positively_oriented(self) -> bool:
        return self.oriented_area > 0


@dataclass(frozen=True)
class TeichmullerPoint:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.b > 0 and math.isfinite(self.b)):
            raise ValueError(f"Teichmüller coordinate b must be positive, got {self.b}")
        if not math.isfinite(self.a):
            raise ValueError(f"Teichmüller coordinate a must be finite, got {self.a}")

    @property
    def tau(self) -> complex:
        return complex(self.a, self.b)


def reduce_modulus(tau: complex) -> complex:
    """Move ``tau`` (upper half plane) into the standard fundamental domain.

    Ties on the boundary prefer the smaller ``|Re tau|``; the final
    orientation reflection is left to the caller.
    """
    if not tau.imag > 0:
        raise InvalidLatticeError(f"modulus {tau!r} is not in the upper half plane")
    for _ in range(_REDUCE_MAX_STEPS):
        tau = complex(tau.real - math.floor(tau.real + 0.5), tau.imag)
        if abs(tau) < 1.0 - _BOUNDARY_EPS:
            tau = -1.0 / tau
            continue
        break
    else:  # pragma: no cover - reduction always terminates for finite input
        raise InvalidLatticeError(f"modular reduction did not terminate for {tau!r}")
    # |tau| = 1 and |a| = 1/2 are identified with their mirror images; the
    # reflection below handles both, so only snap rounding noise here.
    if abs(abs(tau.real) - 0.5) < _BOUNDARY_EPS:
        tau = complex(math.copysign(0.5, tau.real), tau.imag)
    return tau


def modulus_from_lattice(lat: Lattice) -> TeichmullerPoint:
    tau = lat.gen2 / lat.gen1
    if tau.imag < 0:
        tau = tau.conjugate()
    tau = reduce_modulus(tau)
    return TeichmullerPoint(abs(tau.real), tau.imag)


def lattice_for_class(p: TeichmullerPoint, scale: float) -> Lattice:
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    return Lattice(complex(scale, 0.0), scale * p.tau)
