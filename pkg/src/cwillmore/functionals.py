"""Batched evaluation of W, Pi^1, Pi^2 on normal perturbations of a base immersion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import CG_TOL, MetricGrid, signed_modulus
from .grid import PeriodicGrid
from .immersion import TorusImmersion, geometry_from_jet, perturb_jet, willmore_density


@dataclass(frozen=True)
class PenalizedForm:
    """``W_{alpha,beta} = W - alpha Pi^1 - beta Pi^2``."""

    alpha: float
    beta: float = 0.0

    def __call__(self, W, pi1, pi2):
        return W - self.alpha * pi1 - self.beta * pi2


@dataclass
class FunctionalValues:
    W: np.ndarray
    pi1: np.ndarray
    pi2: np.ndarray

    def get(self, functional) -> np.ndarray:
        if isinstance(functional, PenalizedForm):
            return functional(self.W, self.pi1, self.pi2)
        key = {"W": "W", "Pi1": "pi1", "Pi2": "pi2"}[functional]
        return getattr(self, key)


def evaluate_perturbations(
    base: TorusImmersion, phi: np.ndarray, n: int | None = None, tol: float = CG_TOL
) -> FunctionalValues:
    """W and the signed Pi-chart of ``exp_base(phi n)`` for a batch of scalars ``phi``.

    ``phi`` has shape ``(..., N, N)`` on the lattice grid of ``base``.
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[-1] if n is None else n
    grid = PeriodicGrid(base.lattice, phi.shape[-1])
    if n != grid.n:
        phi = grid.resample(phi, n)
        grid = PeriodicGrid(base.lattice, n)
    jet = base.jet(n)
    if jet.nx is None:
        raise ValueError("base immersion must provide normal derivatives")
    pj = perturb_jet(jet, phi, *_batched_derivatives(grid, phi))
    geo = geometry_from_jet(pj)
    W = grid.integrate(willmore_density(geo))
    tau = signed_modulus(MetricGrid(geo["E"], geo["F"], geo["G"], base.lattice), tol=tol)
    return FunctionalValues(np.asarray(W), np.asarray(tau.real), np.asarray(tau.imag))


def _batched_derivatives(grid: PeriodicGrid, phi: np.ndarray):
    return grid.derivatives(phi)
