"""Conformal class of a metric torus via harmonic 1-forms.

For the lattice-unit coordinates ``(u, v)`` (period 1 in each) let ``theta_i``
be the harmonic 1-form cohomologous to ``du`` resp. ``dv``. Their Dirichlet
Gram matrix ``M_ij = int <theta_i, theta_j> dA`` is conformally invariant and
equals ``(1/b) [[|tau|^2, -a], [-a, 1]]`` for the class ``tau = a + ib``.
Each ``theta_i = e_i + dw_i`` is found from the periodic problem
``div(Q (e_i + grad w_i)) = 0`` with ``Q = sqrt(det g) g^{-1}``, solved by
conjugate gradients preconditioned with the inverse of the averaged,
constant-coefficient operator (diagonal in Fourier space).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure
from .grid import PeriodicGrid
from .immersion import (
    NormalField,
    TorusImmersion,
    exp_normal,
    geometry_from_jet,
)
from .lattice import Lattice, TeichmullerPoint, reduce_modulus

CG_TOL = 1e-12


@dataclass
class MetricGrid:
    """Samples of ``E, F, G`` (domain chart) on the uniform grid of ``lattice``.

    Leading batch axes are allowed; the last two axes are the grid.
    """

    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    lattice: Lattice

    @property
    def n(self) -> int:
        return self.E.shape[-1]

    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.lattice, self.n)

    @classmethod
    def flat(cls, lattice: Lattice, n: int = 32) -> "MetricGrid":
        one = np.ones((n, n))
        return cls(one, np.zeros((n, n)), one.copy(), lattice)

    @classmethod
    def of(cls, f: TorusImmersion, n: int) -> "MetricGrid":
        jet = f.jet(n)
        geo = geometry_from_jet(jet)
        return cls(geo["E"], geo["F"], geo["G"], f.lattice)

    def scaled(self, factor: np.ndarray) -> "MetricGrid":
        return MetricGrid(factor * self.E, factor * self.F, factor * self.G, self.lattice)

    def to_csv(self) -> str:
        buf = io.StringIO()
        g1, g2 = self.lattice.gen1, self.lattice.gen2
        buf.write(f"# lattice gen1={g1.real!r},{g1.imag!r} gen2={g2.real!r},{g2.imag!r} n={self.n}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "E", "F", "G"])
        x, y = self.grid.xy
        for i in range(self.n):
            for j in range(self.n):
                w.writerow([f"{v:.17g}" for v in (x[i, j], y[i, j], self.E[i, j], self.F[i, j], self.G[i, j])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MetricGrid":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# lattice"):
            raise ValueError("missing '# lattice' header line")
        fields = dict(item.split("=") for item in lines[0][len("# lattice") :].split())
        g1 = complex(*map(float, fields["gen1"].split(",")))
        g2 = complex(*map(float, fields["gen2"].split(",")))
        n = int(fields["n"])
        rows = list(csv.DictReader(lines[1:]))
        if len(rows) != n * n:
            raise ValueError(f"expected {n * n} rows, got {len(rows)}")
        arr = np.array([[float(r["E"]), float(r["F"]), float(r["G"])] for r in rows])
        E, F, G = (arr[:, k].reshape(n, n) for k in range(3))
        return cls(E, F, G, Lattice(g1, g2))


def _unit_coefficients(m: MetricGrid):
    """The tensor ``Q = sqrt(det g) g^{-1}`` in lattice-unit coordinates."""
    W = m.grid.W
    # g_uv = W^T g W
    a, b, c, d = W[0, 0], W[0, 1], W[1, 0], W[1, 1]
    Eu = a * a * m.E + 2 * a * c * m.F + c * c * m.G
    Fu = a * b * m.E + (a * d + b * c) * m.F + c * d * m.G
    Gu = b * b * m.E + 2 * b * d * m.F + d * d * m.G
    det = Eu * Gu - Fu * Fu
    if np.any(~(det > 0)):
        raise NumericalFailure("metric is not positive definite", residual=float("nan"))
    root = np.sqrt(det)
    return Gu / root, -Fu / root, Eu / root


def _cg(apply, precond, rhs, tol, maxiter):
    """Batched preconditioned conjugate gradients over the last two axes."""

    def inner(p, q):
        return np.sum(p * q, axis=(-2, -1), keepdims=True)

    x = np.zeros_like(rhs)
    bnorm = np.sqrt(inner(rhs, rhs))
    scale = np.where(bnorm > 0, bnorm, 1.0)
    r = rhs.copy()
    z = precond(r)
    p = z.copy()
    rz = inner(r, z)
    res = bnorm / scale
    for it in range(maxiter):
        if np.all(res <= tol):
            return x, float(res.max()), it
        Ap = apply(p)
        pAp = inner(p, Ap)
        alpha = np.where(pAp > 0, rz / np.where(pAp > 0, pAp, 1.0), 0.0)
        x = x + alpha * p
        r = r - alpha * Ap
        res = np.sqrt(inner(r, r)) / scale
        z = precond(r)
        rz_new = inner(r, z)
        beta = np.where(rz > 0, rz_new / np.where(rz > 0, rz, 1.0), 0.0)
        p = z + beta * p
        rz = rz_new
    if np.all(res <= tol):
        return x, float(res.max()), maxiter
    raise NumericalFailure(
        f"harmonic-form solve did not converge in {maxiter} iterations "
        f"(relative residual {float(res.max()):.3e})",
        residual=float(res.max()),
    )


def harmonic_gram_matrix(m: MetricGrid, tol: float = CG_TOL, maxiter: int | None = None) -> np.ndarray:
    """Dirichlet Gram matrix of the harmonic forms dual to the lattice basis."""
    grid = m.grid
    n = grid.n
    if maxiter is None:
        maxiter = 10 * n
    q11, q12, q22 = _unit_coefficients(m)
    _, k1 = grid._wavenumbers
    mean = lambda q: q.mean(axis=(-2, -1), keepdims=True)  # noqa: E731
    symbol = (
        mean(q11) * (k1**2)[:, None]
        + 2 * mean(q12) * (k1[:, None] * k1[None, :])
        + mean(q22) * (k1**2)[None, :]
    )
    inv_symbol = np.where(np.abs(symbol) > 1e-12, 1.0 / np.where(symbol == 0, 1.0, symbol), 0.0)

    def apply(w):
        wu, wv = grid.grad_uv(w)
        return -grid.div_uv(q11 * wu + q12 * wv, q12 * wu + q22 * wv)

    def precond(r):
        return np.fft.ifft2(inv_symbol * np.fft.fft2(r)).real

    forms = []
    for e in ((1.0, 0.0), (0.0, 1.0)):
        rhs = grid.div_uv(q11 * e[0] + q12 * e[1], q12 * e[0] + q22 * e[1])
        w, _, _ = _cg(apply, precond, rhs, tol, maxiter)
        wu, wv = grid.grad_uv(w)
        forms.append((e[0] + wu, e[1] + wv))
    M = np.empty(q11.shape[:-2] + (2, 2))
    for i in range(2):
        for j in range(i, 2):
            (ai, bi), (aj, bj) = forms[i], forms[j]
            val = (ai * (q11 * aj + q12 * bj) + bi * (q12 * aj + q22 * bj)).mean(axis=(-2, -1))
            M[..., i, j] = val
            M[..., j, i] = val
    return M


def signed_modulus(m: MetricGrid, tol: float = CG_TOL, maxiter: int | None = None) -> np.ndarray:
    """Unreduced modulus ``tau = a + ib`` relative to the lattice basis of ``m``.

    This is the smooth local chart used for derivatives of the projection;
    ``a`` carries a sign.
    """
    M = harmonic_gram_matrix(m, tol, maxiter)
    return (-M[..., 0, 1] + 1j) / M[..., 1, 1]


def project_conformal_class(
    m: MetricGrid, ref: Lattice | None = None, tol: float = CG_TOL, maxiter: int | None = None
) -> TeichmullerPoint:
    if ref is not None and ref != m.lattice:
        m = MetricGrid(m.E, m.F, m.G, ref)
    tau = complex(signed_modulus(m, tol, maxiter))
    tau = reduce_modulus(tau)
    return TeichmullerPoint(abs(tau.real), tau.imag)


def pi_coordinates(f: TorusImmersion, n: int) -> tuple[float, float]:
    """``(Pi^1, Pi^2)`` of ``f`` in the signed local chart."""
    tau = complex(signed_modulus(MetricGrid.of(f, n)))
    return tau.real, tau.imag


def dPi_directional(f: TorusImmersion, v: NormalField, h: float = 1e-3, n: int | None = None):
    """Directional derivative of ``(Pi^1, Pi^2)`` along ``v`` (central differences, Richardson)."""
    n = v.n if n is None else n

    def central(step):
        p = np.array(pi_coordinates(exp_normal(f, v, step), n))
        q = np.array(pi_coordinates(exp_normal(f, v, -step), n))
        return (p - q) / (2 * step)

    d1, d2 = central(h), central(h / 2)
    d = (4 * d2 - d1) / 3
    return float(d[0]), float(d[1])
