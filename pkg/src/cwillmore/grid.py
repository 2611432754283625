"""Uniform periodic grids over a lattice fundamental domain, with FFT calculus.

Samples sit at ``p = (i/N) gen1 + (j/N) gen2`` for ``i, j = 0..N-1``; array
axis ``-2`` runs along ``gen1`` and axis ``-1`` along ``gen2``. Derivatives are
taken spectrally in the lattice-unit coordinates ``(u, v)`` and converted to
the Euclidean domain coordinates ``(x, y)`` of ``C``.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .lattice import Lattice


class PeriodicGrid:
    def __init__(self, lattice: Lattice, n: int):
        if n < 4:
            raise ValueError(f"grid size must be at least 4, got {n}")
        self.lattice = lattice
        self.n = int(n)
        (w11, w12), (w21, w22) = lattice.matrix
        self.W = np.array([[w11, w12], [w21, w22]])
        self.Winv = np.linalg.inv(self.W)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PeriodicGrid)
            and self.n == other.n
            and self.lattice == other.lattice
        )

    def __hash__(self) -> int:
        return hash((self.lattice, self.n))

    @cached_property
    def uv(self) -> tuple[np.ndarray, np.ndarray]:
        t = np.arange(self.n) / self.n
        return np.meshgrid(t, t, indexing="ij")

    @cached_property
    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        u, v = self.uv
        x = self.W[0, 0] * u + self.W[0, 1] * v
        y = self.W[1, 0] * u + self.W[1, 1] * v
        return x, y

    @property
    def cell_area(self) -> float:
        return self.lattice.area / self.n**2

    @cached_property
    def _wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        m = np.fft.fftfreq(self.n, d=1.0 / self.n) * 2.0 * np.pi
        m1 = m.copy()
        if self.n % 2 == 0:
            m1[self.n // 2] = 0.0  # Nyquist column carries no odd derivative
        return m, m1

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Trapezoidal (periodic) quadrature over the fundamental domain."""
        return values.sum(axis=(-2, -1)) * self.cell_area

    def mean(self, values: np.ndarray) -> np.ndarray:
        return values.mean(axis=(-2, -1))

    # -- spectral derivatives in lattice-unit coordinates ------------------
    def grad_uv(self, phi: np.ndarray, hat: np.ndarray | None = None):
        _, m1 = self._wavenumbers
        if hat is None:
            hat = np.fft.fft2(phi)
        du = np.fft.ifft2(1j * m1[:, None] * hat).real
        dv = np.fft.ifft2(1j * m1[None, :] * hat).real
        return du, dv

    def hess_uv(self, phi: np.ndarray, hat: np.ndarray | None = None):
        m, m1 = self._wavenumbers
        if hat is None:
            hat = np.fft.fft2(phi)
        duu = np.fft.ifft2(-(m**2)[:, None] * hat).real
        dvv = np.fft.ifft2(-(m**2)[None, :] * hat).real
        duv = np.fft.ifft2(-(m1[:, None] * m1[None, :]) * hat).real
        return duu, duv, dvv

    def div_uv(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _, m1 = self._wavenumbers
        hat = 1j * m1[:, None] * np.fft.fft2(a) + 1j * m1[None, :] * np.fft.fft2(b)
        return np.fft.ifft2(hat).real

    # -- derivatives in domain coordinates ---------------------------------
    def grad(self, phi: np.ndarray):
        du, dv = self.grad_uv(phi)
        Wi = self.Winv
        # d/dx = (du/dx) d/du + (dv/dx) d/dv, with (u, v) = Winv (x, y)
        return Wi[0, 0] * du + Wi[1, 0] * dv, Wi[0, 1] * du + Wi[1, 1] * dv

    def derivatives(self, phi: np.ndarray):
        """Return ``phi_x, phi_y, phi_xx, phi_xy, phi_yy``."""
        hat = np.fft.fft2(phi)
        du, dv = self.grad_uv(phi, hat)
        duu, duv, dvv = self.hess_uv(phi, hat)
        Wi = self.Winv
        px = Wi[0, 0] * du + Wi[1, 0] * dv
        py = Wi[0, 1] * du + Wi[1, 1] * dv
        a, c = Wi[0, 0], Wi[1, 0]  # coefficients of d/du, d/dv in d/dx
        b, d = Wi[0, 1], Wi[1, 1]  # ... in d/dy
        pxx = a * a * duu + 2 * a * c * duv + c * c * dvv
        pyy = b * b * duu + 2 * b * d * duv + d * d * dvv
        pxy = a * b * duu + (a * d + b * c) * duv + c * d * dvv
        return px, py, pxx, pxy, pyy

    def resample(self, phi: np.ndarray, n: int) -> np.ndarray:
        """Spectral interpolation of grid samples onto an ``n x n`` grid."""
        if n == self.n:
            return phi
        hat = np.fft.fftshift(np.fft.fft2(phi), axes=(-2, -1))
        src, dst = self.n, n
        out = np.zeros(phi.shape[:-2] + (dst, dst), dtype=complex)
        keep = min(src, dst)
        lo_s = src // 2 - keep // 2
        lo_d = dst // 2 - keep // 2
        out[..., lo_d : lo_d + keep, lo_d : lo_d + keep] = hat[
            ..., lo_s : lo_s + keep, lo_s : lo_s + keep
        ]
        out = np.fft.ifft2(np.fft.ifftshift(out, axes=(-2, -1))) * (dst / src) ** 2
        return out.real
