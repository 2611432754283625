"""Torus immersions into the unit 3-sphere and their differential geometry.

Points of ``S^3`` are stored as real 4-vectors ``(Re z1, Im z1, Re z2, Im z2)``
along the last array axis.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateImmersionError, UnsupportedImmersionError
from .grid import PeriodicGrid
from .lattice import Lattice
from .modes import FourierMode, evaluate_mode

DEFAULT_N = 128


def radii(b: float) -> tuple[float, float]:
    """Circle radii ``(r, s)`` of the homogeneous torus with ``s/r = b``."""
    if not b > 0:
        raise ValueError(f"b must be positive, got {b}")
    r = 1.0 / np.sqrt(1.0 + b * b)
    return float(r), float(b * r)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector ``v`` with ``v_k = eps_{k i j l} a_i b_j c_l`` (orthogonal to a, b, c)."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape, c.shape))
    cols = [1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]
    for k, idx in enumerate(cols):
        m = np.stack([a[..., idx], b[..., idx], c[..., idx]], axis=-2)
        out[..., k] = (-1) ** k * np.linalg.det(m)
    return out


@dataclass
class Jet:
    """Position and unit normal with their first and second domain derivatives."""

    f: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    fxx: np.ndarray
    fxy: np.ndarray
    fyy: np.ndarray
    n: np.ndarray
    nx: np.ndarray | None = None
    ny: np.ndarray | None = None
    nxx: np.ndarray | None = None
    nxy: np.ndarray | None = None
    nyy: np.ndarray | None = None


class TorusImmersion:
    """Doubly periodic map from ``C / lattice`` into ``S^3``."""

    kind: str = "abstract"
    lattice: Lattice

    def jet(self, n: int) -> Jet:
        raise NotImplementedError

    def grid(self, n: int) -> PeriodicGrid:
        return PeriodicGrid(self.lattice, n)

    def sample(self, n: int) -> np.ndarray:
        return self.jet(n).f


class ProductTorus(TorusImmersion):
    """``(x, y) -> (r e^{i t1}, s e^{i t2})`` with angles linear in ``(x, y)``.

    ``angle_matrix`` maps ``(x, y)`` to ``(t1, t2)``. The domain lattice is
    the full period lattice ``2 pi angle_matrix^{-1} Z^2``, so the map is a
    single cover of the product torus.
    """

    def __init__(self, b: float, angle_matrix, kind: str):
        self.b = float(b)
        self.r, self.s = radii(b)
        self.A = np.asarray(angle_matrix, dtype=float)
        self.kind = kind
        P = 2.0 * np.pi * np.linalg.inv(self.A)
        self.lattice = Lattice(complex(P[0, 0], P[1, 0]), complex(P[0, 1], P[1, 1]))
        self._jets: dict[int, Jet] = {}

    def __repr__(self) -> str:
        return f"ProductTorus(kind={self.kind!r}, b={self.b!r})"

    def angles(self, x, y):
        A = self.A
        return A[0, 0] * x + A[0, 1] * y, A[1, 0] * x + A[1, 1] * y

    def evaluate(self, x, y) -> np.ndarray:
        t1, t2 = self.angles(np.asarray(x, float), np.asarray(y, float))
        r, s = self.r, self.s
        return np.stack([r * np.cos(t1), r * np.sin(t1), s * np.cos(t2), s * np.sin(t2)], -1)

    def normal_at(self, x, y) -> np.ndarray:
        t1, t2 = self.angles(np.asarray(x, float), np.asarray(y, float))
        r, s = self.r, self.s
        return np.stack([-s * np.cos(t1), -s * np.sin(t1), r * np.cos(t2), r * np.sin(t2)], -1)

    def jet(self, n: int) -> Jet:
        if n not in self._jets:
            self._jets[n] = self._analytic_jet(*self.grid(n).xy)
        return self._jets[n]

    def _analytic_jet(self, x, y) -> Jet:
        t1, t2 = self.angles(x, y)
        e1 = np.stack([np.cos(t1), np.sin(t1)], -1)
        ie1 = np.stack([-np.sin(t1), np.cos(t1)], -1)
        e2 = np.stack([np.cos(t2), np.sin(t2)], -1)
        ie2 = np.stack([-np.sin(t2), np.cos(t2)], -1)
        A, r, s = self.A, self.r, self.s

        def vec(p, q):
            return np.concatenate([p, q], axis=-1)

        def d1(i, c1, c2):  # derivative of (c1 e1, c2 e2) along coordinate i
            return vec(c1 * A[0, i] * ie1, c2 * A[1, i] * ie2)

        def d2(i, j, c1, c2):
            return vec(-c1 * A[0, i] * A[0, j] * e1, -c2 * A[1, i] * A[1, j] * e2)

        return Jet(
            f=vec(r * e1, s * e2),
            fx=d1(0, r, s),
            fy=d1(1, r, s),
            fxx=d2(0, 0, r, s),
            fxy=d2(0, 1, r, s),
            fyy=d2(1, 1, r, s),
            n=vec(-s * e1, r * e2),
            nx=d1(0, -s, r),
            ny=d1(1, -s, r),
            nxx=d2(0, 0, -s, r),
            nxy=d2(0, 1, -s, r),
            nyy=d2(1, 1, -s, r),
        )


def homogeneous_torus(b: float) -> ProductTorus:
    """``f^b(x, y) = (r e^{ix/r}, s e^{iy/s})`` on ``C / (2 pi r Z + 2 pi s i Z)``."""
    r, s = radii(b)
    return ProductTorus(b, [[1.0 / r, 0.0], [0.0, 1.0 / s]], "homogeneous")


def equivariant_12_torus(b: float) -> ProductTorus:
    """The homogeneous torus reparametrized as a (1,2)-equivariant surface.

    ``(x, y) -> (r e^{i(y + 2 (s/r) x)}, s e^{i(2y - (r/s) x)})``; the chart is
    conformal with metric ``(r^2 + 4 s^2)(dx^2 + dy^2)``.
    """
    radii(b)
    return ProductTorus(b, [[2.0 * b, 1.0], [-1.0 / b, 2.0]], "equivariant12")


@dataclass
class NormalField:
    """Scalar ``phi`` on the grid of ``reference``; the field is ``phi * n``."""

    phi: np.ndarray
    reference: TorusImmersion

    @property
    def n(self) -> int:
        return self.phi.shape[-1]

    def on_grid(self, n: int) -> np.ndarray:
        return self.reference.grid(self.n).resample(self.phi, n)

    def __add__(self, other: "NormalField") -> "NormalField":
        if other.reference is not self.reference:
            raise ValueError("normal fields live on different immersions")
        return NormalField(self.phi + other.on_grid(self.n), self.reference)

    def scaled(self, factor: float) -> "NormalField":
        return NormalField(factor * self.phi, self.reference)


def mode_normal_field(m: FourierMode, f: TorusImmersion, n: int = DEFAULT_N) -> NormalField:
    """Transfer a mode to the chart of ``f`` and attach ``f``'s unit normal."""
    if not isinstance(f, ProductTorus):
        raise UnsupportedImmersionError(
            f"mode fields need a homogeneous or equivariant torus, got {f.kind}"
        )
    t1, t2 = f.angles(*f.grid(n).xy)
    return NormalField(evaluate_mode(m, t1, t2), f)


def constant_normal_field(f: TorusImmersion, value: float = 1.0, n: int = DEFAULT_N) -> NormalField:
    return NormalField(np.full((n, n), float(value)), f)


def _numeric_normal_derivatives(jet: Jet, grid: PeriodicGrid) -> Jet:
    comps = [grid.derivatives(jet.n[..., k]) for k in range(4)]
    jet.nx, jet.ny, jet.nxx, jet.nxy, jet.nyy = (
        np.stack([c[i] for c in comps], -1) for i in range(5)
    )
    return jet


def unit_normal(f: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    nu = cross4(f, fx, fy)
    return nu / np.linalg.norm(nu, axis=-1, keepdims=True)


def perturb_jet(base: Jet, phi, phi_x, phi_y, phi_xx, phi_xy, phi_yy, t: float = 1.0) -> Jet:
    """Jet of ``cos(t phi) f + sin(t phi) n`` from the base jet and phi's derivatives.

    ``phi`` and its derivatives may carry leading batch axes.
    """
    if base.nx is None:
        raise ValueError("base jet lacks normal derivatives")
    tp = t * np.asarray(phi)
    c = np.cos(tp)[..., None]
    s = np.sin(tp)[..., None]
    px, py = (t * phi_x)[..., None], (t * phi_y)[..., None]
    pxx, pxy, pyy = (t * phi_xx)[..., None], (t * phi_xy)[..., None], (t * phi_yy)[..., None]
    f, n = base.f, base.n
    rot = -s * f + c * n  # d/dphi of the rotated point
    rot_x = -s * base.fx + c * base.nx
    rot_y = -s * base.fy + c * base.ny
    F = c * f + s * n
    Fx = c * base.fx + s * base.nx + px * rot
    Fy = c * base.fy + s * base.ny + py * rot
    Fxx = c * base.fxx + s * base.nxx + 2 * px * rot_x + pxx * rot - px * px * F
    Fyy = c * base.fyy + s * base.nyy + 2 * py * rot_y + pyy * rot - py * py * F
    Fxy = c * base.fxy + s * base.nxy + py * rot_x + px * rot_y + pxy * rot - px * py * F
    return Jet(F, Fx, Fy, Fxx, Fxy, Fyy, unit_normal(F, Fx, Fy))


class PerturbedImmersion(TorusImmersion):
    """``exp_f(t * phi * n)``: each point moved along the great circle of its normal."""

    kind = "perturbed"

    def __init__(self, base: TorusImmersion, normal_field: NormalField, amplitude: float):
        self.base = base
        self.field = normal_field
        self.amplitude = float(amplitude)
        self.lattice = base.lattice
        self._jets: dict[int, Jet] = {}

    def jet(self, n: int) -> Jet:
        if n not in self._jets:
            grid = self.grid(n)
            base = self.base.jet(n)
            if base.nx is None:
                base = _numeric_normal_derivatives(base, grid)
            phi = self.field.on_grid(n)
            jet = perturb_jet(base, phi, *grid.derivatives(phi), t=self.amplitude)
            self._jets[n] = _numeric_normal_derivatives(jet, grid)
        return self._jets[n]


class GridImmersion(TorusImmersion):
    """Immersion known only through samples on a uniform lattice grid."""

    kind = "grid"

    def __init__(self, samples: np.ndarray, lattice: Lattice):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 3 or samples.shape[0] != samples.shape[1] or samples.shape[2] != 4:
            raise ValueError(f"expected samples of shape (N, N, 4), got {samples.shape}")
        self.samples = samples
        self.lattice = lattice
        self._jets: dict[int, Jet] = {}

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    def jet(self, n: int) -> Jet:
        if n not in self._jets:
            src = PeriodicGrid(self.lattice, self.n)
            f = np.stack([src.resample(self.samples[..., k], n) for k in range(4)], -1)
            grid = self.grid(n)
            comps = [grid.derivatives(f[..., k]) for k in range(4)]
            fx, fy, fxx, fxy, fyy = (np.stack([c[i] for c in comps], -1) for i in range(5))
            jet = Jet(f, fx, fy, fxx, fxy, fyy, np.zeros_like(f))
            _check_immersed(dot(fx, fx) * dot(fy, fy) - dot(fx, fy) ** 2)
            jet.n = unit_normal(f, fx, fy)
            self._jets[n] = _numeric_normal_derivatives(jet, grid)
        return self._jets[n]

    # -- serialization ------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        g1, g2 = self.lattice.gen1, self.lattice.gen2
        buf.write(f"# lattice gen1={g1.real!r},{g1.imag!r} gen2={g2.real!r},{g2.imag!r} n={self.n}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "p0", "p1", "p2", "p3"])
        x, y = PeriodicGrid(self.lattice, self.n).xy
        for i in range(self.n):
            for j in range(self.n):
                w.writerow([_fmt(x[i, j]), _fmt(y[i, j])] + [_fmt(p) for p in self.samples[i, j]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridImmersion":
        lines = text.splitlines()
        header = lines[0]
        if not header.startswith("# lattice"):
            raise ValueError("missing '# lattice' header line")
        fields = dict(item.split("=") for item in header[len("# lattice") :].split())
        g1 = complex(*map(float, fields["gen1"].split(",")))
        g2 = complex(*map(float, fields["gen2"].split(",")))
        n = int(fields["n"])
        rows = list(csv.DictReader(lines[1:]))
        if len(rows) != n * n:
            raise ValueError(f"expected {n * n} rows, got {len(rows)}")
        pts = np.array([[float(r[f"p{k}"]) for k in range(4)] for r in rows])
        return cls(pts.reshape(n, n, 4), Lattice(g1, g2))

    def save_binary(self, path) -> None:
        g1, g2 = self.lattice.gen1, self.lattice.gen2
        np.savez_compressed(path, samples=self.samples, lattice=np.array([g1, g2]))

    @classmethod
    def load_binary(cls, path) -> "GridImmersion":
        with np.load(path) as data:
            g1, g2 = data["lattice"]
            return cls(data["samples"], Lattice(complex(g1), complex(g2)))


def sample_immersion(f: TorusImmersion, n: int) -> GridImmersion:
    return GridImmersion(f.jet(n).f.copy(), f.lattice)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def exp_normal(f: TorusImmersion, v: NormalField, t: float) -> TorusImmersion:
    """Move every point of ``f`` a geodesic distance ``t * phi`` along its normal."""
    if t == 0:
        return f
    return PerturbedImmersion(f, v, t)


# ---------------------------------------------------------------------------
# Fundamental forms and Willmore energy


@dataclass
class GeometryFields:
    """Pointwise geometry on an ``N x N`` grid, in the domain chart ``(x, y)``."""

    grid: PeriodicGrid
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N2: np.ndarray
    H: np.ndarray
    K: np.ndarray
    dA: np.ndarray
    unit_normal: np.ndarray
    points: np.ndarray = field(repr=False)

    @property
    def area(self) -> float:
        return float(self.grid.integrate(self.dA))


def _check_immersed(det: np.ndarray) -> None:
    bad = ~(det > 1e-14)
    if np.any(bad):
        raise DegenerateImmersionError(
            f"metric degenerate (EG - F^2 <= 0) at {int(bad.sum())} samples; "
            f"min det = {float(np.min(det)):.3e}"
        )


def geometry_from_jet(jet: Jet) -> dict[str, np.ndarray]:
    """Both fundamental forms with derived curvatures; batch axes allowed."""
    E = dot(jet.fx, jet.fx)
    F = dot(jet.fx, jet.fy)
    G = dot(jet.fy, jet.fy)
    det = E * G - F * F
    _check_immersed(det)
    nu = jet.n
    L = dot(jet.fxx, nu)
    M = dot(jet.fxy, nu)
    N2 = dot(jet.fyy, nu)
    H = (E * N2 - 2.0 * F * M + G * L) / (2.0 * det)
    K = (L * N2 - M * M) / det + 1.0
    return dict(E=E, F=F, G=G, L=L, M=M, N2=N2, H=H, K=K, dA=np.sqrt(det))


def _validate_n(n: int) -> None:
    if n < 16:
        raise ValueError(f"grid size must be >= 16, got {n}")


def fundamental_forms(f: TorusImmersion, n: int = DEFAULT_N) -> GeometryFields:
    _validate_n(n)
    jet = f.jet(n)
    geo = geometry_from_jet(jet)
    return GeometryFields(grid=f.grid(n), unit_normal=jet.n, points=jet.f, **geo)


def willmore_density(geo: dict[str, np.ndarray]) -> np.ndarray:
    return (geo["H"] ** 2 + 1.0) * geo["dA"]


def willmore_energy(f: TorusImmersion, n: int = DEFAULT_N) -> float:
    """``int (H^2 + 1) dA`` by periodic trapezoidal quadrature."""
    geo = fundamental_forms(f, n)
    return float(geo.grid.integrate((geo.H**2 + 1.0) * geo.dA))
