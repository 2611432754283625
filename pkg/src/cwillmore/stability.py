"""Second variations at homogeneous tori and the stability threshold alpha^b.

Closed forms hold at the Clifford torus (and the D^2 Pi^2 correction at any
homogeneous torus). For b != 1 the quadratic forms are measured numerically
from one-parameter families ``t -> exp_normal(f^b, t phi n)``.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BracketError
from .functionals import PenalizedForm, evaluate_perturbations
from .immersion import NormalField, ProductTorus, homogeneous_torus, mode_normal_field, radii
from .modes import PATTERNS, FourierMode, combine_phases, mode_norm_sq

__all__ = [
    "INVARIANCE_MODES",
    "MarginRow",
    "ThresholdResult",
    "alpha_threshold",
    "combine_phases",
    "d2Pi1_clifford",
    "d2Pi2_homogeneous",
    "d2W_clifford",
    "equivariant_kernel_profile",
    "eta_correction",
    "g_polynomial",
    "g_roots",
    "kernel_frequency",
    "margin_rows",
    "mode_transfer",
    "quadratic_form_numeric",
    "scan_modes",
    "second_variations",
]

INVARIANCE_MODES = frozenset({(1, 1), (1, 0), (0, 1)})
CLIFFORD_AREA = 2.0 * np.pi**2
ALPHA_BRACKET = (0.0, 12.0 * np.pi**2)
DEFAULT_TOL = 1e-6


# closed forms at the Clifford torus ---------------------------------------------------


def d2W_clifford(m: FourierMode) -> float:
    n = m.n
    return float((2 * n * n - 6 * n + 4) * mode_norm_sq(m, CLIFFORD_AREA))


def d2Pi1_clifford(m: FourierMode) -> float:
    k, l = m.k, m.l
    if k == 0 or l == 0:
        return 0.0
    c = m.coeffs
    # (1/pi^2)(2kl - 4kl/n) (2ab - 2cd)/sum c^2 * <phi,phi>, <phi,phi> = (pi^2/2) sum c^2
    return float((2 * k * l - 4 * k * l / m.n) * (c[0] * c[1] - c[2] * c[3]))


def eta_correction(m: FourierMode) -> FourierMode:
    """``eta_2 = (2/(k^2+l^2)) d_x d_y Phi`` on the Clifford chart, as a mode.

    With ``t = sqrt(2) x`` one has ``d_x d_y = 2 d_t1 d_t2``; so
    ``d_x d_y (sin cos) = -2kl (cos sin)`` and so on.
    """
    k, l = m.k, m.l
    if k == 0 or l == 0:
        return FourierMode(k, l)
    f = 4.0 * k * l / m.n
    return FourierMode(k, l, c_sc=-f * m.c_cs, c_cs=-f * m.c_sc, c_cc=f * m.c_ss, c_ss=f * m.c_cc)


def d2Pi2_homogeneous(m: FourierMode, b: float) -> float:
    """Second variation of Pi^2 at ``f^b`` along the transferred mode."""
    r, s = radii(b)
    k, l = m.k, m.l
    norm = mode_norm_sq(m, 4 * np.pi**2 * r * s)
    if norm == 0.0:
        return 0.0
    c_r = (k * k * s * s - l * l * r * r) / (k * k * s * s + l * l * r * r)
    four_pi2 = 4 * np.pi**2
    # every basis function is an eigenfunction of d11 and d22 on T^2_b
    t1 = (l * l / (s * s) - k * k / (r * r)) / (four_pi2 * r * r)
    t2 = (r * r - s * s) / (four_pi2 * r**4 * s * s)
    t3 = -(2 * (r * r - s * s) + c_r) / (four_pi2 * r**4 * s * s)
    return float((t1 + t2 + t3) * norm)


# stability polynomial --------------------------------------------------------------


def g_polynomial(alpha_tilde: float, c: float, l: float) -> float:
    c2 = c * c + 1
    return (
        2 * c2**2 * l**4
        - (6 * c2 + 8 * alpha_tilde * c) * l**2
        + 4
        + 16 * alpha_tilde * c / c2
    )


@dataclass(frozen=True)
class RootPair:
    """Squared roots ``l^2`` of the two factors of ``g``; ``None`` when negative."""

    first: float | None
    second: float | None

    def values(self) -> tuple[float, ...]:
        return tuple(v for v in (self.first, self.second) if v is not None)


def g_roots(alpha_tilde: float, c: float) -> RootPair:
    if c < 1:
        raise ValueError("c = k/l must be at least 1")
    c2 = c * c + 1
    first = 2.0 / c2
    second = 1.0 / c2 + 4.0 * alpha_tilde * c / c2**2
    return RootPair(first, second if second >= 0 else None)


def _critical_alpha_tilde(k: int, l: int) -> float:
    """alpha~ at which mode (k,l) sits on the second root branch ``l_min^2``."""
    lo, hi = min(k, l), max(k, l)
    c = hi / lo
    c2 = c * c + 1
    return (lo * lo * c2 - 1) * c2 / (4 * c)


# mode transfer ---------------------------------------------------------------------


def mode_transfer(m: FourierMode, b: float) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Chart function on ``T^2_b``: ``sin(k sqrt2 x) ... -> sin(k x / r) ...``."""
    from .modes import evaluate_mode

    r, s = radii(b)

    def phi(x, y):
        return evaluate_mode(m, np.asarray(x) / r, np.asarray(y) / s)

    return phi


def kernel_frequency(b: float) -> float:
    r, s = radii(b)
    return s / r + 4 * r / s


def equivariant_kernel_profile(b: float) -> Callable[[np.ndarray], np.ndarray]:
    """``x~ -> sin((s/r + 4r/s) x~)`` in the (1,2)-equivariant chart."""
    if b == 1.0:
        raise ValueError("b = 1: the kernel contains both (1,2) and (2,1) modes, no single profile")
    w = kernel_frequency(b)
    return lambda x: np.sin(w * np.asarray(x))


# numeric quadratic forms -----------------------------------------------------------

_REF_WAVENUMBER = np.sqrt(10.0)  # |grad| / |phi| of the (1,2) mode on the Clifford chart
_CHUNK_POINTS = 1 << 19


def _step(f: ProductTorus, phi: np.ndarray, h_rel: float) -> float:
    rms = float(np.sqrt(np.mean(phi**2)))
    if rms == 0.0:
        raise ValueError("zero normal field")
    px, py = f.grid(phi.shape[-1]).grad(phi)
    kappa = float(np.sqrt(np.mean(px**2 + py**2))) / rms
    return h_rel / rms * min(1.0, _REF_WAVENUMBER / max(kappa, 1e-300))


def second_variations(
    f: ProductTorus, phis: np.ndarray, n: int | None = None, h_rel: float = 0.01
) -> np.ndarray:
    """Rows ``(D^2 W, D^2 Pi^1, D^2 Pi^2)`` for each scalar field in ``phis``.

    Second central differences at steps h and h/2 with Richardson
    extrapolation; all fields and steps run as one batched evaluation
    (chunked to bound memory).
    """
    phis = np.asarray(phis, dtype=float)
    single = phis.ndim == 2
    if single:
        phis = phis[None]
    N = phis.shape[-1]
    n = N if n is None else n
    steps = np.array([_step(f, p, h_rel) for p in phis])
    ts = np.array([0.0, 1.0, -1.0, 0.5, -0.5])
    out = np.empty((len(phis), 3))
    chunk = max(1, _CHUNK_POINTS // (len(ts) * n * n))
    for i in range(0, len(phis), chunk):
        p, h = phis[i : i + chunk], steps[i : i + chunk]
        batch = (ts[None, :, None, None] * h[:, None, None, None]) * p[:, None]
        vals = evaluate_perturbations(f, batch.reshape(-1, N, N), n)
        for j, arr in enumerate((vals.W, vals.pi1, vals.pi2)):
            a = arr.reshape(len(p), len(ts))
            d1 = (a[:, 1] + a[:, 2] - 2 * a[:, 0]) / h**2
            d2 = (a[:, 3] + a[:, 4] - 2 * a[:, 0]) / (h / 2) ** 2
            out[i : i + chunk, j] = (4 * d2 - d1) / 3
    return out[0] if single else out


def quadratic_form_numeric(
    functional, f: ProductTorus, v: NormalField, n: int | None = None, h_rel: float = 0.01
) -> float:
    """``d^2/dt^2 functional(exp_normal(f, v, t))`` at ``t = 0``.

    ``functional`` is "W", "Pi1", "Pi2" or a PenalizedForm.
    """
    d = second_variations(f, v.phi, n, h_rel)
    if isinstance(functional, PenalizedForm):
        return float(functional(d[0], d[1], d[2]))
    return float(d[{"W": 0, "Pi1": 1, "Pi2": 2}[functional]])


# threshold -------------------------------------------------------------------------


@dataclass(frozen=True)
class MarginRow:
    k: int
    l: int
    pattern: str
    d2W: float
    d2Pi1: float
    d2Pi2: float
    norm_sq: float

    def q(self, alpha: float, beta: float) -> float:
        return self.d2W - alpha * self.d2Pi1 - beta * self.d2Pi2

    def margin(self, alpha: float, beta: float) -> float:
        return self.q(alpha, beta) / self.norm_sq

    def mode(self, phase: str = "sin") -> FourierMode:
        return FourierMode.from_pattern(self.k, self.l, self.pattern, phase)


@dataclass
class ThresholdResult:
    alpha_b: float
    kernel: list[FourierMode]
    beta_b: float
    rows: list[MarginRow]
    b: float = 1.0
    method: str = "analytic"
    tol: float = DEFAULT_TOL
    warnings: list[str] = field(default_factory=list)

    def margins(self) -> np.ndarray:
        return np.array([r.margin(self.alpha_b, self.beta_b) for r in self.rows])

    def margin_table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "pattern", "Q_alpha_value", "margin"])
        for r in self.rows:
            w.writerow(
                [r.k, r.l, r.pattern, f"{r.q(self.alpha_b, self.beta_b):.12g}",
                 f"{r.margin(self.alpha_b, self.beta_b):.12g}"]
            )
        return buf.getvalue()


def scan_modes(K: int) -> list[tuple[int, int, str]]:
    """Sorted (k, l, pattern) triples up to cutoff K, invariance modes excluded.

    On the axes k = 0 or l = 0 the two patterns coincide; only "+" is kept.
    """
    out = []
    for k in range(K + 1):
        for l in range(K + 1):
            if (k, l) == (0, 0) or (k, l) in INVARIANCE_MODES:
                continue
            for p in PATTERNS:
                if p == "-" and (k == 0 or l == 0):
                    continue
                out.append((k, l, p))
    return out


def _analytic_rows(K: int) -> list[MarginRow]:
    rows = []
    for k, l, p in scan_modes(K):
        m = FourierMode.from_pattern(k, l, p)
        rows.append(
            MarginRow(k, l, p, d2W_clifford(m), d2Pi1_clifford(m), d2Pi2_homogeneous(m, 1.0),
                      mode_norm_sq(m, CLIFFORD_AREA))
        )
    return rows


def _numeric_rows(f: ProductTorus, K: int, n: int) -> list[MarginRow]:
    triples = scan_modes(K)
    modes = [FourierMode.from_pattern(k, l, p) for k, l, p in triples]
    phis = np.stack([mode_normal_field(m, f, n).phi for m in modes])
    d = second_variations(f, phis, n)
    area = f.lattice.area
    return [
        MarginRow(k, l, p, *d[i], mode_norm_sq(modes[i], area))
        for i, (k, l, p) in enumerate(triples)
    ]


def margin_rows(b: float, K: int, n: int | None = None, method: str = "auto") -> list[MarginRow]:
    """Second variations of every scanned mode: closed forms at b = 1, numeric otherwise."""
    if method == "auto":
        method = "analytic" if b == 1.0 else "numeric"
    if method == "analytic":
        if b != 1.0:
            raise ValueError("closed forms exist only at b = 1")
        return _analytic_rows(K)
    return _numeric_rows(homogeneous_torus(b), K, n or max(64, 8 * K))


def _bisect(rows: list[MarginRow], beta: float, tol: float, iters: int = 80) -> float:
    lo, hi = ALPHA_BRACKET

    def ok(a):
        return min(r.margin(a, beta) for r in rows) >= -tol

    if not ok(lo) or ok(hi):
        table = [(r.k, r.l, r.pattern, r.margin(lo, beta), r.margin(hi, beta)) for r in rows]
        raise BracketError(f"alpha^b not bracketed by [{lo}, {hi}]", table=table)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


def _kernel(rows, alpha, beta, tol) -> list[FourierMode]:
    out = []
    for r in rows:
        if abs(r.margin(alpha, beta)) <= 10 * tol:
            out += [r.mode("sin"), r.mode("cos")]
    return out


def alpha_threshold(
    b: float,
    K: int = 8,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    n: int | None = None,
) -> ThresholdResult:
    """Largest alpha with ``D^2 W_{alpha, beta^b}(f^b) >= 0`` on all non-invariance modes.

    ``method`` is "analytic" (b = 1 only), "numeric" or "auto".
    """
    if not 0.8 <= b <= 1.25:
        raise ValueError(f"b = {b} outside the supported range [0.8, 1.25]")
    if K < 4:
        raise ValueError("mode cutoff K must be at least 4")
    if method == "auto":
        method = "analytic" if b == 1.0 else "numeric"
    if method == "analytic":
        if b != 1.0:
            raise ValueError("the analytic path exists only at b = 1")
        return _analytic_threshold(K, tol)
    if method != "numeric":
        raise ValueError(f"unknown method {method!r}")

    from .minimizer import multiplier_estimate_at

    f = homogeneous_torus(b)
    n = n or max(64, 8 * K)
    beta = multiplier_estimate_at(f, K=2, n=n).beta
    rows = _numeric_rows(f, K, n)
    alpha = _bisect(rows, beta, tol)
    res = ThresholdResult(alpha, _kernel(rows, alpha, beta, tol), beta, rows, b, "numeric", tol)
    _check_cutoff(res, K)
    return res


def _analytic_threshold(K: int, tol: float) -> ThresholdResult:
    rows = _analytic_rows(K)
    best = min(
        _critical_alpha_tilde(r.k, r.l) for r in rows if r.k and r.l and r.pattern == "+"
    )
    alpha = 4 * np.pi**2 * best
    kernel = []
    for r in rows:
        if r.k and r.l and r.pattern == "+" and np.isclose(_critical_alpha_tilde(r.k, r.l), best, rtol=1e-12, atol=0):
            kernel += [r.mode("sin"), r.mode("cos")]
    res = ThresholdResult(alpha, kernel, 0.0, rows, 1.0, "analytic", tol)
    _check_cutoff(res, K)
    return res


def _check_cutoff(res: ThresholdResult, K: int) -> None:
    if any(max(m.k, m.l) >= K for m in res.kernel):
        msg = f"kernel mode reaches the cutoff K={K}; the minimizing mode may lie beyond it"
        res.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)

