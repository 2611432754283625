"""Desk-scale constrained minimization over truncated normal-mode perturbations of f^b.

The search space is ``Phi = sum_j c_j psi_j`` where ``psi_j`` runs over the
constant function and the basis products of ``A_{k,l}`` for ``k, l <= K``,
transferred to the chart of ``f^b``. The invariance modes (1,1), (1,0), (0,1)
are frozen at zero. Constraints are enforced by an augmented Lagrangian whose
inner problems are solved by BFGS with batched central-difference gradients.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InfeasibleError
from .functionals import FunctionalValues, PenalizedForm, evaluate_perturbations
from .immersion import NormalField, ProductTorus, homogeneous_torus, mode_normal_field
from .modes import FourierMode, basis_mean_squares
from .stability import INVARIANCE_MODES

log = logging.getLogger(__name__)

COMPONENTS = ("sc", "cs", "cc", "ss")
_UNIT = {c: FourierMode(1, 1, *(np.eye(4)[i])).coeffs for i, c in enumerate(COMPONENTS)}
_CHUNK_POINTS = 1 << 17
A_RANGE = (0.0, 0.05)
B_RANGE = (0.8, 1.25)


def default_grid_size(K: int) -> int:
    return int(16 * np.ceil((4 * K + 8) / 16))


# search space ----------------------------------------------------------------------


@dataclass(frozen=True)
class Label:
    k: int
    l: int
    comp: str  # one of COMPONENTS, or "const"

    def __str__(self) -> str:
        return f"{self.k}:{self.l}:{self.comp}"


class ModeSpace:
    """Sampled basis functions of the truncated search space on ``f^b``.

    ``parity="even"`` keeps only the functions invariant under the point
    reflection ``(x, y) -> (-x, -y)`` (the cc and ss products and the
    constant). That reflection is induced by an isometry of S^3 fixing
    ``f^b``, so critical points of the reduced problem are critical for the
    full one.
    """

    def __init__(self, b: float, K: int, n: int | None = None, parity: str = "none"):
        if parity not in ("none", "even"):
            raise ValueError(f"unknown parity {parity!r}")
        self.b, self.K, self.parity = float(b), int(K), parity
        self.n = n or default_grid_size(K)
        self.f = homogeneous_torus(b)
        labels = [Label(0, 0, "const")]
        for k in range(K + 1):
            for l in range(K + 1):
                if (k, l) == (0, 0) or (k, l) in INVARIANCE_MODES:
                    continue
                active = basis_mean_squares(k, l)
                for i, comp in enumerate(COMPONENTS):
                    if active[i] == 0.0 or (parity == "even" and comp in ("sc", "cs")):
                        continue
                    labels.append(Label(k, l, comp))
        self.labels = labels
        self.fields = np.stack([self._sample(lab) for lab in labels])

    def _sample(self, lab: Label) -> np.ndarray:
        if lab.comp == "const":
            return np.ones((self.n, self.n))
        m = FourierMode(lab.k, lab.l, *_UNIT[lab.comp])
        return mode_normal_field(m, self.f, self.n).phi

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, k: int, l: int, comp: str) -> int:
        return self.labels.index(Label(k, l, comp))

    def phi(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(c, self.fields, axes=(-1, 0))

    def field(self, c: np.ndarray) -> NormalField:
        return NormalField(self.phi(c), self.f)

    def coeffs_from_mode(self, m: FourierMode) -> np.ndarray:
        c = np.zeros(self.dim)
        for comp, v in zip(COMPONENTS, m.coeffs):
            if v:
                c[self.index(m.k, m.l, comp)] = v
        return c

    def evaluate(self, C: np.ndarray) -> FunctionalValues:
        """W, Pi^1, Pi^2 for a batch of coefficient vectors (rows of ``C``)."""
        C = np.atleast_2d(C)
        chunk = max(1, _CHUNK_POINTS // self.n**2)
        parts = [evaluate_perturbations(self.f, self.phi(C[i : i + chunk]))
                 for i in range(0, len(C), chunk)]
        return FunctionalValues(*(np.concatenate([getattr(p, a) for p in parts]) for a in ("W", "pi1", "pi2")))

    def gradients(self, c: np.ndarray, h: float = 1e-4) -> tuple[np.ndarray, np.ndarray]:
        """Values ``(W, Pi1, Pi2)`` at ``c`` and their central-difference gradients (3, dim)."""
        E = h * np.eye(self.dim)
        C = np.vstack([c, c + E, c - E])
        v = self.evaluate(C)
        vals = np.stack([v.W, v.pi1, v.pi2])
        d = self.dim
        grads = (vals[:, 1 : d + 1] - vals[:, d + 1 :]) / (2 * h)
        return vals[:, 0], grads


@lru_cache(maxsize=8)
def mode_space(b: float, K: int, n: int | None = None, parity: str = "none") -> ModeSpace:
    return ModeSpace(b, K, n, parity)


def _scales(space: ModeSpace, h: float = 1e-3) -> np.ndarray:
    """Diagonal of the Hessian of W at ``f^b`` in the coefficient basis, floored."""
    c0 = np.zeros(space.dim)
    E = h * np.eye(space.dim)
    W = space.evaluate(np.vstack([c0, E, -E])).W
    d = space.dim
    diag = (W[1 : d + 1] + W[d + 1 :] - 2 * W[0]) / h**2
    floor = 1e-2 * np.median(np.abs(diag))
    return np.maximum(np.abs(diag), floor)


# problem and result types -----------------------------------------------------------


@dataclass(frozen=True)
class MinimizationProblem:
    """``kind="penalized"``: minimize ``W - alpha Pi^1`` with ``Pi^2 = b`` and ``Pi^1 <= a_max``.
    ``kind="pinned"``: minimize ``W`` with ``Pi^1 = a_target`` and ``Pi^2 = b``.
    """

    b: float
    K: int = 6
    kind: str = "pinned"
    alpha: float = 0.0
    a_target: float = 0.0
    a_max: float = 0.02
    n: int | None = None
    parity: str = "none"
    max_iter: int = 500
    constraint_tol: float = 1e-6
    stationarity_tol: float = 1e-5
    fd_step: float = 1e-4

    def __post_init__(self) -> None:
        if not B_RANGE[0] <= self.b <= B_RANGE[1]:
            raise ValueError(f"b = {self.b} outside {B_RANGE}")
        if not 1 <= self.K <= 8:
            raise ValueError("mode cutoff K must lie in 1..8")
        if self.kind not in ("penalized", "pinned"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "pinned" and not A_RANGE[0] <= self.a_target <= A_RANGE[1]:
            raise ValueError(f"a_target = {self.a_target} outside {A_RANGE}")
        if self.kind == "penalized" and not 0 < self.a_max <= A_RANGE[1]:
            raise ValueError(f"a_max = {self.a_max} outside (0, {A_RANGE[1]}]")

    def space(self) -> ModeSpace:
        return mode_space(self.b, self.K, self.n, self.parity)


@dataclass
class MinimizerResult:
    problem: MinimizationProblem
    labels: list[Label]
    coeffs: np.ndarray
    W: float
    pi: tuple[float, float]
    alpha_hat: float
    beta_hat: float
    converged: bool
    iterations: int
    stationarity: float
    constraint_violation: float
    message: str = ""

    @property
    def objective(self) -> float:
        """``W_alpha`` for penalized problems, ``W`` for pinned ones."""
        if self.problem.kind == "penalized":
            return self.W - self.problem.alpha * self.pi[0]
        return self.W

    def coeffs_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "component", "value"])
        for lab, v in zip(self.labels, self.coeffs):
            w.writerow([lab.k, lab.l, lab.comp, f"{v:.12g}"])
        return buf.getvalue()

    @staticmethod
    def coeffs_from_csv(text: str, space: ModeSpace) -> np.ndarray:
        c = np.zeros(space.dim)
        for row in csv.DictReader(io.StringIO(text)):
            c[space.labels.index(Label(int(row["k"]), int(row["l"]), row["component"]))] = float(row["value"])
        return c


@dataclass(frozen=True)
class MultiplierEstimate:
    alpha: float  # nan when undetermined
    beta: float
    residual: float  # relative to max(|dW|, 1)
    alpha_determined: bool


# multipliers -----------------------------------------------------------------------


def _fit(grads: np.ndarray, rank_tol: float = 1e-6) -> MultiplierEstimate:
    gW, g1, g2 = grads
    scale = max(np.linalg.norm(gW), 1.0)  # absolute floor where dW vanishes
    n2 = np.linalg.norm(g2)
    g1_perp = g1 - (g1 @ g2) / (n2 * n2) * g2 if n2 > 0 else g1
    if np.linalg.norm(g1_perp) <= rank_tol * max(n2, 1.0):
        beta = float(gW @ g2 / (n2 * n2))
        res = np.linalg.norm(gW - beta * g2) / scale
        return MultiplierEstimate(float("nan"), beta, float(res), False)
    A = np.stack([g1, g2], axis=1)
    (alpha, beta), *_ = np.linalg.lstsq(A, gW, rcond=None)
    res = np.linalg.norm(gW - A @ np.array([alpha, beta])) / scale
    return MultiplierEstimate(float(alpha), float(beta), float(res), True)


def multiplier_estimate(r: MinimizerResult) -> MultiplierEstimate:
    """Least-squares fit ``dW = alpha dPi^1 + beta dPi^2`` over the search-space directions."""
    space = r.problem.space()
    _, g = space.gradients(r.coeffs, r.problem.fd_step)
    return _fit(g)


def multiplier_estimate_at(f: ProductTorus, K: int = 2, n: int = 64) -> MultiplierEstimate:
    """Multiplier fit at an unperturbed homogeneous torus (probe modes up to K)."""
    if f.kind != "homogeneous":
        raise ValueError("multiplier_estimate_at expects a homogeneous torus")
    space = mode_space(f.b, K, n)
    _, g = space.gradients(np.zeros(space.dim))
    return _fit(g)


# constrained solver ------------------------------------------------------------------


class _Problem:
    """Objective and constraint bookkeeping in scaled variables.

    ``z = sqrt(w) c`` where ``w`` is the diagonal of the Hessian of W at ``f^b``,
    so the objective Hessian is close to the identity in ``z``.
    """

    def __init__(self, p: MinimizationProblem, space: ModeSpace, scale: np.ndarray):
        self.p, self.space, self.s = p, space, np.sqrt(scale)
        self.evals = 0

    def at(self, z: np.ndarray):
        """Values (W, Pi1, Pi2) and gradients w.r.t. ``z``."""
        self.evals += 1
        vals, g = self.space.gradients(z / self.s, self.p.fd_step)
        return vals, g / self.s

    def values(self, z: np.ndarray) -> np.ndarray:
        v = self.space.evaluate(z / self.s)
        return np.array([v.W[0], v.pi1[0], v.pi2[0]])

    def objective(self, vals, grads=None):
        a = self.p.alpha if self.p.kind == "penalized" else 0.0
        F = vals[0] - a * vals[1]
        return F if grads is None else (F, grads[0] - a * grads[1])

    def residuals(self, vals) -> np.ndarray:
        """Constraint residuals ``(Pi1 - target, Pi2 - b)``; target is a_max when penalized."""
        p = self.p
        return np.array([vals[1] - (p.a_target if p.kind == "pinned" else p.a_max), vals[2] - p.b])

    def violation(self, vals) -> float:
        h = self.residuals(vals)
        if self.p.kind == "penalized":
            return float(max(abs(h[1]), h[0], 0.0))
        return float(np.max(np.abs(h)))

    def multipliers(self, lam: np.ndarray) -> tuple[float, float]:
        """``(alpha_hat, beta_hat)`` with ``dW = alpha_hat dPi^1 + beta_hat dPi^2``."""
        if self.p.kind == "penalized":
            return self.p.alpha + lam[0], lam[1]
        return lam[0], lam[1]


def _kkt_step(B, gF, J, h, active):
    """Solve ``B d - J^T lam = -gF``, ``J d = -h`` over the active constraints (least squares)."""
    Ja, ha = J[active], h[active]
    m, n = len(ha), len(gF)
    K = np.zeros((n + m, n + m))
    K[:n, :n] = B
    K[:n, n:] = -Ja.T
    K[n:, :n] = Ja
    rhs = np.concatenate([-gF, -ha])
    sol = np.linalg.lstsq(K, rhs, rcond=1e-12)[0]
    lam = np.zeros(2)
    lam[active] = sol[n:]
    return sol[:n], lam


def _merit(prob: _Problem, vals, lam, rho) -> float:
    """Augmented Lagrangian merit; the Pi^1 bound of penalized problems uses the PHR form."""
    F = prob.objective(vals)
    h = prob.residuals(vals)
    if prob.p.kind == "penalized":
        nu = -lam[0]  # bound multiplier, >= 0
        t = max(0.0, nu + rho * h[0])
        ineq = (t * t - nu * nu) / (2 * rho)
        return F + ineq - lam[1] * h[1] + 0.5 * rho * h[1] ** 2
    return F - lam @ h + 0.5 * rho * (h @ h)


def _stationarity(prob: _Problem, grads, lam) -> float:
    """KKT residual ``|dW - alpha dPi^1 - beta dPi^2| / max(|dW|, 1)`` in coefficient space.

    The floor keeps the measure meaningful at critical points of W (dW = 0 at the Clifford torus).
    """
    s = prob.s
    gW, g1, g2 = grads * s  # back to coefficient space
    a, b = prob.multipliers(lam)
    r = gW - a * g1 - b * g2
    return float(np.linalg.norm(r) / max(np.linalg.norm(gW), 1.0))


def _seed(p: MinimizationProblem, space: ModeSpace, amplitude_a: float) -> np.ndarray:
    """Kernel-mode seed with ``Pi^1 ~ amplitude_a`` per the quadratic response of Pi^1."""
    c = np.zeros(space.dim)
    if amplitude_a <= 0:
        return c
    k, l = (2, 1) if p.b < 1 else (1, 2)
    # cos(k t1 + l t2) = cc - ss: even under the point reflection
    m = FourierMode.from_pattern(k, l, "+", "cos")
    try:
        c_m = space.coeffs_from_mode(m)
    except ValueError as exc:
        raise InfeasibleError(f"kernel mode ({k},{l}) not in the search space (K={p.K})") from exc
    from .stability import second_variations

    d2pi1 = second_variations(space.f, space.phi(c_m), space.n)[1]
    if d2pi1 <= 0:
        raise InfeasibleError("seed mode does not increase Pi^1")
    return np.sqrt(2 * amplitude_a / d2pi1) * c_m


def minimize(
    p: MinimizationProblem,
    warm_start: np.ndarray | None = None,
    multipliers: tuple[float, float] | None = None,
) -> MinimizerResult:
    """Sequential quadratic programming on the augmented Lagrangian.

    Each iteration takes one batched finite-difference gradient, solves the
    KKT system with a damped-BFGS model of the Lagrangian Hessian and
    backtracks on the augmented-Lagrangian merit (values only).
    """
    space = p.space()
    scale = _scales_cached(space)
    prob = _Problem(p, space, scale)

    if warm_start is not None:
        c = np.array(warm_start, dtype=float)
    elif p.kind == "pinned":
        c = _seed(p, space, p.a_target)
    else:
        c = _seed(p, space, 1e-4)
    z = c * prob.s
    vals, grads = prob.at(z)

    fit = _fit(grads * prob.s)
    lam = np.zeros(2)
    if multipliers is not None and np.all(np.isfinite(multipliers)):
        lam[:] = multipliers if p.kind == "pinned" else (0.0, multipliers[1])
    else:
        lam[:] = (fit.alpha if fit.alpha_determined else 0.0, fit.beta)
        if p.kind == "penalized":
            lam[0] = 0.0

    B = np.eye(space.dim)
    rho = 10.0
    converged, message = False, "iteration budget exhausted"
    it = 0
    for it in range(1, p.max_iter + 1):
        F, gF = prob.objective(vals, grads)
        h = prob.residuals(vals)
        J = grads[1:]
        if p.kind == "pinned":
            active = np.array([True, True])
            if p.a_target == 0.0 and np.linalg.norm(J[0]) < 1e-8:
                active[0] = False  # isothermic point: dPi^1 vanishes
        else:
            active = np.array([h[0] > -1e-9 or lam[0] < 0, True])
        d, lam_new = _kkt_step(B, gF, J, h, active)
        if p.kind == "penalized" and active[0] and lam_new[0] > 0:
            active[0] = False  # bound not binding; release it
            d, lam_new = _kkt_step(B, gF, J, h, active)
        elif p.kind == "penalized" and not active[0] and h[0] + J[0] @ d > 0:
            active[0] = True
            d, lam_new = _kkt_step(B, gF, J, h, active)

        stat = _stationarity(prob, grads, lam_new)
        viol = prob.violation(vals)
        log.debug("SQP %d: F=%.12g viol=%.3g stat=%.3g |d|=%.3g lam=%s", it, F, viol, stat,
                  np.linalg.norm(d), lam_new)
        lam = lam_new
        if viol <= p.constraint_tol and stat <= p.stationarity_tol and np.linalg.norm(d) < 1e-6:
            converged, message = True, "converged"
            break

        # make d a descent direction of the merit; raise rho when constraints lag
        rho = max(rho, 2.0 * float(np.max(np.abs(lam))) / max(np.linalg.norm(h), 1e-3))
        m0 = _merit(prob, vals, lam, rho)
        step, accepted = 1.0, False
        for _ in range(12):
            z_try = z + step * d
            try:
                m1 = _merit(prob, prob.values(z_try), lam, rho)
            except Exception:  # degenerate trial surface: shorten the step
                m1 = np.inf
            if m1 <= m0 + 1e-12 * abs(m0) or step < 1e-3 and m1 < np.inf:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            message = "line search failed"
            break
        z_new = z + step * d
        vals_new, grads_new = prob.at(z_new)

        # damped BFGS update of the Lagrangian Hessian
        a_new, b_new = prob.multipliers(lam)
        gl_old = grads[0] - a_new * grads[1] - b_new * grads[2]
        gl_new = grads_new[0] - a_new * grads_new[1] - b_new * grads_new[2]
        s_vec, y = z_new - z, gl_new - gl_old
        Bs = B @ s_vec
        sBs, sy = s_vec @ Bs, s_vec @ y
        if sBs > 0:
            if sy < 0.2 * sBs:
                theta = 0.8 * sBs / (sBs - sy)
                y = theta * y + (1 - theta) * Bs
                sy = s_vec @ y
            B = B - np.outer(Bs, Bs) / sBs + np.outer(y, y) / sy
        z, vals, grads = z_new, vals_new, grads_new

    c = z / prob.s
    alpha_hat, beta_hat = prob.multipliers(lam)
    if p.kind == "pinned" and p.a_target == 0.0:
        alpha_hat = float("nan")  # isothermic: dPi^1 vanishes at f^b
    return MinimizerResult(
        problem=p,
        labels=list(space.labels),
        coeffs=c,
        W=float(vals[0]),
        pi=(float(vals[1]), float(vals[2])),
        alpha_hat=float(alpha_hat),
        beta_hat=float(beta_hat),
        converged=converged,
        iterations=it,
        stationarity=_stationarity(prob, grads, lam),
        constraint_violation=prob.violation(vals),
        message=message,
    )


_SCALE_CACHE: dict[tuple, np.ndarray] = {}


def _scales_cached(space: ModeSpace) -> np.ndarray:
    key = (space.b, space.K, space.n, space.parity)
    if key not in _SCALE_CACHE:
        _SCALE_CACHE[key] = _scales(space)
    return _SCALE_CACHE[key]


# tables ----------------------------------------------------------------------------


@dataclass
class EnergyRow:
    a: float
    omega: float
    alpha_hat: float
    beta_hat: float
    converged: bool


@dataclass
class EnergyTable:
    b: float
    K: int
    rows: list[EnergyRow] = field(default_factory=list)

    def __post_init__(self) -> None:
        a = [r.a for r in self.rows]
        if any(x >= y for x, y in zip(a, a[1:])):
            raise ValueError("a values must be strictly increasing")

    @property
    def a(self) -> np.ndarray:
        return np.array([r.a for r in self.rows])

    @property
    def omega(self) -> np.ndarray:
        return np.array([r.omega for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "omega", "alpha_hat", "beta_hat", "converged"])
        for r in self.rows:
            w.writerow([f"{r.a:.12g}", f"{r.omega:.12g}", f"{r.alpha_hat:.12g}",
                        f"{r.beta_hat:.12g}", int(r.converged)])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                 for k, v in asdict(r).items()} for r in self.rows]
        return json.dumps({"b": self.b, "K": self.K, "rows": rows}, indent=2)


def omega_table(
    b: float, a_grid, K: int = 6, n: int | None = None, parity: str = "none", warm: bool = True, **opts
) -> EnergyTable:
    a_grid = [float(a) for a in a_grid]
    if any(not A_RANGE[0] <= a <= A_RANGE[1] for a in a_grid):
        raise ValueError(f"a_grid must lie in {A_RANGE}")
    if any(x >= y for x, y in zip(a_grid, a_grid[1:])):
        raise ValueError("a_grid must be strictly increasing")
    rows: list[EnergyRow] = []
    prev: MinimizerResult | None = None
    for a in a_grid:
        p = MinimizationProblem(b=b, K=K, kind="pinned", a_target=a, n=n, parity=parity, **opts)
        start, mult = None, None
        if warm and prev is not None and prev.problem.a_target > 0 and a > 0:
            start = prev.coeffs.copy()
            s = np.sqrt(a / prev.problem.a_target)
            start[1:] *= s  # amplitude grows like sqrt(a); the constant mode is left alone
            mult = (prev.alpha_hat, prev.beta_hat)
        r = minimize(p, warm_start=start, multipliers=mult)
        rows.append(EnergyRow(a, r.W, r.alpha_hat, r.beta_hat, r.converged))
        prev = r
    return EnergyTable(b, K, rows)


@dataclass(frozen=True)
class ConcavityReport:
    second_differences: np.ndarray
    max_positive: float
    budget: float

    @property
    def passed(self) -> bool:
        return self.max_positive <= self.budget


def concavity_check(table: EnergyTable, budget: float = 1e-3) -> ConcavityReport:
    """Divided second differences of omega over the (possibly nonuniform) a grid."""
    ok = [r for r in table.rows if r.converged and np.isfinite(r.omega)]
    if len(ok) < 3:
        raise ValueError("concavity check needs at least 3 converged rows")
    a = np.array([r.a for r in ok])
    w = np.array([r.omega for r in ok])
    s = np.diff(w) / np.diff(a)
    d2 = 2 * np.diff(s) / (a[2:] - a[:-2])
    return ConcavityReport(d2, float(max(d2.max(), 0.0)), budget)


@dataclass(frozen=True)
class SlopeRow:
    a1: float
    a2: float
    slope: float
    alpha_mid: float
    rel_error: float


def slope_check(table: EnergyTable) -> list[SlopeRow]:
    """Compare interval slopes of omega with the multipliers at the interval ends.

    ``alpha_mid`` averages the determined endpoint multipliers (alpha is
    undetermined at a = 0).
    """
    out = []
    for r1, r2 in zip(table.rows, table.rows[1:]):
        slope = (r2.omega - r1.omega) / (r2.a - r1.a)
        ends = [r.alpha_hat for r in (r1, r2) if np.isfinite(r.alpha_hat)]
        mid = float(np.mean(ends)) if ends else float("nan")
        out.append(SlopeRow(r1.a, r2.a, slope, mid, abs(slope - mid) / abs(mid)))
    return out


# directional profiles ------------------------------------------------------------------


def directional_profile(
    b: float, form: PenalizedForm, v: NormalField, t_grid, n: int | None = None
) -> list[tuple[float, float]]:
    """Samples of ``t -> W_{alpha,beta}(exp_normal(f^b, v, t))``."""
    t = np.asarray(t_grid, dtype=float)
    f = v.reference
    if not isinstance(f, ProductTorus) or f.kind != "homogeneous" or f.b != b:
        raise ValueError("v must live on homogeneous_torus(b)")
    vals = evaluate_perturbations(f, t[:, None, None] * v.phi[None], n)
    return list(zip(t.tolist(), form(vals.W, vals.pi1, vals.pi2).tolist()))


def fd_derivatives(profile: list[tuple[float, float]]) -> dict[int, float]:
    """Central 5-point derivatives of orders 1..4 at t = 0 from a profile on ``{-2h..2h}``."""
    t = np.array([p[0] for p in profile])
    y = np.array([p[1] for p in profile])
    order = np.argsort(t)
    t, y = t[order], y[order]
    if len(t) != 5 or not np.allclose(t, t[2] + np.array([-2, -1, 0, 1, 2]) * (t[3] - t[2])) or t[2] != 0:
        raise ValueError("need a symmetric 5-point grid {-2h, -h, 0, h, 2h}")
    h = t[3] - t[2]
    m2, m1, z, p1, p2 = y
    return {
        1: (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h),
        2: (-m2 + 16 * m1 - 30 * z + 16 * p1 - p2) / (12 * h * h),
        3: (-m2 + 2 * m1 - 2 * p1 + p2) / (2 * h**3),
        4: (m2 - 4 * m1 + 6 * z - 4 * p1 + p2) / h**4,
    }
