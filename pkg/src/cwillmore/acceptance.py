"""The eleven acceptance criteria as callable checks.

Each check returns a :class:`Check` with a pass flag, a short detail string
and the wall time. ``tests/test_acceptance.py`` and ``cwillmore verify`` both
run them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .conformal import MetricGrid, pi_coordinates, project_conformal_class
from .functionals import PenalizedForm, evaluate_perturbations
from .immersion import homogeneous_torus, mode_normal_field, willmore_energy
from .lattice import Lattice
from .minimizer import (
    MinimizationProblem,
    concavity_check,
    directional_profile,
    fd_derivatives,
    minimize,
    omega_table,
    slope_check,
)
from .modes import FourierMode, mode_norm_sq
from .stability import (
    CLIFFORD_AREA,
    alpha_threshold,
    d2Pi1_clifford,
    d2W_clifford,
    g_polynomial,
    g_roots,
    second_variations,
)

PI2 = np.pi**2
PHI1 = FourierMode(1, 2, 1.0, 1.0, 0.0, 0.0)


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(number: int, name: str, limit: float | None = None):
    def wrap(fn: Callable[[], tuple[bool, str]]):
        def run() -> Check:
            t = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t
            if limit is not None and dt > limit:
                ok, detail = False, f"{detail}; runtime {dt:.1f} s over the {limit:.0f} s limit"
            return Check(number, name, ok, detail, dt)

        run.number = number
        return run

    return wrap


@lru_cache(maxsize=None)
def threshold(b: float, method: str = "auto"):
    return alpha_threshold(b, K=8, method=method)


@lru_cache(maxsize=None)
def table_105():
    return omega_table(1.05, [0.0, 0.005, 0.01, 0.02], K=6)


@_timed(1, "threshold constant", limit=30.0)
def criterion_1():
    a = threshold(1.0, "analytic").alpha_b
    num = threshold(1.0, "numeric").alpha_b
    rel = abs(num - 10 * PI2) / (10 * PI2)
    ok = abs(a - 10 * PI2) <= 1e-9 and rel <= 0.01
    return ok, f"analytic {a:.12g}, numeric {num:.12g} (rel {rel:.2e})"


@_timed(2, "Clifford energy", limit=1.0)
def criterion_2():
    W = willmore_energy(homogeneous_torus(1.0), 128)
    err = abs(W - 2 * PI2)
    return err <= 1e-8, f"W = {W:.15g}, |W - 2pi^2| = {err:.1e}"


@_timed(3, "zero-mode structure")
def criterion_3():
    f = homogeneous_torus(1.0)
    worst_exact, worst_num = 0.0, 0.0
    for k, l in ((1, 1), (1, 0), (0, 1)):
        for phase in ("sin", "cos"):
            m = FourierMode.from_pattern(k, l, "+", phase)
            if m.is_zero():
                continue
            worst_exact = max(worst_exact, abs(d2W_clifford(m)))
            phi = mode_normal_field(m, f, 64).phi
            worst_num = max(worst_num, abs(second_variations(f, phi)[0]) / mode_norm_sq(m, CLIFFORD_AREA))
    ok = worst_exact == 0.0 and worst_num < 1e-4
    return ok, f"closed form max {worst_exact:.1e}, numeric max |D2W|/|phi|^2 {worst_num:.1e}"


@_timed(4, "analytic/numeric second variations at b=1", limit=120.0)
def criterion_4():
    f = homogeneous_torus(1.0)
    modes = []
    for k in range(4):
        for l in range(4):
            if (k, l) == (0, 0):
                continue
            modes += [FourierMode.from_pattern(k, l, p) for p in ("+", "-") if not (p == "-" and (k == 0 or l == 0))]
    d = second_variations(f, np.stack([mode_normal_field(m, f, 64).phi for m in modes]))
    errW, errP = 0.0, 0.0
    for m, row in zip(modes, d):
        norm = mode_norm_sq(m, CLIFFORD_AREA)
        for exact, num, which in ((d2W_clifford(m), row[0], "W"), (d2Pi1_clifford(m), row[1], "P")):
            e = abs(num - exact) / abs(exact) if exact != 0 else abs(num) / norm
            if which == "W":
                errW = max(errW, e)
            else:
                errP = max(errP, e)
    ok = errW <= 1e-3 and errP <= 1e-2
    return ok, f"{len(modes)} modes, max rel err W {errW:.1e}, Pi1 {errP:.1e}"


@_timed(5, "root identities")
def criterion_5():
    rng = np.random.default_rng(20261018)
    worst = 0.0
    for at, c in zip(rng.uniform(0, 5, 100), rng.uniform(1, 4, 100)):
        for l2 in g_roots(at, c).values():
            worst = max(worst, abs(g_polynomial(at, c, np.sqrt(l2))))
    b1 = g_roots(2.5, 2.0).second
    b2 = g_roots(3.5, 1.0).second
    ok = worst <= 1e-12 and b1 == 1.0 and b2 == 4.0
    return ok, f"max |g| {worst:.1e}; boundary roots {b1!r}, {b2!r}"


@_timed(6, "threshold collapse for b != 1")
def criterion_6():
    parts, ok = [], True
    for b in (1.02, 1.05, 1.1):
        for bb, want in ((b, (1, 2)), (1 / b, (2, 1))):
            r = threshold(bb)
            types = {(m.k, m.l) for m in r.kernel}
            good = r.alpha_b < 10 * PI2 and types == {want}
            ok &= good
            parts.append(f"b={bb:.4g}: {r.alpha_b / PI2:.4f}pi^2 {sorted(types)}")
    return ok, "; ".join(parts)


@_timed(7, "third derivative vanishing")
def criterion_7():
    f = homogeneous_torus(1.0)
    v = mode_normal_field(PHI1, f, 64)
    h = 0.02
    prof = directional_profile(1.0, PenalizedForm(10 * PI2, 0.0), v, h * np.arange(-2, 3))
    d3 = fd_derivatives(prof)[3]
    scale = mode_norm_sq(PHI1, CLIFFORD_AREA) ** 1.5
    return abs(d3) <= 1e-3 * scale, f"d3 = {d3:.2e}, bound {1e-3 * scale:.2e}"


@_timed(8, "multiplier/derivative consistency", limit=900.0)
def criterion_8():
    t = table_105()
    rows = slope_check(t)
    worst = max(r.rel_error for r in rows)
    conv = all(r.converged for r in t.rows)
    detail = ", ".join(f"[{r.a1:g},{r.a2:g}] slope {r.slope:.4f} vs {r.alpha_mid:.4f}" for r in rows)
    return worst <= 0.05 and conv, f"max rel err {worst:.2e}; {detail}"


@_timed(9, "concavity")
def criterion_9():
    rep = concavity_check(table_105(), budget=1e-3)
    return rep.passed, f"second differences {np.array2string(rep.second_differences, precision=3)}"


@_timed(10, "conformal projector")
def criterion_10():
    tau = 0.1 + 1.05j
    lat = Lattice(2 * np.pi, 2 * np.pi * tau)
    p = project_conformal_class(MetricGrid.flat(lat, 32))
    flat_err = abs(complex(p.a, p.b) - tau)
    hom_err = 0.0
    for b in (0.9, 1.0, 1.1):
        a_, b_ = pi_coordinates(homogeneous_torus(b), 64)
        hom_err = max(hom_err, abs(a_), abs(b_ - b))
    f = homogeneous_torus(1.0)
    phi = mode_normal_field(PHI1, f, 64).phi
    ts = np.linspace(0.01, 0.08, 8)
    pi1 = evaluate_perturbations(f, ts[:, None, None] * phi[None]).pi1
    c = float(np.dot(pi1, ts**2) / np.dot(ts**2, ts**2))
    fit = float(np.max(np.abs(pi1 - c * ts**2) / np.abs(pi1)))
    half = 0.5 * d2Pi1_clifford(PHI1)
    quad = abs(c - half) / half
    ok = flat_err <= 1e-10 and hom_err <= 1e-6 and fit < 0.02 and quad <= 0.02
    return ok, (f"flat err {flat_err:.1e}; homogeneous err {hom_err:.1e}; "
                f"Pi1 ~ {c:.5f} t^2 (fit err {fit:.1e}) vs {half:.5f} (rel {quad:.1e})")


@_timed(11, "descent past threshold")
def criterion_11():
    ab = threshold(1.05).alpha_b
    W0 = willmore_energy(homogeneous_torus(1.05), 32)
    up = minimize(MinimizationProblem(b=1.05, K=6, kind="penalized", alpha=1.02 * ab))
    drop = W0 - up.objective  # W_alpha(f^b) = W(f^b) since Pi^1(f^b) = 0
    down = minimize(MinimizationProblem(b=1.05, K=6, kind="penalized", alpha=0.9 * ab))
    cn = float(np.linalg.norm(down.coeffs))
    ok = drop > 1e-6 and cn < 1e-5
    return ok, f"1.02 alpha^b: W_alpha drop {drop:.4e}; 0.9 alpha^b: |coeffs| {cn:.1e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(select: list[int] | None = None, echo: Callable[[str], None] | None = None) -> list[Check]:
    out = []
    for crit in CRITERIA:
        if select and crit.number not in select:
            continue
        try:
            chk = crit()
        except Exception as exc:  # a crash is a failed criterion, reported as such
            chk = Check(crit.number, crit.__name__, False, f"{type(exc).__name__}: {exc}")
        out.append(chk)
        if echo:
            echo(chk.line())
    return out
