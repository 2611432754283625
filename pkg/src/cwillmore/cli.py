"""Command-line front end.

    cwillmore threshold --b 1.05
    cwillmore energy --surface homogeneous --b 1.2
    cwillmore spectrum --b 1 --alpha 98.696 --kmax 4
    cwillmore minimize --b 1.05 --kind pinned --a 0.01
    cwillmore omega-table --b 1.05 --a-grid 0:0.005:5
    cwillmore verify

Exit codes: 0 success, 1 numerical failure (or a failed acceptance item),
2 usage error. Every output starts with a header block echoing the package
version and configuration along with the tolerances used.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .errors import CWillmoreError, NumericalFailure
from .immersion import equivariant_12_torus, homogeneous_torus, willmore_energy
from .minimizer import (
    A_RANGE,
    B_RANGE,
    MinimizationProblem,
    concavity_check,
    minimize,
    multiplier_estimate,
    omega_table,
)
from .stability import DEFAULT_TOL, alpha_threshold, margin_rows

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def g12(x) -> str:
    """Floats are printed with 12 significant digits everywhere."""
    return f"{float(x):.12g}"


def _json_num(x):
    x = float(x)
    return float(g12(x)) if np.isfinite(x) else None


@dataclass
class RunConfig:
    command: str
    b: float = 1.0
    alpha: float | None = None
    beta: float | None = None
    K: int | None = None
    n: int | None = None
    a_grid: list[float] = field(default_factory=list)
    tol: float = DEFAULT_TOL
    output: str | None = None
    fmt: str = "csv"
    surface: str = "homogeneous"
    method: str = "auto"
    kind: str = "pinned"
    a: float = 0.0
    a_max: float = 0.02
    parity: str = "none"
    max_iter: int = 500
    only: list[int] = field(default_factory=list)

    @classmethod
    def from_mapping(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise UsageError(f"unknown configuration keys: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not np.isfinite(self.b) or self.b <= 0:
            raise UsageError(f"--b must be positive, got {self.b}")
        if self.command in ("threshold", "minimize", "omega-table", "spectrum") and not (
            B_RANGE[0] <= self.b <= B_RANGE[1]
        ):
            raise UsageError(f"--b must lie in [{B_RANGE[0]}, {B_RANGE[1]}]")
        if self.n is not None and (self.n < 16 or self.n % 2):
            raise UsageError("--n must be an even integer >= 16")
        if self.K is not None and not 1 <= self.K <= 8:
            raise UsageError("--kmax must lie in 1..8")
        if self.command == "threshold" and self.K is not None and self.K < 4:
            raise UsageError("threshold needs --kmax >= 4")
        if self.fmt not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if not 0 < self.tol < 1:
            raise UsageError("--tol must lie in (0, 1)")
        if any(not A_RANGE[0] <= a <= A_RANGE[1] for a in self.a_grid + [self.a]):
            raise UsageError(f"a values must lie in [{A_RANGE[0]}, {A_RANGE[1]}]")
        if self.command == "spectrum" and self.alpha is None:
            raise UsageError("spectrum needs --alpha")
        if self.command == "minimize" and self.kind == "penalized" and self.alpha is None:
            raise UsageError("penalized minimization needs --alpha")
        if self.command == "omega-table" and not self.a_grid:
            raise UsageError("omega-table needs --a-grid")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        return d


def parse_range(text: str) -> list[float]:
    """``start:step:count`` -> list of floats."""
    try:
        start, step, count = text.split(":")
        start, step, count = float(start), float(step), int(count)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"range {text!r} is not start:step:count") from exc
    if count < 1 or step <= 0 and count > 1:
        raise argparse.ArgumentTypeError(f"range {text!r} needs count >= 1 and step > 0")
    return [float(g12(start + i * step)) for i in range(count)]


def parse_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from exc


# output ----------------------------------------------------------------------------


def _round_tols(tolerances: dict) -> dict:
    return {k: (_json_num(v) if isinstance(v, float) else v) for k, v in tolerances.items()}


def header_lines(cfg: RunConfig, tolerances: dict) -> list[str]:
    tolerances = _round_tols(tolerances)
    return [
        f"cwillmore {__version__}",
        f"command: {cfg.command}",
        "config: " + json.dumps(cfg.echo(), sort_keys=True),
        "tolerances: " + json.dumps(tolerances, sort_keys=True),
    ]


def emit(cfg: RunConfig, tolerances: dict, scalars: dict, table: tuple[list[str], list[list]] | None,
         payload: dict | None = None) -> str:
    """Render a report as CSV (header comments, scalars, one table) or JSON."""
    if cfg.fmt == "json":
        doc = {"header": {"version": __version__, "command": cfg.command, "config": cfg.echo(),
                          "tolerances": _round_tols(tolerances)}}
        doc.update({k: (_json_num(v) if isinstance(v, (float, np.floating)) else v) for k, v in scalars.items()})
        if table is not None:
            cols, rows = table
            doc["table"] = [{c: (_json_num(v) if isinstance(v, (float, np.floating)) else v)
                             for c, v in zip(cols, r)} for r in rows]
        if payload:
            doc.update(payload)
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    else:
        buf = io.StringIO()
        for line in header_lines(cfg, tolerances):
            buf.write(f"# {line}\n")
        for k, v in scalars.items():
            buf.write(f"# {k} = {g12(v) if isinstance(v, (float, np.floating)) else v}\n")
        if table is not None:
            cols, rows = table
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow([g12(v) if isinstance(v, (float, np.floating)) else v for v in r])
        text = buf.getvalue()
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


# commands --------------------------------------------------------------------------


def cmd_threshold(cfg: RunConfig) -> int:
    K = cfg.K or 8
    res = alpha_threshold(cfg.b, K=K, tol=cfg.tol, method=cfg.method, n=cfg.n)
    kernel = [f"({m.k},{m.l}) [{g12(m.c_sc)} {g12(m.c_cs)} {g12(m.c_cc)} {g12(m.c_ss)}]" for m in res.kernel]
    scalars = {"b": float(cfg.b), "K": K, "method": res.method, "alpha_b": float(res.alpha_b),
               "alpha_b_over_pi2": float(res.alpha_b / np.pi**2), "beta_b": float(res.beta_b),
               "kernel": "; ".join(kernel)}
    for w in res.warnings:
        scalars.setdefault("warning", w)
    rows = [[r.k, r.l, r.pattern, float(r.q(res.alpha_b, res.beta_b)), float(r.margin(res.alpha_b, res.beta_b))]
            for r in res.rows]
    emit(cfg, {"tol": cfg.tol, "kernel_tol": 10 * cfg.tol},
         scalars, (["k", "l", "pattern", "Q_alpha_value", "margin"], rows))
    return EXIT_OK


def cmd_energy(cfg: RunConfig) -> int:
    n = cfg.n or 128
    if cfg.surface == "homogeneous":
        f = homogeneous_torus(cfg.b)
    elif cfg.surface == "equivariant12":
        f = equivariant_12_torus(cfg.b)
    else:
        raise UsageError(f"unknown surface {cfg.surface!r}")
    W = willmore_energy(f, n)
    emit(cfg, {"quadrature": "trapezoid (spectral)"},
         {"surface": cfg.surface, "b": float(cfg.b), "n": n, "W": float(W)}, None)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    K = cfg.K or 4
    beta = cfg.beta
    if beta is None:
        if cfg.b == 1.0:
            beta = 0.0
        else:
            from .minimizer import multiplier_estimate_at

            beta = multiplier_estimate_at(homogeneous_torus(cfg.b)).beta
    rows = margin_rows(cfg.b, K, cfg.n, "auto" if cfg.method == "auto" else cfg.method)
    table = [[r.k, r.l, r.pattern, float(r.d2W), float(r.d2Pi1), float(r.d2Pi2),
              float(r.q(cfg.alpha, beta)), float(r.margin(cfg.alpha, beta))] for r in rows]
    emit(cfg, {"fd_h_rel": 0.01} if cfg.b != 1.0 else {"closed_form": True},
         {"b": float(cfg.b), "alpha": float(cfg.alpha), "beta": float(beta), "K": K},
         (["k", "l", "pattern", "d2W", "d2Pi1", "d2Pi2", "Q_alpha_value", "margin"], table))
    return EXIT_OK


def _problem(cfg: RunConfig, **over) -> MinimizationProblem:
    kw = dict(b=cfg.b, K=cfg.K or 6, kind=cfg.kind, alpha=cfg.alpha or 0.0, a_target=cfg.a,
              a_max=cfg.a_max, n=cfg.n, parity=cfg.parity, max_iter=cfg.max_iter)
    kw.update(over)
    return MinimizationProblem(**kw)


def _tolerances(p: MinimizationProblem) -> dict:
    return {"constraint": p.constraint_tol, "stationarity": p.stationarity_tol, "fd_step": p.fd_step,
            "max_iter": p.max_iter}


def cmd_minimize(cfg: RunConfig) -> int:
    p = _problem(cfg)
    r = minimize(p)
    est = multiplier_estimate(r)
    scalars = {
        "b": float(p.b), "K": p.K, "n": p.space().n, "kind": p.kind,
        "W": float(r.W), "objective": float(r.objective), "pi1": float(r.pi[0]), "pi2": float(r.pi[1]),
        "alpha_hat": float(r.alpha_hat), "beta_hat": float(r.beta_hat),
        "fit_alpha": float(est.alpha), "fit_beta": float(est.beta), "fit_residual": float(est.residual),
        "converged": bool(r.converged), "iterations": r.iterations,
        "stationarity": float(r.stationarity), "constraint_violation": float(r.constraint_violation),
    }
    rows = [[lab.k, lab.l, lab.comp, float(v)] for lab, v in zip(r.labels, r.coeffs)]
    emit(cfg, _tolerances(p), scalars, (["k", "l", "component", "value"], rows))
    return EXIT_OK if r.converged else EXIT_NUMERIC


def cmd_omega_table(cfg: RunConfig) -> int:
    p = _problem(cfg, kind="pinned", a_target=0.0)
    t = omega_table(cfg.b, cfg.a_grid, K=p.K, n=cfg.n, parity=cfg.parity, max_iter=cfg.max_iter)
    scalars = {"b": float(cfg.b), "K": p.K}
    converged = sum(r.converged for r in t.rows)
    if converged >= 3:
        rep = concavity_check(t)
        scalars.update(concavity="pass" if rep.passed else "fail",
                       max_positive_second_difference=float(rep.max_positive))
    rows = [[float(r.a), float(r.omega), float(r.alpha_hat), float(r.beta_hat), int(r.converged)] for r in t.rows]
    emit(cfg, _tolerances(p), scalars, (["a", "omega", "alpha_hat", "beta_hat", "converged"], rows))
    return EXIT_OK if converged == len(t.rows) else EXIT_NUMERIC


def cmd_verify(cfg: RunConfig) -> int:
    from .acceptance import run_all

    checks = run_all(cfg.only or None, echo=lambda s: print(s, file=sys.stderr, flush=True))
    doc = {"version": __version__, "passed": all(c.passed for c in checks),
           "criteria": [{"number": c.number, "name": c.name, "passed": c.passed, "detail": c.detail}
                        for c in checks]}
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if doc["passed"] else EXIT_NUMERIC


COMMANDS = {
    "threshold": cmd_threshold,
    "energy": cmd_energy,
    "spectrum": cmd_spectrum,
    "minimize": cmd_minimize,
    "omega-table": cmd_omega_table,
    "verify": cmd_verify,
}


# parsing ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*a, **kw)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cwillmore", description="Constrained Willmore numerics on homogeneous tori.")
    ap.add_argument("--version", action="version", version=f"cwillmore {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, K_help=None):
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1,
                       help="accepted for interface stability; computation is sequential")
        p.add_argument("--config", help="JSON file with RunConfig keys (flags override)")
        p.add_argument("--n", type=int, help="grid size")
        if K_help:
            p.add_argument("--kmax", dest="K", type=int, help=K_help)

    p = sub.add_parser("threshold", help="threshold alpha^b with its kernel modes and margin table")
    common(p, "mode cutoff (default 8)")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto")

    p = sub.add_parser("energy", help="Willmore energy of a homogeneous or equivariant torus")
    common(p)
    p.add_argument("--surface", choices=("homogeneous", "equivariant12"), default="homogeneous")
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("spectrum", help="per-mode second variations and margins at given alpha")
    common(p, "mode cutoff (default 4)")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, help="default: 0 at b=1, multiplier fit otherwise")
    p.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto")

    p = sub.add_parser("minimize", help="one truncated constrained minimization")
    common(p, "mode cutoff (default 6)")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--kind", choices=("pinned", "penalized"), default="pinned")
    p.add_argument("--alpha", type=float, help="penalty weight (penalized)")
    p.add_argument("--a", type=float, default=0.0, help="Pi^1 target (pinned)")
    p.add_argument("--a-max", dest="a_max", type=float, default=0.02, help="Pi^1 upper bound (penalized)")
    p.add_argument("--parity", choices=("none", "even"), default="none")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=500)

    p = sub.add_parser("omega-table", help="minimal energy omega(a, b) over an a grid")
    common(p, "mode cutoff (default 6)")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--a-grid", dest="a_grid", type=parse_range, required=True, help="start:step:count")
    p.add_argument("--parity", choices=("none", "even"), default="none")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=500)

    p = sub.add_parser("verify", help="run the acceptance criteria; JSON pass/fail report")
    p.add_argument("--output")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--only", type=parse_list, default=[], help="comma-separated criterion numbers")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if v is not None}
    threads = d.pop("threads", 1)
    if threads < 1:
        raise UsageError("--threads must be at least 1")
    path = d.pop("config", None)
    base = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            base = json.load(fh)
        if not isinstance(base, dict):
            raise UsageError("--config must hold a JSON object")
    base.update(d)
    return RunConfig.from_mapping(base)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
    except (UsageError, TypeError) as exc:
        print(f"cwillmore: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"cwillmore: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, CWillmoreError, FloatingPointError) as exc:
        print(f"cwillmore: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"cwillmore: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
