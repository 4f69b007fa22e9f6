"""Command-line batch driver: ``matspec <command> --potential file.json ...``.

Exit status: 0 on success, 1 on numerical failure or I/O error, 2 on
invalid input (including unknown commands).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Sequence

import numpy as np

from . import corpus
from ._parallel import pmap, worker_count
from .errors import InvalidInputError, MatspecError
from .invariants import fit_invariants, gh_order, invariant_symbolic, pretty, q_polynomial, trace_integral
from .potential import (
    MatrixPotential,
    j_functional,
    load_potential,
    mollify,
    smooth_bump_profile,
)
from .propagator import CauchyData, checkpoints, symplectic_defect, transfer_matrix, wronskian_drift
from .scattering import find_bound_states, find_jost_zeros, identity_residuals, scattering_data
from .spectral import density, green_matrix, measure_pairing, spectral_measure, tes_bounds
from .tracecheck import herglotz_residual, lieb_thirring, t11_report, trace_identity

COMMANDS = ("scatter", "density", "bound-states", "green", "invariants", "trace-check",
            "lieb-thirring", "converge", "report")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    potential: str | None
    grid: np.ndarray | None = None
    orders: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    s_values: list = field(default_factory=list)
    window: tuple | None = None
    eps: float = 0.1
    p: int = 1
    x: list = field(default_factory=list)
    xi: list = field(default_factory=list)
    out: str | None = None
    fmt: str = "csv"
    workers: int = 1


def parse_grid(spec: str, kind: str = "geometric") -> np.ndarray:
    """'start:stop:count' (geometric or linear spacing) or a single value."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInputError(f"lambda grid must look like start:stop:count, got {spec!r}") from None
    if count < 2:
        raise InvalidInputError("lambda grid needs count >= 2")
    if kind == "geometric":
        if start <= 0 or stop <= 0:
            raise InvalidInputError("geometric grids need positive endpoints")
        return np.geomspace(start, stop, count)
    if kind == "linear":
        return np.linspace(start, stop, count)
    raise InvalidInputError(f"unknown grid kind {kind!r}")


def _float_list(text: str | None, what: str) -> list:
    if text is None:
        return []
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InvalidInputError(f"{what} must be a comma-separated list of numbers") from None


def _int_list(text: str | None, what: str) -> list:
    vals = _float_list(text, what)
    if any(v != int(v) or v < 0 for v in vals):
        raise InvalidInputError(f"{what} must be non-negative integers")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matspec", description="Matrix Schrodinger spectral toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--potential", help="potential description file (JSON)")
    ap.add_argument("--lambda", dest="lam", help="start:stop:count or a single value")
    ap.add_argument("--grid", choices=("geometric", "linear"), default="geometric")
    ap.add_argument("--m", help="comma-separated orders")
    ap.add_argument("--p", type=int, default=1, help="J_p order for converge")
    ap.add_argument("--s", help="comma-separated cutoffs for converge")
    ap.add_argument("--window", help="a,b pairing window")
    ap.add_argument("--eps", type=float, default=0.1, help="mollifier width")
    ap.add_argument("--gamma", help="comma-separated Lieb-Thirring exponents")
    ap.add_argument("--x", help="comma-separated x values for green")
    ap.add_argument("--xi", help="comma-separated xi values for green")
    ap.add_argument("--out", help="output path (stdout if omitted)")
    ap.add_argument("--format", choices=("csv", "json"), help="default: from --out suffix, else csv")
    ap.add_argument("--workers", type=int, help="worker processes (default MATSPEC_WORKERS or 1)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fmt = ns.format or ("json" if ns.out and ns.out.lower().endswith(".json") else "csv")
    cfg = RunConfig(ns.command, ns.potential, out=ns.out, fmt=fmt, workers=worker_count(ns.workers),
                    eps=ns.eps, p=ns.p)
    if ns.lam is not None:
        cfg.grid = parse_grid(ns.lam, ns.grid)
    cfg.orders = _int_list(ns.m, "--m")
    cfg.gammas = _float_list(ns.gamma, "--gamma")
    cfg.s_values = _float_list(ns.s, "--s")
    cfg.x = _float_list(ns.x, "--x")
    cfg.xi = _float_list(ns.xi, "--xi")
    if ns.window is not None:
        w = _float_list(ns.window, "--window")
        if len(w) != 2 or not 0 < w[0] < w[1]:
            raise InvalidInputError("--window needs a,b with 0 < a < b")
        cfg.window = (w[0], w[1])
    if cfg.potential is None:
        raise InvalidInputError("--potential is required")
    if cfg.command in ("density", "scatter") and cfg.grid is None:
        raise InvalidInputError(f"{cfg.command} needs --lambda start:stop:count")
    if cfg.command in ("density", "scatter") and np.any(cfg.grid <= 0):
        raise InvalidInputError("the lambda grid must be positive for this command")
    if cfg.command in ("density", "scatter") and len(cfg.grid) < 2:
        raise InvalidInputError("the lambda grid needs count >= 2")
    return cfg


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def render_report(rows: Sequence[dict], fmt: str, columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    cols = list(columns) if columns is not None else (list(rows[0]) if rows else [])
    for r in rows:
        if list(r) != cols:
            raise InvalidInputError("report rows must share the same keys in the same order")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if cols:
            w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{k: _json_value(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    raise InvalidInputError(f"unknown report format {fmt!r}")


def write_report(rows: Sequence[dict], fmt: str, path, columns: Sequence[str] | None = None) -> None:
    """CSV (header, %.17g numbers, LF) or JSON (array of flat objects)."""
    text = render_report(rows, fmt, columns)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _scatter_row(p: MatrixPotential, lam: float) -> dict:
    sd = scattering_data(p, lam)
    r = identity_residuals(sd)
    return {
        "lambda": lam, "detS_re": sd.detS.real, "detS_im": sd.detS.imag, "abs_detS": abs(sd.detS),
        "energy": r.energy, "pseudo": r.pseudo, "conj": r.conj, "half": r.half, "eigmin": r.eigmin,
        "chain_P_le_S": r.norm_chain[0], "chain_S_le_detS": r.norm_chain[1],
        "chain_squared": r.norm_chain_squared,
    }


def _density_columns(n: int) -> list:
    return (["lambda"] + [f"h_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
            + [f"eig_{k + 1}" for k in range(n)])


def _density_row(p: MatrixPotential, lam: float) -> dict:
    h = density(p, lam)
    row = {"lambda": lam}
    n = p.n
    for i in range(n):
        for j in range(n):
            row[f"h_{i + 1}{j + 1}"] = h[i, j].real
    for k, e in enumerate(np.linalg.eigvalsh(h)):
        row[f"eig_{k + 1}"] = float(e)
    return row


def cmd_scatter(p, cfg):
    cols = ["lambda", "detS_re", "detS_im", "abs_detS", "energy", "pseudo", "conj", "half", "eigmin",
            "chain_P_le_S", "chain_S_le_detS", "chain_squared"]
    return pmap(partial(_scatter_row, p), cfg.grid, cfg.workers), cols


def cmd_density(p, cfg):
    return pmap(partial(_density_row, p), cfg.grid, cfg.workers), _density_columns(p.n)


def cmd_bound_states(p, cfg):
    rows = []
    jz = find_jost_zeros(p)
    for b in find_bound_states(p):
        rows.append({"kind": "eigenvalue", "lambda": b.lam, "multiplicity": b.multiplicity})
    for b in jz:
        rows.append({"kind": "detS_zero", "lambda": b.lam, "multiplicity": b.multiplicity})
    return rows, ["kind", "lambda", "multiplicity"]


def cmd_green(p, cfg):
    if cfg.grid is None or not cfg.x or not cfg.xi:
        raise InvalidInputError("green needs --lambda, --x and --xi")
    n = p.n
    cols = ["lambda", "x", "xi"] + [f"G_{i + 1}{j + 1}_{part}" for i in range(n) for j in range(n)
                                    for part in ("re", "im")]
    rows = []
    for lam in cfg.grid:
        for x in cfg.x:
            for xi in cfg.xi:
                G = green_matrix(p, lam, x, xi)
                row = {"lambda": lam, "x": x, "xi": xi}
                for i in range(n):
                    for j in range(n):
                        row[f"G_{i + 1}{j + 1}_re"] = G[i, j].real
                        row[f"G_{i + 1}{j + 1}_im"] = G[i, j].imag
                rows.append(row)
    return rows, cols


def cmd_invariants(p, cfg):
    orders = cfg.orders or [0, 1, 2]
    fit = fit_invariants(p) if not p.is_zero() else None
    rows = []
    for m in orders:
        q = q_polynomial(2 * m + 1, "riccati")
        rows.append({
            "m": m,
            "Q": pretty(q),
            "gh_order": gh_order(q),
            "trace_Q": trace_integral(q, p, 1e-11),
            "I_symbolic": invariant_symbolic(p, m),
            "I_fit": float(fit.coefficients[m]) if fit is not None and m < len(fit.coefficients) else 0.0,
            "J_m": j_functional(p, m),
        })
    return rows, ["m", "Q", "gh_order", "trace_Q", "I_symbolic", "I_fit", "J_m"]


TRACE_COLUMNS = ["m", "lhs", "rhs", "I_m", "eigen_sum", "relative_error", "cutoff", "tail_estimate",
                 "nodes", "converged", "rhs_jost", "eigen_sum_jost", "relative_error_jost"]


def cmd_trace_check(p, cfg):
    orders = cfg.orders or [0, 1, 2]
    reports = pmap(partial(trace_identity, p), orders, cfg.workers)
    return [r.to_row() for r in reports], TRACE_COLUMNS


def cmd_lieb_thirring(p, cfg):
    gammas = cfg.gammas or [0.5, 1.0, 1.5]
    rows = []
    for g in gammas:
        r = lieb_thirring(p, g)
        rows.append({"gamma": g, "moment_sum": r.moment_sum, "bound": r.bound, "pass": r.passed,
                     "empirical_constant": r.empirical_constant})
    return rows, ["gamma", "moment_sum", "bound", "pass", "empirical_constant"]


def window_bump(window):
    """Smooth test function supported on the pairing window."""
    a, b = window
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return lambda lam: float(smooth_bump_profile(np.array([(lam - mid) / half]))[0])


@dataclass
class ConvergenceStep:
    s: float
    eps: float
    J_diff: float
    pairing: np.ndarray
    cauchy_defect: float
    int_log_hinv: float


def convergence_sequence(v: MatrixPotential, s_values, window=(1.0, 2.0), eps: float = 0.1,
                         p: int = 1, grid_points: int = 401, workers: int = 1) -> list[ConvergenceStep]:
    """Mollify at each cutoff, pair the densities with a bump on the window."""
    f = window_bump(window)
    a, b = window
    grid = np.linspace(a, b, grid_points)
    xg, wg = np.polynomial.legendre.leggauss(41)
    lam_q = 0.5 * (b - a) * xg + 0.5 * (a + b)
    w_q = 0.5 * (b - a) * wg
    out = []
    prev = None
    for s in s_values:
        vs = mollify(v, s, eps)
        jd = j_functional(v - vs, p)
        m = spectral_measure(vs, grid, workers=workers, with_atoms=False)
        pair = measure_pairing(m, f, window)
        defect = float(np.linalg.norm(pair - prev, 2)) if prev is not None else math.nan
        hq = [density(vs, l) for l in lam_q]
        il = float(sum(w * math.log(np.linalg.norm(np.linalg.inv(h), 2)) for w, h in zip(w_q, hq)))
        out.append(ConvergenceStep(s, eps, jd, pair, defect, il))
        prev = pair
    return out


def cmd_converge(p, cfg):
    s_values = cfg.s_values or [10.0, 20.0, 40.0]
    window = cfg.window or (1.0, 2.0)
    steps = convergence_sequence(p, s_values, window, cfg.eps, cfg.p, workers=cfg.workers)
    rows = []
    n = p.n
    for st in steps:
        row = {"s": st.s, "eps": st.eps, "J_diff": st.J_diff}
        for i in range(n):
            for j in range(n):
                row[f"pair_{i + 1}{j + 1}"] = st.pairing[i, j].real
        row["cauchy_defect"] = st.cauchy_defect
        row["int_log_hinv"] = st.int_log_hinv
        rows.append(row)
    cols = (["s", "eps", "J_diff"] + [f"pair_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
            + ["cauchy_defect", "int_log_hinv"])
    return rows, cols


def _check(rows, name, value, threshold, passed):
    rows.append({"check": name, "value": float(value), "threshold": float(threshold), "pass": bool(passed)})


def cmd_report(p, cfg):
    """Run every audit that applies to the potential and record pass/fail."""
    rows: list = []
    lams = cfg.grid if cfg.grid is not None else np.geomspace(0.1, 50.0, 12)
    lams = [l for l in lams if l > 0]
    xe = float(math.ceil(max(p.support_end, 1.0))) if p.compact else 2.0
    n = p.n
    worst = 0.0
    for lam in (-10.0, -1.0, 0.5, 5.0, 50.0):
        for x in range(1, int(xe) + 1):
            d = symplectic_defect(transfer_matrix(p, lam, x, rtol=1e-13))
            worst = max(worst, d / ((1 + x) * (1 + abs(lam))))
    _check(rows, "symplectic_defect_scaled", worst, 1e-9, worst <= 1e-9)
    drift = 0.0
    for lam in (-10.0, -1.0, 0.5, 5.0, 50.0):
        a = CauchyData(np.eye(n, dtype=complex), np.zeros((n, n), complex), 0.0, complex(lam))
        b = CauchyData(np.zeros((n, n), complex), np.eye(n, dtype=complex), 0.0, complex(lam))
        drift = max(drift, wronskian_drift([a] + checkpoints(p, lam, a, xe, rtol=1e-13),
                                           [b] + checkpoints(p, lam, b, xe, rtol=1e-13)))
    _check(rows, "wronskian_drift", drift, 1e-9, drift <= 1e-9)
    if not p.compact:
        return rows, ["check", "value", "threshold", "pass"]
    res = [identity_residuals(scattering_data(p, l)) for l in lams]
    mr = max(r.max_residual() for r in res)
    _check(rows, "scattering_identities", mr, 1e-7, mr <= 1e-7)
    em = min(r.eigmin for r in res)
    _check(rows, "eigenvalues_of_S_outside_unit_disc", em, -1e-7, em >= -1e-7)
    _check(rows, "norm_chain_1_plus_P_le_S", sum(not r.norm_chain[0] for r in res), 0,
           all(r.norm_chain[0] for r in res))
    _check(rows, "norm_chain_S_le_detS", sum(not r.norm_chain[1] for r in res), 0,
           all(r.norm_chain[1] for r in res))
    _check(rows, "norm_chain_squared", sum(not r.norm_chain_squared for r in res), 0,
           all(r.norm_chain_squared for r in res))
    tb = [tes_bounds(p, l) for l in lams]
    low = min(t.normNinv for t in tb)
    _check(rows, "tes_lower_quarter", low, 0.25, all(t.lower_ok for t in tb))
    _check(rows, "tes_upper_chain", sum(not t.upper_ok for t in tb), 0, all(t.upper_ok for t in tb))
    for g in (0.5, 1.0, 1.5):
        lt = lieb_thirring(p, g)
        _check(rows, f"lieb_thirring_gamma_{g:g}", lt.moment_sum, lt.bound, lt.passed)
    if p.max_derivative >= 6 and not p.is_zero():
        for m in (0, 1, 2):
            tr = trace_identity(p, m)
            _check(rows, f"trace_identity_m{m}_eigenvalues", tr.relative_error, 1e-3, tr.relative_error <= 1e-3)
            _check(rows, f"trace_identity_m{m}_detS_zeros", tr.relative_error_jost, 1e-3,
                   tr.relative_error_jost <= 1e-3)
        for z in (1 + 1j, 3j, 2 + 0.5j):
            hr = herglotz_residual(p, z, "jost")
            _check(rows, f"herglotz_{z}", hr.residual, 1e-4, hr.residual <= 1e-4)
    return rows, ["check", "value", "threshold", "pass"]


HANDLERS = {
    "scatter": cmd_scatter,
    "density": cmd_density,
    "bound-states": cmd_bound_states,
    "green": cmd_green,
    "invariants": cmd_invariants,
    "trace-check": cmd_trace_check,
    "lieb-thirring": cmd_lieb_thirring,
    "converge": cmd_converge,
    "report": cmd_report,
}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        p = load_potential(cfg.potential)
        rows, cols = HANDLERS[cfg.command](p, cfg)
    except InvalidInputError as exc:
        print(f"matspec: invalid input: {exc}", file=sys.stderr)
        return 2
    except MatspecError as exc:
        print(f"matspec: numerical failure: {exc}", file=sys.stderr)
        return 1
    try:
        write_report(rows, cfg.fmt, cfg.out, cols)
    except OSError as exc:
        print(f"matspec: cannot write report: {exc}", file=sys.stderr)
        return 1
    if cfg.command == "report" and not all(r["pass"] for r in rows):
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        cfg = config_from_args(ns)
    except InvalidInputError as exc:
        print(f"matspec: invalid input: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
