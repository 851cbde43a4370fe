"""Command-line front end.

Subcommands: ``eval``, ``verify``, ``expand``, ``green``, ``schramm`` and
``study``. Every run produces a report that is written as JSON (schema
``dfint/1``) or CSV. Complex numbers are given on the command line as ``a+bi``;
in JSON they are ``{"re": .., "im": ..}`` objects and in CSV paired
``_re``/``_im`` columns. Failed evaluations are recorded per row as
``"failed: <kind>"``; the exit status is 0 only when nothing failed and every
requested threshold passed.

``DFINT_RELTOL`` overrides the default relative tolerance of 1e-10.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import os
import random
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .asym import AUX_KINDS, IDENTITIES, eval_aux, expand_F, identity_sides, predicted_order
from .contour import QuadratureConfig
from .dfcore import eval_F, eval_F_tilde, eval_G, eval_G_tilde, eval_H
from .errors import DfintError, UsageError
from . import sle

SCHEMA = "dfint/1"
DEFAULT_REL_TOL = 1e-10

_COMPLEX_RE = re.compile(r"^[+-]?(\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)?"
                         r"([+-](\d+\.?\d*([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)?)?[ij]?$")


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style literals (``i`` or ``j``; either part optional)."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX_RE.match(s):
        raise UsageError(f"not a complex literal: {text!r}")
    if s[-1] in "ij":
        body = s[:-1]
        if body == "" or body[-1] in "+-":
            body += "1"
        s = body + "j"
    try:
        return complex(s)
    except ValueError as exc:
        raise UsageError(f"not a complex literal: {text!r}") from exc


def config_from_env(rel_tol: Optional[float] = None) -> (QuadratureConfig, str):
    if rel_tol is not None:
        return QuadratureConfig(rel_tol=rel_tol), "flag"
    env = os.environ.get("DFINT_RELTOL")
    if env:
        try:
            return QuadratureConfig(rel_tol=float(env)), "env"
        except ValueError as exc:
            raise UsageError(f"DFINT_RELTOL={env!r} is not a positive number") from exc
    return QuadratureConfig(rel_tol=DEFAULT_REL_TOL), "default"


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def _failed(exc: BaseException) -> str:
    kind = getattr(exc, "kind", None) or type(exc).__name__
    return f"failed: {kind}"


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "failed: NonFinite"
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class RunReport:
    command: str
    inputs: Dict
    tolerance: Dict
    rows: List[Dict] = field(default_factory=list)
    summary: List[Dict] = field(default_factory=list)
    timing: List[float] = field(default_factory=list)
    failures: int = 0
    threshold_failures: int = 0

    def add_row(self, row: Dict, seconds: float = 0.0):
        if any(isinstance(v, str) and v.startswith("failed:") for v in row.values()):
            self.failures += 1
        if row.get("passed") is False:
            self.threshold_failures += 1
        self.rows.append(row)
        self.timing.append(seconds)

    def add_summary(self, entry: Dict):
        if entry.get("passed") is False:
            self.threshold_failures += 1
        self.summary.append(entry)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and self.threshold_failures == 0

    def payload(self, with_timing: bool = True) -> Dict:
        out = {
            "schema": SCHEMA,
            "version": __version__,
            "command": self.command,
            "inputs": _jsonable(self.inputs),
            "tolerance": _jsonable(self.tolerance),
            "rows": _jsonable(self.rows),
            "summary": _jsonable(self.summary),
            "status": {"ok": self.ok, "failures": self.failures,
                       "threshold_failures": self.threshold_failures},
        }
        if with_timing:
            out["timing"] = {"per_row_s": list(self.timing), "total_s": float(sum(self.timing))}
        return out

    def to_json(self, with_timing: bool = True) -> str:
        return json.dumps(self.payload(with_timing), indent=2, sort_keys=False) + "\n"

    def table(self) -> List[Dict]:
        """Rows and summary entries flattened to scalar columns."""
        out = []
        for section, entries in (("row", self.rows), ("summary", self.summary)):
            for i, e in enumerate(entries):
                flat = {"section": section, "index": i}
                for k, v in e.items():
                    if isinstance(v, (complex, np.complexfloating)):
                        flat[k + "_re"] = complex(v).real
                        flat[k + "_im"] = complex(v).imag
                    elif isinstance(v, (list, tuple)):
                        flat[k] = ";".join(_fmt(x) for x in v)
                    else:
                        flat[k] = v
                out.append(flat)
        return out

    def to_csv(self) -> str:
        table = self.table()
        cols: List[str] = []
        for r in table:
            for k in r:
                if k not in cols:
                    cols.append(k)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in table:
            w.writerow([_fmt(r.get(c, "")) for c in cols])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else "failed: NonFinite"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _timed(report: RunReport, fn: Callable[[], Dict], base: Dict):
    t = time.perf_counter()
    row = dict(base)
    try:
        row.update(fn())
    except UsageError:
        raise
    except (DfintError, ArithmeticError, ValueError) as exc:
        row["value"] = _failed(exc)
    report.add_row(row, time.perf_counter() - t)
    return row


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

STUDY_SETUPS = {
    # theorem: (t0, default direction, scaling of the expansion quantities)
    "1": (1e-2, cmath.exp(0.75j * math.pi), {"w2-1": 1.0}),
    "2": (0.02, cmath.exp(-0.75j * math.pi), {"w1": 1.0}),
    "3": (0.05, cmath.exp(-2.5j), {"w1": 1.0, "w2": 1.0}),
    "4": (0.1, cmath.exp(-2.0j), {"w1": 1.0, "w2-1": 1.0}),
}


def study_points(theorem: str, t: float, direction: complex, w_fixed: complex, ratio: float):
    if theorem == "1":
        return w_fixed, 1 + t * direction
    if theorem == "2":
        return t * direction, w_fixed
    if theorem == "3":
        w2 = t * direction
        return ratio * w2, w2
    return t * direction, 1 + t * direction.conjugate()


def study_convergence(theorem, q, direction: Optional[complex] = None,
                      K_list: Sequence[int] = (0, 1, 2), shrink_steps: int = 3, *,
                      t0: Optional[float] = None, w_fixed: Optional[complex] = None,
                      ratio: float = 0.1, slope_tol: float = 0.2,
                      cfg: Optional[QuadratureConfig] = None) -> RunReport:
    """Fit log-error against log-scale for truncated expansions of ``F``.

    The small quantity shrinks dyadically ``shrink_steps`` times from ``t0``
    along ``direction``: theorem 1 moves ``w2 = 1 + t dir`` (``w1`` fixed),
    theorem 2 moves ``w1 = t dir`` (``w2`` fixed), theorem 3 moves
    ``w2 = t dir`` with ``w1 = ratio * w2``, theorem 4 moves
    ``w1 = t dir`` and ``w2 = 1 + t conj(dir)``.
    """
    theorem = str(theorem)
    if theorem not in STUDY_SETUPS:
        raise UsageError(f"theorem must be one of 1, 2, 3, 4; got {theorem!r}")
    if shrink_steps < 1:
        raise UsageError("shrink_steps must be at least 1")
    if cfg is None:
        cfg, src = config_from_env()
    else:
        src = "argument"
    t_start, dir0, scaling = STUDY_SETUPS[theorem]
    t0 = t_start if t0 is None else t0
    direction = dir0 if direction is None else direction / abs(direction)
    if w_fixed is None:
        w_fixed = -1 - 1j if theorem == "1" else -2 + 1j
    report = RunReport("study", {"theorem": theorem, "q": list(q), "direction": direction,
                                 "K": list(K_list), "shrink_steps": shrink_steps, "t0": t0,
                                 "w_fixed": w_fixed, "ratio": ratio},
                       {"rel_tol": cfg.rel_tol, "source": src, "slope_tol": slope_tol})
    ts = [t0 / 2 ** j for j in range(shrink_steps + 1)]
    exact, cost = {}, {}
    for j, t in enumerate(ts):
        w1, w2 = study_points(theorem, t, direction, w_fixed, ratio)
        tic = time.perf_counter()
        try:
            exact[j] = eval_F(q, (w1, w2), cfg=cfg)
        except (DfintError, ArithmeticError, ValueError) as exc:
            exact[j] = exc
        cost[j] = time.perf_counter() - tic
    frozen = w_fixed if theorem in ("1", "2") else None
    for n, K in enumerate(K_list):
        logs = []
        for j, t in enumerate(ts):
            w1, w2 = study_points(theorem, t, direction, w_fixed, ratio)
            row = {"K": K, "t": t, "w1": w1, "w2": w2}
            tic = time.perf_counter()
            if isinstance(exact[j], BaseException):
                row["error"] = _failed(exact[j])
            else:
                try:
                    approx = expand_F(theorem, q, (w1, w2), K)
                    err = abs(exact[j] - approx)
                    row.update({"F": exact[j], "expansion": approx, "error": err})
                    logs.append((math.log(t), math.log(err)))
                except (DfintError, ArithmeticError, ValueError) as exc:
                    row["error"] = _failed(exc)
            report.add_row(row, time.perf_counter() - tic + (cost[j] if n == 0 else 0.0))
        pred = predicted_order(theorem, q, K, scaling, frozen=frozen)
        entry = {"K": K, "predicted_slope": pred}
        if len(logs) == len(ts):
            x, y = np.array(logs).T
            slope = float(np.polyfit(x, y, 1)[0])
            entry.update({"fitted_slope": slope, "deviation": abs(slope - pred),
                          "passed": abs(slope - pred) <= slope_tol})
        else:
            entry.update({"fitted_slope": "failed: MissingPoints", "passed": False})
        report.add_summary(entry)
    return report


# ---------------------------------------------------------------------------
# random feasible points for the identity sweeps
# ---------------------------------------------------------------------------


def _polar(rng, rmin, rmax, phis):
    lo, hi = phis[rng.randrange(len(phis))]
    return rng.uniform(rmin, rmax) * cmath.exp(1j * rng.uniform(lo, hi))


_UP, _DOWN = (0.3, math.pi - 0.3), (-math.pi + 0.3, -0.3)


def sample_identity_point(which: str, rng: random.Random):
    """Candidate point of the region an identity is meant for."""
    if which == "FP":
        return _polar(rng, 0.8, 2.0, [_UP, _DOWN]), 1 + _polar(rng, 0.2, 0.5, [_UP, _DOWN])
    if which == "FQ":
        return _polar(rng, 0.1, 0.4, [_UP, _DOWN]), _polar(rng, 1.5, 3.0, [_UP, _DOWN])
    if which == "FRQ":
        w2 = _polar(rng, 0.15, 0.4, [_UP, _DOWN])
        return w2 * _polar(rng, 0.05, 0.3, [(-0.3, 0.3)]), w2
    if which == "FSQ":
        return _polar(rng, 0.1, 0.3, [_UP, _DOWN]), 1 + _polar(rng, 0.15, 0.35, [_UP, _DOWN])
    raise UsageError(f"unknown identity {which!r}")


def feasible_identity_points(which: str, q, n: int, seed: int, cfg: QuadratureConfig,
                             max_tries: int = 50):
    """``n`` sampled points with both sides evaluated; infeasible draws are skipped."""
    rng = random.Random(f"{which}:{seed}")
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries * n:
            raise UsageError(f"could not find {n} feasible points for {which}")
        w1, w2 = sample_identity_point(which, rng)
        try:
            lhs, rhs = identity_sides(which, q, (w1, w2), cfg)
        except DfintError:
            continue
        out.append((w1, w2, lhs, rhs))
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _q(ns):
    return (ns.a, ns.b, ns.c, ns.d)


def _cmd_eval(ns, cfg, src):
    tgt = ns.target
    rep = RunReport("eval", {"target": tgt, **_echo(ns)}, {"rel_tol": cfg.rel_tol, "source": src})
    methods = ["closed", "quadrature"] if ns.method == "both" else [ns.method]
    vals = {}
    for m in methods:
        def f(m=m):
            if tgt == "H":
                v = eval_H(ns.a, ns.d, m, cfg=cfg)
            elif tgt in ("G", "Gtilde"):
                fn = eval_G if tgt == "G" else eval_G_tilde
                v = fn(ns.a, ns.c, ns.d, _need(ns.w, "--w"), m, cfg=cfg)
            elif tgt in ("F", "Ftilde"):
                if m != "quadrature":
                    raise UsageError(f"{tgt} has only the quadrature backend")
                fn = eval_F if tgt == "F" else eval_F_tilde
                v = fn(_q(ns), (_need(ns.w1, "--w1"), _need(ns.w2, "--w2")), cfg=cfg)
            else:
                if m != "quadrature":
                    raise UsageError(f"{tgt} has only the quadrature backend")
                v = eval_aux(tgt, _q(ns), (_need(ns.w1, "--w1"), _need(ns.w2, "--w2")), cfg)
            vals[m] = v
            return {"value": v}
        _timed(rep, f, {"method": m})
    if len(vals) == 2:
        a, b = vals["closed"], vals["quadrature"]
        rd = abs(a - b) / max(abs(a), 1e-300)
        rep.add_summary({"quantity": "relative_difference", "value": rd,
                         "threshold": ns.threshold, "passed": rd <= ns.threshold})
    return rep


def _need(v, flag):
    if v is None:
        raise UsageError(f"{flag} is required for this target")
    return v


def _cmd_verify(ns, cfg, src):
    rep = RunReport("verify", {"identity": ns.identity, **_echo(ns)},
                    {"rel_tol": cfg.rel_tol, "source": src, "threshold": ns.threshold})
    q = _q(ns)
    if ns.random:
        pts = feasible_identity_points(ns.identity, q, ns.random, ns.seed, cfg)
        for i, (w1, w2, lhs, rhs) in enumerate(pts):
            res = abs(lhs - rhs) / (abs(lhs) + abs(rhs))
            rep.add_row({"point": i, "w1": w1, "w2": w2, "lhs": lhs, "rhs": rhs,
                         "residual": res, "passed": res < ns.threshold})
    else:
        def f():
            lhs, rhs = identity_sides(ns.identity, q, (_need(ns.w1, "--w1"), _need(ns.w2, "--w2")), cfg)
            res = abs(lhs - rhs) / (abs(lhs) + abs(rhs))
            return {"lhs": lhs, "rhs": rhs, "residual": res, "passed": res < ns.threshold}
        _timed(rep, f, {"point": 0, "w1": ns.w1, "w2": ns.w2})
    if rep.rows:
        res = [r["residual"] for r in rep.rows if isinstance(r.get("residual"), float)]
        if res:
            rep.add_summary({"quantity": "max_residual", "value": max(res),
                             "passed": max(res) < ns.threshold})
    return rep


def _cmd_expand(ns, cfg, src):
    rep = RunReport("expand", {"theorem": ns.theorem, **_echo(ns)},
                    {"rel_tol": cfg.rel_tol, "source": src})
    w1, w2 = _need(ns.w1, "--w1"), _need(ns.w2, "--w2")
    for K in ns.K:
        def f(K=K):
            approx = expand_F(ns.theorem, _q(ns), (w1, w2), K)
            exact = eval_F(_q(ns), (w1, w2), cfg=cfg)
            return {"expansion": approx, "F": exact, "abs_error": abs(exact - approx),
                    "rel_error": abs(exact - approx) / abs(exact)}
        _timed(rep, f, {"K": K})
    return rep


def _green_grid_thetas(n):
    out = []
    for j in range(n):
        t2 = math.pi * (j + 1) / (n + 1)
        if abs(t2 - math.pi / 2) < sle.HALF_PI_BAND:
            t2 = math.pi / 2 + 2 * sle.HALF_PI_BAND
        for i in range(n):
            out.append((t2 * (i + 1) / (n + 1), t2))
    return out


def _cmd_green(ns, cfg, src):
    rep = RunReport("green", {"mode": ns.mode, **_echo(ns)}, {"rel_tol": cfg.rel_tol, "source": src})
    a = ns.alpha
    if ns.mode == "h":
        _timed(rep, lambda: {"value": sle.green_h(sle.GreenInput(a, ns.theta1, ns.theta2), cfg=cfg)},
               {"theta1": ns.theta1, "theta2": ns.theta2})
    elif ns.mode == "hf":
        _timed(rep, lambda: {"value": sle.green_hf(ns.theta, a, cfg=cfg)}, {"theta": ns.theta})
    elif ns.mode == "imx":
        def f():
            X = sle.green_X(ns.theta1, ns.theta2, a, cfg)
            return {"X": X, "ratio": abs(X.imag) / abs(X), "passed": abs(X.imag) <= 1e-7 * abs(X)}
        _timed(rep, f, {"theta1": ns.theta1, "theta2": ns.theta2})
    elif ns.mode == "function":
        _timed(rep, lambda: {"value": sle.green_function(a, _need(ns.z, "--z"), ns.xi1, ns.xi2, cfg)},
               {"z": ns.z, "xi1": ns.xi1, "xi2": ns.xi2})
    else:
        hs = []
        for t1, t2 in _green_grid_thetas(ns.n):
            row = _timed(rep, lambda t1=t1, t2=t2: {"value": sle.green_h(sle.GreenInput(a, t1, t2), cfg=cfg)},
                         {"theta1": t1, "theta2": t2})
            if isinstance(row.get("value"), float):
                hs.append(row["value"])
        if hs:
            rep.add_summary({"quantity": "min_h", "value": min(hs), "passed": min(hs) >= -1e-9})
        eps = 1e-3
        for t1 in (0.5, 1.0, 1.5, 2.5):
            try:
                dev = abs(sle.green_h(sle.GreenInput(a, t1, math.pi - eps), cfg=cfg) - math.sin(t1) ** (a - 1))
                rep.add_summary({"quantity": "top_edge", "theta1": t1, "eps": eps, "value": dev,
                                 "passed": dev < 1e-2})
            except DfintError as exc:
                rep.add_summary({"quantity": "top_edge", "theta1": t1, "value": _failed(exc), "passed": False})
        eps = 1e-4
        for th in (0.8, 1.6, 2.4):
            try:
                dev = abs(sle.green_h(sle.GreenInput(a, th, th + eps), cfg=cfg) - sle.green_hf(th, a, cfg=cfg))
                rep.add_summary({"quantity": "diagonal", "theta": th, "eps": eps, "value": dev,
                                 "passed": dev < 1e-3})
            except DfintError as exc:
                rep.add_summary({"quantity": "diagonal", "theta": th, "value": _failed(exc), "passed": False})
    return rep


def _cmd_schramm(ns, cfg, src):
    rep = RunReport("schramm", {"mode": ns.mode, **_echo(ns)}, {"rel_tol": cfg.rel_tol, "source": src})
    a, xi = ns.alpha, ns.xi
    if ns.mode == "J":
        if ns.x is not None:
            _timed(rep, lambda: {"value": sle.eval_J((a, xi), x=ns.x, cfg=cfg)}, {"x": ns.x})
        else:
            z = _need(ns.z, "--z")
            _timed(rep, lambda: {"value": sle.eval_J(sle.SchrammInput(a, z, xi), cfg=cfg),
                                 "re_J_real_form": sle.eval_reJ(sle.SchrammInput(a, z, xi), cfg)}, {"z": z})
    elif ns.mode == "M":
        z = _need(ns.z, "--z")
        _timed(rep, lambda: {"value": sle.eval_M(sle.SchrammInput(a, z, xi), cfg)}, {"z": z})
    elif ns.mode == "P":
        z = _need(ns.z, "--z")
        _timed(rep, lambda: {"value": sle.schramm_P(sle.SchrammInput(a, z, xi), ns.route, cfg)},
               {"z": z, "route": ns.route})
    elif ns.mode == "calpha":
        _timed(rep, lambda: {"value": sle.c_alpha(a, "closed")}, {"method": "closed"})
        for r in ns.r:
            _timed(rep, lambda r=r: {"value": sle.c_alpha(a, "semicircle", r, xi, cfg)},
                   {"method": "semicircle", "r": r})
    else:
        ps = []
        for i in range(ns.n):
            for j in range(ns.n):
                z = complex(-3 + 6 * (i + 0.5) / ns.n, 0.05 + 3 * j / ns.n)
                row = _timed(rep, lambda z=z: {"value": sle.schramm_P(sle.SchrammInput(a, z, xi),
                                                                      cfg=cfg, rel_tol=1e-7)}, {"z": z})
                if isinstance(row.get("value"), float):
                    ps.append(row["value"])
        if ps:
            rep.add_summary({"quantity": "range", "min": min(ps), "max": max(ps),
                             "passed": min(ps) >= -1e-3 and max(ps) <= 1 + 1e-3})
    return rep


def _cmd_study(ns, cfg, src):
    rep = study_convergence(ns.theorem, _q(ns), ns.direction, ns.K, ns.shrink_steps,
                            t0=ns.t0, w_fixed=ns.w_fixed, ratio=ns.ratio, slope_tol=ns.slope_tol,
                            cfg=cfg)
    rep.tolerance["source"] = src
    return rep


def _echo(ns) -> Dict:
    skip = {"func", "format", "output", "no_timing", "rel_tol", "command", "target", "identity", "mode"}
    return {k: v for k, v in sorted(vars(ns).items()) if k not in skip and v is not None}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _cx(text):
    try:
        return parse_complex(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_quad(p, required=False):
    for name in ("a", "b", "c", "d"):
        p.add_argument(f"--{name}", type=float, required=required)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfint", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"dfint {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default="-", help="file path or - for standard output")
    common.add_argument("--rel-tol", type=float, default=None, help="overrides DFINT_RELTOL")
    common.add_argument("--no-timing", action="store_true", help="omit wall times from JSON")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate one integral")
    e.add_argument("target", choices=("H", "G", "Gtilde", "F", "Ftilde") + AUX_KINDS)
    _add_quad(e)
    e.add_argument("--w", type=_cx)
    e.add_argument("--w1", type=_cx)
    e.add_argument("--w2", type=_cx)
    e.add_argument("--method", choices=("closed", "quadrature", "both"), default="closed")
    e.add_argument("--threshold", type=float, default=1e-8)
    e.set_defaults(func=_cmd_eval)

    v = sub.add_parser("verify", parents=[common], help="residual of a decomposition identity")
    v.add_argument("identity", choices=IDENTITIES)
    _add_quad(v, required=True)
    v.add_argument("--w1", type=_cx)
    v.add_argument("--w2", type=_cx)
    v.add_argument("--random", type=int, default=0, help="number of random feasible points")
    v.add_argument("--threshold", type=float, default=1e-6)
    v.set_defaults(func=_cmd_verify)

    x = sub.add_parser("expand", parents=[common], help="truncated expansion against the integral")
    x.add_argument("theorem", choices=("1", "2", "3", "4"))
    _add_quad(x, required=True)
    x.add_argument("--w1", type=_cx)
    x.add_argument("--w2", type=_cx)
    x.add_argument("--K", type=_int_list, default=[0, 1, 2])
    x.set_defaults(func=_cmd_expand)

    g = sub.add_parser("green", parents=[common], help="Green's function kernel")
    g.add_argument("mode", choices=("h", "hf", "imx", "function", "grid"))
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--theta1", type=float)
    g.add_argument("--theta2", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--z", type=_cx)
    g.add_argument("--xi1", type=float, default=0.0)
    g.add_argument("--xi2", type=float, default=1.0)
    g.add_argument("--n", type=int, default=15)
    g.set_defaults(func=_cmd_green)

    s = sub.add_parser("schramm", parents=[common], help="Schramm's formula")
    s.add_argument("mode", choices=("J", "M", "P", "calpha", "grid"))
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--xi", type=float, default=1.0)
    s.add_argument("--z", type=_cx)
    s.add_argument("--x", type=float)
    s.add_argument("--route", choices=("ray", "detour"), default="ray")
    s.add_argument("--r", type=_float_list, default=[0.3, 0.5, 0.7])
    s.add_argument("--n", type=int, default=10)
    s.set_defaults(func=_cmd_schramm)

    t = sub.add_parser("study", parents=[common], help="expansion convergence study")
    t.add_argument("--theorem", choices=("1", "2", "3", "4"), required=True)
    _add_quad(t, required=True)
    t.add_argument("--direction", type=_cx)
    t.add_argument("--K", type=_int_list, default=[0, 1, 2])
    t.add_argument("--shrink-steps", type=int, default=3)
    t.add_argument("--t0", type=float)
    t.add_argument("--w-fixed", type=_cx)
    t.add_argument("--ratio", type=float, default=0.1)
    t.add_argument("--slope-tol", type=float, default=0.2)
    t.set_defaults(func=_cmd_study)
    return p


_LOOKS_COMPLEX = re.compile(r"^-[\d.]")


def _merge_negative_values(argv: Sequence[str]) -> List[str]:
    """Let ``--w1 -1-1i`` through: argparse would read ``-1-1i`` as an option."""
    out: List[str] = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and _LOOKS_COMPLEX.match(tok)):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str]) -> (RunReport, argparse.Namespace):
    parser = build_parser()
    ns = parser.parse_args(_merge_negative_values(list(argv)))
    cfg, src = config_from_env(ns.rel_tol)
    return ns.func(ns, cfg, src), ns


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        report, ns = run(argv)
    except UsageError as exc:
        print(f"dfint: error: {exc}", file=sys.stderr)
        return 2
    text = report.to_csv() if ns.format == "csv" else report.to_json(not ns.no_timing)
    if ns.output == "-":
        sys.stdout.write(text)
    else:
        with open(ns.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
