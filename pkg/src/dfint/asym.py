"""Auxiliary double-loop integrals, decomposition identities and expansions.

Each auxiliary function is ``prefactor * integral`` over the double loop
around two of its factor points. Some points are placed inside a loop
(``interior``); the rest are outside. ``P2`` and ``Q2`` are defined by their
integral only on a small primary region and elsewhere by analytic
continuation: the continuation is realised by moving the free variable
along a path inside the single-valuedness domain and tracking, for each
moving factor, the winding of its value at the base point. The accumulated
windings become sheet offsets of the factors. A path is rejected if a
moving point would cross the segment [0, 1], since the fixed contour cannot
follow such a move.

Powers attached to the decompositions (``w1^(a+b+1)`` etc.) use the branch
that is continuous on the domain where the identity is stated: ``(w2-1)^x``
is principal, while ``w1^x`` and ``w2^x`` on the 0-cut domain take
``arg`` in ``(-2 pi, 0)``, which agrees with the principal value in the lower
half-plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .contour import (
    DEFAULT_CONFIG,
    FactorSpec,
    PochhammerSpec,
    QuadratureConfig,
    build_pochhammer_contour,
    integrate_branched,
)
from .dfcore import (
    EvalPoint,
    ExponentQuad,
    G_value,
    H_value,
    _as_point,
    _as_quad,
    _dist_to_ray,
    e2pi,
    epi,
    eval_F,
    in_D0,
    in_D1,
    require_noninteger,
)
from .errors import DomainError, GeometryError, IntegerConditionError
from .special import falling_factorial, gamma, near_integer, principal_pow, rho

AUX_KINDS = ("P1", "P2", "Q1", "Q2", "R1", "R2", "T1", "Q1tilde")
AUX_DOMAIN = {"P1": "D1", "P2": "D1", "T1": "D1", "Q1tilde": "D1",
              "Q1": "D0", "Q2": "D0", "R1": "D0", "R2": "D0"}
IDENTITIES = ("FP", "FQ", "FRQ", "FSQ")
BASEPOINTS = (0.5, 0.35, 0.65, 0.2, 0.8, 0.1, 0.9)


def lower_branch_pow(w: complex, x: float) -> complex:
    """``w**x`` with ``arg w`` in ``(-2 pi, 0]``; principal for ``Im w < 0``."""
    w = complex(w)
    th = math.atan2(w.imag, w.real)
    if th > 0 or (th == 0 and w.imag == 0 and w.real < 0):
        th -= 2 * math.pi
    return cmath.exp(x * complex(math.log(abs(w)), th))


def require_condition(**named):
    for name, x in named.items():
        if near_integer(x):
            raise IntegerConditionError(f"{name}={x} must not be an integer")


# ---------------------------------------------------------------------------
# auxiliary integrals
# ---------------------------------------------------------------------------


@dataclass
class AuxSetup:
    factors: List[FactorSpec]
    loop_pair: Tuple[int, int]
    interior_p: Tuple[int, ...] = ()
    interior_q: Tuple[int, ...] = ()
    prefactor: complex = 1.0
    # moving factors: index -> function (w1, w2) -> (point, coeff)
    moving: Dict[int, Callable] = field(default_factory=dict)


def _prefactor(kind, q: ExponentQuad) -> complex:
    a, b, c, d = q.astuple()
    if kind == "P1":
        return (e2pi(d) - 1) / (e2pi(c + d) - 1)
    if kind == "P2":
        return (e2pi(a) - 1) * epi(d) / (1 - e2pi(c + d))
    if kind in ("Q1", "Q1tilde"):
        return (e2pi(a) - 1) / (e2pi(a + b) - 1)
    if kind == "Q2":
        return (e2pi(d) - 1) * epi(-b) / (1 - e2pi(-(a + b)))
    if kind == "R1":
        return (e2pi(a) - 1) / (e2pi(a + b + c) - 1)
    if kind == "R2":
        return (e2pi(a + b) * (e2pi(a) - 1) * (e2pi(d) - 1) * epi(c)
                / ((e2pi(a + b) - 1) * (e2pi(a + b + c) - 1)))
    if kind == "T1":
        return (e2pi(a) - 1) * (e2pi(d) - 1) / ((e2pi(a + b) - 1) * (e2pi(c + d) - 1))
    raise ValueError(f"unknown auxiliary kind {kind!r}")


def _conditions(kind, q: ExponentQuad):
    a, b, c, d = q.astuple()
    require_noninteger(a=a, d=d)
    if kind in ("P1", "P2", "T1"):
        require_condition(**{"c+d": c + d})
    if kind in ("Q1", "Q2", "Q1tilde", "T1", "R2"):
        require_condition(**{"a+b": a + b})
    if kind in ("R1", "R2"):
        require_condition(**{"a+b+c": a + b + c})


def _p2_moving(w1, w2):
    return {0: (w2 / (w2 - 1), 1 - w2), 1: ((w1 - w2) / (1 - w2), 1 - w2)}


def _q2_moving(w1, w2):
    return {2: (w2 / w1, w1), 3: (1 / w1, -w1)}


def _setup(kind, q: ExponentQuad, w1: complex, w2: complex) -> AuxSetup:
    a, b, c, d = q.astuple()
    pre = _prefactor(kind, q)
    v0, v1 = FactorSpec(0j, a), FactorSpec(1 + 0j, d, orientation=-1)
    if kind in ("P1", "T1", "Q1tilde"):
        fs = [v0, FactorSpec(w1, b), FactorSpec(w2, c, orientation=-1), v1]
        ip = (1,) if kind in ("T1", "Q1tilde") else ()
        iq = (2,) if kind in ("P1", "T1") else ()
        return AuxSetup(fs, (0, 3), ip, iq, pre)
    if kind in ("Q1", "R1"):
        fs = [v0, FactorSpec(w1, b), FactorSpec(w2, c), v1]
        ip = (1,) if kind == "Q1" else (1, 2)
        return AuxSetup(fs, (0, 3), ip, (), pre)
    if kind == "P2":
        mv = _p2_moving(w1, w2)
        fs = [FactorSpec(mv[0][0], a, coeff=mv[0][1]), FactorSpec(mv[1][0], b, coeff=mv[1][1]),
              FactorSpec(0j, c), FactorSpec(1 + 0j, d, orientation=-1)]
        return AuxSetup(fs, (2, 3), (), (), pre, moving={0: None, 1: None})
    if kind == "Q2":
        mv = _q2_moving(w1, w2)
        fs = [FactorSpec(0j, a), FactorSpec(1 + 0j, b, orientation=-1),
              FactorSpec(mv[2][0], c, coeff=mv[2][1]), FactorSpec(mv[3][0], d, coeff=mv[3][1])]
        return AuxSetup(fs, (0, 1), (), (), pre, moving={2: None, 3: None})
    if kind == "R2":
        fs = [FactorSpec(0j, a), FactorSpec(w1 / w2, b, coeff=w2),
              FactorSpec(1 + 0j, c, orientation=-1), FactorSpec(1 / w2, d, coeff=-w2)]
        return AuxSetup(fs, (0, 2), (1,), (), pre)
    raise ValueError(f"unknown auxiliary kind {kind!r}")


# --- continuation paths -----------------------------------------------------

_TINY = 1e-9


def _seg(p, q, n=400):
    t = np.linspace(0.0, 1.0, n + 1)
    return p + t * (q - p)


def _arc(center, radius, phi0, phi1, n=400):
    t = np.linspace(0.0, 1.0, n + 1)
    return center + radius * np.exp(1j * (phi0 + t * (phi1 - phi0)))


def _join(*parts):
    return np.concatenate([parts[0]] + [p[1:] for p in parts[1:]])


def _crosses_ray(pts, origin, direction) -> bool:
    """Does the polyline cross or touch ``{origin + r direction : r >= 0}``?"""
    g = (pts - origin) / direction
    if np.any((np.abs(g.imag) < 1e-13 * (1 + np.abs(g))) & (g.real >= 0)):
        return True
    s = np.sign(g.imag)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    for i in idx:
        g0, g1 = g[i], g[i + 1]
        t = g0.imag / (g0.imag - g1.imag)
        if g0.real + t * (g1.real - g0.real) >= 0:
            return True
    return False


def _crosses_segment01(pts) -> bool:
    s = np.sign(pts.imag)
    if np.any((np.abs(pts.imag) < 1e-13) & (pts.real >= -1e-13) & (pts.real <= 1 + 1e-13)):
        return True
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    for i in idx:
        z0, z1 = pts[i], pts[i + 1]
        t = z0.imag / (z0.imag - z1.imag)
        x = z0.real + t * (z1.real - z0.real)
        if -1e-13 <= x <= 1 + 1e-13:
            return True
    return False


def _p2_candidate_paths(w1, w2):
    out = []
    eps = min(0.05, 0.25 * abs(w2 - 1), 0.25 * abs(w1 - 1))
    if 0 < w2.real < 1 and w2.imag > 0:
        out.append(_seg(complex(w2.real, _TINY), w2))
    psi = math.atan2((w2 - 1).imag, (w2 - 1).real)
    start = math.pi - 1e-7
    out.append(_join(_arc(1 + 0j, eps, start, psi), _seg(1 + eps * cmath.exp(1j * psi), w2)))
    out.append(_join(_seg(0.5 + 1j * _TINY, 1.5 + 1j * _TINY), _seg(1.5 + 1j * _TINY, 1.5 - 1j * _TINY),
                     _seg(1.5 - 1j * _TINY, w2)))
    return out


def _p2_path_ok(w1, path) -> bool:
    if _crosses_ray(path[1:], 1 + 0j, -1 + 0j):
        return False
    if _crosses_ray(path, w1, w1):
        return False
    return True


def _q2_candidate_paths(w1, w2):
    out = []
    eps = min(0.05, 0.25 * abs(w1), 0.25 * abs(w2))
    if 0 < w1.real < 1 and w1.imag < 0:
        out.append(_seg(complex(w1.real, -_TINY), w1))
    psi = math.atan2(w1.imag, w1.real)
    if psi > 0:
        psi -= 2 * math.pi
    out.append(_join(_arc(0j, eps, -1e-7, psi), _seg(eps * cmath.exp(1j * psi), w1)))
    return out


def _q2_path_ok(w2, path) -> bool:
    if _crosses_ray(path[1:], 0j, 1 + 0j):
        return False
    if _crosses_ray(path, w2, w2):
        return False
    return True


def _refine(path, f, max_step=math.pi / 8, max_iter=12):
    """Insert points until ``arg f`` changes by less than ``max_step`` between samples."""
    for _ in range(max_iter):
        vals = f(path)
        inc = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(inc) > max_step
        if not bad.any():
            return path, vals
        mids = 0.5 * (path[:-1] + path[1:])
        new = np.empty(len(path) + bad.sum(), dtype=complex)
        j = 0
        for i in range(len(path) - 1):
            new[j] = path[i]
            j += 1
            if bad[i]:
                new[j] = mids[i]
                j += 1
        new[j] = path[-1]
        path = new
    raise DomainError("continuation path passes too close to a branch point")


def _track_sheets(moving_fn, which: str, fixed: complex, path, A: float) -> Dict[int, int]:
    """Windings of base-point values of the moving factors along ``path``."""
    sheets = {}
    idxs = list(moving_fn(0.3 - 0.4j, 0.6 + 0.2j).keys())
    for idx in idxs:
        def start_value(ws, idx=idx):
            if which == "w2":
                z, k = moving_fn(fixed, ws)[idx]
            else:
                z, k = moving_fn(ws, fixed)[idx]
            return k * (A - z)

        def pt(ws, idx=idx):
            return (moving_fn(fixed, ws) if which == "w2" else moving_fn(ws, fixed))[idx][0]

        p, vals = _refine(path, start_value)
        if _crosses_segment01(pt(p)):
            raise DomainError("a moving point would cross the segment [0, 1]")
        unwrapped = np.angle(vals[0]) + np.concatenate([[0.0], np.cumsum(np.angle(vals[1:] / vals[:-1]))])
        final_principal = math.atan2(vals[-1].imag, vals[-1].real)
        sheets[idx] = int(round((unwrapped[-1] - final_principal) / (2 * math.pi)))
    return sheets


def _continuation_sheets(kind, w1, w2, A) -> Dict[int, int]:
    if kind == "P2":
        cands, ok, fn, which, fixed = _p2_candidate_paths(w1, w2), lambda p: _p2_path_ok(w1, p), \
            lambda x, y: _p2_moving(x, y), "w2", w1
    else:
        cands, ok, fn, which, fixed = _q2_candidate_paths(w1, w2), lambda p: _q2_path_ok(w2, p), \
            lambda x, y: _q2_moving(x, y), "w1", w2
    last = None
    for path in cands:
        if not ok(path):
            continue
        try:
            return _track_sheets(fn, which, fixed, path, A)
        except DomainError as exc:
            last = exc
    raise last or DomainError(f"no admissible continuation path for {kind} at ({w1}, {w2})")


def _primary_ok(kind, w1, w2, A) -> bool:
    if kind == "R2":
        return (0 < w1.real < w2.real < 1 and w1.imag < 0 and w2.imag < 0
                and (A * w2 - w1).real > 0)
    if kind == "T1":
        return 0 < w1.real < A < w2.real < 1 and w1.imag < 0 and w2.imag > 0
    return True


def _basepoints(kind, w1, w2, A):
    if A is not None:
        return [A]
    if kind == "R2":
        lo = max(w1.real / w2.real, abs(w1 / w2))
        return [x for x in (0.5 * (1 + lo), 0.75 * (1 + lo) / 1.5 + 0.25 * lo) if lo < x < 1] or [0.5]
    if kind == "T1":
        return [0.5 * (w1.real + w2.real)]
    return list(BASEPOINTS)


def eval_aux(kind: str, q, p, cfg: QuadratureConfig = DEFAULT_CONFIG, *, A: Optional[float] = None,
             check_domain: bool = True, loop_margin: float = 0.25) -> complex:
    """Value of the auxiliary function ``kind`` (one of :data:`AUX_KINDS`)."""
    if kind not in AUX_KINDS:
        raise ValueError(f"unknown auxiliary kind {kind!r}")
    q = _as_quad(q)
    p = _as_point(p)
    w1, w2 = complex(p.w1), complex(p.w2)
    _conditions(kind, q)
    if check_domain:
        dom_ok = in_D1(w1, w2) if AUX_DOMAIN[kind] == "D1" else in_D0(w1, w2)
        if not dom_ok:
            raise DomainError(f"({w1}, {w2}) lies outside {AUX_DOMAIN[kind]} required by {kind}")
    last = None
    for A_try in _basepoints(kind, w1, w2, A):
        if not _primary_ok(kind, w1, w2, A_try):
            last = DomainError(f"{kind} is only available in its defining configuration")
            continue
        st = _setup(kind, q, w1, w2)
        try:
            spec = PochhammerSpec(tuple(st.factors), st.loop_pair, A_try, st.interior_p,
                                  st.interior_q, loop_margin)
            path = build_pochhammer_contour(spec)
        except GeometryError as exc:
            last = exc
            continue
        fs = list(st.factors)
        if st.moving:
            sheets = _continuation_sheets(kind, w1, w2, A_try)
            for idx, k in sheets.items():
                f = fs[idx]
                fs[idx] = FactorSpec(f.point, f.exponent, f.orientation, f.coeff, k)
        return st.prefactor * integrate_branched(fs, path, cfg=cfg)
    raise last


def p2_on_E(q, w1: complex, w2: complex, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Explicit continued formula for ``P2`` on the Green's-function parameter set.

    Valid when ``(w1, w2)`` comes from angles ``0 < theta1 < theta2 < pi``
    (see :func:`dfint.sle.map_w`); uses base point 1/2.
    """
    q = _as_quad(q)
    a, b, c, d = q.astuple()
    w1, w2 = complex(w1), complex(w2)
    m = w2 - 1
    fs = [FactorSpec(1 + 1 / m, a), FactorSpec(1 - (w1 - 1) / m, b),
          FactorSpec(0j, c), FactorSpec(1 + 0j, d, orientation=-1)]
    spec = PochhammerSpec(tuple(fs), (2, 3), 0.5)
    val = integrate_branched(fs, build_pochhammer_contour(spec), cfg=cfg)
    twist = e2pi(b) if w1.imag <= 0 else 1.0
    return _prefactor("P2", q) * epi(a - b) * principal_pow(m, a + b) * val * twist


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def identity_sides(which: str, q, p, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Left- and right-hand sides of a decomposition identity, both by quadrature."""
    q = _as_quad(q)
    p = _as_point(p)
    a, b, c, d = q.astuple()
    w1, w2 = complex(p.w1), complex(p.w2)
    if which not in IDENTITIES:
        raise ValueError(f"unknown identity {which!r}")
    if which == "FSQ" and not (in_D0(w1, w2) and in_D1(w1, w2)):
        raise DomainError("FSQ needs a point in D0 and D1")
    if not in_D0(w1, w2):
        raise DomainError(f"({w1}, {w2}) is not in D0")
    lhs = eval_F(q, p, cfg=cfg)
    if which == "FP":
        rhs = rho(c, w2) * (eval_aux("P1", q, p, cfg)
                            + principal_pow(w2 - 1, c + d + 1) * eval_aux("P2", q, p, cfg))
    elif which == "FQ":
        rhs = eval_aux("Q1", q, p, cfg) + lower_branch_pow(w1, a + b + 1) * eval_aux("Q2", q, p, cfg)
    elif which == "FRQ":
        rhs = (eval_aux("R1", q, p, cfg) + lower_branch_pow(w2, a + c + 1) * eval_aux("R2", q, p, cfg)
               + lower_branch_pow(w1, a + b + 1) * eval_aux("Q2", q, p, cfg))
    else:
        rhs = (rho(c, w2) * (eval_aux("T1", q, p, cfg)
                             + principal_pow(w2 - 1, c + d + 1) * eval_aux("P2", q, p, cfg))
               + lower_branch_pow(w1, a + b + 1) * eval_aux("Q2", q, p, cfg))
    return lhs, rhs


def verify_identity(which: str, q, p, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Relative residual ``|lhs - rhs| / (|lhs| + |rhs|)`` of a decomposition identity."""
    lhs, rhs = identity_sides(which, q, p, cfg)
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1e-300)


# ---------------------------------------------------------------------------
# expansions
# ---------------------------------------------------------------------------

QUANTITIES = ("w1", "w2-1", "w2", "w1/w2")


def _quantity(name, w1, w2):
    return {"w1": w1, "w2-1": w2 - 1, "w2": w2, "w1/w2": w1 / w2}[name]


@dataclass(frozen=True)
class Term:
    family: str
    k: int
    l: int
    coeff: complex
    powers: Tuple[Tuple[str, float], ...]
    rhos: Tuple[Tuple[float, str], ...] = ()
    integer: bool = True

    def value(self, w1: complex, w2: complex) -> complex:
        v = complex(self.coeff)
        for name, e in self.powers:
            if e != 0:
                v *= principal_pow(_quantity(name, w1, w2), e)
        for x, name in self.rhos:
            v *= rho(x, _quantity(name, w1, w2))
        return v

    def order(self, scaling: Dict[str, float]) -> float:
        """Exponent of ``t`` when each quantity scales like ``t**scaling[name]``."""
        return sum(e * scaling.get(name, 0.0) for name, e in self.powers)


@dataclass
class ExpansionTermSet:
    theorem: str
    K: int
    terms: List[Term]
    quantities: Tuple[str, ...] = QUANTITIES

    def value(self, w1, w2) -> complex:
        return sum((t.value(complex(w1), complex(w2)) for t in self.terms), 0j)

    def by_family(self, family: str) -> List[Term]:
        return [t for t in self.terms if t.family == family]


def _kept(integer: bool, index: int, K: int) -> bool:
    # integer-power families keep total index <= K; fractional families one fewer
    return index <= K if integer else index + 1 <= K


def _ff_over_fact(x, k):
    return falling_factorial(x, k) / math.factorial(k)


def _thm_conditions(theorem, q):
    a, b, c, d = q.astuple()
    if theorem in ("1", "G"):
        require_noninteger(a=a, d=d, c=c)
        if theorem == "1" and b != 0.0:
            # b = 0 is the three-factor slice; its coefficients stay well defined
            require_noninteger(b=b)
        require_condition(**{"c+d": c + d})
    elif theorem == "2":
        require_noninteger(a=a, b=b, c=c, d=d)
        require_condition(**{"a+b": a + b})
    elif theorem == "3":
        require_noninteger(a=a, b=b, c=c, d=d)
        require_condition(**{"a+b": a + b, "a+b+c": a + b + c})
    elif theorem == "4":
        require_noninteger(a=a, b=b, c=c, d=d)
        require_condition(**{"a+b": a + b, "c+d": c + d})
    else:
        raise ValueError(f"unknown theorem {theorem!r}")


def _single_index_terms(theorem, q, K, frozen, include_omitted=0):
    a, b, c, d = q.astuple()
    terms = []
    top = K + include_omitted
    if theorem in ("1", "G"):
        w1 = complex(frozen) if theorem == "1" else None
        p1 = (e2pi(d) - 1) / (e2pi(c + d) - 1)
        p2 = (e2pi(a) - 1) * epi(d) / (1 - e2pi(c + d))
        for k in range(top + 1):
            g = G_value(a, b, c + d - k, w1) if theorem == "1" else H_value(a, c + d - k)
            terms.append(Term("A1", k, 0, p1 * _ff_over_fact(c, k) * g,
                              (("w2-1", k),), ((c, "w2"),), True))
            if theorem == "1":
                s = sum(_ff_over_fact(a, k - l) * _ff_over_fact(b, l) * principal_pow(1 - w1, b - l)
                        for l in range(k + 1))
            else:
                s = _ff_over_fact(a, k)
            terms.append(Term("A2", k, 0, p2 * s * H_value(c, d + k),
                              (("w2-1", c + d + 1 + k),), ((c, "w2"),), False))
    else:
        w2 = complex(frozen)
        p1 = (e2pi(a) - 1) / (e2pi(a + b) - 1)
        p2 = (e2pi(d) - 1) * epi(a) / (e2pi(a + b) - 1)
        for k in range(top + 1):
            terms.append(Term("B1", k, 0, p1 * _ff_over_fact(b, k) * (-1) ** k * G_value(a + b - k, c, d, w2),
                              (("w1", k),), (), True))
            s = sum(_ff_over_fact(c, k - l) * _ff_over_fact(d, l) * (-1) ** l
                    * principal_pow(-w2, c - k + l) for l in range(k + 1))
            terms.append(Term("B2", k, 0, p2 * s * H_value(a + k, b),
                              (("w1", a + b + 1 + k),), ((a + b, "w1"),), False))
    return terms


def _double_index_terms(theorem, q, K, include_omitted=0):
    a, b, c, d = q.astuple()
    terms = []
    top = K + include_omitted
    if theorem == "3":
        p1 = (e2pi(a) - 1) / (e2pi(a + b + c) - 1)
        p2 = ((e2pi(a) - 1) * (e2pi(d) - 1) * epi(a + b)
              / ((e2pi(a + b) - 1) * (e2pi(a + b + c) - 1)))
        p3 = (e2pi(d) - 1) * epi(a) / (e2pi(a + b) - 1)
        for n in range(top + 1):
            for k in range(n + 1):
                l = n - k
                kl = 1.0 / (math.factorial(k) * math.factorial(l))
                sgn = (-1) ** (k + l)
                c1 = p1 * falling_factorial(b, k) * falling_factorial(c, l) * sgn * H_value(a + b + c - k - l, d)
                c2 = p2 * falling_factorial(b, k) * falling_factorial(d, l) * sgn * H_value(a + b - k + l, c)
                c3 = p3 * falling_factorial(c, k) * falling_factorial(d, l) * sgn * H_value(a + k + l, b)
                terms.append(Term("C1", k, l, kl * c1, (("w1", k), ("w2", l)), (), True))
                terms.append(Term("C2", k, l, kl * c2, (("w2", a + b + c + 1 + l), ("w1/w2", k)),
                                  ((a + b + c, "w2"),), False))
                terms.append(Term("C3", k, l, kl * c3, (("w1", a + b + 1 + l), ("w2", c), ("w1/w2", k)),
                                  ((a + b, "w1"), (c, "w2")), False))
    else:
        p1 = (e2pi(a) - 1) * (e2pi(d) - 1) / ((e2pi(a + b) - 1) * (e2pi(c + d) - 1))
        p2 = (e2pi(a) - 1) * epi(d) / (1 - e2pi(c + d))
        p3 = (e2pi(d) - 1) * epi(a) / (e2pi(a + b) - 1)
        for n in range(top + 1):
            for k in range(n + 1):
                l = n - k
                kl = 1.0 / (math.factorial(k) * math.factorial(l))
                d1 = (p1 * falling_factorial(b, k) * falling_factorial(c, l) * (-1) ** k
                      * H_value(a + b - k, c + d - l))
                d2 = (p2 * falling_factorial(b, k) * falling_factorial(a + b - k, l) * (-1) ** k
                      * H_value(c, d + l))
                d3 = (p3 * falling_factorial(c, l) * gamma(-c - d + k + l) / gamma(-c - d + l)
                      * H_value(a + k, b))
                terms.append(Term("D1", k, l, kl * d1, (("w1", k), ("w2-1", l)), ((c, "w2"),), True))
                terms.append(Term("D2", k, l, kl * d2, (("w1", k), ("w2-1", c + d + 1 + l)),
                                  ((c, "w2"),), False))
                terms.append(Term("D3", k, l, kl * d3, (("w1", a + b + 1 + k), ("w2-1", l)),
                                  ((c, "w2"), (a + b, "w1")), False))
    return terms


def _all_terms(theorem, q, K, frozen, extra=0):
    if theorem in ("1", "2", "G"):
        if theorem in ("1", "2") and frozen is None:
            raise ValueError(f"theorem {theorem} needs the non-limiting variable (frozen)")
        return _single_index_terms(theorem, q, K, frozen, extra)
    return _double_index_terms(theorem, q, K, extra)


def expansion_coeffs(theorem, q, K: int, frozen: Optional[complex] = None) -> ExpansionTermSet:
    """Coefficients of an asymptotic expansion up to truncation order ``K``.

    ``theorem`` is ``1`` (w2 -> 1), ``2`` (w1 -> 0), ``3`` (both -> 0),
    ``4`` (w1 -> 0, w2 -> 1) or ``"G"`` (the three-factor integral as its
    argument tends to 1). ``frozen`` is ``w1`` for theorem 1 and ``w2`` for
    theorem 2. Integer-power families keep total index ``<= K``,
    fractional-power families total index ``<= K - 1``.
    """
    theorem = str(theorem)
    q = _as_quad(q)
    if K < 0:
        raise ValueError("K must be nonnegative")
    _thm_conditions(theorem, q)
    terms = [t for t in _all_terms(theorem, q, K, frozen) if _kept(t.integer, t.k + t.l, K)]
    return ExpansionTermSet(theorem, K, terms)


def expand_F(theorem, q, p, K: int) -> complex:
    """Truncated expansion of ``F`` (or of ``G`` for theorem ``"G"``, using ``w2`` as its argument)."""
    theorem = str(theorem)
    p = _as_point(p)
    w1, w2 = complex(p.w1), complex(p.w2)
    frozen = w1 if theorem == "1" else (w2 if theorem == "2" else None)
    if theorem == "3" and not abs(w1 / w2) < 1:
        raise DomainError("theorem 3 expansion needs |w1/w2| < 1")
    return expansion_coeffs(theorem, q, K, frozen).value(w1, w2)


def predicted_order(theorem, q, K: int, scaling: Dict[str, float], frozen=None, lookahead: int = 6) -> float:
    """Smallest ``t``-exponent among the nonzero terms dropped at order ``K``."""
    theorem = str(theorem)
    q = _as_quad(q)
    if frozen is None and theorem in ("1", "2"):
        frozen = -1 - 1j if theorem == "1" else -2 + 1j
    best = math.inf
    for t in _all_terms(theorem, q, K, frozen, lookahead):
        if _kept(t.integer, t.k + t.l, K) or abs(t.coeff) < 1e-300:
            continue
        best = min(best, t.order(scaling))
    return best
