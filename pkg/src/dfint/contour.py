"""Branch-tracked quadrature of multivalued integrands along piecewise paths.

An integrand is a product of factors ``(kappa (u - z_j))**a_j`` times an
optional single-valued function of ``u``. Each factor's argument is tracked
continuously along the path, starting from its principal value at the first
point, so the integral is taken on the sheet reached by analytic
continuation.

Paths are lists of :class:`Line` and :class:`Arc` segments. Every segment is
first cut into sub-steps over which no factor's argument moves by more than
``QuadratureConfig.max_arg_step``; inside a sub-step a factor's argument is
its value at the sub-step start plus the principal argument of the ratio
``d(t) / d(t_start)``, which is unambiguous because the ratio never leaves
the right half-plane. Smooth sub-steps are integrated by globally adaptive
15-point Gauss-Kronrod; sub-steps that end on an integrable endpoint
singularity use tanh-sinh.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    BranchTrackingError,
    DivergentEndpointError,
    GeometryError,
    SingularityOnPathError,
    ToleranceError,
)
from .special import principal_arg

TWO_PI = 2.0 * math.pi

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits shared by every numerical evaluation."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_depth: int = 30
    max_arg_step: float = math.pi / 4
    de_level_max: int = 12
    max_panels: int = 40_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.max_arg_step < math.pi):
            raise ValueError("max_arg_step must lie in (0, pi)")
        if self.max_depth < 1 or self.de_level_max < 1:
            raise ValueError("recursion limits must be positive")

    def with_(self, **kw) -> "QuadratureConfig":
        return replace(self, **kw)


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class FactorSpec:
    """One multivalued factor ``(kappa * (u - point)) ** exponent``.

    ``orientation=-1`` writes the factor as ``(point - u)``; ``coeff`` is an
    additional complex multiplier so linear forms such as ``(s w - v)`` fit
    the same shape. ``sheet`` shifts the starting argument by
    ``2 pi sheet`` away from the principal value.
    """

    point: complex
    exponent: float
    orientation: int = 1
    coeff: complex = 1.0
    sheet: int = 0

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if not math.isfinite(self.exponent):
            raise ValueError("exponent must be finite")
        if self.coeff == 0:
            raise ValueError("coeff must be nonzero")

    @property
    def kappa(self) -> complex:
        return complex(self.coeff) * self.orientation

    @property
    def trivial(self) -> bool:
        return self.exponent == 0


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def __post_init__(self):
        if self.start == self.end:
            raise GeometryError("line segment with coincident endpoints")

    def at(self, t):
        return self.start + t * (self.end - self.start)

    def deriv(self, t):
        return (self.end - self.start) * np.ones_like(t)

    def delta(self, t_ref: float, s):
        """``u(t_ref + s) - u(t_ref)`` without cancellation."""
        return s * (self.end - self.start)

    @property
    def endpoints(self):
        return complex(self.start), complex(self.end)

    def reversed(self) -> "Line":
        return Line(self.end, self.start)

    def conj(self) -> "Line":
        return Line(np.conj(self.start), np.conj(self.end))

    def split(self, t: float):
        m = self.at(t)
        return [Line(self.start, m), Line(m, self.end)]

    def distance(self, z: complex) -> float:
        d = self.end - self.start
        t = ((z - self.start) * np.conj(d)).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        return abs(z - self.at(t))


@dataclass(frozen=True)
class Arc:
    """``center + radius * exp(i phi)`` for ``phi`` from ``arg_from`` to ``arg_to``."""

    center: complex
    radius: float
    arg_from: float
    arg_to: float

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("arc radius must be positive")
        if self.arg_from == self.arg_to:
            raise GeometryError("arc with zero sweep")

    def phi(self, t):
        return self.arg_from + t * (self.arg_to - self.arg_from)

    def at(self, t):
        return self.center + self.radius * np.exp(1j * self.phi(t))

    def deriv(self, t):
        return 1j * (self.arg_to - self.arg_from) * self.radius * np.exp(1j * self.phi(t))

    def delta(self, t_ref: float, s):
        dphi = s * (self.arg_to - self.arg_from)
        return (self.radius * np.exp(1j * self.phi(t_ref))
                * 2j * np.sin(dphi / 2) * np.exp(1j * dphi / 2))

    @property
    def endpoints(self):
        return complex(self.at(0.0)), complex(self.at(1.0))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.arg_to, self.arg_from)

    def conj(self) -> "Arc":
        return Arc(np.conj(self.center), self.radius, -self.arg_from, -self.arg_to)

    def split(self, t: float):
        m = self.phi(t)
        return [Arc(self.center, self.radius, self.arg_from, m),
                Arc(self.center, self.radius, m, self.arg_to)]

    def distance(self, z: complex) -> float:
        sweep = self.arg_to - self.arg_from
        if abs(sweep) >= TWO_PI:
            return abs(abs(z - self.center) - self.radius)
        ang = math.atan2((z - self.center).imag, (z - self.center).real)
        lo, hi = sorted((self.arg_from, self.arg_to))
        k = math.ceil((lo - ang) / TWO_PI)
        if ang + TWO_PI * k <= hi:
            return abs(abs(z - self.center) - self.radius)
        a, b = self.endpoints
        return min(abs(z - a), abs(z - b))


Segment = Line | Arc


@dataclass(frozen=True)
class Path:
    segments: tuple

    def __init__(self, segments: Sequence[Segment], check: bool = True):
        object.__setattr__(self, "segments", tuple(segments))
        if not self.segments:
            raise GeometryError("empty path")
        if check:
            sc = max(self.scale(), 1e-300)
            for s0, s1 in zip(self.segments, self.segments[1:]):
                if abs(s0.endpoints[1] - s1.endpoints[0]) > 1e-12 * sc + 1e-15:
                    raise GeometryError("path segments do not join continuously")

    @property
    def start(self) -> complex:
        return self.segments[0].endpoints[0]

    @property
    def end(self) -> complex:
        return self.segments[-1].endpoints[1]

    def vertices(self):
        pts = [self.start]
        for s in self.segments:
            pts.append(s.endpoints[1])
        return pts

    def scale(self, extra_points=()) -> float:
        pts = np.array(list(self.vertices()) + list(extra_points), dtype=complex)
        if len(pts) < 2:
            return 1.0
        d = np.abs(pts[:, None] - pts[None, :])
        return float(d.max()) or 1.0

    def conj(self) -> "Path":
        return Path([s.conj() for s in self.segments])

    def reversed(self) -> "Path":
        return Path([s.reversed() for s in reversed(self.segments)])

    def split_segment(self, index: int, t: float = 0.5) -> "Path":
        segs = list(self.segments)
        segs[index:index + 1] = segs[index].split(t)
        return Path(segs)

    def distance(self, z: complex) -> float:
        return min(s.distance(z) for s in self.segments)

    def winding_number(self, z: complex, samples: int = 64) -> float:
        total = 0.0
        for seg in self.segments:
            t = np.linspace(0.0, 1.0, samples + 1)
            w = seg.at(t) - z
            total += float(np.sum(np.angle(w[1:] / w[:-1])))
        return total / TWO_PI


@dataclass
class BranchState:
    """Unwrapped argument of every factor at a given path position."""

    args: np.ndarray
    segment: int
    t: float


# ---------------------------------------------------------------------------
# Pochhammer contours
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PochhammerSpec:
    """Pochhammer double loop around ``factors[p]`` and ``factors[q]``.

    ``interior_with_p`` / ``interior_with_q`` list further factor indices
    that must sit inside the corresponding loop. Loops are circles around
    the centroid of the enclosed points with radius at least
    ``(1 + loop_margin)`` times the largest centroid distance; when the
    enclosed points do not force a size, ``radius_fraction`` of the free
    clearance is used.
    """

    factors: tuple
    loop_pair: tuple
    basepoint: complex = 0.5
    interior_with_p: tuple = ()
    interior_with_q: tuple = ()
    loop_margin: float = 0.25
    radius_fraction: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "loop_pair", tuple(self.loop_pair))
        object.__setattr__(self, "interior_with_p", tuple(self.interior_with_p))
        object.__setattr__(self, "interior_with_q", tuple(self.interior_with_q))
        p, q = self.loop_pair
        if p == q:
            raise GeometryError("loop pair must name two different factors")
        if not self.loop_margin > 0:
            raise GeometryError("loop_margin must be positive")
        if not 0 < self.radius_fraction < 1:
            raise GeometryError("radius_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class PochhammerGeometry:
    path: Path
    centers: tuple
    radii: tuple


def pochhammer_geometry(spec: PochhammerSpec) -> PochhammerGeometry:
    f = spec.factors
    p, q = spec.loop_pair
    A = complex(spec.basepoint)
    m = spec.loop_margin
    members = []
    for idx, extra in ((p, spec.interior_with_p), (q, spec.interior_with_q)):
        ids = [idx] + [i for i in extra if not f[i].trivial]
        members.append(ids)
    if set(members[0]) & set(members[1]):
        raise GeometryError("a point cannot be inside both loops")
    inside = set(members[0]) | set(members[1])
    others = [complex(f[i].point) for i in range(len(f)) if i not in inside and not f[i].trivial]

    cen, need, clear = [], [], []
    for k in range(2):
        pts = np.array([complex(f[i].point) for i in members[k]])
        c = complex(pts.mean())
        cen.append(c)
        need.append((1 + m) * float(np.abs(pts - c).max()))
    for k in range(2):
        rest = others + [complex(f[i].point) for i in members[1 - k]] + [A]
        clear.append(min(abs(x - cen[k]) for x in rest) / (1 + m))
    D = abs(cen[0] - cen[1]) / (1 + m)

    radii = [max(need[k], spec.radius_fraction * min(clear[k], D)) for k in range(2)]
    if radii[0] + radii[1] > D:
        big = 0 if need[0] >= need[1] else 1
        radii[1 - big] = max(need[1 - big], D - radii[big]) if D - radii[big] > 0 else -1.0
    for k in range(2):
        if not (radii[k] > 0 and radii[k] >= need[k] - 1e-15 and radii[k] <= clear[k] + 1e-15):
            raise GeometryError(
                "no circle realises the requested inside/outside assignment "
                f"(loop {k}: needs radius {need[k]:.3g}, clearance {clear[k]:.3g})")
    if radii[0] + radii[1] > D * (1 + 1e-12):
        raise GeometryError("loops around the two encircled points would overlap")

    anchors, phis = [], []
    for k in range(2):
        dirv = A - cen[k]
        if abs(dirv) == 0:
            raise GeometryError("basepoint coincides with a loop centre")
        phi = math.atan2(dirv.imag, dirv.real)
        phis.append(phi)
        anchors.append(cen[k] + radii[k] * dirv / abs(dirv))

    sc = max([abs(x - y) for x in others + [A] + cen for y in others + [A] + cen] + [1e-300])
    for k in range(2):
        conn = Line(A, anchors[k]) if A != anchors[k] else None
        if conn is None:
            raise GeometryError("basepoint lies on a loop")
        for x in others + [complex(f[i].point) for i in members[1 - k]]:
            if conn.distance(x) < 1e-9 * sc:
                raise GeometryError(f"connector from the basepoint passes through {x}")
        if conn.distance(cen[1 - k]) <= radii[1 - k] * (1 + 1e-9):
            raise GeometryError("connector crosses the other loop")

    def loop(k, sign):
        return [Line(A, anchors[k]),
                Arc(cen[k], radii[k], phis[k], phis[k] + sign * TWO_PI),
                Line(anchors[k], A)]

    segs = loop(0, 1) + loop(1, 1) + loop(0, -1) + loop(1, -1)
    return PochhammerGeometry(Path(segs), tuple(cen), tuple(radii))


def build_pochhammer_contour(spec: PochhammerSpec) -> Path:
    """Closed path A -> (p+) -> (q+) -> (p-) -> (q-) -> A made of circles and connectors."""
    return pochhammer_geometry(spec).path


# ---------------------------------------------------------------------------
# integrand evaluation
# ---------------------------------------------------------------------------


class _Integrand:
    """Vectorised evaluation of the branched product on one sub-step."""

    def __init__(self, factors, extra):
        fs = [fc for fc in factors if not fc.trivial]
        self.z = np.array([complex(fc.point) for fc in fs], dtype=complex)
        self.a = np.array([fc.exponent for fc in fs], dtype=float)
        self.k = np.array([fc.kappa for fc in fs], dtype=complex)
        self.sheet = np.array([fc.sheet for fc in fs], dtype=float)
        self.extra = extra
        self.n = len(fs)

    def diffs(self, seg, t, t_ref=None, s=None, special=None):
        """``kappa * (u(t) - z)`` for all factors, shape (n, len(t))."""
        u = seg.at(t)
        d = self.k[:, None] * (u[None, :] - self.z[:, None])
        if special is not None and special.any():
            precise = seg.delta(t_ref, s)
            d[special, :] = self.k[special, None] * precise[None, :]
        return d

    def values(self, seg, t, args0, ref, t_ref=None, s=None, special=None):
        d = self.diffs(seg, t, t_ref, s, special)
        ang = args0[:, None] + np.angle(d / ref[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            logmod = np.log(np.abs(d))
        expo = (self.a[:, None] * (logmod + 1j * ang)).sum(axis=0)
        val = np.exp(expo) * seg.deriv(t)
        if self.extra is not None:
            val = val * self.extra(seg.at(t))
        return val


def _departure_arg(v: complex, tangent: complex) -> float:
    """Principal argument of ``v``, taking the side the path leaves towards on the cut."""
    if v.real < 0.0 and abs(v.imag) <= 1e-13 * abs(v.real):
        return -math.pi if tangent.imag < 0 else math.pi
    return principal_arg(v)


def _initial_args(ig: _Integrand, path: Path, collapsed: bool):
    seg = path.segments[0]
    u0 = path.start
    tan = complex(seg.deriv(np.array([0.0]))[0])
    sc = path.scale(list(ig.z))
    args = np.empty(ig.n)
    ref = np.empty(ig.n, dtype=complex)
    for j in range(ig.n):
        v = ig.k[j] * (u0 - ig.z[j])
        if collapsed and abs(u0 - ig.z[j]) <= 1e-14 * sc:
            tv = ig.k[j] * tan
            args[j] = _departure_arg(tv, tv)
            ref[j] = tv
        else:
            args[j] = _departure_arg(v, ig.k[j] * tan) if collapsed else principal_arg(v)
            ref[j] = v
    args += TWO_PI * ig.sheet
    return args, ref


def _arg_change(ig, seg, t0, t1, ref0, samples=8):
    t = np.linspace(t0, t1, samples + 1)
    d = ig.diffs(seg, t)
    d[:, 0] = ref0
    mag = np.abs(d)
    # endpoint base points give rounding-level differences, not directions
    zero = mag <= 1e-13 * mag.max(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        inc = np.angle(d[:, 1:] / d[:, :-1])
    inc[zero[:, 1:] | zero[:, :-1]] = 0.0
    return np.abs(inc).sum(axis=1).max() if ig.n else 0.0


@dataclass
class _SubStep:
    seg: object
    t0: float
    t1: float
    args0: np.ndarray
    ref0: np.ndarray
    sing: Optional[str] = None     # "start" / "end": integrable endpoint singularity
    special: Optional[np.ndarray] = None


def _substeps(ig: _Integrand, path: Path, cfg: QuadratureConfig, collapsed: bool):
    sc = path.scale(list(ig.z))
    start_hit = np.abs(ig.z - path.start) <= 1e-14 * sc if collapsed else np.zeros(ig.n, bool)
    end_hit = np.abs(ig.z - path.end) <= 1e-14 * sc if collapsed else np.zeros(ig.n, bool)
    for j in range(ig.n):
        if start_hit[j] or end_hit[j]:
            continue
        dist = path.distance(ig.z[j])
        if dist < 1e-12 * sc:
            raise SingularityOnPathError(f"base point {ig.z[j]} lies on the path")

    args, ref = _initial_args(ig, path, collapsed)
    steps = []
    nseg = len(path.segments)
    for si, seg in enumerate(path.segments):
        # process left to right, refining on the fly
        queue = [(0.0, 1.0, 0)]
        out = []
        force_split = collapsed and ((si == 0 and start_hit.any()) or (si == nseg - 1 and end_hit.any()))
        while queue:
            t0, t1, depth = queue.pop(0)
            if ig.n:
                ref_try = ref.copy()
                if t0 == 0.0 and si == 0 and collapsed:
                    pass
                else:
                    ref_try = ig.diffs(seg, np.array([t0]))[:, 0]
                    ref_try = np.where(np.abs(ref_try) == 0, ref, ref_try)
                change = _arg_change(ig, seg, t0, t1, ref_try if not (t0 == 0.0 and si == 0) else ref)
            else:
                change = 0.0
            need_split = change >= cfg.max_arg_step or (force_split and depth == 0)
            if need_split:
                if depth > 60:
                    raise SingularityOnPathError("argument tracking cannot resolve a base point near the path")
                tm = 0.5 * (t0 + t1)
                queue[0:0] = [(t0, tm, depth + 1), (tm, t1, depth + 1)]
            else:
                out.append((t0, t1))
        for (t0, t1) in out:
            sing = None
            special = None
            if collapsed and si == 0 and t0 == 0.0 and start_hit.any():
                sing, special = "start", start_hit
            if collapsed and si == nseg - 1 and t1 == 1.0 and end_hit.any():
                if sing is not None:
                    raise GeometryError("a single sub-step cannot carry two endpoint singularities")
                sing, special = "end", end_hit
            step = _SubStep(seg, t0, t1, args.copy(), ref.copy(), sing, special)
            steps.append(step)
            # advance the branch state to t1
            if si == nseg - 1 and t1 == 1.0:
                break
            d1 = ig.diffs(seg, np.array([t1]))[:, 0]
            if ig.n:
                inc = np.angle(d1 / ref)
                if np.any(np.abs(inc) > math.pi / 2):
                    raise BranchTrackingError(
                        f"argument jump of {np.abs(inc).max():.3f} rad in one sub-step")
                args = args + inc
                ref = d1
    return steps, args, ref


def track_branches(factors: Sequence[FactorSpec], path: Path,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> BranchState:
    """Continue every factor's argument along ``path`` and return the final state."""
    ig = _Integrand(factors, None)
    steps, args, ref = _substeps(ig, path, cfg, collapsed=False)
    last = path.segments[-1]
    d1 = ig.diffs(last, np.array([1.0]))[:, 0]
    args = args + np.angle(d1 / ref)
    return BranchState(args=args, segment=len(path.segments) - 1, t=1.0)


def initial_branches(factors: Sequence[FactorSpec], path: Path) -> BranchState:
    ig = _Integrand(factors, None)
    args, _ = _initial_args(ig, path, collapsed=False)
    return BranchState(args=args, segment=0, t=0.0)


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------


def _gk(ig, st: _SubStep, a, b, args_a, ref_a):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    t = mid + half * GK_NODES
    f = ig.values(st.seg, t, args_a, ref_a)
    k = half * np.dot(GK_WEIGHTS, f)
    g = half * np.dot(_G_WEIGHTS, f)
    return k, abs(k - g)


def _state_at(ig, st, a_args, a_ref, t):
    d = ig.diffs(st.seg, np.array([t]))[:, 0]
    return a_args + np.angle(d / a_ref), d


def _adaptive_gk(ig, steps, cfg, pre_total=0j, pre_err=0.0, stop_on_pre=False):
    heap = []
    total = pre_total
    err_total = pre_err
    counter = 0
    for st in steps:
        val, err = _gk(ig, st, st.t0, st.t1, st.args0, st.ref0)
        heapq.heappush(heap, (-err, counter, st, st.t0, st.t1, st.args0, st.ref0, 0, val))
        counter += 1
        total += val
        err_total += err
    stuck_err = 0.0
    while heap:
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err_total <= tol or (stop_on_pre and pre_err > 0.5 * tol and err_total - pre_err <= 0.5 * tol):
            break
        if counter > cfg.max_panels:
            raise ToleranceError(f"panel budget exhausted (error {err_total:.3g} > {tol:.3g})")
        negerr, _, st, a, b, args_a, ref_a, depth, val = heapq.heappop(heap)
        err = -negerr
        if depth >= cfg.max_depth:
            stuck_err += err
            if stuck_err > tol:
                raise ToleranceError(
                    f"max_depth={cfg.max_depth} reached with error {err_total:.3g} > {tol:.3g}")
            continue
        m = 0.5 * (a + b)
        args_m, ref_m = _state_at(ig, st, args_a, ref_a, m)
        v1, e1 = _gk(ig, st, a, m, args_a, ref_a)
        v2, e2 = _gk(ig, st, m, b, args_m, ref_m)
        total += v1 + v2 - val
        err_total += e1 + e2 - err
        heapq.heappush(heap, (-e1, counter, st, a, m, args_a, ref_a, depth + 1, v1))
        heapq.heappush(heap, (-e2, counter + 1, st, m, b, args_m, ref_m, depth + 1, v2))
        counter += 2
    return total, err_total


def _de_rule(h: float, tmax: float = 6.0):
    n = int(math.ceil(tmax / h))
    k = np.arange(-n, n + 1)
    t = k * h
    v = 0.5 * math.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        one_minus = 2.0 / (np.exp(2 * v) + 1.0)
        one_plus = 2.0 / (np.exp(-2 * v) + 1.0)
    w = h * 0.5 * math.pi * np.cosh(t) * one_minus * one_plus
    return one_plus, one_minus, w


def _tanh_sinh(ig, st: _SubStep, cfg):
    """Integrate a sub-step with an endpoint singularity at ``st.sing``."""
    L = st.t1 - st.t0
    prev = None
    for level in range(0, cfg.de_level_max + 1):
        h = 2.0 ** (-level)
        one_plus, one_minus, w = _de_rule(h)
        if st.sing == "start":
            s = 0.5 * L * one_plus          # distance from t0
            t = st.t0 + s
            t_ref = st.t0
            s_signed = s
        else:
            s = 0.5 * L * one_minus         # distance from t1
            t = st.t1 - s
            t_ref = st.t1
            s_signed = -s
        keep = (s > 0) & (w > 0)
        t, s_signed, wk = t[keep], s_signed[keep], w[keep]
        f = ig.values(st.seg, t, st.args0, st.ref0, t_ref=t_ref, s=s_signed, special=st.special)
        f = np.where(np.isfinite(f), f, 0.0)
        est = 0.5 * L * np.dot(wk, f)
        if prev is not None:
            diff = abs(est - prev)
            if diff <= max(cfg.abs_tol, cfg.rel_tol * abs(est)) and level >= 3:
                return est, diff
        prev = est
    raise ToleranceError("tanh-sinh did not converge within de_level_max levels")


def integrate_branched(factors: Sequence[FactorSpec], path: Path,
                       extra: Optional[Callable] = None,
                       cfg: QuadratureConfig = DEFAULT_CONFIG,
                       return_error: bool = False):
    """Integrate ``prod (kappa_j (u - z_j))**a_j * extra(u)`` along ``path``.

    ``extra`` must accept a numpy array of points. Arguments start at their
    principal values at ``path.start`` (shifted by each factor's ``sheet``).
    """
    ig = _Integrand(factors, extra)
    steps, _, _ = _substeps(ig, path, cfg, collapsed=False)
    total, err = _adaptive_gk(ig, steps, cfg)
    return (complex(total), float(err)) if return_error else complex(total)


def integrate_collapsed(factors: Sequence[FactorSpec], path,
                        cfg: QuadratureConfig = DEFAULT_CONFIG,
                        extra: Optional[Callable] = None,
                        return_error: bool = False):
    """Improper integral along a path whose endpoints may be base points.

    Factors based at the first (last) point of the path must have exponent
    greater than -1; their starting argument is the limit of the principal
    argument as ``u`` leaves the start along the path. Other factors take
    their principal value at the start, with the argument on the negative
    real axis resolved towards the side the path departs into.
    """
    if not isinstance(path, Path):
        path = Path([path])
    ig = _Integrand(factors, extra)
    sc = path.scale(list(ig.z))
    for j in range(ig.n):
        at_end = (abs(ig.z[j] - path.start) <= 1e-14 * sc) or (abs(ig.z[j] - path.end) <= 1e-14 * sc)
        if at_end and ig.a[j] <= -1:
            raise DivergentEndpointError(
                f"endpoint exponent {ig.a[j]} <= -1 makes the integral divergent")
    steps, _, _ = _substeps(ig, path, cfg, collapsed=True)
    smooth = [st for st in steps if st.sing is None]
    sing = [st for st in steps if st.sing is not None]
    de_cfg = cfg
    for _ in range(6):
        total, err = 0j, 0.0
        for st in sing:
            v, e = _tanh_sinh(ig, st, de_cfg)
            total += v
            err += e
        total, err = _adaptive_gk(ig, smooth, cfg, pre_total=total, pre_err=err, stop_on_pre=True)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err <= tol:
            break
        # endpoint pieces met only their own tolerance; tighten against the total
        de_cfg = de_cfg.with_(rel_tol=de_cfg.rel_tol * 0.1, abs_tol=de_cfg.abs_tol * 0.1)
    else:
        raise ToleranceError(f"endpoint pieces did not reach the tolerance (error {err:.3g})")
    return (complex(total), float(err)) if return_error else complex(total)


def line_path(*points) -> Path:
    """Polyline through the given points."""
    return Path([Line(complex(a), complex(b)) for a, b in zip(points, points[1:])])


def circle_path(center: complex, radius: float, start_arg: float = 0.0, turns: int = 1) -> Path:
    return Path([Arc(complex(center), radius, start_arg, start_arg + TWO_PI * turns)])


def integrate_real(f: Callable, a: float, b: float, *, rel_tol: float = 1e-10,
                   abs_tol: float = 1e-14, method: str = "gk", points: Sequence[float] = (),
                   max_panels: int = 4000):
    """Integrate a scalar function of a real variable over ``[a, b]``.

    ``method="gk"`` is globally adaptive Gauss-Kronrod 15 with optional
    breakpoints; ``method="de"`` is tanh-sinh, suited to algebraic endpoint
    singularities. ``f`` is called with one float at a time. Returns
    ``(value, error_estimate)``.
    """
    if method == "de":
        return _tanh_sinh_real(f, a, b, rel_tol, abs_tol)
    if method != "gk":
        raise ValueError(f"unknown method {method!r}")
    knots = sorted({a, b, *[p for p in points if a < p < b]})

    def panel(lo, hi):
        half = 0.5 * (hi - lo)
        fx = np.array([f(x) for x in 0.5 * (lo + hi) + half * GK_NODES])
        k = half * np.dot(GK_WEIGHTS, fx)
        return k, abs(k - half * np.dot(_G_WEIGHTS, fx))

    heap, total, err_total, n = [], 0.0, 0.0, 0
    for lo, hi in zip(knots, knots[1:]):
        v, e = panel(lo, hi)
        heap.append((-e, n, lo, hi, v))
        n += 1
        total += v
        err_total += e
    heapq.heapify(heap)
    while err_total > max(abs_tol, rel_tol * abs(total)):
        if n > max_panels:
            raise ToleranceError(f"panel budget exhausted (error {err_total:.3g})")
        negerr, _, lo, hi, v = heapq.heappop(heap)
        m = 0.5 * (lo + hi)
        v1, e1 = panel(lo, m)
        v2, e2 = panel(m, hi)
        total += v1 + v2 - v
        err_total += e1 + e2 + negerr
        heapq.heappush(heap, (-e1, n, lo, m, v1))
        heapq.heappush(heap, (-e2, n + 1, m, hi, v2))
        n += 2
    return total, err_total


def _tanh_sinh_real(f, a, b, rel_tol, abs_tol, level_max=10):
    half = 0.5 * (b - a)
    prev = None
    cache = {}
    for level in range(level_max + 1):
        h = 2.0 ** (-level)
        one_plus, one_minus, w = _de_rule(h)
        n = (len(w) - 1) // 2
        total = 0.0
        for k in range(len(w)):
            if w[k] == 0 or one_plus[k] == 0 or one_minus[k] == 0:
                continue
            # nodes of coarser levels recur at finer ones
            pos = (k - n) * 2 ** (level_max - level)
            if pos not in cache:
                x = a + half * one_plus[k] if k <= n else b - half * one_minus[k]
                cache[pos] = f(x)
            total += w[k] * cache[pos]
        est = half * total
        if prev is not None and level >= 3:
            diff = abs(est - prev)
            if diff <= max(abs_tol, rel_tol * abs(est)):
                return est, diff
        prev = est
    raise ToleranceError("tanh-sinh did not converge within the level limit")
