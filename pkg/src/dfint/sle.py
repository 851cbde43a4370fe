"""Two observables of a pair of commuting SLE curves.

Green's function kernel
    ``h(theta1, theta2)`` on the triangle ``0 < theta1 < theta2 < pi`` is the
    imaginary part of a phase times ``F(alpha-1, alpha-1, -alpha/2, -alpha/2;
    w1, w2)``, with ``(w1, w2)`` given by :func:`map_w`. Near the diagonal
    (``w2 -> 1``) the ``F`` integral is dominated by a term whose
    contribution to ``h`` is purely real, so there ``h`` is computed from the
    regular part ``P1`` instead.

Schramm's formula
    ``P(z, xi)`` integrates ``Re M`` along a horizontal ray, where ``M`` is an
    explicit prefactor times the integral ``J`` from ``conj(z)`` to ``z``
    passing to the right of ``xi``.

``alpha`` is ``8 / kappa``; integer values are rejected (probe ``n +- 1e-4``
instead).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import FrozenSet

from .asym import eval_aux, p2_on_E
from .contour import (
    DEFAULT_CONFIG,
    Arc,
    FactorSpec,
    Line,
    Path,
    PochhammerSpec,
    QuadratureConfig,
    build_pochhammer_contour,
    integrate_branched,
    integrate_collapsed,
    integrate_real,
)
from .dfcore import ExponentQuad, epi, eval_F, eval_G
from .errors import DomainError, IntegerAlphaError, NearHalfPiError, TailBoundError
from .special import gamma, hyp2f1, near_integer, principal_pow

HALF_PI_BAND = 1e-4
"""Half-width of the excluded band around ``theta2 = pi/2``."""

P1_SWITCH = 0.5
"""``h`` uses the ``P1`` representation when ``|w2 - 1|`` is at most this."""

OUTER_REL_TOL = 1e-9
X_MAX_LIMIT = 1e6


def _check_alpha(alpha):
    if not alpha > 1:
        raise DomainError(f"alpha={alpha} must exceed 1")
    if near_integer(alpha):
        raise IntegerAlphaError(f"alpha={alpha} is (close to) an integer")


def _quad(alpha) -> ExponentQuad:
    return ExponentQuad(alpha - 1, alpha - 1, -alpha / 2, -alpha / 2)


# ---------------------------------------------------------------------------
# Green's function kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GreenInput:
    alpha: float
    theta1: float
    theta2: float

    def check(self):
        _check_alpha(self.alpha)
        _check_triangle(self.theta1, self.theta2)
        return self


def _check_triangle(t1, t2):
    if not (0 < t1 < t2 < math.pi):
        raise DomainError(f"(theta1, theta2)=({t1}, {t2}) is not in 0 < theta1 < theta2 < pi")


def map_w(theta1: float, theta2: float):
    """``w1 = 1 - exp(-2i theta2)``, ``w2 = sin(theta2)/sin(theta1) exp(-i(theta2-theta1))``."""
    _check_triangle(theta1, theta2)
    w1 = 1 - cmath.exp(-2j * theta2)
    w2 = math.sin(theta2) / math.sin(theta1) * cmath.exp(-1j * (theta2 - theta1))
    return w1, w2


SECTORS = ("S1", "S2", "S3", "S4", "S5")


@dataclass(frozen=True)
class SectorParams:
    delta: float = 0.05
    c: float = 0.4


def classify_sector(theta1: float, theta2: float,
                    params: SectorParams = SectorParams()) -> FrozenSet[str]:
    """Boundary sectors of the triangle containing ``(theta1, theta2)``."""
    t1, t2 = theta1, theta2
    dl, c = params.delta, params.c
    r2 = c * math.sqrt(2)
    q = math.pi / 4
    at = math.atan2
    out = set()
    if 0 < t2 - t1 < r2 and t1 > dl and t2 < math.pi - dl:
        out.add("S1")
    if (t2 < c and at(t1, t2) < q - dl) or (t2 > math.pi - c and at(t1, math.pi - t2) < q - dl):
        out.add("S2")
    if (t2 > math.pi - c and at(math.pi - t2, t1) < q - dl
            and at(math.pi - t2, math.pi - t1) < q - dl):
        out.add("S3")
    if ((t1 + t2 < r2 and dl < at(t1, t2) < q)
            or (t2 - t1 > math.pi - r2 and dl < at(math.pi - t2, t1) < 2 * q - dl)
            or (t1 + t2 > 2 * math.pi - r2 and dl < at(math.pi - t2, math.pi - t1) < q)):
        out.add("S4")
    if t1 < c and t2 - t1 > dl and t1 + t2 < math.pi - dl:
        out.add("S5")
    return frozenset(out)


def hat_c(alpha: float) -> float:
    """Normalisation of the Green's function kernel."""
    _check_alpha(alpha)
    return (4 * math.sin(math.pi * alpha / 2) ** 2 * math.sin(math.pi * alpha)
            * (gamma(1 - alpha / 2) * gamma(1.5 * alpha - 1) / gamma(alpha)).real)


def _sigma(theta2, alpha) -> complex:
    return epi(-alpha) if theta2 >= math.pi / 2 else epi(alpha)


def _phase(theta2, alpha) -> complex:
    return _sigma(theta2, alpha) * principal_pow(-cmath.exp(1j * theta2), alpha - 1)


def _check_band(theta2):
    if abs(theta2 - math.pi / 2) < HALF_PI_BAND:
        raise NearHalfPiError(f"theta2={theta2} lies within {HALF_PI_BAND} of pi/2")


def green_h(g: GreenInput, method: str = "auto", cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``h(theta1, theta2)``.

    ``method`` is ``"F"`` (the defining double loop), ``"P1"`` (regular part
    at ``w2 = 1``) or ``"auto"`` (``P1`` when ``|w2 - 1| <= P1_SWITCH``).
    """
    g.check()
    _check_band(g.theta2)
    a = g.alpha
    w1, w2 = map_w(g.theta1, g.theta2)
    if method == "auto":
        method = "P1" if abs(w2 - 1) <= P1_SWITCH else "F"
    q = _quad(a)
    if method == "F":
        inner = eval_F(q, (w1, w2), cfg=cfg, check_domain=False)
    elif method == "P1":
        inner = epi(-a / 2) * eval_aux("P1", q, (w1, w2), cfg, check_domain=False)
    else:
        raise ValueError(f"unknown method {method!r}")
    val = math.sin(g.theta1) ** (a - 1) / hat_c(a) * (_phase(g.theta2, a) * inner).imag
    if not math.isfinite(val):
        raise ArithmeticError("non-finite kernel value")
    return val


def green_hf(theta: float, alpha: float, method: str = "auto",
             cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Diagonal value ``h(theta, theta)`` in closed form.

    The Gauss function ``2F1(1-alpha, alpha; 1; (1 - i cot theta)/2)`` is
    summed as a series (``"series"``) or obtained from the double-loop
    integral it represents (``"quadrature"``); ``"auto"`` uses the series
    while its argument has modulus below 0.9.
    """
    _check_alpha(alpha)
    if not 0 < theta < math.pi:
        raise DomainError(f"theta={theta} must lie in (0, pi)")
    zeta = 0.5 * (1 - 1j / math.tan(theta))
    if method == "auto":
        method = "series" if abs(zeta) < 0.9 else "quadrature"
    if method == "series":
        f = hyp2f1(1 - alpha, alpha, 1.0, zeta, method="series")
    elif method == "quadrature":
        # the double loop around 0 and 1 with (v - w)^(alpha-1) equals
        # 2 pi i (e^{i pi alpha} - 1)(-w)^{alpha-1} 2F1(1-alpha, alpha; 1; 1/w) * prefactor
        w = 1 / zeta
        g = eval_G(alpha - 1, alpha - 1, -alpha, w, method="quadrature", cfg=cfg)
        pre = (cmath.exp(-1j * math.pi * alpha) - 1) / (cmath.exp(-2j * math.pi * alpha) - 1)
        f = pre * g / (2j * math.pi * (epi(alpha) - 1) * principal_pow(-w, alpha - 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    return (2 ** (alpha + 1) * math.pi / hat_c(alpha) * math.sin(math.pi * alpha / 2)
            * math.sin(theta) ** (2 * alpha - 2) * (epi(-alpha / 2) * f).real)


def green_X(theta1: float, theta2: float, alpha: float,
            cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """The singular-part contribution whose imaginary part vanishes identically."""
    g = GreenInput(alpha, theta1, theta2).check()
    w1, w2 = map_w(g.theta1, g.theta2)
    p2 = p2_on_E(_quad(alpha), w1, w2, cfg)
    return _phase(theta2, alpha) * epi(-alpha / 2) * principal_pow(w2 - 1, 1 - alpha) * p2


def green_imX(theta1: float, theta2: float, alpha: float,
              cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return green_X(theta1, theta2, alpha, cfg).imag


def eval_I(alpha: float, z: complex, xi1: float, xi2: float,
           cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Double loop around ``z`` and ``xi2`` based at ``(z + xi2)/2``."""
    _check_alpha(alpha)
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("z must lie in the upper half-plane")
    if not xi1 < xi2:
        raise DomainError("need xi1 < xi2")
    fs = (FactorSpec(z, alpha - 1), FactorSpec(z.conjugate(), alpha - 1),
          FactorSpec(complex(xi1), -alpha / 2), FactorSpec(complex(xi2), -alpha / 2, orientation=-1))
    spec = PochhammerSpec(fs, (0, 3), 0.5 * (z + xi2))
    return integrate_branched(fs, build_pochhammer_contour(spec), cfg=cfg)


def I_from_F(alpha: float, z: complex, xi1: float, xi2: float,
             cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``I`` through the change of variables onto the loops around 0 and 1."""
    z = complex(z)
    w1 = (z - z.conjugate()) / (z - xi2)
    w2 = (xi1 - z) / (xi2 - z)
    f = eval_F(_quad(alpha), (w1, w2), cfg=cfg, check_domain=False)
    twist = cmath.exp(2j * math.pi * (alpha - 1)) if z.real > xi2 else 1.0
    return principal_pow(xi2 - z, alpha - 1) * f * twist


def green_function(alpha: float, z: complex, xi1: float, xi2: float,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Green's function at ``z`` for curves started at ``xi1 < xi2``."""
    z = complex(z)
    y = z.imag
    I = eval_I(alpha, z, xi1, xi2, cfg)
    return (y ** (alpha + 1 / alpha - 2) * abs(z - xi1) ** (1 - alpha) * abs(z - xi2) ** (1 - alpha)
            * (epi(-alpha) * I).imag / hat_c(alpha))


# ---------------------------------------------------------------------------
# Schramm's formula
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchrammInput:
    alpha: float
    z: complex
    xi: float = 1.0

    def check(self):
        if not self.alpha > 1:
            raise DomainError(f"alpha={self.alpha} must exceed 1")
        if not complex(self.z).imag > 0:
            raise DomainError("z must lie in the upper half-plane")
        if not self.xi > 0:
            raise DomainError("xi must be positive")
        return self


def _j_path(z: complex, xi: float) -> Path:
    """Path from ``conj(z)`` to ``z`` crossing the real axis right of ``xi``."""
    zb = z.conjugate()
    r = abs(z)
    if r < 0.25 * xi:
        # small arcs about 0, then along both banks and once around xi
        th = cmath.phase(z)
        c = 0.5 * xi
        return Path([Arc(0j, r, -th, 0.0), Line(complex(r), complex(xi - c)),
                     Arc(complex(xi), c, -math.pi, math.pi), Line(complex(xi - c), complex(r)),
                     Arc(0j, r, 0.0, th)])
    d = z - xi
    th = cmath.phase(d)
    return Path([Arc(complex(xi), abs(d), -th, th)])


def _j_factors(alpha, z, xi, shift=0.0):
    zb = z.conjugate()
    return [FactorSpec(z, alpha - shift), FactorSpec(zb, alpha - 2), FactorSpec(0j, -alpha / 2),
            FactorSpec(complex(xi), -alpha / 2)]


def eval_J(s, x: float = None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``J(z, xi)`` for ``z`` in the upper half-plane, or its boundary value.

    Pass a :class:`SchrammInput`, or ``eval_J((alpha, xi), x=...)`` for a real
    point ``x``: zero for ``x >= xi``, otherwise the loop from ``x`` around
    ``xi``.
    """
    if x is not None:
        alpha, xi = s
        return _boundary_J(alpha, float(x), xi, cfg)
    s.check()
    z = complex(s.z)
    return integrate_collapsed(_j_factors(s.alpha, z, s.xi), _j_path(z, s.xi), cfg)


def _boundary_J(alpha, x, xi, cfg):
    if not alpha > 1 or not xi > 0:
        raise DomainError("need alpha > 1 and xi > 0")
    if x >= xi:
        return 0j
    path = Path([Arc(complex(xi), xi - x, -math.pi, math.pi)])
    if x == 0:
        fs = [FactorSpec(0j, 1.5 * alpha - 2), FactorSpec(complex(xi), -alpha / 2)]
    else:
        fs = [FactorSpec(complex(x), 2 * alpha - 2), FactorSpec(0j, -alpha / 2),
              FactorSpec(complex(xi), -alpha / 2)]
    return integrate_collapsed(fs, path, cfg)


def eval_reJ(s: SchrammInput, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Re J`` from a representation that is real by construction."""
    s.check()
    z = complex(s.z)
    a = s.alpha
    zb = z.conjugate()
    fs = [FactorSpec(z, a - 2), FactorSpec(zb, a - 2), FactorSpec(0j, -a / 2),
          FactorSpec(complex(s.xi), -a / 2), FactorSpec(complex(z.real), 1.0)]
    return (-2j * z.imag * integrate_collapsed(fs, _j_path(z, s.xi), cfg)).real


def M_prefactor(alpha, z: complex, xi: float) -> complex:
    zb = z.conjugate()
    return (z.imag ** (alpha - 2) * principal_pow(z, -alpha / 2) * principal_pow(z - xi, -alpha / 2)
            * principal_pow(zb, 1 - alpha / 2) * principal_pow(zb - xi, 1 - alpha / 2))


def eval_M(s: SchrammInput, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``M(z, xi)``; real and imaginary parts are ``M1`` and ``M2``."""
    s.check()
    z = complex(s.z)
    return M_prefactor(s.alpha, z, s.xi) * eval_J(s, cfg=cfg)


def re_M_identity(s: SchrammInput, J: complex = None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``Re M`` through ``|z|``, ``|z - xi|`` and ``Re[conj(z)(conj(z) - xi) J]``."""
    s.check()
    z = complex(s.z)
    if J is None:
        J = eval_J(s, cfg=cfg)
    x, y, a, xi = z.real, z.imag, s.alpha, s.xi
    return (y ** (a - 2) * abs(z) ** (-a) * abs(z - xi) ** (-a)
            * ((x * x - x * xi - y * y) * J.real - y * (xi - 2 * x) * J.imag))


def c_alpha(alpha: float, method: str = "closed", r: float = 0.5, xi: float = 1.0,
            cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Normalisation of Schramm's formula.

    ``"closed"`` uses Gamma functions; ``"semicircle"`` integrates ``-Re M dz``
    over the upper half circle of radius ``r`` about 0.
    """
    if not alpha > 1:
        raise DomainError(f"alpha={alpha} must exceed 1")
    if method == "closed":
        return (-2 * math.pi ** 1.5 * gamma((alpha - 1) / 2) * gamma(1.5 * alpha - 1)
                / (gamma(alpha / 2) ** 2 * gamma(alpha))).real
    if method != "semicircle":
        raise ValueError(f"unknown method {method!r}")
    if not (0 < r < 2 * xi) or r == xi:
        raise DomainError("radius must lie in (0, 2 xi) and differ from xi")

    def f(phi):
        e = cmath.exp(1j * phi)
        return (eval_M(SchrammInput(alpha, r * e, xi), cfg) * 1j * r * e).real

    val, _ = integrate_real(f, 0.0, math.pi, rel_tol=OUTER_REL_TOL, method="de")
    return -val


def _re_M_on_line(alpha, xi, y, cfg):
    return lambda t: eval_M(SchrammInput(alpha, complex(t, y), xi), cfg).real


def _tail_bound(alpha, xi, y, X, cfg):
    # |Re M| decays at least like x^-alpha; the constant is read off at X
    C = abs(eval_M(SchrammInput(alpha, complex(X, y), xi), cfg).real) * X ** alpha
    return C * X ** (1 - alpha) / (alpha - 1)


def _ray_integral(alpha, xi, x, y, cfg, rel_tol):
    X = max(10 * xi, 10 * abs(complex(x, y)), 100.0)
    while True:
        tail = _tail_bound(alpha, xi, y, X, cfg)
        pts = [p for p in (0.0, xi, xi + 1, 2 * xi + 2) if x < p < X]
        val, _ = integrate_real(_re_M_on_line(alpha, xi, y, cfg), x, X,
                                rel_tol=rel_tol, abs_tol=1e-13, points=pts)
        if tail <= 0.1 * rel_tol * max(abs(val), 1e-300) or tail < 1e-14:
            return val
        X *= 4
        if X > X_MAX_LIMIT:
            raise TailBoundError(f"tail bound {tail:.3g} not met below x={X_MAX_LIMIT:g}")


def schramm_P(s: SchrammInput, route: str = "ray", cfg: QuadratureConfig = DEFAULT_CONFIG,
              rel_tol: float = OUTER_REL_TOL) -> float:
    """Probability that the curves pass to the right of ``z``.

    ``route="ray"`` integrates ``Re M`` from ``z`` to ``+inf`` horizontally;
    ``route="detour"`` goes up to height ``y + 1`` first and then out to
    infinity, which must give the same value.
    """
    s.check()
    z = complex(s.z)
    a, xi = s.alpha, s.xi
    ca = c_alpha(a)
    if route == "ray":
        return _ray_integral(a, xi, z.real, z.imag, cfg, rel_tol) / ca
    if route != "detour":
        raise ValueError(f"unknown route {route!r}")
    top = _ray_integral(a, xi, z.real, z.imag + 1, cfg, rel_tol)
    side, _ = integrate_real(lambda t: eval_M(SchrammInput(a, complex(z.real, t), xi), cfg).imag,
                             z.imag, z.imag + 1, rel_tol=rel_tol, abs_tol=1e-13)
    return (top - side) / ca
