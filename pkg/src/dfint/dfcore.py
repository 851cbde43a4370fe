"""Double-loop integrals with two, three and four factors.

``H(a, d)``, ``G(a, c, d; w)`` and ``F(a, b, c, d; w1, w2)`` integrate
``v^a (1-v)^d`` times zero, one or two extra factors ``(v - w)^e`` over the
double loop around 0 and 1 starting at ``A`` in (0, 1), with every ``w``
outside the loops. The tilde variants write one extra factor as
``(w - v)^e`` instead. ``H`` and ``G`` also have closed forms, which are the
preferred backends; quadrature is the cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .contour import (
    DEFAULT_CONFIG,
    FactorSpec,
    PochhammerSpec,
    QuadratureConfig,
    build_pochhammer_contour,
    integrate_branched,
)
from .errors import DomainError, IntegerExponentError
from .special import gamma, hyp2f1, near_integer, principal_pow, rgamma, rho

DEFAULT_BASEPOINT = 0.5
CUT_MARGIN = 1e-9

_METHODS = ("closed", "quadrature")


def e2pi(x) -> complex:
    """``exp(2 pi i x)``."""
    return cmath.exp(2j * math.pi * x)


def epi(x) -> complex:
    """``exp(pi i x)``."""
    return cmath.exp(1j * math.pi * x)


@dataclass(frozen=True)
class ExponentQuad:
    a: float
    b: float
    c: float
    d: float

    def check(self):
        require_noninteger(a=self.a, d=self.d)
        return self

    def astuple(self):
        return (self.a, self.b, self.c, self.d)


def require_noninteger(**named):
    for name, x in named.items():
        if near_integer(x):
            raise IntegerExponentError(f"{name}={x} must not be an integer")


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------


def _dist_to_ray(z: complex, origin: complex, direction: complex) -> float:
    """Distance from ``z`` to ``{origin + t direction : t >= 0}``."""
    t = ((z - origin) * direction.conjugate()).real / abs(direction) ** 2
    return abs(z - (origin + max(t, 0.0) * direction))


def _margin(*pts) -> float:
    return CUT_MARGIN * max([1.0] + [abs(p) for p in pts])


def off_positive_axis(w: complex) -> bool:
    return _dist_to_ray(complex(w), 0j, 1 + 0j) > _margin(w)


def in_D0(w1: complex, w2: complex) -> bool:
    w1, w2 = complex(w1), complex(w2)
    if not (off_positive_axis(w2) and off_positive_axis(w1)):
        return False
    return _dist_to_ray(w1, w2, w2) > _margin(w1, w2)


def in_D1(w1: complex, w2: complex) -> bool:
    w1, w2 = complex(w1), complex(w2)
    if not off_positive_axis(w1):
        return False
    if _dist_to_ray(w2, 1 + 0j, -1 + 0j) <= _margin(w2):
        return False
    return _dist_to_ray(w2, w1, w1) > _margin(w1, w2)


@dataclass(frozen=True)
class EvalPoint:
    w1: complex
    w2: complex

    @property
    def in_D0(self) -> bool:
        return in_D0(self.w1, self.w2)

    @property
    def in_D1(self) -> bool:
        return in_D1(self.w1, self.w2)


# ---------------------------------------------------------------------------
# generic double loop
# ---------------------------------------------------------------------------


def eval_generic(factors: Sequence[FactorSpec], loop_pair=(0, 1), A: complex = DEFAULT_BASEPOINT,
                 cfg: QuadratureConfig = DEFAULT_CONFIG, *, interior_with_p=(), interior_with_q=(),
                 loop_margin: float = 0.25) -> complex:
    """Double-loop integral of an arbitrary product of branched factors."""
    spec = PochhammerSpec(tuple(factors), tuple(loop_pair), A, tuple(interior_with_p),
                          tuple(interior_with_q), loop_margin)
    return integrate_branched(spec.factors, build_pochhammer_contour(spec), cfg=cfg)


def _base_factors(a, d):
    return [FactorSpec(0j, a), FactorSpec(1 + 0j, d, orientation=-1)]


# ---------------------------------------------------------------------------
# H, G, F
# ---------------------------------------------------------------------------


def _check_method(method):
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")


def H_prefactor(a, d) -> complex:
    return -1 + e2pi(a) - e2pi(a + d) + e2pi(d)


def eval_H(a: float, d: float, method: str = "closed", *, A=DEFAULT_BASEPOINT,
           cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``H(a, d)``; the closed form is a Beta function times a phase factor."""
    _check_method(method)
    require_noninteger(a=a, d=d)
    if method == "closed":
        return H_prefactor(a, d) * gamma(a + 1) * gamma(d + 1) * rgamma(a + d + 2)
    return eval_generic(_base_factors(a, d), (0, 1), A, cfg)


def H_value(a: float, d: float) -> complex:
    """Closed-form ``H`` that also accepts integer exponents (used by expansion coefficients)."""
    return H_prefactor(a, d) * gamma(a + 1) * gamma(d + 1) * rgamma(a + d + 2)


def _check_w(w, tilde: bool):
    w = complex(w)
    if tilde:
        if _dist_to_ray(w, 1 + 0j, -1 + 0j) <= _margin(w):
            raise DomainError(f"w={w} must avoid (-inf, 1]")
    elif not off_positive_axis(w):
        raise DomainError(f"w={w} must avoid [0, inf)")
    return w


def _G_tilde_closed(a, c, d, w) -> complex:
    return (4 * math.pi ** 2 * principal_pow(w, c) * hyp2f1(-c, a + 1, a + d + 2, 1 / w)
            * epi(a + d + 2) * rgamma(a + d + 2) * rgamma(-a) * rgamma(-d))


def eval_G(a: float, c: float, d: float, w: complex, method: str = "closed", *,
           A=DEFAULT_BASEPOINT, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """``G(a, c, d; w)`` with the factor ``(v - w)^c`` and ``w`` off ``[0, inf)``."""
    _check_method(method)
    require_noninteger(a=a, d=d)
    w = _check_w(w, tilde=False)
    if method == "closed":
        return rho(c, w) * _G_tilde_closed(a, c, d, w)
    fs = _base_factors(a, d) + [FactorSpec(w, c)]
    return eval_generic(fs, (0, 1), A, cfg)


def eval_G_tilde(a: float, c: float, d: float, w: complex, method: str = "closed", *,
                 A=DEFAULT_BASEPOINT, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Like :func:`eval_G` with ``(w - v)^c`` and ``w`` off ``(-inf, 1]``."""
    _check_method(method)
    require_noninteger(a=a, d=d)
    w = _check_w(w, tilde=True)
    if method == "closed":
        return _G_tilde_closed(a, c, d, w)
    fs = _base_factors(a, d) + [FactorSpec(w, c, orientation=-1)]
    return eval_generic(fs, (0, 1), A, cfg)


def G_value(a, c, d, w) -> complex:
    """Closed-form ``G`` without the noninteger guard on ``c``-type shifts."""
    w = complex(w)
    return rho(c, w) * _G_tilde_closed(a, c, d, w)


def F_factors(q: ExponentQuad, w1, w2, tilde: bool = False):
    a, b, c, d = q.astuple()
    return _base_factors(a, d) + [FactorSpec(complex(w1), b),
                                  FactorSpec(complex(w2), c, orientation=-1 if tilde else 1)]


def _as_quad(q) -> ExponentQuad:
    return q if isinstance(q, ExponentQuad) else ExponentQuad(*q)


def _as_point(p, w2=None) -> EvalPoint:
    if isinstance(p, EvalPoint):
        return p
    if w2 is not None:
        return EvalPoint(complex(p), complex(w2))
    return EvalPoint(complex(p[0]), complex(p[1]))


def eval_F(q, p, *, A=DEFAULT_BASEPOINT, cfg: QuadratureConfig = DEFAULT_CONFIG,
           check_domain: bool = True) -> complex:
    """``F(a, b, c, d; w1, w2)`` with both ``w`` outside the loops."""
    q = _as_quad(q).check()
    p = _as_point(p)
    if check_domain and not p.in_D0:
        raise DomainError(f"(w1, w2)=({p.w1}, {p.w2}) is not in D0")
    return eval_generic(F_factors(q, p.w1, p.w2), (0, 1), A, cfg)


def eval_F_tilde(q, p, *, A=DEFAULT_BASEPOINT, cfg: QuadratureConfig = DEFAULT_CONFIG,
                 check_domain: bool = True) -> complex:
    """``F`` with the factor ``(w2 - v)^c``, defined on D1."""
    q = _as_quad(q).check()
    p = _as_point(p)
    if check_domain and not p.in_D1:
        raise DomainError(f"(w1, w2)=({p.w1}, {p.w2}) is not in D1")
    return eval_generic(F_factors(q, p.w1, p.w2, tilde=True), (0, 1), A, cfg)
