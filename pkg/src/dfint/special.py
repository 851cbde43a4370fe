"""Scalar special functions on the principal branch.

Complex powers and logarithms use ``arg w`` in ``(-pi, pi]`` throughout the
package; :data:`BRANCH_CONVENTION` names that choice so callers can refer to
it explicitly.

The Gauss function ``hyp2f1`` picks one of several representations by the
location of ``z``:

* ``|z| <= 0.75``: the defining power series;
* ``|1 - z| <= 0.5``: the ``z -> 1 - z`` connection formula;
* ``Re z < 1/2``: the Pfaff transformation ``z -> z / (z - 1)``;
* ``|z| > 1`` otherwise: the ``z -> 1/z`` inversion formula;
* anything left (``|z| < 1`` close to the unit circle with ``Re z >= 1/2``)
  falls back to the slowly converging series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from numbers import Number

from .errors import (
    BranchCutError,
    ConvergenceError,
    DegenerateParamError,
    PoleError,
    ZeroBaseError,
)

EPS_INT = 1e-6
"""Half-width of the guard band around forbidden integer parameter values."""

BRANCH_CONVENTION = "principal: arg in (-pi, pi], log w = ln|w| + i arg w"

SERIES_REL_STOP = 1e-17
SERIES_STOP_RUN = 3
SERIES_MAX_TERMS = 10_000

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def near_integer(x: float, eps: float = EPS_INT) -> bool:
    """True when the real number ``x`` lies within ``eps`` of an integer."""
    return abs(x - round(x)) < eps


def _near_nonpositive_integer(x: complex, eps: float = EPS_INT) -> bool:
    x = complex(x)
    return abs(x.imag) < eps and x.real < 0.5 and near_integer(x.real, eps)


def _sinpi(z: complex) -> complex:
    # reduce by the nearest integer first (exact) so sin stays accurate near poles
    n = round(z.real)
    v = cmath.sin(math.pi * (z - n))
    return -v if n % 2 else v


def _lanczos(x: complex) -> complex:
    # valid for Re x >= 0.5
    x = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return _SQRT_2PI * cmath.exp((x + 0.5) * cmath.log(t) - t) * acc


def gamma(x) -> complex:
    """Euler's Gamma function for real or complex ``x``.

    Uses the Lanczos approximation (g = 7, nine coefficients) and the
    reflection formula for ``Re x < 1/2``. Raises :class:`PoleError` within
    ``EPS_INT`` of a nonpositive integer.
    """
    z = complex(x)
    if _near_nonpositive_integer(z):
        raise PoleError(f"gamma has a pole at {round(z.real)} (argument {x!r})")
    if z.real < 0.5:
        return math.pi / (_sinpi(z) * _lanczos(1.0 - z))
    return _lanczos(z)


def rgamma(x) -> complex:
    """Reciprocal Gamma function; exactly zero at nonpositive integers."""
    z = complex(x)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        return 0j
    if _near_nonpositive_integer(z):
        # 1/Gamma is entire: use the reflection form, which stays finite
        return _sinpi(z) * _lanczos(1.0 - z) / math.pi
    return 1.0 / gamma(z)


def gamma_ratio(x: float, n: int) -> float | complex:
    """``Gamma(x + n) / Gamma(x)`` for integer ``n`` by finite products."""
    if n >= 0:
        return pochhammer_symbol(x, n)
    denom = pochhammer_symbol(x + n, -n)
    if denom == 0:
        raise PoleError(f"Gamma({x}+{n})/Gamma({x}) has a pole")
    return 1.0 / denom


def falling_factorial(x, k: int):
    """``x (x-1) ... (x-k+1)``, i.e. ``Gamma(x+1)/Gamma(x+1-k)``."""
    out = 1.0
    for j in range(k):
        out *= x - j
    return out


def principal_pow(w, a) -> complex:
    """``w**a`` on the principal branch, ``arg w`` in ``(-pi, pi]``."""
    w = complex(w)
    if w == 0:
        if isinstance(a, Number) and complex(a).real > 0:
            return 0j
        raise ZeroBaseError(f"0 raised to the power {a!r}")
    if a == 0:
        return 1.0 + 0j
    return cmath.exp(a * principal_log(w))


def principal_log(w) -> complex:
    """Principal logarithm with ``arg`` in ``(-pi, pi]``."""
    w = complex(w)
    # cmath.phase maps -x - 0j to -pi; the convention wants +pi there
    ph = math.atan2(w.imag, w.real)
    if ph == -math.pi:
        ph = math.pi
    return complex(math.log(abs(w)), ph)


def principal_arg(w) -> float:
    return principal_log(w).imag if w != 0 else 0.0


def rho(c, w) -> complex:
    """Half-plane phase: ``exp(-i pi c)`` if ``Im w >= 0`` else ``exp(i pi c)``."""
    sign = -1.0 if complex(w).imag >= 0 else 1.0
    return cmath.exp(sign * 1j * math.pi * c)


def pochhammer_symbol(a, k: int):
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``; ``(a)_0 = 1``."""
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


@dataclass(frozen=True)
class Hyp2F1Params:
    a: float
    b: float
    c: float
    z: complex


def _series(a, b, c, z) -> complex:
    if a == 0 or b == 0:
        # the series stops after its first term whatever c is
        return 1.0 + 0j
    if _near_nonpositive_integer(c):
        raise DegenerateParamError(f"2F1 lower parameter c={c} is a nonpositive integer")
    term = 1.0 + 0j
    total = 1.0 + 0j
    small_run = 0
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) < SERIES_REL_STOP * abs(total):
            small_run += 1
            if small_run >= SERIES_STOP_RUN:
                return total
        else:
            small_run = 0
    raise ConvergenceError(f"2F1 series did not converge at z={z} within {SERIES_MAX_TERMS} terms")


def _connection(a, b, c, z, inner) -> complex:
    s = c - a - b
    if near_integer(s):
        raise DegenerateParamError(f"connection formula needs c-a-b noninteger, got {s}")
    y = 1.0 - z
    t1 = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b) * inner(a, b, 1.0 - s, y)
    t2 = (
        gamma(c) * gamma(-s) * rgamma(a) * rgamma(b)
        * principal_pow(y, s) * inner(c - a, c - b, 1.0 + s, y)
    )
    return t1 + t2


def _pfaff(a, b, c, z, inner) -> complex:
    return principal_pow(1.0 - z, -a) * inner(a, c - b, c, z / (z - 1.0))


def _inversion(a, b, c, z, inner) -> complex:
    d = a - b
    if near_integer(d):
        raise DegenerateParamError(f"inversion formula needs a-b noninteger, got {d}")
    y = 1.0 / z
    mz = -z
    t1 = (
        gamma(c) * gamma(-d) * rgamma(b) * rgamma(c - a)
        * principal_pow(mz, -a) * inner(a, a - c + 1.0, 1.0 + d, y)
    )
    t2 = (
        gamma(c) * gamma(d) * rgamma(a) * rgamma(c - b)
        * principal_pow(mz, -b) * inner(b, b - c + 1.0, 1.0 - d, y)
    )
    return t1 + t2


def _auto(a, b, c, z, allowed: frozenset) -> complex:
    if z == 0:
        return 1.0 + 0j
    az = abs(z)
    if az <= 0.75:
        return _series(a, b, c, z)
    rest = allowed - {"connection", "pfaff", "inversion"}

    def inner(p, q, r, y):
        return _auto(p, q, r, y, rest)

    if abs(1.0 - z) <= 0.5 and "connection" in allowed:
        try:
            return _connection(a, b, c, z, inner)
        except DegenerateParamError:
            if az >= 1.0:
                raise
    if z.real < 0.5 and "pfaff" in allowed:
        return _pfaff(a, b, c, z, lambda p, q, r, y: _auto(p, q, r, y, allowed - {"pfaff", "inversion"}))
    if az > 1.0 and "inversion" in allowed:
        return _inversion(a, b, c, z, lambda p, q, r, y: _auto(p, q, r, y, allowed - {"inversion"}))
    if az < 1.0:
        return _series(a, b, c, z)
    raise ConvergenceError(f"no convergent 2F1 representation available at z={z}")


_ALL = frozenset({"connection", "pfaff", "inversion"})


def hyp2f1(a, b=None, c=None, z=None, *, method: str = "auto") -> complex:
    """Gauss hypergeometric function on its principal branch.

    Accepts either a :class:`Hyp2F1Params` or the four values ``a, b, c, z``.
    ``method`` forces one representation: ``"series"``, ``"connection"``,
    ``"pfaff"`` or ``"inversion"`` (inner evaluations still dispatch
    automatically); ``"auto"`` applies the region policy of the module.
    """
    if isinstance(a, Hyp2F1Params):
        a, b, c, z = a.a, a.b, a.c, a.z
    z = complex(z)
    if z.imag == 0.0 and z.real >= 1.0:
        raise BranchCutError(f"z={z.real} lies on the cut [1, inf)")
    if a == 0 or b == 0:
        # the series stops after its first term whatever c is
        return 1.0 + 0j
    if _near_nonpositive_integer(c):
        raise DegenerateParamError(f"2F1 lower parameter c={c} is a nonpositive integer")

    def inner(p, q, r, y):
        return _auto(p, q, r, y, frozenset())

    if method == "auto":
        return _auto(a, b, c, z, _ALL)
    if method == "series":
        return _series(a, b, c, z)
    if method == "connection":
        return _connection(a, b, c, z, inner)
    if method == "pfaff":
        return _pfaff(a, b, c, z, lambda p, q, r, y: _auto(p, q, r, y, frozenset({"connection"})))
    if method == "inversion":
        return _inversion(a, b, c, z, lambda p, q, r, y: _auto(p, q, r, y, frozenset({"connection", "pfaff"})))
    raise ValueError(f"unknown hyp2f1 method {method!r}")
