import cmath
import math

import mpmath
import pytest

from conftest import rel_err
from dfint import sle
from dfint.contour import QuadratureConfig
from dfint.errors import DomainError, IntegerAlphaError, NearHalfPiError
from dfint.sle import GreenInput, SchrammInput, SectorParams

CFG = QuadratureConfig(rel_tol=1e-11)
ALPHA = 2.5


def mp_hat_c(alpha):
    a = mpmath.mpf(alpha)
    return float(4 * mpmath.sin(mpmath.pi * a / 2) ** 2 * mpmath.sin(mpmath.pi * a)
                 * mpmath.gamma(1 - a / 2) * mpmath.gamma(1.5 * a - 1) / mpmath.gamma(a))


def mp_hf(theta, alpha):
    a, t = mpmath.mpf(alpha), mpmath.mpf(theta)
    zeta = (1 - 1j * mpmath.cot(t)) / 2
    f = mpmath.hyp2f1(1 - a, a, 1, zeta)
    return float(2 ** (a + 1) * mpmath.pi / mp_hat_c(alpha) * mpmath.sin(mpmath.pi * a / 2)
                 * mpmath.sin(t) ** (2 * a - 2) * mpmath.re(mpmath.exp(-1j * mpmath.pi * a / 2) * f))


def mp_J_arc(alpha, z, xi):
    a = mpmath.mpf(alpha)
    z = mpmath.mpc(z)
    d = z - xi
    R, th = abs(d), mpmath.arg(d)

    def f(phi):
        e = mpmath.exp(1j * phi)
        u = xi + R * e
        return ((u - z) ** a * (u - mpmath.conj(z)) ** (a - 2) * u ** (-a / 2)
                * (u - xi) ** (-a / 2) * 1j * R * e)

    return complex(mpmath.quad(f, mpmath.linspace(-th, th, 7)))


def test_hat_c_and_alpha_guards():
    for a in (2.2, 2.5, 3.3):
        assert rel_err(sle.hat_c(a), mp_hat_c(a)) < 1e-12
    with pytest.raises(IntegerAlphaError):
        sle.hat_c(2.0)
    with pytest.raises(DomainError):
        sle.hat_c(0.8)


def test_map_w_and_triangle():
    w1, w2 = sle.map_w(1.0, 2.0)
    assert w1 == pytest.approx(1 - cmath.exp(-4j))
    assert w2 == pytest.approx(math.sin(2) / math.sin(1) * cmath.exp(-1j))
    with pytest.raises(DomainError):
        sle.map_w(2.0, 1.0)


def test_sector_classification():
    assert "S1" in sle.classify_sector(1.0, 1.05)
    assert "S5" in sle.classify_sector(0.05, 1.5)
    assert sle.classify_sector(1.0, 2.0) == frozenset()
    # points near the boundary are always covered
    n = 60
    for i in range(1, n):
        for j in range(i + 1, n):
            t1, t2 = math.pi * i / n, math.pi * j / n
            if min(t1, t2 - t1, math.pi - t2) < 0.2:
                assert sle.classify_sector(t1, t2, SectorParams())


@pytest.mark.parametrize("t1, t2", [(1.0, 1.3), (0.5, 0.9), (2.0, 2.3)])
def test_green_h_backends_agree(t1, t2):
    g = GreenInput(ALPHA, t1, t2)
    assert abs(sle.green_h(g, "F", CFG) - sle.green_h(g, "P1", CFG)) < 1e-10


def test_green_h_errors():
    with pytest.raises(NearHalfPiError):
        sle.green_h(GreenInput(ALPHA, 0.5, math.pi / 2))
    with pytest.raises(IntegerAlphaError):
        sle.green_h(GreenInput(3.0, 0.5, 1.0))
    with pytest.raises(DomainError):
        sle.green_h(GreenInput(ALPHA, 1.0, 0.5))


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5])
def test_green_hf_against_mpmath(theta):
    ref = mp_hf(theta, ALPHA)
    assert abs(sle.green_hf(theta, ALPHA) - ref) < 1e-11 * max(1, abs(ref))
    assert abs(sle.green_hf(theta, ALPHA, "quadrature", CFG) - ref) < 1e-9 * max(1, abs(ref))


@pytest.mark.parametrize("t1", [0.5, 1.5])
def test_top_edge_law(t1):
    eps = 1e-3
    assert abs(sle.green_h(GreenInput(ALPHA, t1, math.pi - eps)) - math.sin(t1) ** (ALPHA - 1)) < 1e-2


@pytest.mark.parametrize("theta", [0.8, 2.4])
def test_diagonal_law(theta):
    assert abs(sle.green_h(GreenInput(ALPHA, theta, theta + 1e-4)) - sle.green_hf(theta, ALPHA)) < 1e-3


@pytest.mark.parametrize("t1, t2", [(1.0, 2.0), (0.5, 0.9), (1.2, 1.3)])
def test_im_x_vanishes(t1, t2):
    X = sle.green_X(t1, t2, ALPHA, CFG)
    assert abs(X.imag) < 1e-7 * abs(X)


@pytest.mark.parametrize("z", [0.3 + 0.5j, 1.7 + 0.4j, -0.6 + 1.2j])
def test_I_two_routes(z):
    assert rel_err(sle.eval_I(ALPHA, z, 0.0, 1.0, CFG), sle.I_from_F(ALPHA, z, 0.0, 1.0, CFG)) < 1e-9


def test_green_function_positive():
    assert sle.green_function(ALPHA, 0.3 + 0.5j, 0.0, 1.0) > 0
    with pytest.raises(DomainError):
        sle.eval_I(ALPHA, 0.3 - 0.5j, 0.0, 1.0)


@pytest.mark.parametrize("z", [0.4 + 0.8j, -1.3 + 0.5j, 2.5 + 0.1j, 0.1 + 0.15j])
def test_J_against_mpmath_arc(z):
    got = sle.eval_J(SchrammInput(ALPHA, z), cfg=CFG)
    assert rel_err(got, mp_J_arc(ALPHA, z, 1.0)) < 1e-9


def test_J_boundary_values():
    assert sle.eval_J((ALPHA, 1.0), x=1.0) == 0
    assert sle.eval_J((ALPHA, 1.0), x=3.7) == 0
    j0 = sle.eval_J((ALPHA, 1.0), x=0.0, cfg=CFG)
    a = ALPHA
    ref = 2j * math.pi * math.gamma(1.5 * a - 1) / (math.gamma(a / 2) * math.gamma(a))
    assert rel_err(j0, ref) < 1e-9
    for x in (-2.0, -0.7, 0.4, 0.9):
        j = sle.eval_J((ALPHA, 1.0), x=x, cfg=CFG)
        assert abs(j.real) < 1e-8 * abs(j)


def test_re_J_and_re_M_forms():
    s = SchrammInput(ALPHA, 0.4 + 0.8j)
    J = sle.eval_J(s, cfg=CFG)
    assert abs(sle.eval_reJ(s, CFG) - J.real) < 1e-10 * abs(J)
    M = sle.eval_M(s, CFG)
    assert abs(sle.re_M_identity(s, J) - M.real) < 1e-10 * abs(M)


def test_cauchy_riemann_relation():
    z, h = 0.4 + 0.8j, 1e-4
    M = lambda w: sle.eval_M(SchrammInput(ALPHA, w), CFG)
    dy_m1 = (M(z + 1j * h).real - M(z - 1j * h).real) / (2 * h)
    dx_m2 = (M(z + h).imag - M(z - h).imag) / (2 * h)
    assert abs(dy_m1 + dx_m2) < 1e-4 * abs(dy_m1)


def test_c_alpha_semicircle():
    closed = sle.c_alpha(ALPHA)
    assert rel_err(sle.c_alpha(ALPHA, "semicircle", r=0.5), closed) < 1e-6
    with pytest.raises(DomainError):
        sle.c_alpha(ALPHA, "semicircle", r=1.0)


def test_schramm_P_routes_and_range():
    s = SchrammInput(ALPHA, -0.5 + 0.5j)
    p_ray = sle.schramm_P(s)
    assert 0 < p_ray < 1
    assert abs(p_ray - sle.schramm_P(s, "detour")) < 1e-6
    with pytest.raises(ValueError):
        sle.schramm_P(s, "sideways")
    with pytest.raises(DomainError):
        sle.schramm_P(SchrammInput(ALPHA, 0.5 - 0.5j))
