import cmath
import math

import mpmath
import numpy as np
import pytest

from dfint.asym import (
    AUX_KINDS,
    eval_aux,
    expand_F,
    expansion_coeffs,
    identity_sides,
    lower_branch_pow,
    predicted_order,
    verify_identity,
)
from dfint.contour import QuadratureConfig
from dfint.dfcore import eval_F
from dfint.errors import DomainError, IntegerExponentError

CFG = QuadratureConfig(rel_tol=1e-11)
Q = (0.3, 0.45, -0.7, -0.4)


def mp_hatA(a, c, d, k):
    """Coefficients of the three-factor integral's expansion at w = 1."""
    e2 = lambda x: mpmath.exp(2j * mpmath.pi * x)

    def H(x, y):
        return -(1 - e2(x)) * (1 - e2(y)) * mpmath.beta(x + 1, y + 1)

    ff = lambda x: mpmath.gamma(x + 1) / (mpmath.gamma(x + 1 - k) * mpmath.factorial(k))
    A1 = (e2(d) - 1) / (e2(c + d) - 1) * ff(c) * H(a, c + d - k)
    A2 = (e2(a) - 1) * mpmath.exp(1j * mpmath.pi * d) / (1 - e2(c + d)) * ff(a) * H(c, d + k)
    return complex(A1), complex(A2)


@pytest.mark.parametrize("which, p", [
    ("FP", (-1 - 1j, 0.6 + 0.2j)),
    ("FP", (-1 - 1j, 0.6 - 0.2j)),
    ("FQ", (-0.3 + 0.2j, -2 + 1j)),
    ("FQ", (0.2 - 0.1j, -1.5 - 1j)),
    ("FRQ", (0.02 - 0.01j, 0.2 - 0.1j)),
    ("FSQ", (0.2 - 0.1j, 0.7 + 0.1j)),
])
def test_identities_hold(which, p):
    assert verify_identity(which, Q, p, CFG) < 1e-9


def test_identity_sides_outside_domain():
    with pytest.raises(DomainError):
        identity_sides("FP", Q, (2.0, 1j), CFG)
    with pytest.raises(ValueError):
        identity_sides("FX", Q, (-1 - 1j, 0.6 + 0.2j), CFG)


def test_aux_kinds_listed_and_evaluable():
    assert set(AUX_KINDS) >= {"P1", "P2", "Q1", "Q2", "R1", "R2", "T1"}
    v = eval_aux("P1", Q, (-1 - 1j, 0.6 + 0.2j), CFG)
    assert np.isfinite(v.real) and np.isfinite(v.imag)


def test_lower_branch_pow_continuity():
    # continuous across the negative axis from below, i.e. arg in (-2 pi, 0]
    above = lower_branch_pow(complex(-1, 1e-12), 0.3)
    below = lower_branch_pow(complex(-1, -1e-12), 0.3)
    assert abs(below - cmath.exp(-0.3j * math.pi)) < 1e-10
    assert abs(above - below) < 1e-9
    assert abs(lower_branch_pow(-1j, 0.5) - cmath.exp(-0.25j * math.pi)) < 1e-14


@pytest.mark.parametrize("k", range(4))
def test_b_zero_slice_matches_three_factor_coefficients(k):
    a, c, d = 0.3, -0.7, -0.4
    ts = expansion_coeffs("1", (a, 0.0, c, d), 4, frozen=-1 - 1j)
    A1, A2 = mp_hatA(a, c, d, k)
    got1 = [t.coeff for t in ts.by_family("A1") if t.k == k]
    got2 = [t.coeff for t in ts.by_family("A2") if t.k == k]
    assert abs(got1[0] - A1) <= 1e-10 * abs(A1)
    assert abs(got2[0] - A2) <= 1e-10 * abs(A2)


def test_truncation_rule():
    for theorem, frozen in (("1", -1 - 1j), ("2", -2 + 1j), ("3", None), ("4", None)):
        q = (0.3, 0.45, 0.6, -0.4) if theorem == "3" else Q
        for K in range(4):
            for t in expansion_coeffs(theorem, q, K, frozen).terms:
                assert t.k + t.l <= (K if t.integer else K - 1)


def test_predicted_orders():
    a, b, c, d = Q
    assert predicted_order("1", Q, 0, {"w2-1": 1}) == pytest.approx(min(1, c + d + 1))
    assert predicted_order("1", Q, 2, {"w2-1": 1}) == pytest.approx(min(3, c + d + 3))
    q2 = (0.3, -0.6, 0.45, 0.7)
    assert predicted_order("2", q2, 1, {"w1": 1}) == pytest.approx(min(2, q2[0] + q2[1] + 2))


def _slope(theorem, q, points, K):
    ts, errs = [], []
    for t, p in points:
        errs.append(abs(eval_F(q, p, cfg=CFG) - expand_F(theorem, q, p, K)))
        ts.append(t)
    return float(np.polyfit(np.log(ts), np.log(errs), 1)[0])


def test_thm1_convergence_order():
    pts = [(t, (-1 - 1j, 1 + t * cmath.exp(0.75j * math.pi))) for t in (1e-2 / 2 ** j for j in range(4))]
    for K in (0, 1, 2):
        assert abs(_slope("1", Q, pts, K) - predicted_order("1", Q, K, {"w2-1": 1})) < 0.2


def test_thm4_double_sum_coefficients_give_predicted_order():
    pts = [(t, (0.1 * t * cmath.exp(-2j), 1 + 0.1 * t * cmath.exp(2j))) for t in (1 / 2 ** j for j in range(4))]
    K = 2
    assert abs(_slope("4", Q, pts, K) - predicted_order("4", Q, K, {"w1": 1, "w2-1": 1})) < 0.2


def test_expand_errors():
    with pytest.raises(DomainError):
        expand_F("3", (0.3, 0.45, 0.6, -0.4), (0.3 + 0.1j, 0.1 + 0.1j), 1)
    with pytest.raises(ValueError):
        expansion_coeffs("1", Q, -1, frozen=-1 - 1j)
    with pytest.raises(ValueError):
        expansion_coeffs("7", Q, 1)
    with pytest.raises(IntegerExponentError):
        expansion_coeffs("2", (0.3, 1.0, 0.2, 0.1), 1, frozen=-2 + 1j)
