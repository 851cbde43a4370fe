import random

import mpmath
import pytest


def rel_err(x, y):
    return abs(complex(x) - complex(y)) / max(abs(complex(y)), 1e-300)


@pytest.fixture
def rng():
    return random.Random(20240611)


def mp_pochhammer_F(a, b, c, d, w1, w2, dps=40):
    """Reference double-loop integral for a, d > -1 via the collapsed segment [0, 1]."""
    with mpmath.workdps(dps):
        a, b, c, d = map(mpmath.mpf, (a, b, c, d))
        w1, w2 = mpmath.mpc(w1), mpmath.mpc(w2)
        seg = mpmath.quad(lambda v: v ** a * (1 - v) ** d * (v - w1) ** b * (v - w2) ** c, [0, 0.5, 1])
        return complex(-(1 - mpmath.exp(2j * mpmath.pi * a)) * (1 - mpmath.exp(2j * mpmath.pi * d)) * seg)
