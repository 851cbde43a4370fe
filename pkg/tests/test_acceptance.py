"""Acceptance suite: twelve criteria, one PASS/FAIL line each.

Run with pytest (lines appear in the terminal output) or directly with
``python3 tests/test_acceptance.py``.
"""

import cmath
import math
import random
import sys
import time
from pathlib import Path

import mpmath
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from dfint import cli, sle  # noqa: E402
from dfint.asym import IDENTITIES, expansion_coeffs  # noqa: E402
from dfint.contour import (  # noqa: E402
    FactorSpec,
    PochhammerSpec,
    QuadratureConfig,
    build_pochhammer_contour,
    integrate_branched,
)
from dfint.dfcore import eval_G, eval_H  # noqa: E402
from dfint.sle import GreenInput, SchrammInput  # noqa: E402

ALPHA = 2.5


def _noninteger(rng, lo, hi, gap=0.01):
    while True:
        x = rng.uniform(lo, hi)
        if abs(x - round(x)) > gap:
            return x


def _off_positive_axis(rng, rmin, rmax):
    return cmath.rect(rng.uniform(rmin, rmax), rng.choice([1, -1]) * rng.uniform(0.2, math.pi - 0.05))


def criterion_1():
    rng = random.Random(1)
    t = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        a, d = _noninteger(rng, -0.9, 2.5), _noninteger(rng, -0.9, 2.5)
        closed = eval_H(a, d)
        worst = max(worst, abs(eval_H(a, d, "quadrature") - closed) / abs(closed))
    pinned = abs(eval_H(-0.5, -0.5, "quadrature") + 4 * math.pi) / (4 * math.pi)
    secs = time.perf_counter() - t
    ok = worst < 1e-8 and pinned < 1e-10 and secs < 30
    return ok, f"max rel diff {worst:.2e}, H(-1/2,-1/2) rel err {pinned:.2e}, {secs:.1f}s"


def _mp_G(a, c, d, w):
    with mpmath.workdps(25):
        a, c, d, w = mpmath.mpf(a), mpmath.mpf(c), mpmath.mpf(d), mpmath.mpc(w)
        gt = (4 * mpmath.pi ** 2 * w ** c * mpmath.hyp2f1(-c, a + 1, a + d + 2, 1 / w)
              / (mpmath.exp(-(a + d + 2) * mpmath.pi * 1j) * mpmath.gamma(a + d + 2)
                 * mpmath.gamma(-a) * mpmath.gamma(-d)))
        sign = -1 if w.imag >= 0 else 1
        return complex(mpmath.exp(sign * 1j * mpmath.pi * c) * gt)


def criterion_2():
    rng = random.Random(2)
    t = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        a, d = _noninteger(rng, -0.9, 2.5), _noninteger(rng, -0.9, 2.5)
        c = rng.uniform(-1.5, 1.5)
        w = _off_positive_axis(rng, 0.3, 3.0)
        ref = _mp_G(a, c, d, w)
        worst = max(worst, abs(eval_G(a, c, d, w, "quadrature") - ref) / abs(ref))
    secs = time.perf_counter() - t
    return worst < 1e-7 and secs < 60, f"max rel residual {worst:.2e}, {secs:.1f}s"


def criterion_3():
    q = (0.3, 0.45, -0.7, -0.4)
    cfg = QuadratureConfig()
    t = time.perf_counter()
    parts, ok = [], True
    for which in IDENTITIES:
        pts = cli.feasible_identity_points(which, q, 20, seed=3, cfg=cfg)
        worst = max(abs(l - r) / (abs(l) + abs(r)) for _, _, l, r in pts)
        ok &= worst < 1e-6 and len(pts) == 20
        parts.append(f"{which} {worst:.1e}")
    secs = time.perf_counter() - t
    return ok and secs < 300, ", ".join(parts) + f", {secs:.1f}s"


STUDY_CASES = {
    "1": (0.3, 0.45, -0.7, -0.4),
    "2": (0.3, -0.6, 0.45, 0.7),
    "3": (0.3, 0.45, 0.6, -0.4),
    "4": (0.3, 0.45, -0.7, -0.4),
}


def criterion_4():
    t = time.perf_counter()
    parts, ok = [], True
    for theorem, q in STUDY_CASES.items():
        rep = cli.study_convergence(theorem, q, K_list=(0, 1, 2), shrink_steps=3)
        dev = max(s["deviation"] for s in rep.summary) if rep.ok else float("inf")
        ok &= rep.ok and dev <= 0.2
        parts.append(f"thm{theorem} max|slope-pred| {dev:.3f}")
    secs = time.perf_counter() - t
    return ok and secs < 300, ", ".join(parts) + f", {secs:.1f}s"


def _mp_hatA(a, c, d, k):
    e2 = lambda x: mpmath.exp(2j * mpmath.pi * x)
    H = lambda x, y: -(1 - e2(x)) * (1 - e2(y)) * mpmath.beta(x + 1, y + 1)
    ff = lambda x: mpmath.gamma(x + 1) / (mpmath.gamma(x + 1 - k) * mpmath.factorial(k))
    A1 = (e2(d) - 1) / (e2(c + d) - 1) * ff(c) * H(a, c + d - k)
    A2 = (e2(a) - 1) * mpmath.exp(1j * mpmath.pi * d) / (1 - e2(c + d)) * ff(a) * H(c, d + k)
    return complex(A1), complex(A2)


def criterion_5():
    worst = 0.0
    for a, c, d in ((0.3, -0.7, -0.4), (1.35, 0.45, -0.85), (-0.6, 1.2, 0.35)):
        ts = expansion_coeffs("1", (a, 0.0, c, d), 4, frozen=-1 - 1j)
        for k in range(4):
            A1, A2 = _mp_hatA(a, c, d, k)
            g1 = [x.coeff for x in ts.by_family("A1") if x.k == k][0]
            g2 = [x.coeff for x in ts.by_family("A2") if x.k == k][0]
            worst = max(worst, abs(g1 - A1) / abs(A1), abs(g2 - A2) / abs(A2))
    return worst < 1e-10, f"max rel diff {worst:.2e} over k <= 3"


def criterion_6():
    eps = 1e-3
    devs = [abs(sle.green_h(GreenInput(ALPHA, t1, math.pi - eps)) - math.sin(t1) ** (ALPHA - 1))
            for t1 in (0.5, 1.0, 1.5, 2.5)]
    return max(devs) < 1e-2, "deviations " + ", ".join(f"{x:.1e}" for x in devs)


def criterion_7():
    devs = [abs(sle.green_h(GreenInput(ALPHA, th, th + 1e-4)) - sle.green_hf(th, ALPHA))
            for th in (0.8, 1.6, 2.4)]
    return max(devs) < 1e-3, "deviations " + ", ".join(f"{x:.1e}" for x in devs)


def criterion_8():
    rng = random.Random(8)
    worst, n = 0.0, 0
    while n < 20:
        t2 = rng.uniform(0.1, math.pi - 0.1)
        if abs(t2 - math.pi / 2) < 1e-2:
            continue
        t1 = rng.uniform(0.05, t2 - 0.05)
        X = sle.green_X(t1, t2, ALPHA)
        worst = max(worst, abs(X.imag) / abs(X))
        n += 1
    return worst < 1e-7, f"max |Im X|/|X| {worst:.2e} on 20 points"


def criterion_9():
    xi = 1.0
    re_axis = 0.0
    for x in (-3.0, -1.0, -0.5, 0.0, 0.3, 0.8, 0.99):
        j = sle.eval_J((ALPHA, xi), x=x)
        re_axis = max(re_axis, abs(j.real) / abs(j))
    zero_exact = all(sle.eval_J((ALPHA, xi), x=x) == 0 for x in (1.0, 1.5, 10.0))
    h, cr = 1e-4, 0.0
    M = lambda w: sle.eval_M(SchrammInput(ALPHA, w, xi))
    for z in (0.4 + 0.8j, -1.2 + 0.6j, 2.1 + 0.3j):
        dy = (M(z + 1j * h).real - M(z - 1j * h).real) / (2 * h)
        dx = (M(z + h).imag - M(z - h).imag) / (2 * h)
        cr = max(cr, abs(dy + dx) / max(abs(dy), abs(dx)))
    rem = 0.0
    for z in (0.4 + 0.8j, -1.2 + 0.6j, 2.1 + 0.3j, 0.1 + 0.1j):
        s = SchrammInput(ALPHA, z, xi)
        m = sle.eval_M(s)
        rem = max(rem, abs(sle.re_M_identity(s) - m.real) / abs(m))
    ok = re_axis < 1e-8 and zero_exact and cr < 1e-4 and rem < 1e-9
    return ok, (f"Re J/|J| on axis {re_axis:.1e}, J(x>=xi)==0 {zero_exact}, "
                f"CR {cr:.1e}, Re M identity {rem:.1e}")


def criterion_10():
    worst_c, worst_r = 0.0, 0.0
    for a in (2.2, 2.5, 3.3):
        closed = sle.c_alpha(a)
        vals = [sle.c_alpha(a, "semicircle", r=r) for r in (0.3, 0.5, 0.7)]
        worst_c = max(worst_c, max(abs(v - closed) / abs(closed) for v in vals))
        worst_r = max(worst_r, (max(vals) - min(vals)) / abs(closed))
    return worst_c < 1e-6 and worst_r < 1e-6, f"closed vs semicircle {worst_c:.1e}, r spread {worst_r:.1e}"


def criterion_11():
    cfg = QuadratureConfig(rel_tol=1e-9)
    path_dev = 0.0
    for z in (-0.5 + 0.5j, 0.5 + 1.0j, 1.8 + 0.4j):
        s = SchrammInput(ALPHA, z)
        path_dev = max(path_dev, abs(sle.schramm_P(s, "ray") - sle.schramm_P(s, "detour")))
    left = sle.schramm_P(SchrammInput(ALPHA, cmath.rect(2.0, math.pi - 0.01)))
    right = sle.schramm_P(SchrammInput(ALPHA, cmath.rect(2.0, 0.01)))
    lo, hi = math.inf, -math.inf
    for i in range(10):
        for j in range(10):
            z = complex(-3 + 6 * (i + 0.5) / 10, 0.05 + 3 * j / 10)
            p = sle.schramm_P(SchrammInput(ALPHA, z), cfg=cfg, rel_tol=1e-7)
            lo, hi = min(lo, p), max(hi, p)
    ok = path_dev < 1e-6 and abs(left - 1) < 0.05 and abs(right) < 0.05 and lo >= -1e-3 and hi <= 1 + 1e-3
    return ok, (f"route diff {path_dev:.1e}, P(arg pi-0.01) {left:.4f}, P(arg 0.01) {right:.1e}, "
                f"grid range [{lo:.2e}, {hi:.4f}]")


def _random_factors(rng):
    w1 = _off_positive_axis(rng, 0.5, 3.0)
    w2 = _off_positive_axis(rng, 0.5, 3.0)
    while abs(w1 - w2) < 0.3:
        w2 = _off_positive_axis(rng, 0.5, 3.0)
    return [FactorSpec(0j, _noninteger(rng, -0.95, 2.5, 0.05)),
            FactorSpec(1 + 0j, _noninteger(rng, -0.95, 2.5, 0.05), orientation=-1),
            FactorSpec(w1, rng.uniform(-1.5, 1.5)), FactorSpec(w2, rng.uniform(-1.5, 1.5))]


def criterion_12():
    rel_tol = 1e-10
    cfg = QuadratureConfig(rel_tol=rel_tol)
    rng = random.Random(12)
    invariance, schwarz = 0.0, 0.0
    for n in range(50):
        fs = _random_factors(rng)
        path = build_pochhammer_contour(PochhammerSpec(tuple(fs), (0, 1), 0.5))
        ref = integrate_branched(fs, path, cfg=cfg)
        if n < 10:
            variants = (
                build_pochhammer_contour(PochhammerSpec(tuple(fs), (0, 1), 0.4)),
                build_pochhammer_contour(PochhammerSpec(tuple(fs), (0, 1), 0.5, radius_fraction=0.3)),
                path.split_segment(1, 0.41).split_segment(7, 0.6),
            )
            for v in variants:
                invariance = max(invariance, abs(integrate_branched(fs, v, cfg=cfg) - ref) / abs(ref))
        cf = [FactorSpec(complex(f.point).conjugate(), f.exponent, f.orientation) for f in fs]
        mirrored = integrate_branched(cf, path.conj(), cfg=cfg)
        schwarz = max(schwarz, abs(mirrored - ref.conjugate()) / abs(ref))
    ok = invariance <= 10 * rel_tol and schwarz < 1e-9
    return ok, f"basepoint/radius/split {invariance:.1e} (limit {10 * rel_tol:.0e}), Schwarz {schwarz:.1e} on 50"


CRITERIA = [
    ("1 H backend agreement", criterion_1),
    ("2 G vs 2F1", criterion_2),
    ("3 identity suite", criterion_3),
    ("4 expansion orders", criterion_4),
    ("5 b=0 slice coefficients", criterion_5),
    ("6 Green top-edge law", criterion_6),
    ("7 Green diagonal law", criterion_7),
    ("8 Im X = 0", criterion_8),
    ("9 Schramm identities", criterion_9),
    ("10 c_alpha", criterion_10),
    ("11 Schramm P", criterion_11),
    ("12 contour invariants", criterion_12),
]


def _report(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash counts as a failure of the criterion
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}", ok


@pytest.mark.parametrize("name, fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn, capsys):
    line, ok = _report(name, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_report(name, fn) for name, fn in CRITERIA]
    for line, _ in results:
        print(line)
    sys.exit(0 if all(ok for _, ok in results) else 1)
