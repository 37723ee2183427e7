import numpy as np
import pytest

from hystlwr import HState, ScalarLaw, default_family, velocity


def make_law(fam, xs, us, h=2.0):
    """Scalar law along one scanning curve (data must stay interior)."""
    return ScalarLaw(lambda u: velocity(fam, HState(u, h)),
                     lambda u: fam.dvS_u(u, h), xs, us)


def test_constant_data(fam):
    law = make_law(fam, [0.0], [2.5, 2.5])
    assert law.sample_one(-3.0, 4.0) == pytest.approx(2.5, abs=1e-8)
    assert law.sample_one(1.0, 0.0) == 2.5


def test_riemann_shock_speed(fam):
    # left faster (larger spacing), right slower: single shock at chord speed
    uL, uR, h = 2.8, 2.3, 2.0
    law = make_law(fam, [0.0], [uL, uR])
    vL = velocity(fam, HState(uL, h))
    vR = velocity(fam, HState(uR, h))
    s = -(vR - vL) / (uR - uL)
    t = 6.0
    assert law.sample_one(s * t - 0.05, t) == pytest.approx(uL, abs=1e-6)
    assert law.sample_one(s * t + 0.05, t) == pytest.approx(uR, abs=1e-6)


def test_riemann_rarefaction(fam):
    uL, uR, h = 2.3, 2.8, 2.0
    law = make_law(fam, [0.0], [uL, uR])
    t = 5.0
    lo = -fam.dvS_u(uL, h) * t
    hi = -fam.dvS_u(uR, h) * t
    assert law.sample_one(lo - 0.05, t) == pytest.approx(uL, abs=1e-6)
    assert law.sample_one(hi + 0.05, t) == pytest.approx(uR, abs=1e-6)
    # inside the fan, u follows the inverted characteristic speed
    xi = 0.5 * (lo + hi) / t
    u_mid = law.sample_one(xi * t, t)
    assert fam.dvS_u(u_mid, h) == pytest.approx(-xi, abs=1e-6)


def test_conservation(fam):
    law = make_law(fam, [-1.0, 0.0], [2.6, 2.3, 2.6])
    xs = np.linspace(-6.0, 2.0, 4001)
    dx = xs[1] - xs[0]
    m0 = float(np.sum(law.sample(0.0, xs) - 2.6)) * dx
    m5 = float(np.sum(law.sample(5.0, xs) - 2.6)) * dx
    assert m5 == pytest.approx(m0, abs=1e-3)


def test_slow_zone_width_shrinks_under_vD(fam):
    law = ScalarLaw(fam.vD, fam.dvD, [-1.0, 0.0], [2.05, 1.8, 2.05])
    thresh = fam.vD(1.8) + 0.05 * (fam.vD(2.05) - fam.vD(1.8))
    w1 = law.slow_zone_width(1.0, thresh, -4.0, 1.0, n=800)
    w20 = law.slow_zone_width(20.0, thresh, -12.0, 1.0, n=800)
    assert w20 < w1
