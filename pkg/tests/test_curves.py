import dataclasses
import math
import time

import pytest

from hystlwr import (CurveFamily, DomainError, DriverMode, HState,
                     branch_slope, default_family, family_from_json,
                     from_eulerian, in_band, make_family, mode_of, to_eulerian,
                     validate_family, velocity)


def test_crossing_point(fam):
    assert fam.u_c == pytest.approx(4.0)
    assert fam.h_c == pytest.approx(4.0)
    assert fam.v_c == pytest.approx(0.75)
    assert fam.vA(fam.u_c) == pytest.approx(fam.vD(fam.u_c), abs=1e-14)


def test_extremal_curve_values(fam):
    assert fam.vD(1.5) == 0.33333333333333337
    assert fam.vA(3.2) == 0.609375
    assert fam.vA(1.5) == 0.0          # clamped below u0A
    assert fam.dvA(1.5) == 0.0
    assert fam.dvA(5.0) == pytest.approx(8.0 / 125.0, abs=1e-15)
    assert fam.dvA(7.0) == pytest.approx(8.0 / 343.0, abs=1e-15)


def test_band_geometry(fam):
    assert fam.uA(2.0) == pytest.approx(3.0405591591021546, abs=1e-12)
    assert fam.uD(2.0) == 2.0
    assert fam.hA(3.2) == pytest.approx(2.255231232944287, abs=1e-10)
    # free zone: closed-form inverse
    assert fam.hA(fam.uA(7.6)) == pytest.approx(7.6, abs=1e-12)
    assert fam.hD(fam.uD(5.5)) == pytest.approx(5.5, abs=1e-12)


def test_velocity_branches(fam):
    assert velocity(fam, HState(2.0, 2.0)) == 0.5               # on vD
    assert velocity(fam, HState(5.0, 2.0)) == 0.84              # on vA
    assert velocity(fam, HState(3.0, 2.0)) == pytest.approx(
        0.5659702694933346, abs=1e-14)                          # scanning
    assert velocity(fam, HState(2.0, 1.9)) == pytest.approx(
        0.4837046727648069, abs=1e-14)


def test_velocity_domain_errors(fam):
    with pytest.raises(DomainError):
        velocity(fam, HState(0.5, 2.0))
    with pytest.raises(DomainError):
        velocity(fam, HState(2.0, 0.5))


def test_velocity_continuity_at_junctions(fam):
    for h in (1.3, 2.0, 3.1, 5.0, 7.0):
        lo, hi = fam.uD(h), fam.uA(h)
        assert velocity(fam, HState(lo, h)) == pytest.approx(fam.vD(lo), abs=1e-12)
        assert velocity(fam, HState(hi, h)) == pytest.approx(fam.vA(hi), abs=1e-12)


def test_branch_slope_matches_difference_quotient(fam):
    eps = 1e-7
    for s in (HState(2.5, 2.0), HState(5.0, 2.0), HState(6.2, 6.0)):
        num = (velocity(fam, HState(s.u + eps, s.h))
               - velocity(fam, HState(s.u - eps, s.h))) / (2 * eps)
        assert branch_slope(fam, s) == pytest.approx(num, rel=1e-5)


def test_mode_of(fam):
    assert mode_of(fam, HState(2.0, 2.0), -1) is DriverMode.DECELERATION
    assert mode_of(fam, HState(fam.uA(2.0), 2.0), +1) is DriverMode.ACCELERATION
    assert mode_of(fam, HState(3.0, 2.0), +1) is DriverMode.SCANNING
    assert mode_of(fam, HState(3.0, 2.0), -1) is DriverMode.SCANNING
    # riding a curve the "wrong way" is scanning
    assert mode_of(fam, HState(2.0, 2.0), +1) is DriverMode.SCANNING


def test_in_band(fam):
    assert in_band(fam, HState(2.5, 2.0))
    assert in_band(fam, HState(2.0, 2.0))
    assert not in_band(fam, HState(1.5, 2.0))
    assert not in_band(fam, HState(3.5, 2.0))


def test_eulerian_round_trip():
    s = from_eulerian(0.4, 2.0)
    assert s.u == pytest.approx(2.5)
    rho, h = to_eulerian(s)
    assert rho == pytest.approx(0.4)
    assert h == 2.0
    with pytest.raises(DomainError):
        from_eulerian(0.0, 2.0)


def test_family_from_json(fam):
    same = family_from_json({"builtin": "default-concave-v1"})
    assert same.name == fam.name
    custom = family_from_json({"custom": {"vbar": 1.0, "u0A": 2.0,
                                          "beta": 3.0}})
    assert velocity(custom, HState(2.0, 2.0)) == 0.5


def test_default_family_validates():
    t0 = time.time()
    report = validate_family(default_family(), grid_n=400)
    assert report.passed, report.summary()
    assert report.n_checked > 100_000
    assert time.time() - t0 < 5.0


def broken_families():
    """Six deliberate breakages, each targeting one validator inequality."""
    fam = default_family()
    yield ("vS-monotone-u",
           dataclasses.replace(fam, vS=lambda u, h: fam.vD(fam.uD(h)),
                               dvS_u=lambda u, h: 0.0))
    yield ("band-ordering",
           dataclasses.replace(fam, uA=fam.uD, uD=fam.uA))
    yield ("vD-concave",
           dataclasses.replace(fam, vD=lambda u: 0.01 * (u - 1.0) ** 2,
                               dvD=lambda u: 0.02 * (u - 1.0)))
    yield ("junction-vD",
           dataclasses.replace(fam, vS=lambda u, h: fam.vS(u, h) + 0.01))
    yield ("inverse-hA",
           dataclasses.replace(fam, hA=lambda u: u))
    yield ("junction-slope-vA", make_family(beta=2.0))


@pytest.mark.parametrize("intended,broken", list(broken_families()),
                         ids=[c for c, _ in broken_families()])
def test_mutated_families_fail_intended_check(intended, broken):
    report = validate_family(broken, grid_n=200)
    assert not report.passed
    assert intended in {v.check for v in report.violations}
