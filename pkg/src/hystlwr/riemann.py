"""Exact Riemann solvers for the hysteretic car-following system.

The solution fan depends on which side of the critical spacing u_c the left
state sits (free vs congested zone) and on the downstream velocity v+.  For
each regime the admissible candidate constructions are built in a fixed order
and the first one passing full fan validation is returned; the over-braking
variant routes through a deliberately deeper deceleration first.
"""

from __future__ import annotations

from dataclasses import dataclass

from scipy.optimize import brentq

from .curves import BAND_TOL, CurveFamily, HState, in_band, velocity
from .errors import (InadmissibleWaveError, InvalidOverbrakeError, NoRootError,
                     NoSolutionError)
from .waves import (NULL_STRENGTH, Wave, chord_s2a, chord_s2d, make_wave,
                    shock_speed)

_XTOL = 1e-14
SPEED_ORDER_TOL = 1e-9


@dataclass(frozen=True)
class RiemannFan:
    left: HState
    right: HState
    waves: tuple[Wave, ...]
    case_tag: str

    def to_json_dict(self) -> dict:
        return {"left": {"u": self.left.u, "h": self.left.h},
                "right": {"u": self.right.u, "h": self.right.h},
                "case_tag": self.case_tag,
                "waves": [w.to_json_dict() for w in self.waves]}


@dataclass(frozen=True)
class FanReport:
    passed: bool
    violations: tuple[str, ...]


def _u_on_scanning(fam: CurveFamily, h: float, v_target: float) -> float:
    """Spacing on scanning curve h with velocity v_target."""
    lo, hi = fam.uD(h), fam.uA(h)
    f = lambda u: fam.vS(u, h) - v_target
    if f(lo) >= 0.0:
        return lo
    if f(hi) <= 0.0:
        return hi
    return brentq(f, lo, hi, xtol=_XTOL)


def _u_on_vA(fam: CurveFamily, v_target: float) -> float:
    if v_target >= fam.vbar:
        raise NoSolutionError(f"velocity {v_target} not reachable on the acceleration curve")
    lo = fam.u0A * (1.0 + 1e-12)
    hi = max(4.0 * fam.u0A, 8.0)
    while fam.vA(hi) < v_target:
        hi *= 2.0
        if hi > 1e12:
            raise NoSolutionError("acceleration-curve inversion diverged")
    return brentq(lambda u: fam.vA(u) - v_target, lo, hi, xtol=_XTOL)


def _u_on_vD(fam: CurveFamily, v_target: float) -> float:
    if v_target >= fam.vbar:
        raise NoSolutionError(f"velocity {v_target} not reachable on the deceleration curve")
    if v_target <= 0.0:
        return 1.0
    hi = 8.0
    while fam.vD(hi) < v_target:
        hi *= 2.0
        if hi > 1e12:
            raise NoSolutionError("deceleration-curve inversion diverged")
    return brentq(lambda u: fam.vD(u) - v_target, 1.0, hi, xtol=_XTOL)


def tangent_on_scanning(fam: CurveFamily, h_minus: float, u2: float) -> float:
    """Abscissa u1 on scanning curve h- where the chord to (u2, vA(u2)) is
    tangent to the scanning curve.  Raises when no tangency exists."""
    lo, hi = fam.uD(h_minus), fam.uA(h_minus)
    w = hi - lo
    if w <= 1e-10:
        raise NoRootError("band collapsed: no tangency")
    v2 = fam.vA(u2)

    def g(u1):
        return fam.dvS_u(u1, h_minus) * (u2 - u1) - (v2 - fam.vS(u1, h_minus))

    a = lo + 1e-9 * w
    b = hi - 1e-9 * w
    n = 64
    prev_u, prev_g = a, g(a)
    for i in range(1, n + 1):
        u = a + (b - a) * i / n
        gu = g(u)
        if prev_g == 0.0:
            return prev_u
        if prev_g * gu < 0.0:
            return brentq(g, prev_u, u, xtol=_XTOL)
        prev_u, prev_g = u, gu
    raise NoRootError("chord never tangent to the scanning curve")


def tangent_on_accel(fam: CurveFamily, left: HState) -> float:
    """Abscissa u4 > u- where the chord from the left state is tangent to vA."""
    v_minus = velocity(fam, left)

    def g(u4):
        return fam.dvA(u4) * (u4 - left.u) - (fam.vA(u4) - v_minus)

    a = max(fam.uA(left.h), fam.u0A * (1.0 + 1e-9), left.u + 1e-9)
    if g(a) <= 0.0:
        raise NoRootError("no tangency on the acceleration curve from this state")
    b = max(2.0 * a, 8.0)
    while g(b) > 0.0:
        b *= 2.0
        if b > 1e12:
            raise NoRootError("tangency search diverged")
    return brentq(g, a, b, xtol=_XTOL)


def _dedup(waves: list[Wave]) -> tuple[Wave, ...]:
    return tuple(w for w in waves if w.strength >= NULL_STRENGTH)


def _accel_candidates(fam: CurveFamily, left: HState, right: HState):
    """Candidate wave lists taking the left state up to v(right), in order of
    increasing downstream speed regime, each ending with a stationary contact."""
    v_plus = velocity(fam, right)
    h = left.h
    band_top = HState(fam.uA(h), h)
    out = []

    def finish(tag, waves, last_state):
        tail = list(waves)
        if abs(last_state.u - right.u) >= NULL_STRENGTH or abs(last_state.h - right.h) > 1e-9:
            tail.append(make_wave(fam, "ST", last_state, right))
        out.append((tag, tail))

    # (a) rarefaction within the scanning curve
    if v_plus <= velocity(fam, band_top) + 1e-12:
        u_m = _u_on_scanning(fam, h, v_plus)
        m = HState(u_m, h)
        try:
            waves = [] if u_m - left.u < NULL_STRENGTH else [make_wave(fam, "ScR", left, m)]
            finish("iii.a", waves, m)
        except InadmissibleWaveError:
            pass
    try:
        u2 = _u_on_vA(fam, v_plus)
    except NoSolutionError:
        return out
    m2 = HState(u2, fam.hA(u2))
    # left already on the band top: ride the acceleration curve directly
    if abs(left.u - fam.uA(h)) <= 1e-9 * max(1.0, left.u) and u2 > left.u:
        start = HState(left.u, fam.hA(left.u))
        try:
            finish("iii.ar", [make_wave(fam, "AR", start, m2)], m2)
        except InadmissibleWaveError:
            pass
    # (b) scanning rarefaction up to the tangency point, then the shock
    try:
        u1 = tangent_on_scanning(fam, h, u2)
        if u1 > left.u + 1e-12:
            m1 = HState(u1, h)
            finish("iii.b", [make_wave(fam, "ScR", left, m1),
                             make_wave(fam, "ScAS", m1, m2)], m2)
    except (NoRootError, InadmissibleWaveError):
        pass
    # (c) single shock straight to the acceleration curve
    try:
        finish("iii.c", [make_wave(fam, "ScAS", left, m2)], m2)
    except InadmissibleWaveError:
        pass
    # (d) tangent shock glued to an acceleration rarefaction
    try:
        u4 = tangent_on_accel(fam, left)
        if u4 < u2 - 1e-12:
            m4 = HState(u4, fam.hA(u4))
            finish("iii.d", [make_wave(fam, "ScAS", left, m4),
                             make_wave(fam, "AR", m4, m2)], m2)
    except (NoRootError, InadmissibleWaveError):
        pass
    return out


def _brake_candidates_congested(fam: CurveFamily, left: HState, right: HState):
    v_plus = velocity(fam, right)
    h = left.h
    v_bottom = fam.vD(fam.uD(h))
    out = []
    if v_plus >= v_bottom - 1e-12:
        # stays on the scanning curve
        u_m = _u_on_scanning(fam, h, v_plus)
        m = HState(u_m, h)
        waves = [] if left.u - u_m < NULL_STRENGTH else [make_wave(fam, "ScS", left, m)]
        if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
            waves.append(make_wave(fam, "ST", m, right))
        out.append(("ii", waves))
    if v_plus < v_bottom + 1e-12:
        u_m = _u_on_vD(fam, v_plus)
        m = HState(u_m, fam.hD(u_m))
        try:
            waves = [make_wave(fam, "DS" if left.u <= fam.uD(h) + BAND_TOL else "ScDS",
                               left, m)]
            if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
                waves.append(make_wave(fam, "ST", m, right))
            out.append(("i", waves))
        except InadmissibleWaveError:
            pass
    return out


def _brake_candidates_free(fam: CurveFamily, left: HState, right: HState):
    v_plus = velocity(fam, right)
    h = left.h
    u_bot = fam.uD(h)
    v_bottom = fam.vD(u_bot)
    out = []
    # (a) scanning shock down to the band bottom, then ride the deceleration curve
    if v_plus >= v_bottom - 1e-12:
        u_m = _u_on_scanning(fam, h, v_plus)
        m = HState(u_m, h)
        waves = [] if left.u - u_m < NULL_STRENGTH else [make_wave(fam, "ScS", left, m)]
        if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
            waves.append(make_wave(fam, "ST", m, right))
        out.append(("ii.a", waves))
    else:
        bottom = HState(u_bot, h)
        u_m = _u_on_vD(fam, v_plus)
        m = HState(u_m, fam.hD(u_m))
        try:
            waves = []
            if left.u - u_bot >= NULL_STRENGTH:
                waves.append(make_wave(fam, "ScS", left, bottom))
            waves.append(make_wave(fam, "DS", HState(u_bot, fam.hD(u_bot)), m))
            if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
                waves.append(make_wave(fam, "ST", m, right))
            out.append(("ii.a", waves))
        except InadmissibleWaveError:
            pass
        # (b) single shock from the scanning state straight to the deceleration curve
        try:
            waves = [make_wave(fam, "ScDS", left, m)]
            if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
                waves.append(make_wave(fam, "ST", m, right))
            out.append(("ii.b", waves))
        except InadmissibleWaveError:
            pass
    return out


def _accel_candidates_free(fam: CurveFamily, left: HState, right: HState):
    v_plus = velocity(fam, right)
    h = left.h
    band_top = HState(fam.uA(h), h)
    out = []
    if v_plus <= velocity(fam, band_top) + 1e-12:
        u_m = _u_on_scanning(fam, h, v_plus)
        m = HState(u_m, h)
        waves = [] if u_m - left.u < NULL_STRENGTH else [make_wave(fam, "ScR", left, m)]
        if abs(m.u - right.u) >= NULL_STRENGTH or abs(m.h - right.h) > 1e-9:
            waves.append(make_wave(fam, "ST", m, right))
        out.append(("i", waves))
    else:
        u2 = _u_on_vA(fam, v_plus)
        m2 = HState(u2, fam.hA(u2))
        try:
            waves = []
            if band_top.u - left.u >= NULL_STRENGTH:
                waves.append(make_wave(fam, "ScR", left, band_top))
            waves.append(make_wave(fam, "AR", HState(band_top.u, fam.hA(band_top.u)), m2))
            if abs(m2.u - right.u) >= NULL_STRENGTH or abs(m2.h - right.h) > 1e-9:
                waves.append(make_wave(fam, "ST", m2, right))
            out.append(("i", waves))
        except InadmissibleWaveError:
            pass
    return out


def validate_fan(fam: CurveFamily, fan: RiemannFan) -> FanReport:
    """Check every structural fan invariant plus per-wave admissibility."""
    bad: list[str] = []
    waves = fan.waves
    if not waves:
        if abs(fan.left.u - fan.right.u) > 1e-9 or abs(fan.left.h - fan.right.h) > 1e-9:
            bad.append("empty fan between distinct states")
        return FanReport(not bad, tuple(bad))
    if abs(waves[0].left.u - fan.left.u) > 1e-9 or abs(waves[0].left.h - fan.left.h) > 1e-9:
        bad.append("first wave does not start at the left state")
    for i in range(len(waves) - 1):
        a, b = waves[i], waves[i + 1]
        if abs(a.right.u - b.left.u) > 1e-9 or abs(a.right.h - b.left.h) > 1e-9:
            bad.append(f"waves {i} and {i+1} do not share their middle state")
    prev_hi = -float("inf")
    for i, w in enumerate(waves):
        lo, hi = w.speed_range
        if lo < prev_hi - SPEED_ORDER_TOL:
            bad.append(f"wave {i} ({w.kind}) breaks the speed ordering")
        prev_hi = max(prev_hi, hi)
        if w.kind == "ST":
            if i != len(waves) - 1:
                bad.append("stationary contact is not the last wave")
            if abs(w.speed) > 0.0:
                bad.append("stationary contact with nonzero speed")
        else:
            if hi >= 1e-12:
                bad.append(f"wave {i} ({w.kind}) has nonnegative speed")
        if not in_band(fam, w.left) or not in_band(fam, w.right):
            bad.append(f"wave {i} ({w.kind}) touches an out-of-band state")
        try:
            rebuilt = make_wave(fam, w.kind, w.left, w.right)
        except InadmissibleWaveError as exc:
            bad.append(f"wave {i} ({w.kind}) inadmissible: {exc}")
            continue
        if w.is_shock and abs(rebuilt.speed - w.speed) > 1e-9:
            bad.append(f"wave {i} ({w.kind}) speed mismatch")
    last = waves[-1]
    if last.kind == "ST":
        if abs(last.right.u - fan.right.u) > 1e-9 or abs(last.right.h - fan.right.h) > 1e-9:
            bad.append("stationary contact does not end at the right state")
    else:
        try:
            if abs(velocity(fam, last.right) - velocity(fam, fan.right)) > 1e-9:
                bad.append("fan ends at the wrong velocity")
            if abs(last.right.u - fan.right.u) > 1e-9:
                bad.append("fan without stationary contact ends at the wrong spacing")
        except Exception:
            bad.append("right state not evaluable")
    return FanReport(not bad, tuple(bad))


def _first_valid(fam, left, right, tagged_candidates, zone) -> RiemannFan:
    rejected = []
    for tag, waves in tagged_candidates:
        fan = RiemannFan(left, right, _dedup(waves), f"{zone}.{tag}")
        report = validate_fan(fam, fan)
        if report.passed:
            return fan
        rejected.append((fan.case_tag, report.violations))
    raise NoSolutionError(f"no admissible fan; rejected candidates: {rejected}")


def solve_riemann(fam: CurveFamily, left: HState, right: HState) -> RiemannFan:
    """Deterministic (rational-driver) Riemann solver."""
    if not in_band(fam, left) or not in_band(fam, right):
        raise NoSolutionError("Riemann data must be in-band")
    if abs(left.u - right.u) < NULL_STRENGTH and abs(left.h - right.h) < 1e-12:
        return RiemannFan(left, right, (), "const")
    v_minus = velocity(fam, left)
    v_plus = velocity(fam, right)
    if v_plus > fam.vbar:
        raise NoSolutionError("downstream velocity exceeds the free-flow speed")
    if left.u >= fam.u_c - 1e-12:
        if v_plus >= v_minus:
            cands = _accel_candidates_free(fam, left, right)
        else:
            cands = _brake_candidates_free(fam, left, right)
        return _first_valid(fam, left, right, cands, "C1")
    if v_plus <= v_minus:
        cands = _brake_candidates_congested(fam, left, right)
        # prefer the scanning-only construction when both apply
        cands.sort(key=lambda c: 0 if c[0] == "ii" else 1)
        return _first_valid(fam, left, right, cands, "C2")
    return _first_valid(fam, left, right, _accel_candidates(fam, left, right), "C2")


def solve_riemann_overbraking(fam: CurveFamily, left: HState, right: HState,
                              v2: float) -> RiemannFan:
    """Over-braking solver: decelerate below the downstream speed first.

    The driver over-brakes to speed v2 < v+ on the deceleration curve, then
    recovers; the fan is ScDS -> (ScR or ScAS) -> ST.  The model admits a
    one-parameter family of such solutions; v2 makes the driver choice
    explicit.
    """
    if not in_band(fam, left) or not in_band(fam, right):
        raise NoSolutionError("Riemann data must be in-band")
    v_plus = velocity(fam, right)
    if v2 >= v_plus - 1e-12:
        raise InvalidOverbrakeError(f"over-braking speed {v2} must be below v+ = {v_plus}")
    if v2 <= 0.0:
        raise InvalidOverbrakeError("over-braking speed must be positive")
    u2p = _u_on_vD(fam, v2)
    over = HState(u2p, fam.hD(u2p))
    try:
        first = make_wave(fam, "DS" if left.u <= fam.uD(left.h) + BAND_TOL else "ScDS",
                          left, over)
    except InadmissibleWaveError as exc:
        raise InvalidOverbrakeError(f"over-braking chord fails: {exc}") from exc
    rejected = []
    for tag, tail in _accel_candidates(fam, over, right):
        fan = RiemannFan(left, right, _dedup([first] + tail), f"OB.{tag}")
        report = validate_fan(fam, fan)
        if report.passed:
            return fan
        rejected.append((fan.case_tag, report.violations))
    raise InvalidOverbrakeError(f"no admissible over-braking fan: {rejected}")
