"""Elementary waves: construction, chord admissibility, viscous-profile oracle.

Seven wave kinds connect left and right states (fronts move upstream through
the platoon, so every non-stationary speed is negative):

    ScS   shock within one scanning curve (h constant, spacing drops)
    ScR   rarefaction within one scanning curve (spacing opens up)
    AR    rarefaction riding the acceleration curve
    DS    shock riding the deceleration curve
    ScAS  shock from a scanning state up to the acceleration curve
    ScDS  shock from a scanning state down to the deceleration curve
    ST    stationary contact: equal velocities, different spacing
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import BAND_TOL, CurveFamily, HState, in_band, velocity
from .errors import DegenerateJumpError, InadmissibleWaveError, OutOfFanError

SHOCK_KINDS = ("ScS", "DS", "ScAS", "ScDS", "ST")
RAREFACTION_KINDS = ("ScR", "AR")
WAVE_KINDS = SHOCK_KINDS + RAREFACTION_KINDS

ST_VEL_TOL = 1e-12
NULL_STRENGTH = 1e-12
CHORD_SLACK = 1e-9


@dataclass(frozen=True)
class Wave:
    kind: str
    left: HState
    right: HState
    speed: float | None = None      # shock kinds
    fan: tuple[float, float] | None = None  # rarefaction kinds: (xi_left, xi_right)

    @property
    def is_shock(self) -> bool:
        return self.kind in SHOCK_KINDS

    @property
    def strength(self) -> float:
        return abs(self.right.u - self.left.u)

    @property
    def speed_range(self) -> tuple[float, float]:
        """(slowest, fastest) propagation speed carried by the wave."""
        if self.is_shock:
            return (self.speed, self.speed)
        return self.fan

    def to_json_dict(self) -> dict:
        rec = {"kind": self.kind,
               "left": {"u": self.left.u, "h": self.left.h},
               "right": {"u": self.right.u, "h": self.right.h}}
        if self.is_shock:
            rec["speed"] = self.speed
        else:
            rec["fan"] = [self.fan[0], self.fan[1]]
        return rec


def wave_from_json_dict(rec: dict) -> Wave:
    left = HState(rec["left"]["u"], rec["left"]["h"])
    right = HState(rec["right"]["u"], rec["right"]["h"])
    if "speed" in rec:
        return Wave(rec["kind"], left, right, speed=rec["speed"])
    return Wave(rec["kind"], left, right, fan=(rec["fan"][0], rec["fan"][1]))


@dataclass(frozen=True)
class ProfileReport:
    connected: bool
    max_endpoint_gap: float
    monotone: bool
    steps: int


def shock_speed(fam: CurveFamily, left: HState, right: HState) -> float:
    """Jump condition in car-following coordinates: s = -(v+ - v-)/(u+ - u-)."""
    du = right.u - left.u
    if abs(du) < 1e-14:
        raise DegenerateJumpError(f"|u+ - u-| = {abs(du)} too small for a shock")
    return -(velocity(fam, right) - velocity(fam, left)) / du


def _chord_points(fam: CurveFamily, left: HState, u_plus: float, n_samples: int):
    """Interior abscissae for chord checks: even samples plus both junctions."""
    lo, hi = sorted((left.u, u_plus))
    pts = [lo + (hi - lo) * i / (n_samples + 1) for i in range(1, n_samples + 1)]
    for junction in (fam.uA(left.h), fam.uD(left.h), fam.u0A):
        if lo + 1e-12 < junction < hi - 1e-12:
            pts.append(junction)
    return pts


def chord_s2a(fam: CurveFamily, left: HState, u_plus: float,
              n_samples: int = 256) -> bool:
    """Chord condition for a scanning-to-acceleration shock.

    The secant from (u-, v-) to (u+, vA(u+)) must lie strictly above both the
    extended scanning curve through the left state and the acceleration curve
    at every interior spacing.  Fails identically in the free zone, where vA
    runs above vD.
    """
    if u_plus - left.u <= 1e-12:
        return False
    v_minus = velocity(fam, left)
    v_plus = fam.vA(u_plus)
    slope = (v_plus - v_minus) / (u_plus - left.u)
    for u in _chord_points(fam, left, u_plus, n_samples):
        line = v_minus + slope * (u - left.u)
        if velocity(fam, HState(u, left.h)) > line + CHORD_SLACK:
            return False
        if fam.vA(u) > line + CHORD_SLACK:
            return False
    return True


def chord_s2d(fam: CurveFamily, left: HState, u_plus: float,
              n_samples: int = 256) -> bool:
    """Chord condition for a scanning-to-deceleration shock (mirror image).

    The secant from (u-, v-) down to (u+, vD(u+)) must stay strictly below the
    extended scanning curve through the left state on the interior.
    """
    if left.u - u_plus <= 1e-12:
        return False
    v_minus = velocity(fam, left)
    v_plus = fam.vD(u_plus)
    slope = (v_plus - v_minus) / (u_plus - left.u)
    for u in _chord_points(fam, left, u_plus, n_samples):
        line = v_minus + slope * (u - left.u)
        if velocity(fam, HState(u, left.h)) < line - CHORD_SLACK:
            return False
    return True


def _require(cond: bool, msg: str):
    if not cond:
        raise InadmissibleWaveError(msg)


def _on_vA(fam: CurveFamily, s: HState, tol: float = 1e-7) -> bool:
    return abs(s.u - fam.uA(s.h)) <= tol * max(1.0, s.u)


def _on_vD(fam: CurveFamily, s: HState, tol: float = 1e-7) -> bool:
    return abs(s.u - fam.uD(s.h)) <= tol * max(1.0, s.u)


def make_wave(fam: CurveFamily, kind: str, left: HState, right: HState) -> Wave:
    """Construct one elementary wave, enforcing its admissibility preconditions."""
    if kind not in WAVE_KINDS:
        raise InadmissibleWaveError(f"unknown wave kind {kind!r}")
    if kind == "ScS":
        _require(abs(left.h - right.h) <= 1e-9, "ScS needs a single scanning curve")
        _require(left.u > right.u, "ScS needs decreasing spacing")
        _require(in_band(fam, left) and in_band(fam, right), "ScS states must be in-band")
        return Wave(kind, left, right, speed=shock_speed(fam, left, right))
    if kind == "ScR":
        _require(abs(left.h - right.h) <= 1e-9, "ScR needs a single scanning curve")
        _require(left.u < right.u, "ScR needs increasing spacing")
        _require(in_band(fam, left) and in_band(fam, right), "ScR states must be in-band")
        fan = (-fam.dvS_u(left.u, left.h), -fam.dvS_u(right.u, right.h))
        return Wave(kind, left, right, fan=fan)
    if kind == "AR":
        _require(_on_vA(fam, left) and _on_vA(fam, right),
                 "AR states must lie on the acceleration curve")
        _require(left.u < right.u, "no connection is possible: AR needs increasing spacing")
        return Wave(kind, left, right, fan=(-fam.dvA(left.u), -fam.dvA(right.u)))
    if kind == "DS":
        _require(_on_vD(fam, left) and _on_vD(fam, right),
                 "DS states must lie on the deceleration curve")
        _require(left.u > right.u, "no connection is possible: DS needs decreasing spacing")
        return Wave(kind, left, right, speed=shock_speed(fam, left, right))
    if kind == "ST":
        dv = abs(velocity(fam, left) - velocity(fam, right))
        _require(dv <= ST_VEL_TOL, f"ST needs matched velocities (|dv|={dv})")
        return Wave(kind, left, right, speed=0.0)
    if kind == "ScAS":
        _require(_on_vA(fam, right), "ScAS right state must lie on the acceleration curve")
        _require(right.u > left.u, "ScAS needs increasing spacing")
        _require(right.h > left.h - 1e-9, "ScAS must raise the hysteresis parameter")
        _require(chord_s2a(fam, left, right.u), "ScAS chord condition fails")
        return Wave(kind, left, right, speed=shock_speed(fam, left, right))
    # ScDS
    _require(_on_vD(fam, right), "ScDS right state must lie on the deceleration curve")
    _require(right.u < fam.uD(left.h) + BAND_TOL,
             "ScDS must land below the left state's band")
    _require(right.h < left.h + 1e-9, "ScDS must lower the hysteresis parameter")
    _require(chord_s2d(fam, left, right.u), "ScDS chord condition fails")
    return Wave(kind, left, right, speed=shock_speed(fam, left, right))


def rarefaction_state(fam: CurveFamily, w: Wave, xi: float) -> HState:
    """State inside a fan: invert -xi = v_u on the wave's branch by bisection."""
    if w.kind not in RAREFACTION_KINDS:
        raise InadmissibleWaveError(f"{w.kind} carries no fan")
    xi_l, xi_r = w.fan
    if xi < xi_l - 1e-12 or xi > xi_r + 1e-12:
        raise OutOfFanError(f"xi={xi} outside fan [{xi_l}, {xi_r}]")
    if abs(xi - xi_l) <= 1e-12:
        return w.left
    if abs(xi - xi_r) <= 1e-12:
        return w.right
    slope = lambda u: (fam.dvA(u) if w.kind == "AR" else fam.dvS_u(u, w.left.h))
    lo, hi = w.left.u, w.right.u
    target = -xi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if slope(mid) > target:  # slope decreases in u (concavity)
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    u = 0.5 * (lo + hi)
    h = fam.hA(u) if w.kind == "AR" else w.left.h
    return HState(u, h)


def _profile_path(fam: CurveFamily, w: Wave, blend: float = 0.0):
    """Velocity along the viscous connecting path as a function of u.

    Non-stationary shocks follow the extended velocity law of the left
    state's scanning curve (constant h glued to the ridden extremal branch).
    The stationary contact uses a straight (u, h) segment between endpoints,
    optionally bowed toward the band edge by an endpoint-preserving bump.
    """
    if w.kind != "ST":
        h = w.left.h
        return lambda u: velocity(fam, HState(u, h))
    u0, h0 = w.left.u, w.left.h
    u1, h1 = w.right.u, w.right.h
    raise_v = u0 > u1  # interior velocity must exceed v- when spacing drops

    def path_v(u):
        theta = (u - u1) / (u0 - u1)
        h = h1 + (h0 - h1) * theta
        if blend > 0.0:
            # push toward whichever band edge moves the velocity the right way
            if (u < fam.u_c) == raise_v:
                edge = fam.hD(u)
            else:
                edge = fam.hA(u)
            bump = 4.0 * theta * (1.0 - theta)
            h = h + blend * bump * (edge - h)
        return velocity(fam, HState(u, max(1.0, h)))

    return path_v


def _integrate_profile(fam: CurveFamily, w: Wave, path_v, n_steps: int,
                       tol: float) -> ProfileReport:
    u_minus, u_plus = w.left.u, w.right.u
    v_minus = velocity(fam, w.left)
    s = w.speed
    span = abs(u_plus - u_minus)
    sigma = 1.0 if u_plus > u_minus else -1.0

    def f(u):
        return -s * (u - u_minus) - (path_v(u) - v_minus)

    # profile "time" scale from the linearized rates at both endpoints
    delta = 1e-6 * span
    eps = 1e-8 * span
    lam_minus = max(abs(f(u_minus + sigma * delta)) / delta, 1e-12)
    lam_plus = max(abs(f(u_plus - sigma * delta) ) / delta, 1e-12)
    horizon = 2.0 * (16.0 / lam_minus + 16.0 / lam_plus)
    # cap the step against the stiffest local rate so RK4 stays stable
    lam_max = lam_minus
    for k in range(1, 32):
        u = u_minus + sigma * span * k / 32.0
        lam = abs((f(u + sigma * eps) - f(u)) / eps)
        lam_max = max(lam_max, lam)
    dy = min(horizon / n_steps, 0.2 / max(lam_max, 1e-12))

    u = u_minus + sigma * delta
    lo_guard = min(u_minus, u_plus) - 0.1
    hi_guard = max(u_minus, u_plus) + 0.1
    monotone = True
    steps = 0
    max_steps = 16 * n_steps
    prev_gap = abs(u - u_plus)
    while steps < max_steps:
        k1 = f(u)
        k2 = f(u + 0.5 * dy * k1)
        k3 = f(u + 0.5 * dy * k2)
        k4 = f(u + dy * k3)
        du = dy * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if du * sigma < -1e-12:
            monotone = False
        u += du
        steps += 1
        if u < lo_guard or u > hi_guard:
            return ProfileReport(False, abs(u - u_plus), monotone, steps)
        gap = abs(u - u_plus)
        if gap <= 0.1 * tol:
            break
        if steps % n_steps == 0:
            if gap >= prev_gap - 1e-15:
                break  # stalled: not converging toward the far state
            prev_gap = gap
    gap = abs(u - u_plus)
    return ProfileReport(gap <= tol and monotone, gap, monotone, steps)


def viscous_profile_check(fam: CurveFamily, w: Wave, n_steps: int = 10_000,
                          tol: float = 1e-6) -> ProfileReport:
    """Integrate the traveling-wave ODE u' = -s(u - u-) - (v(u,h(u)) - v-)
    along the wave's mode path and report whether it connects the endpoints
    monotonically."""
    if w.kind not in SHOCK_KINDS:
        raise InadmissibleWaveError(f"{w.kind} has no viscous profile")
    if w.kind != "ST":
        return _integrate_profile(fam, w, _profile_path(fam, w), n_steps, tol)
    # stationary contact: the interior velocity must sit on one side of v-;
    # bow the (u,h) path toward the band edge until the sign condition holds
    v_minus = velocity(fam, w.left)
    need = 1.0 if w.left.u > w.right.u else -1.0
    report = None
    for attempt in range(8):
        blend = attempt / 7.0
        path_v = _profile_path(fam, w, blend=blend)
        ok = True
        for k in range(1, 64):
            u = w.left.u + (w.right.u - w.left.u) * k / 64.0
            if (path_v(u) - v_minus) * need <= 0.0:
                ok = False
                break
        if not ok:
            continue
        report = _integrate_profile(fam, w, path_v, n_steps, tol)
        if report.connected:
            return report
    return report if report is not None else ProfileReport(False, float("inf"), False, 0)
