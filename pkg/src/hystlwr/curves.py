"""Hysteretic spacing-velocity curve families, the state space, and validation.

A driver state is a pair (u, h): u is the spacing ahead (car lengths per car,
u >= 1, density rho = 1/u) and h >= 1 selects the scanning curve the driver is
currently on.  A family supplies three velocity laws:

    vD(u)      deceleration curve, ridden while durably braking,
    vA(u)      acceleration curve, ridden while durably speeding up,
    vS(u, h)   scanning curve h, followed in between,

together with the band edges uD(h) <= u <= uA(h) on which vS(., h) lives and
their inverses hD, hA.  The two extremal curves cross once, at (u_c, v_c); for
u < u_c (congested zone) vD lies above vA, for u > u_c (free zone) below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError

BAND_TOL = 1e-9


class DriverMode(Enum):
    ACCELERATION = "acceleration"
    DECELERATION = "deceleration"
    SCANNING = "scanning"


@dataclass(frozen=True)
class HState:
    """Driver state: spacing u and hysteresis parameter h."""

    u: float
    h: float

    def astuple(self) -> tuple[float, float]:
        return (self.u, self.h)


@dataclass(frozen=True)
class CurveFamily:
    """Immutable bundle of curve laws; all callables accept floats or arrays."""

    name: str
    vbar: float
    u0A: float
    u_c: float
    v_c: float
    h_c: float
    vA: Callable
    vD: Callable
    vS: Callable
    dvA: Callable
    dvD: Callable
    dvS_u: Callable
    uA: Callable
    uD: Callable
    hA: Callable
    hD: Callable
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Violation:
    check: str
    u: float
    h: float
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]
    n_checked: int

    def summary(self) -> str:
        if self.passed:
            return f"pass ({self.n_checked} lattice checks)"
        by_check: dict[str, int] = {}
        for v in self.violations:
            by_check[v.check] = by_check.get(v.check, 0) + 1
        parts = ", ".join(f"{k} x{n}" for k, n in sorted(by_check.items()))
        return f"fail: {parts}"


def _is_array(x) -> bool:
    return isinstance(x, np.ndarray)


def make_family(
    vbar: float = 1.0,
    u0A: float = 2.0,
    band_c1: float = 0.15,
    band_c2: float = 0.2,
    beta: float = 3.0,
    name: str = "default-concave-v1",
) -> CurveFamily:
    """Build the concave closed-form family.

    vD(u) = vbar (1 - 1/u); vA(u) = vbar max(0, 1 - u0A^2/u^2); the curves
    cross at u_c = u0A^2.  Scanning curves are labeled by their lower junction:
    uD(h) = h.  Band top: uA(h) = u0A sqrt(h) (1 + band_c1 (1 - h/h_c)) on the
    congested side, uA(h) = h + band_c2 (h - h_c) on the free side.  Scanning
    interpolant: vS = vD(h) + Delta(h) phi(t), phi(t) = t (beta - t)/(beta - 1)
    with t the normalized band coordinate; beta > 2 keeps the junction slope at
    the band top strictly positive.
    """
    if beta <= 2.0:
        # still constructible (mutation testing relies on it), but the
        # validator will flag the vanishing junction slope
        pass
    u_c = u0A * u0A
    h_c = u_c
    v_c = vbar * (1.0 - 1.0 / u_c)
    q = u0A * u0A  # vA(u) = vbar (1 - q/u^2)

    def vD(u):
        return vbar * (1.0 - 1.0 / u)

    def dvD(u):
        return vbar / (u * u)

    def vA(u):
        raw = vbar * (1.0 - q / (u * u))
        if _is_array(raw):
            return np.maximum(0.0, raw)
        return max(0.0, raw)

    def dvA(u):
        if _is_array(u):
            return np.where(u > u0A, 2.0 * vbar * q / (u * u * u), 0.0)
        return 2.0 * vbar * q / (u * u * u) if u > u0A else 0.0

    def uD(h):
        return h

    def hD(u):
        return u

    def _uA_cong(h):
        return u0A * np.sqrt(h) * (1.0 + band_c1 * (1.0 - h / h_c)) if _is_array(h) \
            else u0A * math.sqrt(h) * (1.0 + band_c1 * (1.0 - h / h_c))

    def uA(h):
        if _is_array(h):
            return np.where(h <= h_c, _uA_cong(h), h + band_c2 * (h - h_c))
        if h <= h_c:
            return _uA_cong(h)
        return h + band_c2 * (h - h_c)

    def _hA_scalar(u):
        top = (u + band_c2 * h_c) / (1.0 + band_c2)
        if top >= h_c:
            return top
        # congested side: invert the sqrt branch by bisection (monotone on [1, h_c])
        lo, hi = 1.0, h_c
        if u <= _uA_cong(1.0):
            return 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _uA_cong(mid) < u:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-15:
                break
        return 0.5 * (lo + hi)

    def hA(u):
        if _is_array(u):
            return np.array([_hA_scalar(x) for x in u])
        return _hA_scalar(u)

    def _band(h):
        lo = h
        hi = uA(h)
        return lo, hi

    def vS(u, h):
        lo, hi = _band(h)
        w = hi - lo
        v_lo = vbar * (1.0 - 1.0 / lo)
        if _is_array(w) or _is_array(u):
            w = np.asarray(w, dtype=float)
            tiny = w <= 1e-12
            wsafe = np.where(tiny, 1.0, w)
            t = (u - lo) / wsafe
            delta = vA(hi) - v_lo
            phi = t * (beta - t) / (beta - 1.0)
            return np.where(tiny, v_lo, v_lo + delta * phi)
        if w <= 1e-12:
            return v_lo
        t = (u - lo) / w
        delta = vA(hi) - v_lo
        return v_lo + delta * t * (beta - t) / (beta - 1.0)

    def dvS_u(u, h):
        lo, hi = _band(h)
        w = hi - lo
        v_lo = vbar * (1.0 - 1.0 / lo)
        if _is_array(w) or _is_array(u):
            w = np.asarray(w, dtype=float)
            tiny = w <= 1e-12
            wsafe = np.where(tiny, 1.0, w)
            t = (u - lo) / wsafe
            delta = vA(hi) - v_lo
            return np.where(tiny, dvD(lo), delta * (beta - 2.0 * t) / ((beta - 1.0) * wsafe))
        if w <= 1e-12:
            return dvD(lo)
        t = (u - lo) / w
        delta = vA(hi) - v_lo
        return delta * (beta - 2.0 * t) / ((beta - 1.0) * w)

    return CurveFamily(
        name=name, vbar=vbar, u0A=u0A, u_c=u_c, v_c=v_c, h_c=h_c,
        vA=vA, vD=vD, vS=vS, dvA=dvA, dvD=dvD, dvS_u=dvS_u,
        uA=uA, uD=uD, hA=hA, hD=hD,
        params={"vbar": vbar, "u0A": u0A, "band_c1": band_c1,
                "band_c2": band_c2, "beta": beta},
    )


def default_family() -> CurveFamily:
    return make_family()


def family_from_json(source: str | dict) -> CurveFamily:
    """Load a family from a JSON document (text or parsed dict).

    Accepted forms: {"builtin": "default-concave-v1"} or
    {"custom": {"vbar": ..., "u0A": ..., "band_c1": ..., "band_c2": ..., "beta": ...}}.
    """
    doc = json.loads(source) if isinstance(source, str) else source
    if "builtin" in doc:
        if doc["builtin"] != "default-concave-v1":
            raise DomainError(f"unknown builtin family: {doc['builtin']!r}")
        return default_family()
    if "custom" in doc:
        allowed = {"vbar", "u0A", "band_c1", "band_c2", "beta", "name"}
        bad = set(doc["custom"]) - allowed
        if bad:
            raise DomainError(f"unknown family parameters: {sorted(bad)}")
        return make_family(**{**{"name": "custom"}, **doc["custom"]})
    raise DomainError("family document needs a 'builtin' or 'custom' key")


def velocity(fam: CurveFamily, s: HState) -> float:
    """Velocity law: vD below the band, vA above, vS inside."""
    if s.u < 1.0 or s.h < 1.0:
        raise DomainError(f"state out of domain: u={s.u}, h={s.h} (need u,h >= 1)")
    ud = fam.uD(s.h)
    if s.u <= ud:
        return fam.vD(s.u)
    if s.u >= fam.uA(s.h):
        return fam.vA(s.u)
    return fam.vS(s.u, s.h)


def velocity_grid(fam: CurveFamily, u: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Vectorized velocity law for cell arrays."""
    ud = fam.uD(h)
    ua = fam.uA(h)
    return np.where(u <= ud, fam.vD(u), np.where(u >= ua, fam.vA(u), fam.vS(u, h)))


def branch_slope(fam: CurveFamily, s: HState) -> float:
    """dv/du at the state, on whichever branch velocity() uses there."""
    if s.u <= fam.uD(s.h):
        return fam.dvD(s.u)
    if s.u >= fam.uA(s.h):
        return fam.dvA(s.u)
    return fam.dvS_u(s.u, s.h)


def in_band(fam: CurveFamily, s: HState, tol: float = BAND_TOL) -> bool:
    return fam.uD(s.h) - tol <= s.u <= fam.uA(s.h) + tol


def mode_of(fam: CurveFamily, s: HState, du_dt_sign: int) -> DriverMode:
    """Acceleration on the band top while opening up, deceleration on the
    band bottom while closing in, scanning otherwise."""
    scale = max(1.0, abs(s.u))
    if du_dt_sign > 0 and abs(s.u - fam.uA(s.h)) <= 1e-12 * scale:
        return DriverMode.ACCELERATION
    if du_dt_sign < 0 and abs(s.u - fam.uD(s.h)) <= 1e-12 * scale:
        return DriverMode.DECELERATION
    return DriverMode.SCANNING


def from_eulerian(rho: float, h: float) -> HState:
    if rho <= 0.0:
        raise DomainError(f"density must be positive, got {rho}")
    return HState(1.0 / rho, h)


def to_eulerian(s: HState) -> tuple[float, float]:
    return (1.0 / s.u, s.h)


def validate_family(
    fam: CurveFamily,
    grid_n: int = 400,
    h_window: tuple[float, float] = (1.02, 8.0),
    tol: float = 1e-9,
) -> ValidationReport:
    """Sample a lattice over the band and report every violated inequality.

    Checks: monotonicity of vA, vD and of vS in u; sign-definite monotonicity
    of vS in h at fixed u (increasing on the congested side of the band,
    decreasing on the free side -- scanning curves must not cross); concavity
    of all three laws in u; band ordering uA >= uD away from h_c; junction
    continuity; inverse round-trips; strictly positive one-sided vS slope at
    both junctions.
    """
    if grid_n < 2:
        raise DomainError("grid_n must be >= 2")
    bad: list[Violation] = []
    n_checked = 0
    h_lo, h_hi = h_window
    hs = [h_lo + (h_hi - h_lo) * i / (grid_n - 1) for i in range(grid_n)]
    ts = [i / (grid_n - 1) for i in range(grid_n)]

    def flag(check, u, h, mag):
        bad.append(Violation(check, float(u), float(h), float(mag)))

    # extremal curves: monotone increasing and concave on a u-grid
    u_lo = 1.0
    u_hi = fam.uA(h_hi) + 1.0
    us = [u_lo + (u_hi - u_lo) * i / (grid_n - 1) for i in range(grid_n)]
    du = us[1] - us[0]
    vDs = [fam.vD(u) for u in us]
    vAs = [fam.vA(u) for u in us]
    for i in range(1, grid_n):
        n_checked += 2
        if vDs[i] - vDs[i - 1] <= tol * du:
            flag("vD-monotone", us[i], 0.0, vDs[i] - vDs[i - 1])
        if us[i - 1] > fam.u0A * 1.01 and vAs[i] - vAs[i - 1] <= tol * du:
            flag("vA-monotone", us[i], 0.0, vAs[i] - vAs[i - 1])
    for i in range(1, grid_n - 1):
        n_checked += 2
        d2 = vDs[i + 1] - 2.0 * vDs[i] + vDs[i - 1]
        if d2 >= tol * du:
            flag("vD-concave", us[i], 0.0, d2)
        if us[i - 1] > fam.u0A * 1.01:
            d2 = vAs[i + 1] - 2.0 * vAs[i] + vAs[i - 1]
            if d2 >= tol * du:
                flag("vA-concave", us[i], 0.0, d2)

    # crossing point consistency
    n_checked += 3
    if abs(fam.vA(fam.u_c) - fam.vD(fam.u_c)) > 1e-10:
        flag("crossing", fam.u_c, fam.h_c, fam.vA(fam.u_c) - fam.vD(fam.u_c))
    if abs(fam.hA(fam.uA(fam.h_c)) - fam.h_c) > 1e-10:
        flag("inverse-hA", fam.u_c, fam.h_c, fam.hA(fam.uA(fam.h_c)) - fam.h_c)
    if abs(fam.hD(fam.uD(fam.h_c)) - fam.h_c) > 1e-10:
        flag("inverse-hD", fam.u_c, fam.h_c, fam.hD(fam.uD(fam.h_c)) - fam.h_c)

    for h in hs:
        lo = fam.uD(h)
        hi = fam.uA(h)
        w = hi - lo
        n_checked += 1
        if w < -tol:
            flag("band-ordering", lo, h, w)
            continue
        if abs(w) <= 1e-9 and abs(h - fam.h_c) > 1e-6:
            flag("band-collapse", lo, h, w)
        n_checked += 2
        if abs(fam.hA(hi) - h) > 1e-10 * max(1.0, h):
            flag("inverse-hA", hi, h, fam.hA(hi) - h)
        if abs(fam.hD(lo) - h) > 1e-10 * max(1.0, h):
            flag("inverse-hD", lo, h, fam.hD(lo) - h)
        if w <= 1e-6:
            continue
        vals = [fam.vS(lo + t * w, h) for t in ts]
        n_checked += 2
        if abs(vals[0] - fam.vD(lo)) > tol:
            flag("junction-vD", lo, h, vals[0] - fam.vD(lo))
        if abs(vals[-1] - fam.vA(hi)) > tol:
            flag("junction-vA", hi, h, vals[-1] - fam.vA(hi))
        step = w / (grid_n - 1)
        for i in range(1, grid_n):
            n_checked += 1
            if vals[i] - vals[i - 1] <= tol * step:
                flag("vS-monotone-u", lo + ts[i] * w, h, vals[i] - vals[i - 1])
        for i in range(1, grid_n - 1):
            n_checked += 1
            d2 = vals[i + 1] - 2.0 * vals[i] + vals[i - 1]
            if d2 >= tol * step:
                flag("vS-concave-u", lo + ts[i] * w, h, d2)
        # one-sided junction slopes: sign compatibility with the extremal curves
        eps = 1e-6 * w
        n_checked += 2
        slope_lo = (fam.vS(lo + eps, h) - vals[0]) / eps
        slope_hi = (vals[-1] - fam.vS(hi - eps, h)) / eps
        if slope_lo <= 1e-7:
            flag("junction-slope-vD", lo, h, slope_lo)
        if slope_hi <= 1e-7:
            flag("junction-slope-vA", hi, h, slope_hi)

    # vS monotone in h at fixed u: increasing below h_c, decreasing above
    for u in us:
        band_hs = [h for h in hs if fam.uD(h) + 1e-6 < u < fam.uA(h) - 1e-6]
        prev = None
        for h in band_hs:
            v = fam.vS(u, h)
            if prev is not None:
                n_checked += 1
                dh = h - prev[0]
                dv = v - prev[1]
                if h <= fam.h_c and dv <= tol * dh:
                    flag("vS-monotone-h", u, h, dv)
                elif prev[0] >= fam.h_c and dv >= -tol * dh:
                    flag("vS-monotone-h", u, h, dv)
            prev = (h, v)

    return ValidationReport(passed=not bad, violations=tuple(bad), n_checked=n_checked)
