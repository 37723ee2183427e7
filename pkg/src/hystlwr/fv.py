"""First-order upwind finite-volume scheme with a discrete hysteresis update.

The conservation law u_t - v(u,h)_x = 0 has characteristic speed -v_u < 0, so
information flows right to left in the car index: each cell is updated from
its right neighbor.  The hysteresis parameter follows by projection: a cell
pushed above its band top rides the acceleration curve (h = hA(u)), below its
band bottom the deceleration curve (h = hD(u)), and keeps h otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import CurveFamily, HState, velocity_grid
from .errors import DomainError


@dataclass
class GridState:
    dx: float
    u: np.ndarray
    h: np.ndarray
    topology: str = "ring"          # "ring" | "open"
    t: float = 0.0
    right_ghost: HState | None = None  # open topology: fixed lead car

    def __post_init__(self):
        if self.dx <= 0.0:
            raise DomainError("dx must be positive")
        self.u = np.asarray(self.u, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        if self.u.size == 0:
            raise DomainError("empty grid")
        if self.topology == "open" and self.right_ghost is None:
            raise DomainError("open topology needs a right ghost state")

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.u.size) + 0.5) * self.dx

    def v(self, fam: CurveFamily) -> np.ndarray:
        return velocity_grid(fam, self.u, self.h)

    def copy(self) -> "GridState":
        return GridState(self.dx, self.u.copy(), self.h.copy(), self.topology,
                         self.t, self.right_ghost)


def grid_from_datum(fam: CurveFamily, jumps: list[float], states: list[HState],
                    x_lo: float, x_hi: float, dx: float,
                    topology: str = "open") -> GridState:
    """Sample a piecewise-constant datum onto cells; open lanes take the last
    state as the fixed lead car."""
    n = int(round((x_hi - x_lo) / dx))
    xc = x_lo + (np.arange(n) + 0.5) * dx
    u = np.empty(n)
    h = np.empty(n)
    for i, x in enumerate(xc):
        k = 0
        for j, xj in enumerate(jumps):
            if x >= xj:
                k = j + 1
        u[i] = states[k].u
        h[i] = states[k].h
    ghost = states[-1] if topology == "open" else None
    return GridState(dx, u, h, topology, 0.0, ghost)


def _branch_slopes(fam: CurveFamily, u: np.ndarray, h: np.ndarray) -> np.ndarray:
    ud = fam.uD(h)
    ua = fam.uA(h)
    return np.where(u <= ud, fam.dvD(u), np.where(u >= ua, fam.dvA(u),
                                                  fam.dvS_u(u, h)))


def _v_right(fam: CurveFamily, g: GridState, v: np.ndarray) -> np.ndarray:
    if g.topology == "ring":
        return np.roll(v, -1)
    v_ghost = velocity_grid(fam, np.array([g.right_ghost.u]),
                            np.array([g.right_ghost.h]))[0]
    return np.concatenate([v[1:], [v_ghost]])


def _path_velocity(fam: CurveFamily, u: float, h: float) -> float:
    """Velocity seen while u moves away from (u, h) under the projection rule:
    the frozen scanning curve inside the band, the ridden extremal curve
    outside it."""
    if u <= fam.uD(h):
        return fam.vD(u)
    if u >= fam.uA(h):
        return fam.vA(u)
    return fam.vS(u, h)


def _u_equilibrium(fam: CurveFamily, u: float, h: float, v_target: float) -> float:
    """Spacing at which the projection path from (u, h) reaches v_target."""
    if v_target < _path_velocity(fam, u, h):
        lo, hi = 1.0 + 1e-12, u
    else:
        lo, hi = u, max(2.0 * u, 4.0)
        while _path_velocity(fam, hi, h) < v_target:
            hi *= 2.0
            if hi > 1e9:
                return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _path_velocity(fam, mid, h) < v_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cfl_dt(fam: CurveFamily, g: GridState, cfl: float = 0.9) -> float:
    """dt = cfl dx / max |characteristic speed|, further capped at hysteresis
    jumps.  Across such an interface the velocity difference is not controlled
    by slope times the spacing difference, so a slope-based step can drive a
    cell far past its local equilibrium -- and the projection then freezes the
    overshoot into h permanently.  The cap keeps each step on the near side of
    the equilibrium spacing, approaching it geometrically."""
    if not 0.0 < cfl <= 1.0:
        raise DomainError("cfl must lie in (0, 1]")
    slope = float(np.max(_branch_slopes(fam, g.u, g.h)))
    if slope <= 0.0:
        raise DomainError("degenerate grid: zero characteristic speed everywhere")
    dt = cfl * g.dx / slope
    v = g.v(fam)
    dv = _v_right(fam, g, v) - v
    # flag only interfaces whose velocity jump exceeds what the branch slopes
    # explain; elsewhere the slope bound above is the standard CFL condition
    if g.topology == "ring":
        u_right = np.roll(g.u, -1)
    else:
        u_right = np.concatenate([g.u[1:], [g.right_ghost.u]])
    excess = np.abs(dv) - 1.5 * slope * np.abs(u_right - g.u)
    for i in np.nonzero(excess > 1e-12)[0]:
        u_eq = _u_equilibrium(fam, float(g.u[i]), float(g.h[i]),
                              float(v[i] + dv[i]))
        gap = abs(u_eq - g.u[i])
        if gap > 1e-14:
            dt = min(dt, cfl * g.dx * gap / abs(dv[i]))
    return dt


def update_hysteresis(fam: CurveFamily, u_old: float, h_old: float,
                      u_new: float) -> float:
    """Projection form of the mode rule for one cell."""
    if u_new > fam.uA(h_old):
        return fam.hA(u_new)
    if u_new < fam.uD(h_old):
        return fam.hD(u_new)
    return h_old


def _update_hysteresis_grid(fam: CurveFamily, h_old: np.ndarray,
                            u_new: np.ndarray) -> np.ndarray:
    ua = fam.uA(h_old)
    ud = fam.uD(h_old)
    h = np.array(h_old)
    accel = u_new > ua
    decel = u_new < ud
    if np.any(accel):
        h[accel] = fam.hA(u_new[accel])
    if np.any(decel):
        h[decel] = fam.hD(u_new[decel])
    return h


@dataclass
class StepLog:
    max_clamp: float = 0.0


def step(fam: CurveFamily, g: GridState, dt: float,
         log: StepLog | None = None) -> GridState:
    """One upwind step: flux with frozen h, then the hysteresis projection."""
    v = g.v(fam)
    v_right = _v_right(fam, g, v)
    u_new = g.u + (dt / g.dx) * (v_right - v)
    h_new = _update_hysteresis_grid(fam, g.h, u_new)
    # projection leaves only floating-point dust outside the band; clamp it
    lo = fam.uD(h_new)
    hi = fam.uA(h_new)
    over = np.maximum(np.maximum(lo - u_new, u_new - hi), 0.0)
    worst = float(np.max(over)) if over.size else 0.0
    if worst > 1e-9:
        raise DomainError(f"band violation {worst} after step at t={g.t}")
    if log is not None:
        log.max_clamp = max(log.max_clamp, worst)
    u_new = np.clip(u_new, lo, hi)
    return GridState(g.dx, u_new, h_new, g.topology, g.t + dt, g.right_ghost)


def total_variation(vals: np.ndarray, topology: str) -> float:
    tv = float(np.sum(np.abs(np.diff(vals))))
    if topology == "ring" and vals.size > 1:
        tv += abs(float(vals[0] - vals[-1]))
    return tv


@dataclass
class FvResult:
    snapshots: dict = field(default_factory=dict)   # t -> GridState
    times: list = field(default_factory=list)
    tv_v: list = field(default_factory=list)
    sup_dev: list = field(default_factory=list)
    mass: list = field(default_factory=list)        # sum(u) * dx
    max_clamp: float = 0.0
    final: GridState | None = None


def run(fam: CurveFamily, g0: GridState, t_end: float, cfl: float = 0.9,
        snapshot_times: tuple[float, ...] = (),
        reference_v: float | None = None,
        observe_every: int = 10) -> FvResult:
    """Step to t_end, recording TV(v), sup deviation from reference_v, and
    snapshots at the requested times."""
    g = g0.copy()
    res = FvResult()
    log = StepLog()
    pending = sorted(snapshot_times)
    k = 0

    def observe():
        v = g.v(fam)
        res.times.append(g.t)
        res.tv_v.append(total_variation(v, g.topology))
        res.sup_dev.append(float(np.max(np.abs(v - reference_v)))
                           if reference_v is not None else 0.0)
        res.mass.append(float(np.sum(g.u)) * g.dx)

    observe()
    while g.t < t_end - 1e-12:
        dt = min(cfl_dt(fam, g, cfl), t_end - g.t)
        if pending and g.t + dt > pending[0] - 1e-12:
            dt = max(pending[0] - g.t, 1e-12)
        g = step(fam, g, dt, log)
        k += 1
        if pending and abs(g.t - pending[0]) <= 1e-9:
            res.snapshots[pending.pop(0)] = g.copy()
        if k % observe_every == 0:
            observe()
    observe()
    res.max_clamp = log.max_clamp
    res.final = g
    return res
