"""Wavefront tracking: piecewise-constant evolution by Riemann fans.

Fronts are discontinuities moving at constant (nonpositive) speed between
interactions.  Rarefaction fans are discretized into staircases of small
jumps, each carrying its own Rankine-Hugoniot speed, and re-discretized
whenever an interaction re-solves a Riemann problem.  Topology is an open
lane (fixed far-field states) or a periodic ring of circumference L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .curves import CurveFamily, HState, velocity
from .errors import NoSolutionError
from .riemann import RiemannFan, solve_riemann, solve_riemann_overbraking
from .waves import Wave, shock_speed

TIME_TIE_TOL = 1e-12


@dataclass(frozen=True)
class Front:
    x: float
    left: HState
    right: HState
    speed: float
    kind: str


@dataclass
class FrontSet:
    t: float
    fronts: list[Front]
    topology: str  # "open" | "ring"
    period: float | None = None
    far_left: HState | None = None   # open topology only
    far_right: HState | None = None

    def copy(self) -> "FrontSet":
        return FrontSet(self.t, list(self.fronts), self.topology, self.period,
                        self.far_left, self.far_right)

    def state_left_of(self, i: int) -> HState:
        if i > 0:
            return self.fronts[i - 1].right
        if self.topology == "ring":
            return self.fronts[-1].right
        return self.far_left

    def states(self) -> list[HState]:
        """All zone states, left to right."""
        if not self.fronts:
            return [self.far_left] if self.far_left is not None else []
        out = [] if self.topology == "ring" else [self.far_left]
        out.extend(f.right for f in self.fronts)
        return out


@dataclass(frozen=True)
class Event:
    number: int
    t: float
    x: float
    incoming: tuple[Wave, ...]
    outgoing: tuple[Wave, ...]


@dataclass
class TrackedSolution:
    initial: FrontSet
    checkpoints: list[FrontSet] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    truncated: bool = False

    def final(self) -> FrontSet:
        return self.checkpoints[-1]


def _wrap(x: float, L: float) -> float:
    return (x + 0.5 * L) % L - 0.5 * L


def _front_waves(fam: CurveFamily, fan: RiemannFan, delta_v: float) -> list[tuple[HState, HState, float, str]]:
    """Flatten a fan into front jumps (left, right, speed, kind); rarefactions
    become staircases with velocity increments at most delta_v."""
    out = []
    for w in fan.waves:
        if w.is_shock:
            out.append((w.left, w.right, w.speed, w.kind))
            continue
        dv = velocity(fam, w.right) - velocity(fam, w.left)
        n = max(1, int(math.ceil(abs(dv) / delta_v)))
        states = [w.left]
        for k in range(1, n):
            v_k = velocity(fam, w.left) + dv * k / n
            states.append(_state_on_branch(fam, w, v_k))
        states.append(w.right)
        for a, b in zip(states, states[1:]):
            if abs(b.u - a.u) < 1e-13:
                continue
            out.append((a, b, shock_speed(fam, a, b), w.kind))
    return out


def _state_on_branch(fam: CurveFamily, w: Wave, v_target: float) -> HState:
    from scipy.optimize import brentq
    if w.kind == "AR":
        u = brentq(lambda u: fam.vA(u) - v_target, w.left.u, w.right.u, xtol=1e-14)
        return HState(u, fam.hA(u))
    h = w.left.h
    u = brentq(lambda u: fam.vS(u, h) - v_target, w.left.u, w.right.u, xtol=1e-14)
    return HState(u, h)


def init_fronts(fam: CurveFamily, jumps: list[float], states: list[HState],
                delta_v: float = 1e-3, topology: str = "open",
                period: float | None = None,
                policy: dict[int, float] | None = None) -> tuple[FrontSet, list[Event]]:
    """Solve the Riemann problem at every initial jump and lay down fronts.

    Open lane: len(states) == len(jumps) + 1, states[i] between jumps[i-1] and
    jumps[i].  Ring: len(states) == len(jumps), states[i] on (jumps[i],
    jumps[i+1]) cyclically; positions live in [-L/2, L/2).

    policy maps an initial-jump index to an over-braking speed v2; those jumps
    are solved with the over-braking solver instead of the rational one.
    """
    policy = policy or {}
    if topology == "ring":
        if period is None or period <= 2.0:
            raise NoSolutionError("ring needs a period L > 2")
        if len(states) != len(jumps):
            raise NoSolutionError("ring needs one state per jump")
    else:
        if len(states) != len(jumps) + 1:
            raise NoSolutionError("open lane needs one more state than jumps")
    fronts: list[Front] = []
    events: list[Event] = []
    for j, x in enumerate(jumps):
        if topology == "ring":
            left = states[j - 1]
            right = states[j]
            x = _wrap(x, period)
        else:
            left = states[j]
            right = states[j + 1]
        if abs(left.u - right.u) < 1e-13 and abs(left.h - right.h) < 1e-13:
            continue
        if j in policy:
            fan = solve_riemann_overbraking(fam, left, right, policy[j])
        else:
            fan = solve_riemann(fam, left, right)
        pieces = _front_waves(fam, fan, delta_v)
        events.append(Event(j, 0.0, x,
                            (Wave("ST", left, right, speed=None),),
                            tuple(Wave(k, a, b, speed=s) for a, b, s, k in pieces)))
        for a, b, s, k in pieces:
            fronts.append(Front(x, a, b, s, k))
    fronts.sort(key=lambda f: f.x)
    fs = FrontSet(0.0, fronts, topology, period,
                  far_left=states[0] if topology == "open" else None,
                  far_right=states[-1] if topology == "open" else None)
    return fs, events


def next_interaction(fs: FrontSet) -> tuple[float, int] | None:
    """Earliest crossing time of adjacent fronts under linear motion; the
    returned index is the left member of the colliding pair (ring: may be the
    seam pair last-first)."""
    n = len(fs.fronts)
    if n < 2:
        return None
    best = None
    pairs = range(n - 1) if fs.topology == "open" else range(n)
    for i in pairs:
        a = fs.fronts[i]
        b = fs.fronts[(i + 1) % n]
        gap = b.x - a.x
        if i == n - 1:
            gap += fs.period
        rate = a.speed - b.speed
        if rate <= 1e-14:
            continue
        t_star = fs.t + max(gap, 0.0) / rate
        if best is None or t_star < best[0]:
            best = (t_star, i)
    return best


def _advance(fs: FrontSet, t_new: float):
    dt = t_new - fs.t
    fronts = [replace(f, x=f.x + f.speed * dt) for f in fs.fronts]
    if fs.topology == "ring":
        fronts = [replace(f, x=_wrap(f.x, fs.period)) for f in fronts]
        # wrapping can rotate the order; restore it cyclically
        if fronts:
            k = min(range(len(fronts)), key=lambda i: fronts[i].x)
            fronts = fronts[k:] + fronts[:k]
    fs.fronts = fronts
    fs.t = t_new


def _collision_clusters(fs: FrontSet, t_star: float) -> list[list[int]]:
    """Indices of fronts that meet at t_star, grouped into adjacent clusters."""
    n = len(fs.fronts)
    colliding_pairs = []
    pairs = range(n - 1) if fs.topology == "open" else range(n)
    for i in pairs:
        a = fs.fronts[i]
        b = fs.fronts[(i + 1) % n]
        gap = b.x - a.x
        if i == n - 1:
            gap += fs.period
        rate = a.speed - b.speed
        if rate <= 1e-14:
            continue
        if fs.t + max(gap, 0.0) / rate <= t_star + TIME_TIE_TOL:
            colliding_pairs.append(i)
    clusters: list[list[int]] = []
    for i in colliding_pairs:
        j = (i + 1) % n
        if clusters and clusters[-1][-1] == i:
            clusters[-1].append(j)
        else:
            clusters.append([i, j])
    # merge a wrap-around cluster with the first one if they touch
    if len(clusters) > 1 and clusters[-1][-1] == clusters[0][0]:
        clusters[0] = clusters[-1][:-1] + clusters[0]
        clusters.pop()
    return clusters


def evolve(fam: CurveFamily, fs: FrontSet, t_end: float,
           max_events: int = 10_000, delta_v: float = 1e-3,
           event_policy: dict[int, float] | None = None,
           init_events: list[Event] | None = None) -> TrackedSolution:
    """Advance to each interaction in turn, replacing colliding fronts by the
    Riemann fan between their outer states, until t_end or the event budget.

    event_policy maps an event number (continuing the initial-jump numbering)
    to an over-braking speed for that single resolution.
    """
    event_policy = event_policy or {}
    fs = fs.copy()
    sol = TrackedSolution(initial=fs.copy(),
                          events=list(init_events or []))
    n_events = len(sol.events)
    while True:
        nxt = next_interaction(fs)
        if nxt is None or nxt[0] >= t_end:
            _advance(fs, t_end)
            sol.checkpoints.append(fs.copy())
            return sol
        t_star, _ = nxt
        _advance(fs, t_star)
        clusters = _collision_clusters(fs, t_star)
        # resolve left to right; splice from the back so indices stay valid.
        # A seam-wrapping cluster rebuilds the whole list, so when several
        # clusters land on one instant the wrapped one waits a round (it
        # re-triggers immediately at the same time).
        if len(clusters) > 1:
            clusters = [c for c in clusters if c == sorted(c)] or clusters[:1]
        new_fronts = list(fs.fronts)
        for cluster in sorted(clusters, key=lambda c: -c[0]):
            idxs = [k % len(fs.fronts) for k in cluster]
            left = fs.state_left_of(idxs[0])
            right = fs.fronts[idxs[-1]].right
            x_c = fs.fronts[idxs[0]].x
            incoming = tuple(Wave(fs.fronts[k].kind, fs.fronts[k].left,
                                  fs.fronts[k].right, speed=fs.fronts[k].speed)
                             for k in idxs)
            if n_events in event_policy:
                fan = solve_riemann_overbraking(fam, left, right,
                                                event_policy[n_events])
            else:
                fan = solve_riemann(fam, left, right)
            pieces = _front_waves(fam, fan, delta_v)
            outgoing = tuple(Wave(k, a, b, speed=s) for a, b, s, k in pieces)
            sol.events.append(Event(n_events, t_star, x_c, incoming, outgoing))
            n_events += 1
            replacement = [Front(x_c, a, b, s, k) for a, b, s, k in pieces]
            if idxs == sorted(idxs):
                new_fronts[idxs[0]:idxs[-1] + 1] = replacement
            else:  # wrapped cluster on the ring
                keep = [new_fronts[k] for k in range(len(fs.fronts)) if k not in idxs]
                new_fronts = keep + replacement
        new_fronts.sort(key=lambda f: f.x)
        fs.fronts = new_fronts
        sol.checkpoints.append(fs.copy())
        if len(sol.events) - len(init_events or []) >= max_events:
            sol.truncated = True
            sol.checkpoints.append(fs.copy())
            return sol


def track(fam: CurveFamily, jumps: list[float], states: list[HState],
          t_end: float, delta_v: float = 1e-3, topology: str = "open",
          period: float | None = None, policy: dict[int, float] | None = None,
          max_events: int = 10_000) -> TrackedSolution:
    """Convenience wrapper: init_fronts + evolve with shared event numbering."""
    fs, init_events = init_fronts(fam, jumps, states, delta_v, topology,
                                  period, policy)
    return evolve(fam, fs, t_end, max_events=max_events, delta_v=delta_v,
                  event_policy=policy, init_events=init_events)


def frontset_at(sol: TrackedSolution, t: float) -> FrontSet:
    """FrontSet advanced to time t (t within the solved horizon)."""
    base = sol.initial
    for ck in sol.checkpoints:
        if ck.t <= t + TIME_TIE_TOL:
            base = ck
        else:
            break
    out = base.copy()
    _advance(out, max(t, out.t))
    return out


def sample(sol: TrackedSolution, t: float, xs: list[float]) -> list[HState]:
    """Piecewise-constant lookup at time t."""
    fs = frontset_at(sol, t)
    out = []
    for x in xs:
        if fs.topology == "ring":
            x = _wrap(x, fs.period)
        state = None
        if not fs.fronts:
            state = fs.far_left
        elif fs.topology == "open":
            state = fs.far_left
            for f in fs.fronts:
                if f.x <= x:
                    state = f.right
                else:
                    break
        else:
            state = fs.fronts[-1].right
            for f in fs.fronts:
                if f.x <= x:
                    state = f.right
                else:
                    break
        out.append(state)
    return out
