"""Exact solver for the degenerate scalar law u_t - v(u)_x = 0.

When every driver stays on one velocity branch (a single scanning curve, or
the pure deceleration curve), the system collapses to a scalar conservation
law with convex flux g(u) = -v(u).  This module evaluates the entropy
solution pointwise by the variational (Hopf/Lax-Oleinik) formula, built only
from blackbox evaluations of v and v_u, so it is independent of the wave and
Riemann machinery it serves as an oracle for.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ScalarLaw:
    """Entropy solution of u_t - v(u)_x = 0 with piecewise-constant data.

    xs: jump positions (increasing); us: states, len(xs) + 1, us[i] on
    (xs[i-1], xs[i]).  v must be strictly increasing and concave on the data
    hull; v_u its derivative.
    """

    v: callable
    v_u: callable
    xs: list
    us: list

    def __post_init__(self):
        self.xs = [float(x) for x in self.xs]
        self.us = [float(u) for u in self.us]
        if len(self.us) != len(self.xs) + 1:
            raise ValueError("need one more state than jump positions")
        margin = 1e-9
        self._u_lo = min(self.us) - margin
        self._u_hi = max(self.us) + margin
        # characteristic slope range (v_u decreasing in u by concavity)
        self._q_lo = float(self.v_u(self._u_hi))
        self._q_hi = float(self.v_u(self._u_lo))
        # primitive of the initial data at the jump positions
        knots = [self.xs[0] - 1.0] + self.xs + [self.xs[-1] + 1.0] if self.xs else [0.0]
        prim = [0.0]
        for i in range(1, len(knots)):
            prim.append(prim[-1] + self.us[min(i - 1, len(self.us) - 1)]
                        * (knots[i] - knots[i - 1]))
        self._knots = np.array(knots)
        self._prim = np.array(prim)
        self._build_lagrangian_table()

    def _v_u_inverse(self, q: float) -> float:
        q = min(max(q, self._q_lo), self._q_hi)
        lo, hi = self._u_lo, self._u_hi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.v_u(mid) > q:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _build_lagrangian_table(self):
        """L(q) = sup_u (q u + v(u)) for q in [-q_hi, -q_lo], tabulated densely.

        L is the Legendre transform of the convex flux g = -v; the supremum is
        attained at u with v_u(u) = -q, clamped to the data hull.
        """
        n = 20001
        qs = np.linspace(-self._q_hi, -self._q_lo, n)
        # vectorized bisection for u* with v_u(u*) = -q
        lo = np.full(n, self._u_lo)
        hi = np.full(n, self._u_hi)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            take_lo = self._eval(self.v_u, mid) > -qs
            lo = np.where(take_lo, mid, lo)
            hi = np.where(take_lo, hi, mid)
        u_star = 0.5 * (lo + hi)
        self._Lq = qs
        self._Lv = qs * u_star + self._eval(self.v, u_star)

    @staticmethod
    def _eval(f, arr: np.ndarray) -> np.ndarray:
        """Apply a scalar-or-array callable over an array."""
        try:
            out = np.asarray(f(arr), dtype=float)
            if out.shape == arr.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([f(float(x)) for x in arr])

    def _prim_extrap(self, y):
        y = np.asarray(y, dtype=float)
        core = np.interp(y, self._knots, self._prim)
        below = y < self._knots[0]
        above = y > self._knots[-1]
        if np.any(below):
            core = np.where(below, self._prim[0] + (y - self._knots[0]) * self.us[0], core)
        if np.any(above):
            core = np.where(above, self._prim[-1] + (y - self._knots[-1]) * self.us[-1], core)
        return core

    def _lagrangian(self, q):
        q = np.clip(q, self._Lq[0], self._Lq[-1])
        return np.interp(q, self._Lq, self._Lv)

    def sample_one(self, x: float, t: float) -> float:
        if t <= 0.0:
            idx = int(np.searchsorted(self._knots[1:-1], x, side="right"))
            return self.us[min(idx, len(self.us) - 1)]
        # characteristics run leftward: the minimizing base point lies at
        # y = x + t v_u(u), so y - x in t * [q_lo, q_hi]
        y_lo = x + t * self._q_lo - 1e-12
        y_hi = x + t * self._q_hi + 1e-12
        grid = np.linspace(y_lo, y_hi, 801)
        phi = self._prim_extrap(grid) + t * self._lagrangian((x - grid) / t)
        k = int(np.argmin(phi))
        a = grid[max(k - 1, 0)]
        b = grid[min(k + 1, len(grid) - 1)]
        # golden-section refinement of the variational minimum
        gr = 0.6180339887498949
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        fc = float(self._prim_extrap(c) + t * self._lagrangian((x - c) / t))
        fd = float(self._prim_extrap(d) + t * self._lagrangian((x - d) / t))
        for _ in range(80):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - gr * (b - a)
                fc = float(self._prim_extrap(c) + t * self._lagrangian((x - c) / t))
            else:
                a, c, fc = c, d, fd
                d = a + gr * (b - a)
                fd = float(self._prim_extrap(d) + t * self._lagrangian((x - d) / t))
            if b - a < 1e-12 * max(1.0, abs(b)):
                break
        y_star = 0.5 * (a + b)
        return self._v_u_inverse((y_star - x) / t)

    def sample(self, t: float, xs) -> np.ndarray:
        return np.array([self.sample_one(float(x), t) for x in xs])

    def slow_zone_width(self, t: float, v_threshold: float,
                        x_lo: float, x_hi: float, n: int = 2000) -> float:
        xs = np.linspace(x_lo, x_hi, n)
        us = self.sample(t, xs)
        vs = np.array([self.v(u) for u in us])
        return float(np.sum(vs < v_threshold)) * (x_hi - x_lo) / n
